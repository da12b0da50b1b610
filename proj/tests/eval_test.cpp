#include <doctest.h>

#include "readi/eval.hpp"
#include "readi/qa_reasoner.hpp"
#include "readi/trace_io.hpp"
#include "test_support.hpp"

using readi::Constraint;
using readi::ConstraintOutcome;
using readi::GoldRecord;
using readi::Iteration;
using readi::KnowledgeGraph;
using readi::ReasoningPath;
using readi::SessionTrace;
using readi::Triple;

namespace {

// Hand-built trace: lpp/lip and evidence chosen for easy arithmetic.
SessionTrace make_trace(const std::string& id, std::size_t lpp, std::size_t lip,
                        bool compound_ending, std::size_t evidence_triples,
                        std::size_t edit_calls, std::vector<std::string> answers) {
    SessionTrace trace;
    trace.id = id;
    trace.question = "q " + id;
    trace.edit_calls = edit_calls;
    trace.answers = std::move(answers);

    Iteration iteration;
    Constraint constraint{"start", {}};
    for (std::size_t i = 0; i < lpp; ++i) {
        constraint.nl_relations.push_back("rel" + std::to_string(i));
    }
    iteration.path = ReasoningPath{{constraint}, id};
    ConstraintOutcome outcome;
    for (std::size_t i = 0; i < lip; ++i) {
        outcome.instantiated_relations.emplace_back("rel" + std::to_string(i),
                                                    "bound.rel" + std::to_string(i));
    }
    if (compound_ending) {
        outcome.error = readi::InstantiationError{readi::ErrorReason::CompoundEnding,
                                                  std::nullopt, std::nullopt, {"cvt"}};
    } else if (lip < lpp) {
        outcome.error = readi::InstantiationError{readi::ErrorReason::IrrelevantRelation,
                                                  lip, "rel" + std::to_string(lip), {}};
    }
    iteration.outcomes.push_back(outcome);
    trace.iterations.push_back(std::move(iteration));

    for (std::size_t i = 0; i < evidence_triples; ++i) {
        trace.merged.evidence_triples.insert(
            Triple{"e" + std::to_string(i), "r.r", "v" + std::to_string(i)});
    }
    return trace;
}

}  // namespace

TEST_SUITE_BEGIN("eval");

TEST_CASE("normalization strips case, articles, punctuation and extra spaces") {
    CHECK(readi::normalize_answer("The  De Smet") == "de smet");
    CHECK(readi::normalize_answer("  \"Germany.\" ") == "germany");
    CHECK(readi::normalize_answer("An   Answer") == "answer");
    CHECK(readi::normalize_answer("a") == "a");
}

TEST_CASE("hit@1 matches any prediction against any gold alias") {
    CHECK(readi::hit_at_1({"Germany"}, {"German", "Germany"}));
    CHECK_FALSE(readi::hit_at_1({}, {"x"}));
    CHECK(readi::hit_at_1({"The De Smet"}, {"De Smet"}));
    CHECK_FALSE(readi::hit_at_1({"France"}, {"Germany"}));
}

TEST_CASE("denotation accuracy is normalized set equality") {
    CHECK(readi::denotation_accuracy({"2004"}, {"2004"}));
    CHECK(readi::denotation_accuracy({"a", "b"}, {"b", "a"}));
    CHECK_FALSE(readi::denotation_accuracy({"a"}, {"a", "b"}));
}

TEST_CASE("answer coverage looks at friendly names of evidence entities") {
    KnowledgeGraph g = readi_test::load_fig3();
    SessionTrace covered;
    covered.merged.evidence_triples.insert(
        Triple{"cvt1", "location.adjoining_relationship.country", "Germany"});
    CHECK(readi::answer_coverage(covered, {"Germany"}, g));

    SessionTrace empty;
    CHECK_FALSE(readi::answer_coverage(empty, {"Germany"}, g));

    SessionTrace compounds_only;
    compounds_only.merged.evidence_triples.insert(
        Triple{"cvt1", "location.adjoining_relationship.country", "cvt1"});
    CHECK_FALSE(readi::answer_coverage(compounds_only, {"x"}, g));
}

TEST_CASE("golden traces score aip 1.0, isr 1.0, cer 0") {
    std::vector<SessionTrace> traces = {
        make_trace("g1", 3, 3, false, 4, 0, {"a"}),
        make_trace("g2", 4, 4, false, 2, 0, {"b"}),
        make_trace("g3", 2, 2, false, 1, 1, {"c"}),
    };
    auto metrics = readi::path_metrics(traces);
    CHECK(metrics.aip == 1.0);
    CHECK(metrics.isr == 1.0);
    CHECK(metrics.cer == 0.0);
    CHECK(metrics.lpp == doctest::Approx(3.0));
    CHECK(metrics.lip == doctest::Approx(3.0));
}

TEST_CASE("a half-instantiated path scores aip 0.5 and isr 0") {
    auto metrics = readi::path_metrics({make_trace("h", 4, 2, false, 0, 0, {})});
    CHECK(metrics.aip == doctest::Approx(0.5));
    CHECK(metrics.isr == 0.0);
}

TEST_CASE("three mixed traces match hand-computed means") {
    // lpp 4 lip 2; lpp 3 lip 3 with compound ending; lpp 0 lip 0.
    std::vector<SessionTrace> traces = {
        make_trace("t1", 4, 2, false, 5, 0, {"x"}),
        make_trace("t2", 3, 3, true, 2, 1, {"y"}),
        make_trace("t3", 0, 0, false, 0, 2, {}),
    };
    auto metrics = readi::path_metrics(traces);
    CHECK(metrics.lpp == doctest::Approx((4.0 + 3.0 + 0.0) / 3.0).epsilon(1e-12));
    CHECK(metrics.lip == doctest::Approx((2.0 + 3.0 + 0.0) / 3.0).epsilon(1e-12));
    CHECK(metrics.aip == doctest::Approx((0.5 + 1.0 + 0.0) / 3.0).epsilon(1e-12));
    CHECK(metrics.isr == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(metrics.cer == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(readi::path_metrics({}).lpp == 0.0);
}

TEST_CASE("initial-iteration metrics reproduce pre-edit numbers") {
    SessionTrace trace = make_trace("t", 3, 3, false, 0, 1, {});
    // Prepend a worse initial iteration: lpp 3, lip 1.
    SessionTrace initial = make_trace("t", 3, 1, false, 0, 0, {});
    trace.iterations.insert(trace.iterations.begin(), initial.iterations.front());
    auto final_metrics = readi::path_metrics({trace});
    auto init_metrics = readi::path_metrics({trace}, readi::IterationPick::Initial);
    CHECK(final_metrics.aip == doctest::Approx(1.0));
    CHECK(init_metrics.aip == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("fig3 single-session report") {
    KnowledgeGraph g = readi_test::load_fig3();
    auto index = readi_test::fig3_index(g);
    readi::Transcript transcript =
        readi::Transcript::from_file(readi_test::fixture_path("fig3_transcript.json"));
    SessionTrace trace = readi::run_session(readi_test::kFig3Question,
                                            {"France", "Nijmegen"}, g, index, transcript,
                                            {}, "fig3-q1");
    std::vector<GoldRecord> gold = {
        {"fig3-q1", readi_test::kFig3Question, {"France", "Nijmegen"}, "",
         {"Germany", "German"}}};
    auto report = readi::build_report({trace}, gold, g);
    CHECK(report.hit_at_1 == 1.0);
    CHECK(report.answer_coverage == 1.0);
    CHECK(report.avg_rk == doctest::Approx(5.0));
    CHECK(report.edit_call_histogram == std::map<std::size_t, double>{{1, 1.0}});
    CHECK(report.n_questions == 1);
    // #RK and the evidence rendering count come from the same set.
    CHECK(readi::serialize_evidence(trace.merged.evidence_triples, g).triple_count == 5);
}

TEST_CASE("zero questions produce an empty report") {
    KnowledgeGraph g = readi_test::load_fig3();
    auto report = readi::build_report({}, {}, g);
    CHECK(report.n_questions == 0);
    CHECK(report.hit_at_1 == 0.0);
    CHECK(report.edit_call_histogram.empty());
}

TEST_CASE("synthetic sessions aggregate to hand-computed values") {
    KnowledgeGraph g = readi_test::load_fig3();
    std::vector<SessionTrace> traces;
    std::vector<GoldRecord> gold;
    // Six hits out of ten; evidence counts 0..9; edit calls i % 3.
    for (int i = 0; i < 10; ++i) {
        std::string id = "s" + std::to_string(i);
        bool hit = i < 6;
        traces.push_back(make_trace(id, 2, 2, false, static_cast<std::size_t>(i),
                                    static_cast<std::size_t>(i % 3),
                                    {hit ? "gold" : "wrong"}));
        gold.push_back(GoldRecord{id, "q " + id, {"start"}, "", {"gold"}});
    }
    auto report = readi::build_report(traces, gold, g);
    CHECK(report.hit_at_1 == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(report.avg_rk == doctest::Approx(4.5).epsilon(1e-12));  // mean of 0..9
    CHECK(report.edit_call_histogram[0] == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(report.edit_call_histogram[1] == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(report.edit_call_histogram[2] == doctest::Approx(0.3).epsilon(1e-12));

    double total = 0.0;
    for (const auto& [_, ratio] : report.edit_call_histogram) {
        total += ratio;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("id mismatches are report errors listing the orphans") {
    KnowledgeGraph g = readi_test::load_fig3();
    std::vector<SessionTrace> traces = {make_trace("known", 1, 1, false, 0, 0, {})};
    std::vector<GoldRecord> gold = {{"other", "q", {}, "", {"a"}}};
    CHECK_THROWS_WITH_AS(readi::build_report(traces, gold, g),
                         doctest::Contains("known"), readi::ReportError);
}

TEST_CASE("coverage bounds accuracy when answers come from evidence") {
    KnowledgeGraph g = readi_test::load_fig3();
    std::vector<SessionTrace> traces;
    std::vector<GoldRecord> gold;
    for (int i = 0; i < 5; ++i) {
        std::string id = "c" + std::to_string(i);
        SessionTrace trace = make_trace(id, 1, 1, false, 0, 0, {});
        // Evidence mentioning Germany; the reasoner answered from it for
        // even questions and stayed silent otherwise.
        trace.merged.evidence_triples.insert(Triple{"France", "r.r", "Germany"});
        if (i % 2 == 0) {
            trace.answers = {"Germany"};
        }
        traces.push_back(trace);
        gold.push_back(GoldRecord{id, "q", {}, "", {"Germany"}});
    }
    auto report = readi::build_report(traces, gold, g);
    CHECK(report.answer_coverage >= report.hit_at_1);
}

TEST_CASE("reports are byte-identical across runs") {
    KnowledgeGraph g = readi_test::load_fig3();
    std::vector<SessionTrace> traces = {make_trace("r1", 3, 2, true, 4, 1, {"x"})};
    std::vector<GoldRecord> gold = {{"r1", "q", {}, "", {"x"}}};
    CHECK(readi::report_to_json(readi::build_report(traces, gold, g)) ==
          readi::report_to_json(readi::build_report(traces, gold, g)));
}

TEST_CASE("table reports score denotation accuracy") {
    readi::TableSessionTrace trace;
    trace.id = "lakes-q1";
    trace.answers = {"Lake Palas Tuzla"};
    trace.edit_calls = 0;
    std::vector<GoldRecord> gold = {
        {"lakes-q1", "q", {}, "lakes", {"Lake Palas Tuzla"}}};
    auto report = readi::build_table_report({trace}, gold);
    CHECK(report.denotation_accuracy == 1.0);
    CHECK(report.hit_at_1 == 1.0);
    CHECK(report.n_questions == 1);
}

TEST_CASE("dataset jsonl parses ids, entities and answers") {
    auto records = readi::load_dataset(readi_test::fixture_path("fig3.jsonl"));
    REQUIRE(records.size() == 1);
    CHECK(records[0].id == "fig3-q1");
    CHECK(records[0].topic_entities == std::vector<std::string>{"France", "Nijmegen"});
    CHECK(records[0].answers == std::vector<std::string>{"Germany", "German"});
    CHECK_THROWS_AS(readi::gold_from_json(R"({"id":"x","answers":[]})"),
                    readi::ReportError);
}

TEST_CASE("per-question csv lays out one line per trace") {
    KnowledgeGraph g = readi_test::load_fig3();
    std::vector<SessionTrace> traces = {make_trace("c1", 3, 2, false, 4, 1, {"x"})};
    std::vector<GoldRecord> gold = {{"c1", "q", {}, "", {"x"}}};
    std::string csv = readi::per_question_csv(traces, gold, g);
    CHECK(csv == "id,hit,denotation,coverage,rk,lpp,lip,edit_calls\n"
                 "c1,1,1,0,4,3,2,1\n");
}

TEST_SUITE_END();
