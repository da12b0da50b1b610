#include "readi/eval.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace readi {

namespace {

bool is_strippable_punct(unsigned char c) {
    return std::ispunct(c) != 0;
}

std::set<std::string> normalized_set(const std::vector<std::string>& values) {
    std::set<std::string> out;
    for (const std::string& v : values) {
        std::string n = normalize_answer(v);
        if (!n.empty()) {
            out.insert(std::move(n));
        }
    }
    return out;
}

const Iteration* picked_iteration(const SessionTrace& trace, IterationPick pick) {
    if (trace.iterations.empty()) {
        return nullptr;
    }
    return pick == IterationPick::Final ? &trace.iterations.back()
                                        : &trace.iterations.front();
}

}  // namespace

std::string normalize_answer(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    bool pending_space = false;
    for (unsigned char c : text) {
        if (std::isspace(c)) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) {
            out.push_back(' ');
            pending_space = false;
        }
        out.push_back(static_cast<char>(std::tolower(c)));
    }
    // Surrounding punctuation.
    std::size_t begin = 0;
    std::size_t end = out.size();
    while (begin < end && is_strippable_punct(static_cast<unsigned char>(out[begin]))) {
        ++begin;
    }
    while (end > begin && is_strippable_punct(static_cast<unsigned char>(out[end - 1]))) {
        --end;
    }
    out = out.substr(begin, end - begin);
    // One leading article.
    for (const char* article : {"the ", "an ", "a "}) {
        if (out.rfind(article, 0) == 0) {
            out = out.substr(std::string(article).size());
            break;
        }
    }
    return out;
}

bool hit_at_1(const std::vector<std::string>& predicted,
              const std::vector<std::string>& gold) {
    std::set<std::string> gold_set = normalized_set(gold);
    for (const std::string& p : predicted) {
        if (gold_set.count(normalize_answer(p))) {
            return true;
        }
    }
    return false;
}

bool denotation_accuracy(const std::vector<std::string>& predicted,
                         const std::vector<std::string>& gold) {
    return normalized_set(predicted) == normalized_set(gold);
}

bool answer_coverage(const SessionTrace& trace,
                     const std::vector<std::string>& gold,
                     const KnowledgeGraph& graph) {
    std::set<std::string> gold_set = normalized_set(gold);
    for (const Triple& t : trace.merged.evidence_triples) {
        if (gold_set.count(normalize_answer(graph.friendly_name(t.subject))) ||
            gold_set.count(normalize_answer(graph.friendly_name(t.object)))) {
            return true;
        }
    }
    return false;
}

PathMetrics path_metrics(const std::vector<SessionTrace>& traces, IterationPick pick) {
    PathMetrics metrics;
    if (traces.empty()) {
        return metrics;
    }
    std::size_t constraint_total = 0;
    std::size_t constraint_compound = 0;
    for (const SessionTrace& trace : traces) {
        const Iteration* iteration = picked_iteration(trace, pick);
        std::size_t lpp_q = 0;
        std::size_t lip_q = 0;
        bool compound_q = false;
        if (iteration != nullptr) {
            lpp_q = path_lengths(iteration->path).lpp;
            for (const ConstraintOutcome& outcome : iteration->outcomes) {
                lip_q += outcome.instantiated_relations.size();
                bool compound_c =
                    outcome.error.has_value() &&
                    outcome.error->reason == ErrorReason::CompoundEnding;
                compound_q = compound_q || compound_c;
                ++constraint_total;
                constraint_compound += compound_c ? 1 : 0;
            }
        }
        metrics.lpp += static_cast<double>(lpp_q);
        metrics.lip += static_cast<double>(lip_q);
        if (lpp_q > 0) {
            metrics.aip += static_cast<double>(lip_q) / static_cast<double>(lpp_q);
            if (lip_q == lpp_q) {
                metrics.isr += 1.0;
            }
        }
        metrics.cer += compound_q ? 1.0 : 0.0;
    }
    const double n = static_cast<double>(traces.size());
    metrics.lpp /= n;
    metrics.lip /= n;
    metrics.aip /= n;
    metrics.isr /= n;
    metrics.cer /= n;
    metrics.cer_per_constraint =
        constraint_total == 0
            ? 0.0
            : static_cast<double>(constraint_compound) / static_cast<double>(constraint_total);
    return metrics;
}

namespace {

template <typename Trace>
std::map<std::string, const GoldRecord*> join_by_id(
    const std::vector<Trace>& traces, const std::vector<GoldRecord>& gold_records) {
    std::map<std::string, const GoldRecord*> by_id;
    for (const GoldRecord& record : gold_records) {
        by_id[record.id] = &record;
    }
    std::vector<std::string> orphan_traces;
    for (const Trace& trace : traces) {
        if (by_id.find(trace.id) == by_id.end()) {
            orphan_traces.push_back(trace.id);
        }
    }
    std::set<std::string> trace_ids;
    for (const Trace& trace : traces) {
        trace_ids.insert(trace.id);
    }
    std::vector<std::string> orphan_gold;
    for (const GoldRecord& record : gold_records) {
        if (!trace_ids.count(record.id)) {
            orphan_gold.push_back(record.id);
        }
    }
    if (!orphan_traces.empty() || !orphan_gold.empty()) {
        std::string message = "trace/gold id mismatch;";
        if (!orphan_traces.empty()) {
            message += " traces without gold:";
            for (const std::string& id : orphan_traces) {
                message += " " + id;
            }
        }
        if (!orphan_gold.empty()) {
            message += " gold without traces:";
            for (const std::string& id : orphan_gold) {
                message += " " + id;
            }
        }
        throw ReportError(message);
    }
    return by_id;
}

}  // namespace

MetricsReport build_report(const std::vector<SessionTrace>& traces,
                           const std::vector<GoldRecord>& gold_records,
                           const KnowledgeGraph& graph) {
    MetricsReport report;
    report.n_questions = traces.size();
    if (traces.empty()) {
        return report;
    }
    auto by_id = join_by_id(traces, gold_records);

    std::map<std::size_t, std::size_t> histogram;
    for (const SessionTrace& trace : traces) {
        const GoldRecord& gold = *by_id.at(trace.id);
        report.hit_at_1 += hit_at_1(trace.answers, gold.answers) ? 1.0 : 0.0;
        report.denotation_accuracy +=
            denotation_accuracy(trace.answers, gold.answers) ? 1.0 : 0.0;
        report.answer_coverage += answer_coverage(trace, gold.answers, graph) ? 1.0 : 0.0;
        report.avg_rk += static_cast<double>(trace.merged.evidence_triples.size());
        ++histogram[trace.edit_calls];
    }
    const double n = static_cast<double>(traces.size());
    report.hit_at_1 /= n;
    report.denotation_accuracy /= n;
    report.answer_coverage /= n;
    report.avg_rk /= n;
    for (const auto& [calls, count] : histogram) {
        report.edit_call_histogram[calls] = static_cast<double>(count) / n;
    }

    PathMetrics path = path_metrics(traces);
    report.lpp = path.lpp;
    report.lip = path.lip;
    report.aip = path.aip;
    report.isr = path.isr;
    report.cer = path.cer;
    report.cer_per_constraint = path.cer_per_constraint;
    return report;
}

MetricsReport build_table_report(const std::vector<TableSessionTrace>& traces,
                                 const std::vector<GoldRecord>& gold_records) {
    MetricsReport report;
    report.n_questions = traces.size();
    if (traces.empty()) {
        return report;
    }
    auto by_id = join_by_id(traces, gold_records);

    std::map<std::size_t, std::size_t> histogram;
    for (const TableSessionTrace& trace : traces) {
        const GoldRecord& gold = *by_id.at(trace.id);
        report.hit_at_1 += hit_at_1(trace.answers, gold.answers) ? 1.0 : 0.0;
        report.denotation_accuracy +=
            denotation_accuracy(trace.answers, gold.answers) ? 1.0 : 0.0;
        ++histogram[trace.edit_calls];
    }
    const double n = static_cast<double>(traces.size());
    report.hit_at_1 /= n;
    report.denotation_accuracy /= n;
    for (const auto& [calls, count] : histogram) {
        report.edit_call_histogram[calls] = static_cast<double>(count) / n;
    }
    return report;
}

std::string report_to_json(const MetricsReport& report) {
    nlohmann::json j;
    j["hit_at_1"] = report.hit_at_1;
    j["denotation_accuracy"] = report.denotation_accuracy;
    j["answer_coverage"] = report.answer_coverage;
    j["avg_rk"] = report.avg_rk;
    j["lpp"] = report.lpp;
    j["lip"] = report.lip;
    j["aip"] = report.aip;
    j["isr"] = report.isr;
    j["cer"] = report.cer;
    j["cer_per_constraint"] = report.cer_per_constraint;
    nlohmann::json histogram = nlohmann::json::object();
    for (const auto& [calls, ratio] : report.edit_call_histogram) {
        histogram[std::to_string(calls)] = ratio;
    }
    j["edit_call_histogram"] = std::move(histogram);
    j["n_questions"] = report.n_questions;
    return j.dump(2);
}

std::string per_question_csv(const std::vector<SessionTrace>& traces,
                             const std::vector<GoldRecord>& gold_records,
                             const KnowledgeGraph& graph) {
    auto by_id = join_by_id(traces, gold_records);
    std::string csv = "id,hit,denotation,coverage,rk,lpp,lip,edit_calls\n";
    for (const SessionTrace& trace : traces) {
        const GoldRecord& gold = *by_id.at(trace.id);
        std::size_t lpp_q = 0;
        std::size_t lip_q = 0;
        if (!trace.iterations.empty()) {
            lpp_q = path_lengths(trace.iterations.back().path).lpp;
            for (const ConstraintOutcome& outcome : trace.iterations.back().outcomes) {
                lip_q += outcome.instantiated_relations.size();
            }
        }
        csv += trace.id + "," + (hit_at_1(trace.answers, gold.answers) ? "1" : "0") + "," +
               (denotation_accuracy(trace.answers, gold.answers) ? "1" : "0") + "," +
               (answer_coverage(trace, gold.answers, graph) ? "1" : "0") + "," +
               std::to_string(trace.merged.evidence_triples.size()) + "," +
               std::to_string(lpp_q) + "," + std::to_string(lip_q) + "," +
               std::to_string(trace.edit_calls) + "\n";
    }
    return csv;
}

GoldRecord gold_from_json(const std::string& json_line) {
    nlohmann::json j = nlohmann::json::parse(json_line);
    GoldRecord record;
    record.id = j.at("id").get<std::string>();
    record.question = j.value("question", "");
    for (const auto& e : j.value("topic_entities", nlohmann::json::array())) {
        record.topic_entities.push_back(e.get<std::string>());
    }
    record.table_id = j.value("table_id", "");
    for (const auto& a : j.at("answers")) {
        record.answers.push_back(a.get<std::string>());
    }
    if (record.answers.empty()) {
        throw ReportError("dataset record '" + record.id + "' has no gold answers");
    }
    return record;
}

std::vector<GoldRecord> load_dataset(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ReportError("cannot open dataset file: " + path);
    }
    std::vector<GoldRecord> records;
    std::string line;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        records.push_back(gold_from_json(line));
    }
    return records;
}

}  // namespace readi
