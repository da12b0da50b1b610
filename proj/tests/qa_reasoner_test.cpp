#include <doctest.h>

#include "readi/qa_reasoner.hpp"
#include "test_support.hpp"

using readi::Triple;

TEST_SUITE_BEGIN("qa_reasoner");

TEST_CASE("fig3 evidence renders names, raw relations and raw compound ids") {
    readi::KnowledgeGraph g = readi_test::load_fig3();
    std::set<Triple> evidence = {
        {"France", "location.location.adjoin", "cvt1"},
        {"cvt1", "location.adjoining_relationship.country", "Germany"},
    };
    auto rendering = readi::serialize_evidence(evidence, g);
    REQUIRE(rendering.lines.size() == 2);
    CHECK(rendering.triple_count == 2);
    CHECK(rendering.lines[0] == "(France, location.location.adjoin, cvt1)");
    CHECK(rendering.lines[1] == "(cvt1, location.adjoining_relationship.country, Germany)");
}

TEST_CASE("empty evidence renders no lines") {
    readi::KnowledgeGraph g = readi_test::load_fig3();
    auto rendering = readi::serialize_evidence({}, g);
    CHECK(rendering.lines.empty());
    CHECK(rendering.triple_count == 0);
    CHECK(rendering.joined().empty());
}

TEST_CASE("unnamed entities render verbatim") {
    readi::KnowledgeGraph g = readi::parse_graph("x9\tr.r\ty9", "", std::nullopt);
    auto rendering = readi::serialize_evidence({{"x9", "r.r", "y9"}}, g);
    CHECK(rendering.lines[0] == "(x9, r.r, y9)");
}

TEST_CASE("rendering is deterministic and sorted by display key") {
    readi::KnowledgeGraph g = readi_test::load_fig3();
    std::set<Triple> evidence = {
        {"WZ_air", "location.location.containedby", "Germany"},
        {"Nijmegen", "aviation.serving_airport", "NTA"},
        {"Nijmegen", "aviation.serving_airport", "WZ_air"},
    };
    auto a = readi::serialize_evidence(evidence, g);
    auto b = readi::serialize_evidence(evidence, g);
    CHECK(a.lines == b.lines);
    CHECK(a.lines[0] == "(Nijmegen, aviation.serving_airport, NTA)");
    CHECK(a.lines[1] == "(Nijmegen, aviation.serving_airport, WZ air)");
    CHECK(a.lines[2] == "(WZ air, location.location.containedby, Germany)");
}

TEST_CASE("kg answers come from the last brace span") {
    CHECK(readi::parse_kg_answer("...So, the answer is {De Smet}.") ==
          std::vector<std::string>{"De Smet"});
    CHECK(readi::parse_kg_answer("{A, B} and later {C}") == std::vector<std::string>{"C"});
    CHECK(readi::parse_kg_answer("no braces here").empty());
    CHECK(readi::parse_kg_answer("{A, B}") == std::vector<std::string>{"A", "B"});
    CHECK(readi::parse_kg_answer("{}").empty());
}

TEST_CASE("table answers come from the last Answer: line") {
    CHECK(readi::parse_table_answer("Thought: ...\nAnswer: ['2004']") ==
          std::vector<std::string>{"2004"});
    CHECK(readi::parse_table_answer("Answer: ['a','b']") ==
          std::vector<std::string>{"a", "b"});
    CHECK(readi::parse_table_answer("final: 2004").empty());
    CHECK(readi::parse_table_answer("Answer: [\"x\"]\nAnswer: ['y']") ==
          std::vector<std::string>{"y"});
    CHECK(readi::parse_table_answer("Answer: no brackets").empty());
}

TEST_SUITE_END();
