#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace readi {

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// One linear chain of natural-language relations from a topic entity.
// nl_relations may be empty; the instantiator classifies that as an
// empty-path error rather than the parser rejecting it.
struct Constraint {
    std::string start;
    std::vector<std::string> nl_relations;

    friend bool operator==(const Constraint&, const Constraint&) = default;
};

// The structural representation of a question: one constraint per topic
// entity, in topic-entity order.
struct ReasoningPath {
    std::vector<Constraint> constraints;
    std::string question_id;

    friend bool operator==(const ReasoningPath&, const ReasoningPath&) = default;
};

// Extracts the path from generator/editor output. The expected shape is
//
//   Path: {"entity": [entity -> rel1 -> rel2], ...}
//
// but the parser is lenient: "->" and the unicode arrow are both accepted,
// whitespace is ignored, a leading token repeating the entity key is
// dropped, and a topic entity missing from the text yields an empty
// constraint. Only a missing "Path:" block is a ParseError (the session
// loop maps that to an empty path for every constraint). The last "Path:"
// block wins, so chain-of-thought text before it is harmless.
ReasoningPath parse_reasoning_path(const std::string& text,
                                   const std::vector<std::string>& topic_entities);

// Emits the same textual format parse_reasoning_path consumes; parsing the
// result of serialization is the identity on well-formed paths.
std::string serialize_reasoning_path(const ReasoningPath& path);

struct PathLengths {
    std::size_t lpp = 0;  // total relation count across constraints
    std::vector<std::size_t> per_constraint;
};

PathLengths path_lengths(const ReasoningPath& path);

// path.json debug format:
//   {"question_id": str, "constraints": [{"start": str, "relations": [str]}]}
ReasoningPath path_from_json(const std::string& json_text);
std::string path_to_json(const ReasoningPath& path);

}  // namespace readi
