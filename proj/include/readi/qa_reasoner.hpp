#pragma once

#include <set>
#include <string>
#include <vector>

#include "readi/kg_store.hpp"

namespace readi {

// Merged evidence rendered for the reasoner prompt: one
// "(name, relation, name)" line per triple along with the distinct-triple
// count, which is the single source of truth for the #RK metric.
struct EvidenceRendering {
    std::vector<std::string> lines;
    std::size_t triple_count = 0;

    std::string joined() const;  // lines joined with ",\n", Table-style
};

// Deterministic rendering: entity ids become friendly names, relations and
// compound ids stay as-is, and lines sort by (subject name, relation,
// object name) with raw ids as the final tie-break.
EvidenceRendering serialize_evidence(const std::set<Triple>& evidence_triples,
                                     const KnowledgeGraph& graph);

// Contents of the last {...} span, split on commas and trimmed. Total:
// arbitrary text never fails, it just yields an empty list.
std::vector<std::string> parse_kg_answer(const std::string& text);

// The last line starting with "Answer:" parsed as a bracketed,
// comma-separated, quoted list. Total; no marker means no answers.
std::vector<std::string> parse_table_answer(const std::string& text);

}  // namespace readi
