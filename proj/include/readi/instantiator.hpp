#pragma once

#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "readi/kg_store.hpp"
#include "readi/path_model.hpp"
#include "readi/relation_index.hpp"

namespace readi {

struct InstantiatorConfig {
    std::size_t bind_k = 5;             // candidate relations per NL relation
    std::size_t queue_threshold = 1000; // frontier size cap
    std::size_t candidate_filter_k = 35;// feedback candidate relations cap
    std::size_t instance_sample_k = 3;  // feedback instances per relation
};

enum class ErrorReason {
    IrrelevantRelation,  // no candidate of the NL relation connects
    EmptyPath,           // the constraint has no relations at all
    CompoundEnding,      // fully instantiated but every frontier entity is compound
};

const char* to_string(ErrorReason reason);

struct InstantiationError {
    ErrorReason reason;
    // Index of the failing relation; absent for CompoundEnding.
    std::optional<std::size_t> err_position;
    std::optional<std::string> r_err;   // present iff IrrelevantRelation
    std::set<std::string> e_err_set;    // the stuck frontier

    friend bool operator==(const InstantiationError&,
                           const InstantiationError&) = default;
};

// Result of grounding one constraint. frontier holds the entities reached
// after the last instantiated relation (empty when nothing instantiated);
// instance_triples holds every edge traversed along the way.
struct ConstraintOutcome {
    std::size_t constraint_index = 0;
    std::vector<std::pair<std::string, std::string>> instantiated_relations; // (nl, bound)
    std::set<std::string> frontier;
    std::set<Triple> instance_triples;
    std::optional<InstantiationError> error;

    friend bool operator==(const ConstraintOutcome&,
                           const ConstraintOutcome&) = default;
};

// Grounds one constraint by breadth-first path-connecting:
//   - each NL relation is bound to its top bind_k candidate relations;
//   - the grounding is the first candidate, in rank order, that connects
//     from any frontier entity;
//   - the new frontier is the union of successors under that relation,
//     truncated to the queue_threshold lexicographically smallest ids.
// Failures are encoded in the outcome, never thrown: an empty relation
// list is EmptyPath, a relation none of whose candidates connects is
// IrrelevantRelation, and an all-compound terminal frontier is
// CompoundEnding (the frontier is retained in that case).
ConstraintOutcome instantiate_constraint(const Constraint& constraint,
                                         const KnowledgeGraph& graph,
                                         const RelationIndex& index,
                                         const InstantiatorConfig& config);

// One outcome per constraint, order preserved. Constraints share no state.
std::vector<ConstraintOutcome> instantiate_path(const ReasoningPath& path,
                                                const KnowledgeGraph& graph,
                                                const RelationIndex& index,
                                                const InstantiatorConfig& config);

bool has_error(const std::vector<ConstraintOutcome>& outcomes);

}  // namespace readi
