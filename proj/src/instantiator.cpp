#include "readi/instantiator.hpp"

#include <algorithm>
#include <iterator>

namespace readi {

const char* to_string(ErrorReason reason) {
    switch (reason) {
        case ErrorReason::IrrelevantRelation: return "IrrelevantRelation";
        case ErrorReason::EmptyPath: return "EmptyPath";
        case ErrorReason::CompoundEnding: return "CompoundEnding";
    }
    return "unknown";
}

ConstraintOutcome instantiate_constraint(const Constraint& constraint,
                                         const KnowledgeGraph& graph,
                                         const RelationIndex& index,
                                         const InstantiatorConfig& config) {
    ConstraintOutcome outcome;

    if (constraint.nl_relations.empty()) {
        outcome.error = InstantiationError{ErrorReason::EmptyPath, 0, std::nullopt,
                                           {constraint.start}};
        return outcome;
    }

    std::set<std::string> frontier{constraint.start};
    for (std::size_t step = 0; step < constraint.nl_relations.size(); ++step) {
        const std::string& nl = constraint.nl_relations[step];
        BoundRelation bound = index.bind_relation(nl, config.bind_k);

        // First candidate, in rank order, that connects from any frontier
        // entity wins; one NL relation grounds to exactly one KG relation.
        std::string chosen;
        std::set<std::string> next;
        for (const auto& [candidate, _] : bound.candidates) {
            std::set<std::string> reached;
            for (const std::string& entity : frontier) {
                auto objs = graph.successors(entity, candidate);
                reached.insert(objs.begin(), objs.end());
            }
            if (!reached.empty()) {
                chosen = candidate;
                next = std::move(reached);
                break;
            }
        }
        if (chosen.empty()) {
            outcome.error = InstantiationError{ErrorReason::IrrelevantRelation, step, nl,
                                               frontier};
            // Keep the longest-prefix frontier; empty when nothing was
            // instantiated at all.
            if (step > 0) {
                outcome.frontier = std::move(frontier);
            }
            return outcome;
        }

        for (const std::string& entity : frontier) {
            for (const std::string& object : graph.successors(entity, chosen)) {
                outcome.instance_triples.insert(Triple{entity, chosen, object});
            }
        }
        // Deterministic cap: keep the lexicographically smallest ids.
        if (next.size() > config.queue_threshold) {
            auto cut = next.begin();
            std::advance(cut, config.queue_threshold);
            next.erase(cut, next.end());
        }
        outcome.instantiated_relations.emplace_back(nl, chosen);
        frontier = std::move(next);
    }

    outcome.frontier = frontier;
    bool all_compound = !frontier.empty() &&
                        std::all_of(frontier.begin(), frontier.end(),
                                    [&](const std::string& e) { return graph.is_compound(e); });
    if (all_compound) {
        outcome.error = InstantiationError{ErrorReason::CompoundEnding, std::nullopt,
                                           std::nullopt, frontier};
    }
    return outcome;
}

std::vector<ConstraintOutcome> instantiate_path(const ReasoningPath& path,
                                                const KnowledgeGraph& graph,
                                                const RelationIndex& index,
                                                const InstantiatorConfig& config) {
    std::vector<ConstraintOutcome> outcomes;
    outcomes.reserve(path.constraints.size());
    for (std::size_t i = 0; i < path.constraints.size(); ++i) {
        ConstraintOutcome outcome =
            instantiate_constraint(path.constraints[i], graph, index, config);
        outcome.constraint_index = i;
        outcomes.push_back(std::move(outcome));
    }
    return outcomes;
}

bool has_error(const std::vector<ConstraintOutcome>& outcomes) {
    return std::any_of(outcomes.begin(), outcomes.end(),
                       [](const ConstraintOutcome& o) { return o.error.has_value(); });
}

}  // namespace readi
