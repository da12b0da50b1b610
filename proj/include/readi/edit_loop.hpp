#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "readi/gateway.hpp"
#include "readi/instantiator.hpp"
#include "readi/kg_store.hpp"
#include "readi/path_model.hpp"
#include "readi/relation_index.hpp"
#include "readi/table_env.hpp"

namespace readi {

struct SessionConfig {
    // 4 suits multi-hop question sets, 2 the simpler single-hop ones.
    std::size_t max_edit_time = 4;
    InstantiatorConfig instantiator;
    double temperature = 0.3;
    Role generate_role = default_role(RoleName::kg_generate);
    Role edit_role = default_role(RoleName::kg_edit);
    Role reason_role = default_role(RoleName::kg_reason);
    std::optional<std::uint64_t> seed;  // table feedback row sampling
};

SessionConfig default_table_session_config();

// The edit-time message: why instantiation stopped, a few halfway-done
// instances (compound ids rendered as "compound node"), and candidate
// relations around the stuck frontier, filtered against the question.
struct ErrorFeedback {
    std::vector<std::string> reason_lines;
    std::vector<std::string> halfway_instances;
    std::vector<std::string> candidate_relations;

    std::string rendered() const;  // the editor-prompt feedback block
    friend bool operator==(const ErrorFeedback&, const ErrorFeedback&) = default;
};

// Evidence merged across constraints: answer candidates are the
// intersection of successful frontiers, evidence triples the union of
// everything traversed.
struct MergedEvidence {
    std::set<std::string> answer_candidates;
    std::set<Triple> evidence_triples;

    friend bool operator==(const MergedEvidence&, const MergedEvidence&) = default;
};

struct GatewayCall {
    std::string role;
    std::string prompt;
    std::string response;

    friend bool operator==(const GatewayCall&, const GatewayCall&) = default;
};

struct Iteration {
    ReasoningPath path;
    std::vector<ConstraintOutcome> outcomes;
    // Present only when this iteration's errors triggered an edit call.
    std::optional<ErrorFeedback> feedback;
};

// Full record of one question's session: every gateway call verbatim, the
// per-iteration outcomes, merged evidence and final answers. Replaying the
// recorded calls through a Transcript reproduces the trace byte for byte.
struct SessionTrace {
    std::string id;
    std::string question;
    std::vector<std::string> topic_entities;
    std::vector<Iteration> iterations;
    std::vector<GatewayCall> calls;
    std::size_t edit_calls = 0;
    MergedEvidence merged;
    std::vector<std::string> answers;
    std::optional<std::string> session_error;
};

// Requires has_error(outcomes). Reason lines cover every erroring
// constraint in order; instances sample up to instance_sample_k traversed
// edges per instantiated relation; candidates are the question-ranked
// relations around the union of stuck frontiers, capped at
// candidate_filter_k. Throws std::invalid_argument when nothing erred.
ErrorFeedback assemble_feedback(const std::vector<ConstraintOutcome>& outcomes,
                                const std::string& question,
                                const KnowledgeGraph& graph,
                                const RelationIndex& index,
                                const InstantiatorConfig& config);

// answer_candidates: intersection over successful constraints' frontiers
// (a single successful constraint contributes its frontier unchanged).
// With zero successful constraints the longest instantiated prefixes stand
// in: the intersection of the non-empty frontiers of failed constraints,
// empty when nothing was instantiated at all. evidence_triples is always
// the union over all constraints.
MergedEvidence merge_results(const std::vector<ConstraintOutcome>& outcomes);

// Algorithm: generate the initial path, instantiate, and while any
// constraint errs and budget remains, feed the error message back through
// the editor and re-instantiate. Afterwards merge evidence and call the
// reasoner exactly once. Gateway failures abort the loop and are recorded
// in the trace with the question left unanswered.
SessionTrace run_session(const std::string& question,
                         const std::vector<std::string>& topic_entities,
                         const KnowledgeGraph& graph,
                         const RelationIndex& index,
                         LlmBackend& backend,
                         const SessionConfig& config,
                         const std::string& id = "");

// TableQA variant of the same loop: column/row instantiation instead of
// BFS, the table error taxonomy, and the bracketed answer format.
struct TableIteration {
    TablePath path;
    std::optional<TableError> error;
    std::optional<std::string> feedback;
};

struct TableSessionTrace {
    std::string id;
    std::string question;
    std::string table_id;
    std::vector<TableIteration> iterations;
    std::vector<GatewayCall> calls;
    std::size_t edit_calls = 0;
    Table items;
    std::vector<std::string> answers;
    std::optional<std::string> session_error;
};

TableSessionTrace run_table_session(const std::string& question,
                                    const Table& table,
                                    LlmBackend& backend,
                                    const SessionConfig& config,
                                    const std::string& id = "");

// Rebuilds the per-role response queues from a recorded trace, enabling
// offline replay.
Transcript transcript_from_calls(const std::vector<GatewayCall>& calls,
                                 bool strict = true);

}  // namespace readi
