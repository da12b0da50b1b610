#include "readi/edit_loop.hpp"

#include <algorithm>
#include <stdexcept>

#include "readi/qa_reasoner.hpp"

namespace readi {

namespace {

std::string render_entity_list(const std::vector<std::string>& entities) {
    std::string out = "[";
    for (std::size_t i = 0; i < entities.size(); ++i) {
        if (i) {
            out += ", ";
        }
        out += "\"" + entities[i] + "\"";
    }
    out += "]";
    return out;
}

std::string masked_name(const KnowledgeGraph& graph, const std::string& entity) {
    return graph.is_compound(entity) ? "compound node" : graph.friendly_name(entity);
}

ReasoningPath empty_path_for(const std::vector<std::string>& topic_entities,
                             const std::string& id) {
    ReasoningPath path;
    path.question_id = id;
    for (const std::string& entity : topic_entities) {
        path.constraints.push_back(Constraint{entity, {}});
    }
    return path;
}

std::set<std::string> intersect(const std::vector<const std::set<std::string>*>& sets) {
    if (sets.empty()) {
        return {};
    }
    std::set<std::string> acc = *sets.front();
    for (std::size_t i = 1; i < sets.size() && !acc.empty(); ++i) {
        std::set<std::string> next;
        std::set_intersection(acc.begin(), acc.end(), sets[i]->begin(), sets[i]->end(),
                              std::inserter(next, next.begin()));
        acc = std::move(next);
    }
    return acc;
}

}  // namespace

SessionConfig default_table_session_config() {
    SessionConfig config;
    config.generate_role = default_role(RoleName::table_generate);
    config.edit_role = default_role(RoleName::table_edit);
    config.reason_role = default_role(RoleName::table_reason);
    return config;
}

std::string ErrorFeedback::rendered() const {
    std::string out = "Error Message";
    for (const std::string& line : reason_lines) {
        out += "\n" + line;
    }
    out += "\nInstantiation Context";
    for (const std::string& instance : halfway_instances) {
        out += "\nInstantiate Paths: " + instance;
    }
    out += "\nCandidate Relations\n[";
    for (std::size_t i = 0; i < candidate_relations.size(); ++i) {
        if (i) {
            out += ", ";
        }
        out += "'" + candidate_relations[i] + "'";
    }
    out += "]";
    return out;
}

ErrorFeedback assemble_feedback(const std::vector<ConstraintOutcome>& outcomes,
                                const std::string& question,
                                const KnowledgeGraph& graph,
                                const RelationIndex& index,
                                const InstantiatorConfig& config) {
    if (!has_error(outcomes)) {
        throw std::invalid_argument("assemble_feedback requires an erroring outcome");
    }

    ErrorFeedback feedback;
    std::set<std::string> stuck_frontier;
    std::size_t line_no = 0;
    auto add_line = [&](const std::string& text) {
        feedback.reason_lines.push_back(std::to_string(++line_no) + ". " + text);
    };

    for (const ConstraintOutcome& outcome : outcomes) {
        if (!outcome.error.has_value()) {
            continue;
        }
        const InstantiationError& error = *outcome.error;
        switch (error.reason) {
            case ErrorReason::CompoundEnding:
                add_line("<compound node> in the end.");
                break;
            case ErrorReason::EmptyPath:
                add_line("empty reasoning path from \"" +
                         (error.e_err_set.empty() ? std::string{}
                                                  : *error.e_err_set.begin()) +
                         "\".");
                break;
            case ErrorReason::IrrelevantRelation: {
                bool compound_stuck =
                    !error.e_err_set.empty() &&
                    std::all_of(error.e_err_set.begin(), error.e_err_set.end(),
                                [&](const std::string& e) { return graph.is_compound(e); });
                if (compound_stuck) {
                    add_line("<compound node> in the end.");
                }
                add_line("relation \"" + error.r_err.value_or("") +
                         "\" not instantiated.");
                break;
            }
        }
        stuck_frontier.insert(error.e_err_set.begin(), error.e_err_set.end());

        // A few grounded edges per instantiated relation, smallest ids
        // first, so the editor sees how far the path got.
        std::set<std::string> shown;
        for (const auto& [nl, bound] : outcome.instantiated_relations) {
            if (!shown.insert(bound).second) {
                continue;  // relation bound at two steps; one sample set suffices
            }
            std::size_t sampled = 0;
            for (const Triple& t : outcome.instance_triples) {
                if (t.predicate != bound) {
                    continue;
                }
                feedback.halfway_instances.push_back(masked_name(graph, t.subject) + " --" +
                                                     bound + "--> " +
                                                     masked_name(graph, t.object));
                if (++sampled >= config.instance_sample_k) {
                    break;
                }
            }
        }
    }

    std::set<std::string> pool;
    for (const std::string& entity : stuck_frontier) {
        auto relations = graph.out_relations(entity);
        pool.insert(relations.begin(), relations.end());
    }
    feedback.candidate_relations =
        index.rank_by_question(question, pool, config.candidate_filter_k);
    return feedback;
}

MergedEvidence merge_results(const std::vector<ConstraintOutcome>& outcomes) {
    MergedEvidence merged;
    for (const ConstraintOutcome& outcome : outcomes) {
        merged.evidence_triples.insert(outcome.instance_triples.begin(),
                                       outcome.instance_triples.end());
    }

    std::vector<const std::set<std::string>*> frontiers;
    for (const ConstraintOutcome& outcome : outcomes) {
        if (!outcome.error.has_value()) {
            frontiers.push_back(&outcome.frontier);
        }
    }
    if (frontiers.empty()) {
        // Budget exhausted everywhere: fall back to the longest
        // instantiated prefixes that reached anything at all.
        for (const ConstraintOutcome& outcome : outcomes) {
            if (!outcome.frontier.empty()) {
                frontiers.push_back(&outcome.frontier);
            }
        }
    }
    // Strict intersection; disjoint frontiers leave it empty. The reasoner
    // still sees every traversed triple through evidence_triples.
    merged.answer_candidates = intersect(frontiers);
    return merged;
}

SessionTrace run_session(const std::string& question,
                         const std::vector<std::string>& topic_entities,
                         const KnowledgeGraph& graph,
                         const RelationIndex& index,
                         LlmBackend& backend,
                         const SessionConfig& config,
                         const std::string& id) {
    SessionTrace trace;
    trace.id = id;
    trace.question = question;
    trace.topic_entities = topic_entities;

    auto call = [&](const Role& role, const std::string& prompt) {
        std::string response = backend.complete(role, prompt, config.temperature);
        trace.calls.push_back(GatewayCall{to_string(role.name), prompt, response});
        return response;
    };
    auto parse_lenient = [&](const std::string& text) {
        try {
            ReasoningPath path = parse_reasoning_path(text, topic_entities);
            path.question_id = id;
            return path;
        } catch (const ParseError&) {
            // No Path: block at all -> empty constraint per entity, which
            // the taxonomy classifies as empty reasoning paths.
            return empty_path_for(topic_entities, id);
        }
    };

    try {
        std::string prompt = render_prompt(
            config.generate_role,
            {{"question", question}, {"entities", render_entity_list(topic_entities)}});
        ReasoningPath path = parse_lenient(call(config.generate_role, prompt));
        std::vector<ConstraintOutcome> outcomes =
            instantiate_path(path, graph, index, config.instantiator);

        while (has_error(outcomes) && trace.edit_calls < config.max_edit_time) {
            ErrorFeedback feedback = assemble_feedback(outcomes, question, graph, index,
                                                       config.instantiator);
            trace.iterations.push_back(Iteration{path, outcomes, feedback});

            std::string edit_prompt =
                render_prompt(config.edit_role,
                              {{"question", question},
                               {"initial_path", serialize_reasoning_path(path)},
                               {"feedback", feedback.rendered()}});
            path = parse_lenient(call(config.edit_role, edit_prompt));
            outcomes = instantiate_path(path, graph, index, config.instantiator);
            ++trace.edit_calls;
        }
        trace.iterations.push_back(Iteration{path, outcomes, std::nullopt});

        trace.merged = merge_results(outcomes);
        EvidenceRendering evidence = serialize_evidence(trace.merged.evidence_triples, graph);
        std::string reason_prompt = render_prompt(
            config.reason_role, {{"question", question}, {"evidence", evidence.joined()}});
        trace.answers = parse_kg_answer(call(config.reason_role, reason_prompt));
    } catch (const GatewayError& e) {
        trace.session_error = e.what();
        trace.answers.clear();
        if (trace.iterations.empty()) {
            trace.iterations.push_back(
                Iteration{empty_path_for(topic_entities, id), {}, std::nullopt});
        }
    }
    return trace;
}

TableSessionTrace run_table_session(const std::string& question,
                                    const Table& table,
                                    LlmBackend& backend,
                                    const SessionConfig& config,
                                    const std::string& id) {
    TableSessionTrace trace;
    trace.id = id;
    trace.question = question;
    trace.table_id = table.table_id;

    auto call = [&](const Role& role, const std::string& prompt) {
        std::string response = backend.complete(role, prompt, config.temperature);
        trace.calls.push_back(GatewayCall{to_string(role.name), prompt, response});
        return response;
    };

    const std::string description = table_description(table, config.seed);
    try {
        std::string prompt = render_prompt(
            config.generate_role, {{"question", question}, {"table", description}});
        TablePath path = parse_table_path(call(config.generate_role, prompt));
        TableInstantiation grounded = instantiate_table(path, table);

        while (grounded.error.has_value() && trace.edit_calls < config.max_edit_time) {
            std::string feedback =
                assemble_table_feedback(*grounded.error, table, config.seed);
            trace.iterations.push_back(TableIteration{path, grounded.error, feedback});

            std::string edit_prompt =
                render_prompt(config.edit_role, {{"question", question},
                                                 {"table", description},
                                                 {"previous", serialize_table_path(path)},
                                                 {"feedback", feedback}});
            path = parse_table_path(call(config.edit_role, edit_prompt));
            grounded = instantiate_table(path, table);
            ++trace.edit_calls;
        }
        trace.iterations.push_back(TableIteration{path, grounded.error, std::nullopt});
        trace.items = grounded.items;

        std::string reason_prompt = render_prompt(
            config.reason_role,
            {{"question", question}, {"items", serialize_table_items(trace.items)}});
        trace.answers = parse_table_answer(call(config.reason_role, reason_prompt));
    } catch (const GatewayError& e) {
        trace.session_error = e.what();
        trace.answers.clear();
        if (trace.iterations.empty()) {
            trace.iterations.push_back(TableIteration{TablePath{}, std::nullopt, std::nullopt});
        }
    }
    return trace;
}

Transcript transcript_from_calls(const std::vector<GatewayCall>& calls, bool strict) {
    Transcript transcript(strict);
    for (const GatewayCall& call : calls) {
        transcript.push(role_from_string(call.role), call.response);
    }
    return transcript;
}

}  // namespace readi
