#include "readi/trace_io.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

namespace readi {

namespace {

using nlohmann::json;

json triple_to_json(const Triple& t) {
    return json::array({t.subject, t.predicate, t.object});
}

Triple triple_from_json(const json& j) {
    return Triple{j.at(0).get<std::string>(), j.at(1).get<std::string>(),
                  j.at(2).get<std::string>()};
}

json error_to_json(const InstantiationError& error) {
    json j;
    j["reason"] = to_string(error.reason);
    if (error.err_position.has_value()) {
        j["err_position"] = *error.err_position;
    }
    if (error.r_err.has_value()) {
        j["r_err"] = *error.r_err;
    }
    j["e_err_set"] = error.e_err_set;
    return j;
}

InstantiationError error_from_json(const json& j) {
    InstantiationError error;
    std::string reason = j.at("reason").get<std::string>();
    if (reason == "IrrelevantRelation") {
        error.reason = ErrorReason::IrrelevantRelation;
    } else if (reason == "EmptyPath") {
        error.reason = ErrorReason::EmptyPath;
    } else if (reason == "CompoundEnding") {
        error.reason = ErrorReason::CompoundEnding;
    } else {
        throw std::runtime_error("unknown error reason: " + reason);
    }
    if (j.contains("err_position")) {
        error.err_position = j.at("err_position").get<std::size_t>();
    }
    if (j.contains("r_err")) {
        error.r_err = j.at("r_err").get<std::string>();
    }
    for (const auto& e : j.value("e_err_set", json::array())) {
        error.e_err_set.insert(e.get<std::string>());
    }
    return error;
}

json outcome_to_json(const ConstraintOutcome& outcome) {
    json j;
    j["constraint_index"] = outcome.constraint_index;
    json instantiated = json::array();
    for (const auto& [nl, bound] : outcome.instantiated_relations) {
        instantiated.push_back(json{{"nl", nl}, {"bound", bound}});
    }
    j["instantiated"] = std::move(instantiated);
    j["frontier"] = outcome.frontier;
    json triples = json::array();
    for (const Triple& t : outcome.instance_triples) {
        triples.push_back(triple_to_json(t));
    }
    j["instance_triples"] = std::move(triples);
    j["error"] = outcome.error.has_value() ? error_to_json(*outcome.error) : json(nullptr);
    return j;
}

ConstraintOutcome outcome_from_json(const json& j) {
    ConstraintOutcome outcome;
    outcome.constraint_index = j.at("constraint_index").get<std::size_t>();
    for (const auto& ji : j.value("instantiated", json::array())) {
        outcome.instantiated_relations.emplace_back(ji.at("nl").get<std::string>(),
                                                    ji.at("bound").get<std::string>());
    }
    for (const auto& e : j.value("frontier", json::array())) {
        outcome.frontier.insert(e.get<std::string>());
    }
    for (const auto& jt : j.value("instance_triples", json::array())) {
        outcome.instance_triples.insert(triple_from_json(jt));
    }
    if (j.contains("error") && !j.at("error").is_null()) {
        outcome.error = error_from_json(j.at("error"));
    }
    return outcome;
}

json path_to_json_obj(const ReasoningPath& path) {
    json constraints = json::array();
    for (const Constraint& constraint : path.constraints) {
        constraints.push_back(
            json{{"start", constraint.start}, {"relations", constraint.nl_relations}});
    }
    return json{{"question_id", path.question_id}, {"constraints", std::move(constraints)}};
}

ReasoningPath path_from_json_obj(const json& j) {
    ReasoningPath path;
    path.question_id = j.value("question_id", "");
    for (const auto& jc : j.value("constraints", json::array())) {
        Constraint constraint;
        constraint.start = jc.at("start").get<std::string>();
        for (const auto& r : jc.value("relations", json::array())) {
            constraint.nl_relations.push_back(r.get<std::string>());
        }
        path.constraints.push_back(std::move(constraint));
    }
    return path;
}

json feedback_to_json(const ErrorFeedback& feedback) {
    return json{{"reason_lines", feedback.reason_lines},
                {"halfway_instances", feedback.halfway_instances},
                {"candidate_relations", feedback.candidate_relations}};
}

ErrorFeedback feedback_from_json(const json& j) {
    ErrorFeedback feedback;
    for (const auto& line : j.value("reason_lines", json::array())) {
        feedback.reason_lines.push_back(line.get<std::string>());
    }
    for (const auto& instance : j.value("halfway_instances", json::array())) {
        feedback.halfway_instances.push_back(instance.get<std::string>());
    }
    for (const auto& relation : j.value("candidate_relations", json::array())) {
        feedback.candidate_relations.push_back(relation.get<std::string>());
    }
    return feedback;
}

json calls_to_json(const std::vector<GatewayCall>& calls) {
    json out = json::array();
    for (const GatewayCall& call : calls) {
        out.push_back(json{
            {"role", call.role}, {"prompt", call.prompt}, {"response", call.response}});
    }
    return out;
}

std::vector<GatewayCall> calls_from_json(const json& j) {
    std::vector<GatewayCall> calls;
    for (const auto& jc : j) {
        calls.push_back(GatewayCall{jc.at("role").get<std::string>(),
                                    jc.at("prompt").get<std::string>(),
                                    jc.at("response").get<std::string>()});
    }
    return calls;
}

json table_to_json_obj(const Table& table) {
    return json{{"table_id", table.table_id},
                {"headers", table.headers},
                {"rows", table.rows}};
}

Table table_from_json_obj(const json& j) {
    Table table;
    table.table_id = j.value("table_id", "");
    for (const auto& h : j.value("headers", json::array())) {
        table.headers.push_back(h.get<std::string>());
    }
    for (const auto& jr : j.value("rows", json::array())) {
        std::vector<std::string> row;
        for (const auto& cell : jr) {
            row.push_back(cell.get<std::string>());
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

template <typename T, typename ToJson>
void write_jsonl(const std::string& path, const std::vector<T>& items, ToJson to_json_fn) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot open for writing: " + path);
    }
    for (const T& item : items) {
        out << to_json_fn(item) << '\n';
    }
}

template <typename T, typename FromJson>
std::vector<T> read_jsonl(const std::string& path, FromJson from_json_fn) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open for reading: " + path);
    }
    std::vector<T> items;
    std::string line;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        items.push_back(from_json_fn(line));
    }
    return items;
}

}  // namespace

std::string trace_to_json(const SessionTrace& trace) {
    json iterations = json::array();
    for (const Iteration& iteration : trace.iterations) {
        json ji;
        ji["path"] = path_to_json_obj(iteration.path);
        json outcomes = json::array();
        for (const ConstraintOutcome& outcome : iteration.outcomes) {
            outcomes.push_back(outcome_to_json(outcome));
        }
        ji["outcomes"] = std::move(outcomes);
        ji["feedback"] = iteration.feedback.has_value()
                             ? feedback_to_json(*iteration.feedback)
                             : json(nullptr);
        iterations.push_back(std::move(ji));
    }

    json merged;
    merged["answer_candidates"] = trace.merged.answer_candidates;
    json evidence = json::array();
    for (const Triple& t : trace.merged.evidence_triples) {
        evidence.push_back(triple_to_json(t));
    }
    merged["evidence_triples"] = std::move(evidence);

    json j;
    j["id"] = trace.id;
    j["question"] = trace.question;
    j["topic_entities"] = trace.topic_entities;
    j["iterations"] = std::move(iterations);
    j["calls"] = calls_to_json(trace.calls);
    j["edit_calls"] = trace.edit_calls;
    j["merged"] = std::move(merged);
    j["answers"] = trace.answers;
    j["session_error"] =
        trace.session_error.has_value() ? json(*trace.session_error) : json(nullptr);
    return j.dump();
}

SessionTrace trace_from_json(const std::string& json_text) {
    json j = json::parse(json_text);
    SessionTrace trace;
    trace.id = j.value("id", "");
    trace.question = j.value("question", "");
    for (const auto& e : j.value("topic_entities", json::array())) {
        trace.topic_entities.push_back(e.get<std::string>());
    }
    for (const auto& ji : j.value("iterations", json::array())) {
        Iteration iteration;
        iteration.path = path_from_json_obj(ji.at("path"));
        for (const auto& jo : ji.value("outcomes", json::array())) {
            iteration.outcomes.push_back(outcome_from_json(jo));
        }
        if (ji.contains("feedback") && !ji.at("feedback").is_null()) {
            iteration.feedback = feedback_from_json(ji.at("feedback"));
        }
        trace.iterations.push_back(std::move(iteration));
    }
    trace.calls = calls_from_json(j.value("calls", json::array()));
    trace.edit_calls = j.value("edit_calls", std::size_t{0});
    if (j.contains("merged")) {
        for (const auto& e : j.at("merged").value("answer_candidates", json::array())) {
            trace.merged.answer_candidates.insert(e.get<std::string>());
        }
        for (const auto& jt : j.at("merged").value("evidence_triples", json::array())) {
            trace.merged.evidence_triples.insert(triple_from_json(jt));
        }
    }
    for (const auto& a : j.value("answers", json::array())) {
        trace.answers.push_back(a.get<std::string>());
    }
    if (j.contains("session_error") && !j.at("session_error").is_null()) {
        trace.session_error = j.at("session_error").get<std::string>();
    }
    return trace;
}

std::string table_trace_to_json(const TableSessionTrace& trace) {
    json iterations = json::array();
    for (const TableIteration& iteration : trace.iterations) {
        json ji;
        json constraints = json::object();
        for (const auto& [key, values] : iteration.path.constraints) {
            constraints[key] = values;
        }
        ji["path"] = json{{"chosen_headers", iteration.path.chosen_headers},
                          {"constraints", std::move(constraints)}};
        if (iteration.error.has_value()) {
            ji["error"] = json{{"reason", to_string(iteration.error->reason)},
                               {"bad_headers", iteration.error->bad_headers}};
        } else {
            ji["error"] = json(nullptr);
        }
        ji["feedback"] =
            iteration.feedback.has_value() ? json(*iteration.feedback) : json(nullptr);
        iterations.push_back(std::move(ji));
    }

    json j;
    j["id"] = trace.id;
    j["question"] = trace.question;
    j["table_id"] = trace.table_id;
    j["iterations"] = std::move(iterations);
    j["calls"] = calls_to_json(trace.calls);
    j["edit_calls"] = trace.edit_calls;
    j["items"] = table_to_json_obj(trace.items);
    j["answers"] = trace.answers;
    j["session_error"] =
        trace.session_error.has_value() ? json(*trace.session_error) : json(nullptr);
    return j.dump();
}

TableSessionTrace table_trace_from_json(const std::string& json_text) {
    json j = json::parse(json_text);
    TableSessionTrace trace;
    trace.id = j.value("id", "");
    trace.question = j.value("question", "");
    trace.table_id = j.value("table_id", "");
    for (const auto& ji : j.value("iterations", json::array())) {
        TableIteration iteration;
        if (ji.contains("path")) {
            for (const auto& h : ji.at("path").value("chosen_headers", json::array())) {
                iteration.path.chosen_headers.push_back(h.get<std::string>());
            }
            if (ji.at("path").contains("constraints")) {
                for (const auto& [key, values] : ji.at("path").at("constraints").items()) {
                    std::vector<std::string> vs;
                    for (const auto& v : values) {
                        vs.push_back(v.get<std::string>());
                    }
                    iteration.path.constraints[key] = std::move(vs);
                }
            }
        }
        if (ji.contains("error") && !ji.at("error").is_null()) {
            TableError error;
            std::string reason = ji.at("error").at("reason").get<std::string>();
            error.reason = reason == "IrrelevantColumn" ? TableErrorReason::IrrelevantColumn
                                                        : TableErrorReason::InsufficientColumns;
            for (const auto& h : ji.at("error").value("bad_headers", json::array())) {
                error.bad_headers.push_back(h.get<std::string>());
            }
            iteration.error = error;
        }
        if (ji.contains("feedback") && !ji.at("feedback").is_null()) {
            iteration.feedback = ji.at("feedback").get<std::string>();
        }
        trace.iterations.push_back(std::move(iteration));
    }
    trace.calls = calls_from_json(j.value("calls", json::array()));
    trace.edit_calls = j.value("edit_calls", std::size_t{0});
    if (j.contains("items")) {
        trace.items = table_from_json_obj(j.at("items"));
    }
    for (const auto& a : j.value("answers", json::array())) {
        trace.answers.push_back(a.get<std::string>());
    }
    if (j.contains("session_error") && !j.at("session_error").is_null()) {
        trace.session_error = j.at("session_error").get<std::string>();
    }
    return trace;
}

void write_trace_jsonl(const std::string& path, const std::vector<SessionTrace>& traces) {
    write_jsonl(path, traces, trace_to_json);
}

std::vector<SessionTrace> read_trace_jsonl(const std::string& path) {
    return read_jsonl<SessionTrace>(path, trace_from_json);
}

void write_table_trace_jsonl(const std::string& path,
                             const std::vector<TableSessionTrace>& traces) {
    write_jsonl(path, traces, table_trace_to_json);
}

std::vector<TableSessionTrace> read_table_trace_jsonl(const std::string& path) {
    return read_jsonl<TableSessionTrace>(path, table_trace_from_json);
}

std::string outcomes_to_json(const std::vector<ConstraintOutcome>& outcomes,
                             const KnowledgeGraph& graph) {
    json out = json::array();
    for (const ConstraintOutcome& outcome : outcomes) {
        json j = outcome_to_json(outcome);
        json names = json::array();
        for (const std::string& entity : outcome.frontier) {
            names.push_back(graph.friendly_name(entity));
        }
        j["frontier_names"] = std::move(names);
        out.push_back(std::move(j));
    }
    return out.dump(2);
}

}  // namespace readi
