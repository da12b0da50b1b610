#pragma once

#include <string>
#include <vector>

#include "readi/edit_loop.hpp"
#include "readi/instantiator.hpp"

namespace readi {

// JSON (de)serialization for traces and outcomes. nlohmann objects keep
// keys sorted, so dumps are byte-stable across runs.

std::string trace_to_json(const SessionTrace& trace);
SessionTrace trace_from_json(const std::string& json_text);

std::string table_trace_to_json(const TableSessionTrace& trace);
TableSessionTrace table_trace_from_json(const std::string& json_text);

// One session per line.
void write_trace_jsonl(const std::string& path,
                       const std::vector<SessionTrace>& traces);
std::vector<SessionTrace> read_trace_jsonl(const std::string& path);

void write_table_trace_jsonl(const std::string& path,
                             const std::vector<TableSessionTrace>& traces);
std::vector<TableSessionTrace> read_table_trace_jsonl(const std::string& path);

// CLI `instantiate` output: instantiated relations, frontier names, error.
std::string outcomes_to_json(const std::vector<ConstraintOutcome>& outcomes,
                             const KnowledgeGraph& graph);

}  // namespace readi
