#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "readi/edit_loop.hpp"
#include "readi/kg_store.hpp"

namespace readi {

struct ReportError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// One gold row of a dataset JSONL file:
//   {"id","question","topic_entities",["table_id"],"answers":[...]}
struct GoldRecord {
    std::string id;
    std::string question;
    std::vector<std::string> topic_entities;
    std::string table_id;
    std::vector<std::string> answers;
};

std::vector<GoldRecord> load_dataset(const std::string& path);
GoldRecord gold_from_json(const std::string& json_line);

// lowercase, trim, collapse internal whitespace, strip surrounding
// punctuation and one leading article (the/a/an).
std::string normalize_answer(const std::string& text);

// Any normalized prediction equals any normalized gold string.
bool hit_at_1(const std::vector<std::string>& predicted,
              const std::vector<std::string>& gold);

// Normalized prediction set equals normalized gold set.
bool denotation_accuracy(const std::vector<std::string>& predicted,
                         const std::vector<std::string>& gold);

// True iff some gold string matches the friendly name of an entity
// occurring in the trace's merged evidence.
bool answer_coverage(const SessionTrace& trace,
                     const std::vector<std::string>& gold,
                     const KnowledgeGraph& graph);

struct PathMetrics {
    double lpp = 0.0;  // mean predicted relations per question
    double lip = 0.0;  // mean instantiated relations per question
    double aip = 0.0;  // mean of lip_q/lpp_q (0 when lpp_q = 0)
    double isr = 0.0;  // fraction fully instantiated (lpp_q > 0)
    double cer = 0.0;  // fraction of questions ending in a compound node
    double cer_per_constraint = 0.0;  // same, counted over constraints
};

enum class IterationPick { Final, Initial };

// Aggregates over each session's chosen iteration (final by default; the
// initial iteration reproduces pre-edit numbers).
PathMetrics path_metrics(const std::vector<SessionTrace>& traces,
                         IterationPick pick = IterationPick::Final);

struct MetricsReport {
    double hit_at_1 = 0.0;
    double denotation_accuracy = 0.0;
    double answer_coverage = 0.0;
    double avg_rk = 0.0;  // mean distinct evidence triples
    double lpp = 0.0;
    double lip = 0.0;
    double aip = 0.0;
    double isr = 0.0;
    double cer = 0.0;
    double cer_per_constraint = 0.0;
    std::map<std::size_t, double> edit_call_histogram;
    std::size_t n_questions = 0;
};

// Joins traces to gold records by id (a mismatch is a ReportError listing
// the orphans) and computes every metric. Pure: identical inputs yield an
// identical report.
MetricsReport build_report(const std::vector<SessionTrace>& traces,
                           const std::vector<GoldRecord>& gold_records,
                           const KnowledgeGraph& graph);

// Table runs score answers only; path metrics stay zero.
MetricsReport build_table_report(const std::vector<TableSessionTrace>& traces,
                                 const std::vector<GoldRecord>& gold_records);

std::string report_to_json(const MetricsReport& report);

// Optional per-question CSV: id,hit,denotation,coverage,rk,lpp,lip,edit_calls
std::string per_question_csv(const std::vector<SessionTrace>& traces,
                             const std::vector<GoldRecord>& gold_records,
                             const KnowledgeGraph& graph);

}  // namespace readi
