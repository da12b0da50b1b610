#pragma once

#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace readi {

struct BuildError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Hook for mixing a second (e.g. dense) score into the lexical one.
// The default is the identity: BM25 only.
class RelationScorer {
public:
    virtual ~RelationScorer() = default;
    virtual double score(const std::string& query, const std::string& relation,
                         double lexical_score) const {
        (void)query;
        (void)relation;
        return lexical_score;
    }
};

// One natural-language relation bound to its top-k candidate schema
// relations, best first. Ties break on lexicographic relation id, so the
// ordering is total and runs are reproducible.
struct BoundRelation {
    std::string nl_relation;
    std::vector<std::pair<std::string, double>> candidates;
};

// Lowercases and splits on any non-alphanumeric byte. This covers the
// schema separators '.', '_', '/' as well as whitespace in questions.
std::vector<std::string> tokenize(const std::string& text);

// BM25 (k1=1.2, b=0.75) inverted index over a relation vocabulary.
// Immutable after build; concurrent queries are safe.
//
// The idf is the strictly-positive variant log(1 + (N-df+0.5)/(df+0.5)),
// so any matching query token contributes a positive amount and a score
// of zero means "no token overlap at all".
class RelationIndex {
public:
    static constexpr double kK1 = 1.2;
    static constexpr double kB = 0.75;

    // Relation documents are the id's tokens plus the tokens of an
    // optional alias string (e.g. a names-file row keyed by the relation
    // id). Throws BuildError on an empty vocabulary.
    static RelationIndex build(
        const std::set<std::string>& relations,
        const std::map<std::string, std::string>& aliases = {},
        std::shared_ptr<const RelationScorer> scorer = nullptr);

    // Top-k relations by BM25 score of nl's tokens. Zero-score relations
    // are excluded even if fewer than k remain; an empty candidate list is
    // a valid outcome (classified later as an irrelevant-relation error).
    BoundRelation bind_relation(const std::string& nl, std::size_t k) const;

    // Scores the question against pool members only and returns the top k
    // (the whole pool in score order when |pool| <= k). Zero-score members
    // are kept here: the pool is already restricted to relevant relations.
    // Pool ids outside the vocabulary are ignored.
    std::vector<std::string> rank_by_question(const std::string& question,
                                              const std::set<std::string>& pool,
                                              std::size_t k) const;

    const std::vector<std::string>& vocabulary() const { return vocabulary_; }
    double avg_doc_length() const { return avg_doc_length_; }
    const std::vector<std::size_t>& doc_lengths() const { return doc_lengths_; }
    bool has_token(const std::string& relation, const std::string& token) const;

private:
    double bm25(const std::vector<std::string>& query_tokens,
                std::size_t ordinal) const;
    double scored(const std::string& query, std::size_t ordinal) const;

    std::vector<std::string> vocabulary_;  // sorted; ordinal = position
    std::map<std::string, std::vector<std::pair<std::size_t, std::size_t>>>
        token_postings_;  // token -> (ordinal, term frequency)
    std::vector<std::size_t> doc_lengths_;
    double avg_doc_length_ = 0.0;
    std::shared_ptr<const RelationScorer> scorer_;
};

}  // namespace readi
