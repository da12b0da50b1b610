#include "readi/relation_index.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <unordered_map>

namespace readi {

std::vector<std::string> tokenize(const std::string& text) {
    std::vector<std::string> tokens;
    std::string current;
    for (unsigned char c : text) {
        if (std::isalnum(c)) {
            current.push_back(static_cast<char>(std::tolower(c)));
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) {
        tokens.push_back(std::move(current));
    }
    return tokens;
}

RelationIndex RelationIndex::build(const std::set<std::string>& relations,
                                   const std::map<std::string, std::string>& aliases,
                                   std::shared_ptr<const RelationScorer> scorer) {
    if (relations.empty()) {
        throw BuildError("relation index needs a non-empty vocabulary");
    }
    RelationIndex index;
    index.scorer_ = std::move(scorer);
    index.vocabulary_.assign(relations.begin(), relations.end());

    std::size_t total_length = 0;
    for (std::size_t ordinal = 0; ordinal < index.vocabulary_.size(); ++ordinal) {
        const std::string& relation = index.vocabulary_[ordinal];
        std::vector<std::string> tokens = tokenize(relation);
        if (auto it = aliases.find(relation); it != aliases.end()) {
            for (std::string& t : tokenize(it->second)) {
                tokens.push_back(std::move(t));
            }
        }
        std::unordered_map<std::string, std::size_t> tf;
        for (const std::string& t : tokens) {
            ++tf[t];
        }
        for (const auto& [token, count] : tf) {
            index.token_postings_[token].emplace_back(ordinal, count);
        }
        index.doc_lengths_.push_back(tokens.size());
        total_length += tokens.size();
    }
    index.avg_doc_length_ =
        static_cast<double>(total_length) / static_cast<double>(index.vocabulary_.size());
    return index;
}

bool RelationIndex::has_token(const std::string& relation, const std::string& token) const {
    auto it = token_postings_.find(token);
    if (it == token_postings_.end()) {
        return false;
    }
    auto lo = std::lower_bound(vocabulary_.begin(), vocabulary_.end(), relation);
    if (lo == vocabulary_.end() || *lo != relation) {
        return false;
    }
    std::size_t ordinal = static_cast<std::size_t>(lo - vocabulary_.begin());
    for (const auto& [doc, _] : it->second) {
        if (doc == ordinal) {
            return true;
        }
    }
    return false;
}

double RelationIndex::bm25(const std::vector<std::string>& query_tokens,
                           std::size_t ordinal) const {
    const double n_docs = static_cast<double>(vocabulary_.size());
    const double doc_len = static_cast<double>(doc_lengths_[ordinal]);
    double score = 0.0;
    // Distinct query terms; repeating a token in the query adds nothing.
    std::set<std::string> seen;
    for (const std::string& token : query_tokens) {
        if (!seen.insert(token).second) {
            continue;
        }
        auto it = token_postings_.find(token);
        if (it == token_postings_.end()) {
            continue;
        }
        double tf = 0.0;
        for (const auto& [doc, count] : it->second) {
            if (doc == ordinal) {
                tf = static_cast<double>(count);
                break;
            }
        }
        if (tf == 0.0) {
            continue;
        }
        const double df = static_cast<double>(it->second.size());
        // Strictly positive idf: a matching token never lowers the score.
        const double idf = std::log(1.0 + (n_docs - df + 0.5) / (df + 0.5));
        score += idf * (tf * (kK1 + 1.0)) /
                 (tf + kK1 * (1.0 - kB + kB * doc_len / avg_doc_length_));
    }
    return score;
}

double RelationIndex::scored(const std::string& query, std::size_t ordinal) const {
    double lexical = bm25(tokenize(query), ordinal);
    if (scorer_) {
        return scorer_->score(query, vocabulary_[ordinal], lexical);
    }
    return lexical;
}

BoundRelation RelationIndex::bind_relation(const std::string& nl, std::size_t k) const {
    std::vector<std::pair<std::string, double>> scored_all;
    for (std::size_t ordinal = 0; ordinal < vocabulary_.size(); ++ordinal) {
        double s = scored(nl, ordinal);
        if (s > 0.0) {
            scored_all.emplace_back(vocabulary_[ordinal], s);
        }
    }
    std::stable_sort(scored_all.begin(), scored_all.end(),
                     [](const auto& a, const auto& b) {
                         if (a.second != b.second) {
                             return a.second > b.second;
                         }
                         return a.first < b.first;
                     });
    if (scored_all.size() > k) {
        scored_all.resize(k);
    }
    return BoundRelation{nl, std::move(scored_all)};
}

std::vector<std::string> RelationIndex::rank_by_question(const std::string& question,
                                                         const std::set<std::string>& pool,
                                                         std::size_t k) const {
    std::vector<std::pair<std::string, double>> scored_pool;
    for (const std::string& relation : pool) {
        auto lo = std::lower_bound(vocabulary_.begin(), vocabulary_.end(), relation);
        if (lo == vocabulary_.end() || *lo != relation) {
            continue;  // outside the vocabulary
        }
        std::size_t ordinal = static_cast<std::size_t>(lo - vocabulary_.begin());
        scored_pool.emplace_back(relation, scored(question, ordinal));
    }
    std::stable_sort(scored_pool.begin(), scored_pool.end(),
                     [](const auto& a, const auto& b) {
                         if (a.second != b.second) {
                             return a.second > b.second;
                         }
                         return a.first < b.first;
                     });
    if (scored_pool.size() > k) {
        scored_pool.resize(k);
    }
    std::vector<std::string> result;
    result.reserve(scored_pool.size());
    for (auto& [relation, _] : scored_pool) {
        result.push_back(std::move(relation));
    }
    return result;
}

}  // namespace readi
