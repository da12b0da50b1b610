#pragma once

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace readi {

// A single directed edge of the knowledge graph. The object may be an
// entity id or a literal string; literals simply have no outgoing edges.
struct Triple {
    std::string subject;
    std::string predicate;
    std::string object;

    friend auto operator<=>(const Triple&, const Triple&) = default;
};

struct LoadError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Immutable in-memory triple store. Construction happens once via
// load_graph(); every query afterwards is read-only, so concurrent
// readers need no synchronization.
//
// File formats:
//   triples.tsv   subject<TAB>predicate<TAB>object  (UTF-8, no header)
//   names.tsv     id<TAB>display name
//   compound.txt  one id per line
class KnowledgeGraph {
public:
    KnowledgeGraph() = default;
    KnowledgeGraph(std::set<Triple> triples,
                   std::map<std::string, std::string> names,
                   std::set<std::string> compound_ids);

    const std::set<Triple>& triples() const { return triples_; }
    std::size_t triple_count() const { return triples_.size(); }

    // Predicates of all edges leaving e. Unknown entity -> empty set.
    std::set<std::string> out_relations(const std::string& entity) const;

    // All objects o with (e, r, o) in the graph.
    std::set<std::string> successors(const std::string& entity,
                                     const std::string& relation) const;

    // Display name if one was loaded, otherwise the raw id. Compound
    // nodes deliberately fall through to their raw id.
    const std::string& friendly_name(const std::string& entity) const;

    bool is_compound(const std::string& entity) const {
        return compound_ids_.count(entity) > 0;
    }
    const std::set<std::string>& compound_ids() const { return compound_ids_; }
    const std::map<std::string, std::string>& names() const { return names_; }

    // Every distinct predicate; the vocabulary the relation index is built from.
    std::set<std::string> relation_vocabulary() const;

    // Serializes the triple set back to triples.tsv format. Loading the
    // dump yields an identical triple set.
    std::string dump_triples_tsv() const;

private:
    std::set<Triple> triples_;
    std::map<std::string, std::string> names_;
    std::set<std::string> compound_ids_;
    // out_index is exactly the projection of triples_: subject -> predicate -> objects.
    std::map<std::string, std::map<std::string, std::set<std::string>>> out_index_;
};

// Loads a graph from TSV files. compound_path may be empty; in that case
// compound ids default to ids appearing in some triple that have no names
// entry (Freebase CVT nodes are unnamed). Throws LoadError with the file
// and line number on malformed input or conflicting duplicate names.
KnowledgeGraph load_graph(const std::string& triples_path,
                          const std::string& names_path,
                          const std::string& compound_path = "");

// Same, from in-memory file contents. Used by load_graph and by tests.
KnowledgeGraph parse_graph(const std::string& triples_tsv,
                           const std::string& names_tsv,
                           const std::optional<std::string>& compound_lines);

}  // namespace readi
