#include "readi/kg_store.hpp"

#include <fstream>
#include <sstream>

namespace readi {

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw LoadError("cannot open file: " + path);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string::npos) {
            if (start < text.size()) {
                lines.push_back(text.substr(start));
            }
            break;
        }
        std::string line = text.substr(start, end - start);
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        lines.push_back(std::move(line));
        start = end + 1;
    }
    return lines;
}

std::vector<std::string> split_tabs(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        std::size_t end = line.find('\t', start);
        if (end == std::string::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, end - start));
        start = end + 1;
    }
    return fields;
}

}  // namespace

KnowledgeGraph::KnowledgeGraph(std::set<Triple> triples,
                               std::map<std::string, std::string> names,
                               std::set<std::string> compound_ids)
    : triples_(std::move(triples)),
      names_(std::move(names)),
      compound_ids_(std::move(compound_ids)) {
    for (const Triple& t : triples_) {
        out_index_[t.subject][t.predicate].insert(t.object);
    }
}

std::set<std::string> KnowledgeGraph::out_relations(const std::string& entity) const {
    std::set<std::string> relations;
    auto it = out_index_.find(entity);
    if (it == out_index_.end()) {
        return relations;
    }
    for (const auto& [predicate, _] : it->second) {
        relations.insert(predicate);
    }
    return relations;
}

std::set<std::string> KnowledgeGraph::successors(const std::string& entity,
                                                 const std::string& relation) const {
    auto it = out_index_.find(entity);
    if (it == out_index_.end()) {
        return {};
    }
    auto jt = it->second.find(relation);
    if (jt == it->second.end()) {
        return {};
    }
    return jt->second;
}

const std::string& KnowledgeGraph::friendly_name(const std::string& entity) const {
    auto it = names_.find(entity);
    return it != names_.end() ? it->second : entity;
}

std::set<std::string> KnowledgeGraph::relation_vocabulary() const {
    std::set<std::string> vocabulary;
    for (const Triple& t : triples_) {
        vocabulary.insert(t.predicate);
    }
    return vocabulary;
}

std::string KnowledgeGraph::dump_triples_tsv() const {
    std::string out;
    for (const Triple& t : triples_) {
        out += t.subject;
        out += '\t';
        out += t.predicate;
        out += '\t';
        out += t.object;
        out += '\n';
    }
    return out;
}

KnowledgeGraph parse_graph(const std::string& triples_tsv,
                           const std::string& names_tsv,
                           const std::optional<std::string>& compound_lines) {
    std::set<Triple> triples;
    std::size_t line_no = 0;
    for (const std::string& line : split_lines(triples_tsv)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        auto fields = split_tabs(line);
        if (fields.size() != 3) {
            throw LoadError("triples line " + std::to_string(line_no) + ": expected 3 columns, got " +
                            std::to_string(fields.size()));
        }
        if (fields[0].empty() || fields[1].empty()) {
            throw LoadError("triples line " + std::to_string(line_no) +
                            ": empty subject or predicate");
        }
        triples.insert(Triple{fields[0], fields[1], fields[2]});
    }

    std::map<std::string, std::string> names;
    line_no = 0;
    for (const std::string& line : split_lines(names_tsv)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        auto fields = split_tabs(line);
        if (fields.size() != 2) {
            throw LoadError("names line " + std::to_string(line_no) + ": expected 2 columns, got " +
                            std::to_string(fields.size()));
        }
        auto [it, inserted] = names.emplace(fields[0], fields[1]);
        if (!inserted && it->second != fields[1]) {
            throw LoadError("names line " + std::to_string(line_no) + ": conflicting name for id '" +
                            fields[0] + "'");
        }
    }

    std::set<std::string> compound_ids;
    if (compound_lines.has_value()) {
        std::set<std::string> known;
        for (const Triple& t : triples) {
            known.insert(t.subject);
            known.insert(t.object);
        }
        // Keep the invariant that every compound id occurs in some triple.
        for (const std::string& line : split_lines(*compound_lines)) {
            if (!line.empty() && known.count(line)) {
                compound_ids.insert(line);
            }
        }
    } else {
        // Freebase CVT nodes are unnamed: default to ids in some triple
        // that have no names entry.
        for (const Triple& t : triples) {
            if (names.find(t.subject) == names.end()) {
                compound_ids.insert(t.subject);
            }
            if (names.find(t.object) == names.end()) {
                compound_ids.insert(t.object);
            }
        }
    }

    return KnowledgeGraph(std::move(triples), std::move(names), std::move(compound_ids));
}

KnowledgeGraph load_graph(const std::string& triples_path,
                          const std::string& names_path,
                          const std::string& compound_path) {
    std::string triples_tsv = read_file(triples_path);
    std::string names_tsv = names_path.empty() ? std::string{} : read_file(names_path);
    std::optional<std::string> compound;
    if (!compound_path.empty()) {
        compound = read_file(compound_path);
    }
    return parse_graph(triples_tsv, names_tsv, compound);
}

}  // namespace readi
