#include "readi/qa_reasoner.hpp"

#include <algorithm>
#include <array>
#include <tuple>

namespace readi {

namespace {

std::string trim(const std::string& s) {
    std::size_t begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) {
        return "";
    }
    std::size_t end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_commas_trimmed(const std::string& text) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t comma = text.find(',', start);
        std::string part = comma == std::string::npos ? text.substr(start)
                                                      : text.substr(start, comma - start);
        part = trim(part);
        if (!part.empty()) {
            parts.push_back(std::move(part));
        }
        if (comma == std::string::npos) {
            break;
        }
        start = comma + 1;
    }
    return parts;
}

std::string strip_quotes(const std::string& s) {
    if (s.size() >= 2 && ((s.front() == '\'' && s.back() == '\'') ||
                          (s.front() == '"' && s.back() == '"'))) {
        return s.substr(1, s.size() - 2);
    }
    return s;
}

}  // namespace

std::string EvidenceRendering::joined() const {
    std::string out;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        out += lines[i];
        if (i + 1 < lines.size()) {
            out += ",\n";
        }
    }
    return out;
}

EvidenceRendering serialize_evidence(const std::set<Triple>& evidence_triples,
                                     const KnowledgeGraph& graph) {
    // (subject name, relation, object name), raw ids as final tie-break.
    std::vector<std::array<std::string, 5>> keyed;
    keyed.reserve(evidence_triples.size());
    for (const Triple& t : evidence_triples) {
        keyed.push_back({graph.friendly_name(t.subject), t.predicate,
                         graph.friendly_name(t.object), t.subject, t.object});
    }
    std::sort(keyed.begin(), keyed.end());

    EvidenceRendering rendering;
    rendering.triple_count = evidence_triples.size();
    rendering.lines.reserve(keyed.size());
    for (const auto& k : keyed) {
        rendering.lines.push_back("(" + k[0] + ", " + k[1] + ", " + k[2] + ")");
    }
    return rendering;
}

std::vector<std::string> parse_kg_answer(const std::string& text) {
    // Last complete {...} span, scanning left to right.
    std::size_t best_open = std::string::npos;
    std::size_t best_close = std::string::npos;
    std::size_t pos = 0;
    while (true) {
        std::size_t open = text.find('{', pos);
        if (open == std::string::npos) {
            break;
        }
        std::size_t close = text.find('}', open + 1);
        if (close == std::string::npos) {
            break;
        }
        best_open = open;
        best_close = close;
        pos = close + 1;
    }
    if (best_open == std::string::npos) {
        return {};
    }
    return split_commas_trimmed(text.substr(best_open + 1, best_close - best_open - 1));
}

std::vector<std::string> parse_table_answer(const std::string& text) {
    std::size_t marker = std::string::npos;
    std::size_t line_start = 0;
    while (line_start <= text.size()) {
        std::size_t line_end = text.find('\n', line_start);
        std::string line = line_end == std::string::npos
                               ? text.substr(line_start)
                               : text.substr(line_start, line_end - line_start);
        if (trim(line).rfind("Answer:", 0) == 0) {
            marker = line_start;
        }
        if (line_end == std::string::npos) {
            break;
        }
        line_start = line_end + 1;
    }
    if (marker == std::string::npos) {
        return {};
    }
    std::size_t line_end = text.find('\n', marker);
    std::string line = line_end == std::string::npos
                           ? text.substr(marker)
                           : text.substr(marker, line_end - marker);
    std::size_t open = line.find('[');
    if (open == std::string::npos) {
        return {};
    }
    std::size_t close = line.find(']', open + 1);
    if (close == std::string::npos) {
        return {};
    }
    std::vector<std::string> answers;
    for (const std::string& part :
         split_commas_trimmed(line.substr(open + 1, close - open - 1))) {
        std::string value = trim(strip_quotes(part));
        if (!value.empty()) {
            answers.push_back(std::move(value));
        }
    }
    return answers;
}

}  // namespace readi
