#include "readi/path_model.hpp"

#include <cctype>

#include <nlohmann/json.hpp>

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

std::string normalize_arrows(std::string text) {
    // U+2192 as used by some model outputs.
    static const std::string kUnicodeArrow = "\xE2\x86\x92";
    std::size_t pos = 0;
    while ((pos = text.find(kUnicodeArrow, pos)) != std::string::npos) {
        text.replace(pos, kUnicodeArrow.size(), "->");
        pos += 2;
    }
    return text;
}

std::vector<std::string> split_arrows(const std::string& chain) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = chain.find("->", start);
        if (pos == std::string::npos) {
            parts.push_back(trim(chain.substr(start)));
            break;
        }
        parts.push_back(trim(chain.substr(start, pos - start)));
        start = pos + 2;
    }
    return parts;
}

// Position right after the key for `entity` if it appears as a mapping
// key (quoted or bare, followed by a colon); npos otherwise.
std::size_t find_entity_key(const std::string& block, const std::string& entity) {
    auto followed_by_colon = [&](std::size_t end) {
        std::size_t i = end;
        while (i < block.size() && std::isspace(static_cast<unsigned char>(block[i]))) {
            ++i;
        }
        return i < block.size() && block[i] == ':' ? i + 1 : std::string::npos;
    };

    std::string quoted = "\"" + entity + "\"";
    for (std::size_t pos = block.find(quoted); pos != std::string::npos;
         pos = block.find(quoted, pos + 1)) {
        if (std::size_t after = followed_by_colon(pos + quoted.size());
            after != std::string::npos) {
            return after;
        }
    }
    for (std::size_t pos = block.find(entity); pos != std::string::npos;
         pos = block.find(entity, pos + 1)) {
        if (std::size_t after = followed_by_colon(pos + entity.size());
            after != std::string::npos) {
            return after;
        }
    }
    return std::string::npos;
}

}  // namespace

ReasoningPath parse_reasoning_path(const std::string& text,
                                   const std::vector<std::string>& topic_entities) {
    std::size_t marker = text.rfind("Path:");
    if (marker == std::string::npos) {
        throw ParseError("no \"Path:\" block in generator output");
    }
    std::string block = normalize_arrows(text.substr(marker + 5));

    ReasoningPath path;
    for (const std::string& entity : topic_entities) {
        Constraint constraint{entity, {}};
        std::size_t after_key = find_entity_key(block, entity);
        if (after_key != std::string::npos) {
            std::size_t open = block.find('[', after_key);
            if (open != std::string::npos) {
                std::size_t close = block.find(']', open + 1);
                if (close != std::string::npos) {
                    std::string chain = block.substr(open + 1, close - open - 1);
                    std::vector<std::string> parts = split_arrows(chain);
                    std::size_t first = 0;
                    if (!parts.empty() && parts.front() == trim(entity)) {
                        first = 1;  // leading token repeats the key
                    }
                    for (std::size_t i = first; i < parts.size(); ++i) {
                        if (!parts[i].empty()) {
                            constraint.nl_relations.push_back(parts[i]);
                        }
                    }
                }
            }
        }
        path.constraints.push_back(std::move(constraint));
    }
    return path;
}

std::string serialize_reasoning_path(const ReasoningPath& path) {
    std::string out = "Path: {";
    bool first_constraint = true;
    for (const Constraint& constraint : path.constraints) {
        if (!first_constraint) {
            out += ", ";
        }
        first_constraint = false;
        out += "\"" + constraint.start + "\": [" + constraint.start;
        for (const std::string& relation : constraint.nl_relations) {
            out += " -> " + relation;
        }
        out += "]";
    }
    out += "}";
    return out;
}

PathLengths path_lengths(const ReasoningPath& path) {
    PathLengths lengths;
    for (const Constraint& constraint : path.constraints) {
        lengths.per_constraint.push_back(constraint.nl_relations.size());
        lengths.lpp += constraint.nl_relations.size();
    }
    return lengths;
}

ReasoningPath path_from_json(const std::string& json_text) {
    nlohmann::json j = nlohmann::json::parse(json_text);
    ReasoningPath path;
    path.question_id = j.value("question_id", "");
    for (const auto& jc : j.at("constraints")) {
        Constraint constraint;
        constraint.start = jc.at("start").get<std::string>();
        for (const auto& r : jc.value("relations", nlohmann::json::array())) {
            constraint.nl_relations.push_back(r.get<std::string>());
        }
        path.constraints.push_back(std::move(constraint));
    }
    return path;
}

std::string path_to_json(const ReasoningPath& path) {
    nlohmann::json j;
    j["question_id"] = path.question_id;
    nlohmann::json constraints = nlohmann::json::array();
    for (const Constraint& constraint : path.constraints) {
        nlohmann::json jc;
        jc["start"] = constraint.start;
        jc["relations"] = constraint.nl_relations;
        constraints.push_back(std::move(jc));
    }
    j["constraints"] = std::move(constraints);
    return j.dump();
}

}  // namespace readi
