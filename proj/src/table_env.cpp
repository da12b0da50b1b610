#include "readi/table_env.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

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

std::string fold(const std::string& s) {
    std::string out = trim(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::string strip_quotes(const std::string& s) {
    if (s.size() >= 2 && ((s.front() == '\'' && s.back() == '\'') ||
                          (s.front() == '"' && s.back() == '"'))) {
        return s.substr(1, s.size() - 2);
    }
    return s;
}

std::vector<std::string> parse_bracket_list(const std::string& text) {
    std::vector<std::string> values;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t comma = text.find(',', start);
        std::string part = comma == std::string::npos ? text.substr(start)
                                                      : text.substr(start, comma - start);
        part = trim(strip_quotes(trim(part)));
        if (!part.empty()) {
            values.push_back(std::move(part));
        }
        if (comma == std::string::npos) {
            break;
        }
        start = comma + 1;
    }
    return values;
}

std::string quote_list(const std::vector<std::string>& values) {
    std::string out = "[";
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) {
            out += ", ";
        }
        out += "\"" + values[i] + "\"";
    }
    out += "]";
    return out;
}

std::size_t sample_row_index(std::size_t n_rows, std::optional<std::uint64_t> seed) {
    if (!seed.has_value() || n_rows <= 1) {
        return 0;
    }
    std::mt19937_64 rng(*seed);
    return static_cast<std::size_t>(rng() % n_rows);
}

std::string markdown_row(const std::vector<std::string>& cells) {
    std::string out = "|";
    for (const std::string& cell : cells) {
        out += " " + cell + " |";
    }
    return out;
}

}  // namespace

const char* to_string(TableErrorReason reason) {
    switch (reason) {
        case TableErrorReason::IrrelevantColumn: return "IrrelevantColumn";
        case TableErrorReason::InsufficientColumns: return "InsufficientColumns";
    }
    return "unknown";
}

Table table_from_json(const std::string& json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw LoadError(std::string("bad table json: ") + e.what());
    }
    Table table;
    table.table_id = j.value("table_id", "");
    for (const auto& h : j.at("headers")) {
        table.headers.push_back(h.get<std::string>());
    }
    std::set<std::string> seen;
    for (const std::string& header : table.headers) {
        if (!seen.insert(fold(header)).second) {
            throw LoadError("duplicate header: " + header);
        }
    }
    std::size_t row_index = 0;
    for (const auto& jr : j.value("rows", nlohmann::json::array())) {
        std::vector<std::string> row;
        for (const auto& cell : jr) {
            row.push_back(cell.is_string() ? cell.get<std::string>() : cell.dump());
        }
        if (row.size() != table.headers.size()) {
            throw LoadError("row " + std::to_string(row_index) + " has " +
                            std::to_string(row.size()) + " cells, expected " +
                            std::to_string(table.headers.size()));
        }
        table.rows.push_back(std::move(row));
        ++row_index;
    }
    return table;
}

Table load_table(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw LoadError("cannot open table file: " + path);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return table_from_json(buf.str());
}

TablePath parse_table_path(const std::string& text) {
    TablePath path;

    std::size_t headers_marker = text.rfind("Chosen Headers:");
    if (headers_marker != std::string::npos) {
        std::size_t open = text.find('[', headers_marker);
        if (open != std::string::npos) {
            std::size_t close = text.find(']', open + 1);
            if (close != std::string::npos) {
                path.chosen_headers =
                    parse_bracket_list(text.substr(open + 1, close - open - 1));
            }
        }
    }

    std::size_t constrains_marker = text.rfind("Constrains:");
    if (constrains_marker != std::string::npos) {
        std::size_t open = text.find('{', constrains_marker);
        if (open != std::string::npos) {
            std::size_t close = text.find('}', open + 1);
            if (close != std::string::npos) {
                // Tolerant "key": [v, ...] scanner; strict JSON not assumed.
                std::string body = text.substr(open + 1, close - open - 1);
                std::size_t pos = 0;
                while (pos < body.size()) {
                    std::size_t key_open = body.find_first_of("'\"", pos);
                    if (key_open == std::string::npos) {
                        break;
                    }
                    char quote = body[key_open];
                    std::size_t key_close = body.find(quote, key_open + 1);
                    if (key_close == std::string::npos) {
                        break;
                    }
                    std::string key = body.substr(key_open + 1, key_close - key_open - 1);
                    std::size_t colon = body.find(':', key_close + 1);
                    if (colon == std::string::npos) {
                        break;
                    }
                    std::size_t list_open = body.find('[', colon + 1);
                    std::size_t next_key = body.find_first_of("'\"", colon + 1);
                    std::vector<std::string> values;
                    if (list_open != std::string::npos &&
                        (next_key == std::string::npos || list_open <= next_key)) {
                        std::size_t list_close = body.find(']', list_open + 1);
                        if (list_close == std::string::npos) {
                            break;
                        }
                        values = parse_bracket_list(
                            body.substr(list_open + 1, list_close - list_open - 1));
                        pos = list_close + 1;
                    } else {
                        // Single unbracketed value up to the next comma.
                        std::size_t value_end = body.find(',', colon + 1);
                        std::string raw =
                            value_end == std::string::npos
                                ? body.substr(colon + 1)
                                : body.substr(colon + 1, value_end - colon - 1);
                        std::string value = trim(strip_quotes(trim(raw)));
                        if (!value.empty()) {
                            values.push_back(std::move(value));
                        }
                        pos = value_end == std::string::npos ? body.size() : value_end + 1;
                    }
                    if (!key.empty() && !values.empty()) {
                        path.constraints[key] = std::move(values);
                    }
                }
            }
        }
    }
    return path;
}

std::string serialize_table_path(const TablePath& path) {
    std::string out = "Chosen Headers: " + quote_list(path.chosen_headers);
    out += "\nConstrains: {";
    bool first = true;
    for (const auto& [key, values] : path.constraints) {
        if (!first) {
            out += ", ";
        }
        first = false;
        out += "\"" + key + "\": " + quote_list(values);
    }
    out += "}";
    return out;
}

TableInstantiation instantiate_table(const TablePath& path, const Table& table) {
    TableInstantiation result;
    result.items.table_id = table.table_id;

    std::map<std::string, std::size_t> header_by_fold;
    for (std::size_t i = 0; i < table.headers.size(); ++i) {
        header_by_fold[fold(table.headers[i])] = i;
    }

    // Column check first; row mismatches never produce an error.
    std::vector<std::string> offenders;
    for (const std::string& header : path.chosen_headers) {
        if (header_by_fold.find(fold(header)) == header_by_fold.end()) {
            offenders.push_back(header);
        }
    }
    for (const auto& [key, _] : path.constraints) {
        if (header_by_fold.find(fold(key)) == header_by_fold.end()) {
            offenders.push_back(key);
        }
    }
    if (!offenders.empty()) {
        result.error = TableError{TableErrorReason::IrrelevantColumn, offenders};
        return result;
    }
    if (path.chosen_headers.size() < 2) {
        result.error = TableError{TableErrorReason::InsufficientColumns, {}};
        return result;
    }

    std::vector<std::size_t> projection;
    for (const std::string& header : path.chosen_headers) {
        std::size_t col = header_by_fold.at(fold(header));
        result.items.headers.push_back(table.headers[col]);
        projection.push_back(col);
    }

    auto project = [&](const std::vector<std::string>& row) {
        std::vector<std::string> cells;
        cells.reserve(projection.size());
        for (std::size_t col : projection) {
            cells.push_back(row[col]);
        }
        return cells;
    };

    std::vector<std::vector<std::string>> kept;
    for (const auto& row : table.rows) {
        bool match = true;
        for (const auto& [key, values] : path.constraints) {
            const std::string& cell = row[header_by_fold.at(fold(key))];
            bool any = std::any_of(values.begin(), values.end(), [&](const std::string& v) {
                return fold(cell) == fold(v);
            });
            if (!any) {
                match = false;
                break;
            }
        }
        if (match) {
            kept.push_back(project(row));
        }
    }
    if (kept.empty()) {
        // Row constraints that ground to nothing fall back to every row.
        for (const auto& row : table.rows) {
            kept.push_back(project(row));
        }
    }
    result.items.rows = std::move(kept);
    return result;
}

std::string assemble_table_feedback(const TableError& error, const Table& table,
                                    std::optional<std::uint64_t> seed) {
    std::string headers = quote_list(table.headers);
    std::string out;
    if (error.reason == TableErrorReason::IrrelevantColumn) {
        std::string bad = "[";
        for (std::size_t i = 0; i < error.bad_headers.size(); ++i) {
            if (i) {
                bad += ", ";
            }
            bad += "'" + error.bad_headers[i] + "'";
        }
        bad += "]";
        out = "1. Header " + bad + " not in candidate Headers. You can only choose headers from " +
              headers + ".";
    } else {
        out = "1. Insufficient columns: choose at least two headers to constrain the "
              "answer. You can only choose headers from " +
              headers + ".";
    }
    if (!table.rows.empty()) {
        std::size_t row = sample_row_index(table.rows.size(), seed);
        out += "\nExample row:\n" + markdown_row(table.headers) + "\n" +
               markdown_row(table.rows[row]);
    }
    return out;
}

std::string table_description(const Table& table, std::optional<std::uint64_t> seed) {
    std::string out = markdown_row(table.headers);
    out += "\n|";
    for (std::size_t i = 0; i < table.headers.size(); ++i) {
        out += " -- |";
    }
    if (!table.rows.empty()) {
        std::size_t row = sample_row_index(table.rows.size(), seed);
        out += "\n" + markdown_row(table.rows[row]);
    }
    return out;
}

std::string serialize_table_items(const Table& items) {
    std::string out = "Headers: ";
    for (std::size_t i = 0; i < items.headers.size(); ++i) {
        if (i) {
            out += ", ";
        }
        out += items.headers[i];
    }
    for (std::size_t r = 0; r < items.rows.size(); ++r) {
        out += "\nitem " + std::to_string(r + 1) + ":";
        for (std::size_t c = 0; c < items.headers.size(); ++c) {
            out += std::string(c == 0 ? " " : "; ") + "(" + items.headers[c] + ", " +
                   items.rows[r][c] + ")";
        }
    }
    return out;
}

}  // namespace readi
