#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "readi/kg_store.hpp"  // LoadError

namespace readi {

struct Table {
    std::string table_id;
    std::vector<std::string> headers;
    std::vector<std::vector<std::string>> rows;

    friend bool operator==(const Table&, const Table&) = default;
};

// JSON file {"table_id": str, "headers": [str], "rows": [[str]]}.
// Ragged rows and duplicate headers (after trimming) are LoadErrors.
Table load_table(const std::string& path);
Table table_from_json(const std::string& json_text);

// The table reasoning path: from the table to some columns, then to the
// rows whose cells match the constraints.
struct TablePath {
    std::vector<std::string> chosen_headers;
    std::map<std::string, std::vector<std::string>> constraints;

    bool empty() const { return chosen_headers.empty() && constraints.empty(); }
    friend bool operator==(const TablePath&, const TablePath&) = default;
};

enum class TableErrorReason {
    IrrelevantColumn,     // a path header is not in the table
    InsufficientColumns,  // fewer than two headers chosen
};

const char* to_string(TableErrorReason reason);

struct TableError {
    TableErrorReason reason;
    std::vector<std::string> bad_headers;  // non-empty for IrrelevantColumn

    friend bool operator==(const TableError&, const TableError&) = default;
};

// Extracts the bracketed list after the last "Chosen Headers:" marker and
// the brace mapping after the last "Constrains:" marker. Total: anything
// unparseable just leaves the path empty (classified downstream as
// insufficient columns). Single or double quotes both work.
TablePath parse_table_path(const std::string& text);

std::string serialize_table_path(const TablePath& path);

struct TableInstantiation {
    Table items;  // projected columns, filtered rows
    std::optional<TableError> error;
};

// Columns first, then rows. Header matching is case-insensitive after
// trimming; chosen headers and constraint keys missing from the table are
// IrrelevantColumn offenders, and fewer than two chosen headers is
// InsufficientColumns (column problems never report both). Row filtering
// keeps rows whose cell equals any required value (case-insensitive trim);
// a filter matching zero rows returns all rows of the projected columns
// with no error, so row mismatches never invoke editing.
TableInstantiation instantiate_table(const TablePath& path, const Table& table);

// Reason lines plus the full header list plus one sample row. The sample
// is rows[seed-derived index] when a seed is given and the first row
// otherwise; zero-row tables get no sample line.
std::string assemble_table_feedback(const TableError& error, const Table& table,
                                    std::optional<std::uint64_t> seed = std::nullopt);

// "| h1 | h2 |" header line, separator, and one sample row; the table
// description slot of the generation prompt.
std::string table_description(const Table& table,
                              std::optional<std::uint64_t> seed = std::nullopt);

// Reasoner serialization:
//   Headers: h1, h2
//   item 1: (h1, v); (h2, v)
std::string serialize_table_items(const Table& items);

}  // namespace readi
