#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace wheelftc::config {

// Scenario documents use a small TOML subset:  [section] and [[array_section]]
// headers, `key = value` pairs, '#' comments. Values are numbers, booleans,
// double-quoted strings, or (possibly nested, possibly multi-line) arrays.

struct Value;
using Array = std::vector<Value>;

struct Value {
    std::variant<double, bool, std::string, Array> data;
    std::string raw;  // source token for numbers, used for exact integers
    int line = 0;

    bool is_number() const { return std::holds_alternative<double>(data); }
    bool is_bool() const { return std::holds_alternative<bool>(data); }
    bool is_string() const { return std::holds_alternative<std::string>(data); }
    bool is_array() const { return std::holds_alternative<Array>(data); }
};

struct Table {
    std::vector<std::pair<std::string, Value>> entries;

    const Value* find(std::string_view key) const;
};

struct Section {
    std::string name;
    bool is_array = false;  // declared with [[name]]
    int line = 0;
    Table table;
};

struct Document {
    Table root;  // keys before the first header
    std::vector<Section> sections;
};

/// Throws Error(Parse) with the line number on malformed input.
Document parse_document(std::string_view text);

}  // namespace wheelftc::config
