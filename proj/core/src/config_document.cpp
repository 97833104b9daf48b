#include "wheelftc/config_document.hpp"

#include <cctype>
#include <charconv>
#include <set>

#include "wheelftc/error.hpp"

namespace wheelftc::config {

const Value* Table::find(std::string_view key) const {
    for (const auto& [k, v] : entries) {
        if (k == key) {
            return &v;
        }
    }
    return nullptr;
}

namespace {

class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    Document run() {
        Document doc;
        Table* current = &doc.root;
        std::set<std::string> seen_sections;
        while (true) {
            skip_blank_lines();
            if (at_end()) break;
            if (peek() == '[') {
                const int header_line = line_;
                bool is_array = false;
                get();
                if (peek() == '[') {
                    get();
                    is_array = true;
                }
                skip_inline_space();
                std::string name = read_key();
                skip_inline_space();
                expect(']');
                if (is_array) expect(']');
                finish_line();
                if (!is_array && !seen_sections.insert(name).second) {
                    fail(header_line, "duplicate section [" + name + "]");
                }
                doc.sections.push_back(Section{name, is_array, header_line, {}});
                current = &doc.sections.back().table;
                continue;
            }
            const int key_line = line_;
            std::string key = read_key();
            skip_inline_space();
            expect('=');
            skip_inline_space();
            Value value = read_value();
            finish_line();
            if (current->find(key) != nullptr) {
                fail(key_line, "duplicate key '" + key + "'");
            }
            current->entries.emplace_back(std::move(key), std::move(value));
        }
        return doc;
    }

private:
    [[noreturn]] void fail(int line, const std::string& msg) const {
        throw Error(ErrorCode::Parse, "line " + std::to_string(line) + ": " + msg);
    }
    [[noreturn]] void fail(const std::string& msg) const { fail(line_, msg); }

    bool at_end() const { return pos_ >= text_.size(); }
    char peek() const { return at_end() ? '\0' : text_[pos_]; }
    char get() {
        const char c = text_[pos_++];
        if (c == '\n') ++line_;
        return c;
    }

    void expect(char c) {
        if (at_end() || peek() != c) {
            fail(std::string("expected '") + c + "'");
        }
        get();
    }

    void skip_inline_space() {
        while (!at_end() && (peek() == ' ' || peek() == '\t' || peek() == '\r')) get();
    }

    void skip_comment() {
        if (peek() == '#') {
            while (!at_end() && peek() != '\n') get();
        }
    }

    // Whitespace, newlines and comments.
    void skip_blank_lines() {
        while (!at_end()) {
            skip_inline_space();
            skip_comment();
            if (!at_end() && peek() == '\n') {
                get();
                continue;
            }
            break;
        }
    }

    void finish_line() {
        skip_inline_space();
        skip_comment();
        if (at_end()) return;
        if (peek() != '\n') {
            fail(std::string("unexpected trailing character '") + peek() + "'");
        }
        get();
    }

    std::string read_key() {
        std::string key;
        while (!at_end()) {
            const char c = peek();
            if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-') {
                key.push_back(get());
            } else {
                break;
            }
        }
        if (key.empty()) fail("expected a key");
        return key;
    }

    Value read_value() {
        Value v;
        v.line = line_;
        const char c = peek();
        if (c == '[') {
            get();
            Array items;
            while (true) {
                skip_blank_lines();
                if (peek() == ']') {
                    get();
                    break;
                }
                items.push_back(read_value());
                skip_blank_lines();
                if (peek() == ',') {
                    get();
                    continue;
                }
                if (peek() == ']') {
                    get();
                    break;
                }
                fail("expected ',' or ']' in array");
            }
            v.data = std::move(items);
            return v;
        }
        if (c == '"') {
            get();
            std::string s;
            while (true) {
                if (at_end() || peek() == '\n') fail("unterminated string");
                char ch = get();
                if (ch == '"') break;
                if (ch == '\\') {
                    if (at_end()) fail("unterminated string");
                    const char esc = get();
                    switch (esc) {
                        case 'n': ch = '\n'; break;
                        case 't': ch = '\t'; break;
                        case '"': ch = '"'; break;
                        case '\\': ch = '\\'; break;
                        default: fail(std::string("unknown escape '\\") + esc + "'");
                    }
                }
                s.push_back(ch);
            }
            v.data = std::move(s);
            return v;
        }
        std::string token;
        while (!at_end()) {
            const char ch = peek();
            if (std::isalnum(static_cast<unsigned char>(ch)) || ch == '.' || ch == '+' || ch == '-' || ch == '_') {
                token.push_back(get());
            } else {
                break;
            }
        }
        if (token.empty()) fail("expected a value");
        if (token == "true" || token == "false") {
            v.data = token == "true";
            return v;
        }
        std::string digits;
        for (char ch : token) {
            if (ch != '_') digits.push_back(ch);
        }
        const char* first = digits.data();
        if (*first == '+') ++first;
        double number = 0.0;
        const auto [end, ec] = std::from_chars(first, digits.data() + digits.size(), number);
        if (ec != std::errc{} || end != digits.data() + digits.size()) {
            fail("invalid value '" + token + "'");
        }
        v.data = number;
        v.raw = digits;
        return v;
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    int line_ = 1;
};

}  // namespace

Document parse_document(std::string_view text) { return Parser(text).run(); }

}  // namespace wheelftc::config
