// Copyright 2026 The ckg-lab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


/**
 * @file
 * Reader for the TOML subset used by scenario files: comments, [table] and
 * [dotted.table] headers, bare or quoted keys, and values that are strings,
 * integers, floats, booleans or (possibly multi-line) arrays of those.
 * Output is a JSON object.
 */

#pragma once

#include <cctype>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "ckg/errors.hpp"

namespace ckg {

namespace detail {

class TomlReader {
  public:
    explicit TomlReader(std::string_view src) : src_(src) {}

    nlohmann::json run() {
        nlohmann::json root = nlohmann::json::object();
        nlohmann::json *table = &root;
        for (;;) {
            skip_blank_lines();
            if (pos_ >= src_.size()) {
                return root;
            }
            if (peek() == '[') {
                ++pos_;
                if (peek() == '[') {
                    error("arrays of tables are not supported");
                }
                std::vector<std::string> path = dotted_key();
                expect(']');
                end_of_line();
                table = &root;
                for (const auto &k : path) {
                    nlohmann::json &next = (*table)[k];
                    if (next.is_null()) {
                        next = nlohmann::json::object();
                    } else if (!next.is_object()) {
                        error("key '" + k + "' is not a table");
                    }
                    table = &next;
                }
                continue;
            }
            std::vector<std::string> path = dotted_key();
            expect('=');
            nlohmann::json v = value();
            end_of_line();
            nlohmann::json *t = table;
            for (std::size_t i = 0; i + 1 < path.size(); ++i) {
                nlohmann::json &next = (*t)[path[i]];
                if (next.is_null()) {
                    next = nlohmann::json::object();
                }
                t = &next;
            }
            if (t->contains(path.back())) {
                error("duplicate key '" + path.back() + "'");
            }
            (*t)[path.back()] = std::move(v);
        }
    }

  private:
    [[noreturn]] void error(const std::string &what) const {
        fail(ErrorKind::ParseError, "toml line " + std::to_string(line_) + ": " + what);
    }

    char peek() const { return pos_ < src_.size() ? src_[pos_] : '\0'; }

    void skip_inline_ws() {
        while (peek() == ' ' || peek() == '\t') {
            ++pos_;
        }
    }

    void skip_comment() {
        if (peek() == '#') {
            while (pos_ < src_.size() && src_[pos_] != '\n') {
                ++pos_;
            }
        }
    }

    /// Skips whitespace, newlines and comments.
    void skip_blank_lines() {
        for (;;) {
            skip_inline_ws();
            skip_comment();
            if (peek() == '\r') {
                ++pos_;
            } else if (peek() == '\n') {
                ++pos_;
                ++line_;
            } else {
                return;
            }
        }
    }

    void end_of_line() {
        skip_inline_ws();
        skip_comment();
        if (peek() == '\r') {
            ++pos_;
        }
        if (pos_ < src_.size()) {
            if (peek() != '\n') {
                error("expected end of line");
            }
            ++pos_;
            ++line_;
        }
    }

    void expect(char c) {
        skip_inline_ws();
        if (peek() != c) {
            error(std::string("expected '") + c + "'");
        }
        ++pos_;
    }

    std::vector<std::string> dotted_key() {
        std::vector<std::string> out;
        for (;;) {
            skip_inline_ws();
            if (peek() == '"' || peek() == '\'') {
                out.push_back(string_value());
            } else {
                const std::size_t start = pos_;
                while (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' || peek() == '-') {
                    ++pos_;
                }
                if (pos_ == start) {
                    error("expected a key");
                }
                out.emplace_back(src_.substr(start, pos_ - start));
            }
            skip_inline_ws();
            if (peek() != '.') {
                return out;
            }
            ++pos_;
        }
    }

    std::string string_value() {
        const char quote = peek();
        ++pos_;
        std::string out;
        while (pos_ < src_.size() && src_[pos_] != quote) {
            char c = src_[pos_++];
            if (c == '\n') {
                error("unterminated string");
            }
            if (c == '\\' && quote == '"') {
                const char e = peek();
                ++pos_;
                switch (e) {
                case 'n': c = '\n'; break;
                case 't': c = '\t'; break;
                case '"': c = '"'; break;
                case '\\': c = '\\'; break;
                default: error("unsupported escape");
                }
            }
            out.push_back(c);
        }
        if (pos_ >= src_.size()) {
            error("unterminated string");
        }
        ++pos_;
        return out;
    }

    nlohmann::json value() {
        skip_inline_ws();
        const char c = peek();
        if (c == '"' || c == '\'') {
            return string_value();
        }
        if (c == '[') {
            ++pos_;
            nlohmann::json arr = nlohmann::json::array();
            for (;;) {
                skip_blank_lines();
                if (peek() == ']') {
                    ++pos_;
                    return arr;
                }
                arr.push_back(value());
                skip_blank_lines();
                if (peek() == ',') {
                    ++pos_;
                } else if (peek() != ']') {
                    error("expected ',' or ']' in array");
                }
            }
        }
        if (c == '{') {
            error("inline tables are not supported");
        }
        const std::size_t start = pos_;
        while (pos_ < src_.size() && src_[pos_] != ',' && src_[pos_] != ']' && src_[pos_] != '#' &&
               src_[pos_] != '\n' && src_[pos_] != '\r') {
            ++pos_;
        }
        std::string tok(src_.substr(start, pos_ - start));
        while (!tok.empty() && (tok.back() == ' ' || tok.back() == '\t')) {
            tok.pop_back();
        }
        if (tok == "true") {
            return true;
        }
        if (tok == "false") {
            return false;
        }
        std::string digits;
        for (char ch : tok) {
            if (ch != '_') {
                digits.push_back(ch);
            }
        }
        if (digits.empty()) {
            error("missing value");
        }
        const bool is_float = digits.find_first_of(".eE") != std::string::npos || digits == "inf" ||
                              digits == "+inf" || digits == "-inf" || digits == "nan";
        try {
            std::size_t used = 0;
            if (is_float) {
                const double d = std::stod(digits, &used);
                if (used == digits.size()) {
                    return d;
                }
            } else {
                const long long i = std::stoll(digits, &used, 10);
                if (used == digits.size()) {
                    return static_cast<std::int64_t>(i);
                }
            }
        } catch (const std::exception &) {
        }
        error("cannot parse value '" + tok + "'");
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    int line_ = 1;
};

} // namespace detail

/// Parses TOML-subset text into a JSON object. Throws ParseError.
inline nlohmann::json parse_toml(std::string_view text) { return detail::TomlReader(text).run(); }

inline nlohmann::json load_toml(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        fail(ErrorKind::IoError, "cannot open '" + path + "'");
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_toml(ss.str());
}

} // namespace ckg
