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
 * Arithmetic rule expressions for sweep parameters, such as "8*ceil(log2(n))"
 * or "1/normH". Supports + − * / ^, unary minus, parentheses, numeric
 * literals, named variables and the functions log2, log, exp, sqrt, ceil,
 * floor, round, abs, min and max.
 */

#pragma once

#include <cctype>
#include <cstdint>
#include <cstdlib>
#include <cmath>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "ckg/errors.hpp"

namespace ckg {

using RuleVars = std::map<std::string, double, std::less<>>;

namespace detail {

class RuleParser {
  public:
    RuleParser(std::string_view src, const RuleVars &vars) : src_(src), vars_(vars) {}

    double run() {
        const double v = expr();
        skip_ws();
        if (pos_ != src_.size()) {
            error("unexpected '" + std::string(1, src_[pos_]) + "'");
        }
        return v;
    }

  private:
    [[noreturn]] void error(const std::string &what) const {
        fail(ErrorKind::ParseError,
             "rule '" + std::string(src_) + "' at column " + std::to_string(pos_ + 1) + ": " + what);
    }

    void skip_ws() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) {
            ++pos_;
        }
    }

    bool eat(char c) {
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    double expr() {
        double v = term();
        for (;;) {
            if (eat('+')) {
                v += term();
            } else if (eat('-')) {
                v -= term();
            } else {
                return v;
            }
        }
    }

    double term() {
        double v = unary();
        for (;;) {
            if (eat('*')) {
                v *= unary();
            } else if (eat('/')) {
                v /= unary();
            } else {
                return v;
            }
        }
    }

    double unary() {
        if (eat('-')) {
            return -unary();
        }
        if (eat('+')) {
            return unary();
        }
        const double base = primary();
        if (eat('^')) {
            return std::pow(base, unary());
        }
        return base;
    }

    double primary() {
        skip_ws();
        if (pos_ >= src_.size()) {
            error("unexpected end of expression");
        }
        const char c = src_[pos_];
        if (c == '(') {
            ++pos_;
            const double v = expr();
            if (!eat(')')) {
                error("expected ')'");
            }
            return v;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            return number();
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            const std::size_t start = pos_;
            while (pos_ < src_.size() &&
                   (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
                ++pos_;
            }
            const std::string_view name = src_.substr(start, pos_ - start);
            if (eat('(')) {
                std::vector<double> args{expr()};
                while (eat(',')) {
                    args.push_back(expr());
                }
                if (!eat(')')) {
                    error("expected ')'");
                }
                return call(name, args);
            }
            auto it = vars_.find(name);
            if (it == vars_.end()) {
                error("unknown variable '" + std::string(name) + "'");
            }
            return it->second;
        }
        error("unexpected '" + std::string(1, c) + "'");
    }

    double number() {
        char *end = nullptr;
        const std::string buf(src_.substr(pos_));
        const double v = std::strtod(buf.c_str(), &end);
        const auto used = static_cast<std::size_t>(end - buf.c_str());
        if (used == 0) {
            error("bad number");
        }
        pos_ += used;
        return v;
    }

    double call(std::string_view f, const std::vector<double> &a) {
        auto unary_fn = [&](double (*fn)(double)) {
            if (a.size() != 1) {
                error(std::string(f) + " takes one argument");
            }
            return fn(a[0]);
        };
        if (f == "log2") return unary_fn([](double x) { return std::log2(x); });
        if (f == "log" || f == "ln") return unary_fn([](double x) { return std::log(x); });
        if (f == "exp") return unary_fn([](double x) { return std::exp(x); });
        if (f == "sqrt") return unary_fn([](double x) { return std::sqrt(x); });
        if (f == "ceil") return unary_fn([](double x) { return std::ceil(x); });
        if (f == "floor") return unary_fn([](double x) { return std::floor(x); });
        if (f == "round") return unary_fn([](double x) { return std::round(x); });
        if (f == "abs") return unary_fn([](double x) { return std::abs(x); });
        if (f == "min" || f == "max") {
            if (a.size() < 2) {
                error(std::string(f) + " takes at least two arguments");
            }
            double v = a[0];
            for (double x : a) {
                v = f == "min" ? std::min(v, x) : std::max(v, x);
            }
            return v;
        }
        error("unknown function '" + std::string(f) + "'");
    }

    std::string_view src_;
    const RuleVars &vars_;
    std::size_t pos_ = 0;
};

} // namespace detail

/// Evaluates `rule` with the given variables. Throws ParseError.
inline double eval_rule(std::string_view rule, const RuleVars &vars = {}) {
    return detail::RuleParser(rule, vars).run();
}

/// Evaluates `rule` and requires a finite integral result >= `min`.
inline std::int64_t eval_integer_rule(std::string_view rule, const RuleVars &vars, std::int64_t min = 1) {
    const double v = eval_rule(rule, vars);
    const double r = std::round(v);
    if (!std::isfinite(v) || std::abs(v - r) > 1e-9 * std::max(1.0, std::abs(v)) ||
        r < static_cast<double>(min)) {
        fail(ErrorKind::BadParameter, "rule '" + std::string(rule) + "' gave " + std::to_string(v) +
                                          ", expected an integer >= " + std::to_string(min));
    }
    return static_cast<std::int64_t>(r);
}

} // namespace ckg
