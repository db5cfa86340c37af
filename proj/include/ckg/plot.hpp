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
 * Deterministic SVG plots of sweep CSVs: a linear panel above a log-log
 * panel, one series per (family, jump_kind), markers at per-x means with
 * min/max error bars over seeds. Also a small ASCII log-log preview.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "ckg/errors.hpp"
#include "ckg/experiments.hpp"

namespace ckg {

struct PlotSpec {
    std::string x = "n";
    std::string y = "gap";
    /// Columns joined with '/' to name a series; missing ones are skipped.
    std::vector<std::string> series = {"family", "jump_kind"};
    std::string title;
    int width = 720;
    int panel_height = 300;
};

struct SeriesPoint {
    double x = 0.0;
    double mean = 0.0;
    double min = 0.0;
    double max = 0.0;
    std::size_t count = 0;
};

struct Series {
    std::string name;
    std::vector<SeriesPoint> points;
};

/// Groups ok rows into series of per-x statistics. Throws MissingColumn for
/// absent x or y columns and InsufficientData when nothing is plottable.
inline std::vector<Series> plot_series(const CsvTable &t, const PlotSpec &spec) {
    const std::size_t xc = t.column(spec.x), yc = t.column(spec.y);
    std::vector<std::size_t> key_cols;
    for (const auto &c : spec.series) {
        if (t.has_column(c)) {
            key_cols.push_back(t.column(c));
        }
    }
    std::map<std::string, std::map<double, std::vector<double>>> groups;
    for (std::size_t i : t.ok_rows()) {
        const auto &row = t.rows[i];
        if (row[xc].empty() || row[yc].empty()) {
            continue;
        }
        std::string key;
        for (std::size_t k : key_cols) {
            key += (key.empty() ? "" : "/") + row[k];
        }
        double xv = 0.0, yv = 0.0;
        try {
            xv = std::stod(row[xc]);
            yv = std::stod(row[yc]);
        } catch (const std::exception &) {
            fail(ErrorKind::ParseError, "non-numeric plot cell");
        }
        if (std::isfinite(xv) && std::isfinite(yv)) {
            groups[key.empty() ? spec.y : key][xv].push_back(yv);
        }
    }
    std::vector<Series> out;
    for (const auto &[name, pts] : groups) {
        Series s{name, {}};
        for (const auto &[xv, ys] : pts) {
            SeriesPoint p{xv, 0.0, ys.front(), ys.front(), ys.size()};
            for (double v : ys) {
                p.mean += v;
                p.min = std::min(p.min, v);
                p.max = std::max(p.max, v);
            }
            p.mean /= static_cast<double>(ys.size());
            s.points.push_back(p);
        }
        out.push_back(std::move(s));
    }
    if (out.empty()) {
        fail(ErrorKind::InsufficientData, "no plottable rows for '" + spec.y + "' against '" + spec.x + "'");
    }
    return out;
}

namespace detail {

inline std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

inline std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

inline std::string xml_escape(const std::string &s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '&': out += "&amp;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

/// Roughly five round-number ticks covering [lo, hi].
inline std::vector<double> linear_ticks(double lo, double hi) {
    const double span = hi - lo;
    const double raw = span / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
        if (raw <= m * mag) {
            step = m * mag;
            break;
        }
    }
    std::vector<double> t;
    for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * step; v += step) {
        t.push_back(std::abs(v) < 1e-12 * step ? 0.0 : v);
    }
    return t;
}

/// Decades inside [lo, hi] (log10 units), with 2 and 5 added for short ranges.
inline std::vector<double> log_ticks(double lo, double hi) {
    std::vector<double> t;
    const bool fine = hi - lo < 2.0;
    for (double e = std::floor(lo); e <= std::ceil(hi); e += 1.0) {
        for (double m : fine ? std::vector<double>{1.0, 2.0, 5.0} : std::vector<double>{1.0}) {
            const double v = e + std::log10(m);
            if (v >= lo - 1e-12 && v <= hi + 1e-12) {
                t.push_back(v);
            }
        }
    }
    return t;
}

struct Axis {
    double lo = 0.0;
    double hi = 1.0;
    bool log = false;

    double map(double v) const { return log ? std::log10(v) : v; }
};

inline Axis make_axis(const std::vector<double> &values, bool log) {
    Axis a;
    a.log = log;
    double lo = INFINITY, hi = -INFINITY;
    for (double v : values) {
        if (log && !(v > 0.0)) {
            continue;
        }
        lo = std::min(lo, a.map(v));
        hi = std::max(hi, a.map(v));
    }
    if (!std::isfinite(lo)) {
        lo = 0.0;
        hi = 1.0;
    }
    if (hi - lo < 1e-12 * std::max(1.0, std::abs(hi))) {
        lo -= 0.5;
        hi += 0.5;
    }
    const double pad = 0.05 * (hi - lo);
    a.lo = lo - pad;
    a.hi = hi + pad;
    return a;
}

inline const char *palette(std::size_t i) {
    static const char *colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b"};
    return colors[i % 7];
}

inline void panel(std::string &svg, const std::vector<Series> &series, const PlotSpec &spec, bool log, int top) {
    const int left = 80, right = 170, height = spec.panel_height - 70;
    const int w = spec.width - left - right;
    std::vector<double> xs, ys;
    for (const auto &s : series) {
        for (const auto &p : s.points) {
            xs.push_back(p.x);
            ys.push_back(p.min);
            ys.push_back(p.max);
        }
    }
    const Axis ax = make_axis(xs, log), ay = make_axis(ys, log);
    auto px = [&](double v) { return left + (ax.map(v) - ax.lo) / (ax.hi - ax.lo) * w; };
    auto py = [&](double v) { return top + height - (ay.map(v) - ay.lo) / (ay.hi - ay.lo) * height; };
    const int y0 = top + height;
    svg += "<rect x=\"" + std::to_string(left) + "\" y=\"" + std::to_string(top) + "\" width=\"" +
           std::to_string(w) + "\" height=\"" + std::to_string(height) +
           "\" fill=\"none\" stroke=\"#333\" stroke-width=\"1\"/>\n";
    auto xt = log ? log_ticks(ax.lo, ax.hi) : linear_ticks(ax.lo, ax.hi);
    for (double t : xt) {
        const double v = log ? std::pow(10.0, t) : t;
        const std::string x = num(px(v));
        svg += "<line x1=\"" + x + "\" y1=\"" + std::to_string(y0) + "\" x2=\"" + x + "\" y2=\"" +
               std::to_string(y0 + 5) + "\" stroke=\"#333\"/>\n";
        svg += "<text x=\"" + x + "\" y=\"" + std::to_string(y0 + 18) +
               "\" font-size=\"11\" text-anchor=\"middle\">" + tick_label(v) + "</text>\n";
    }
    auto yt = log ? log_ticks(ay.lo, ay.hi) : linear_ticks(ay.lo, ay.hi);
    for (double t : yt) {
        const double v = log ? std::pow(10.0, t) : t;
        const std::string y = num(py(v));
        svg += "<line x1=\"" + std::to_string(left - 5) + "\" y1=\"" + y + "\" x2=\"" + std::to_string(left) +
               "\" y2=\"" + y + "\" stroke=\"#333\"/>\n";
        svg += "<text x=\"" + std::to_string(left - 8) + "\" y=\"" + y +
               "\" font-size=\"11\" text-anchor=\"end\" dominant-baseline=\"middle\">" + tick_label(v) + "</text>\n";
    }
    svg += "<text x=\"" + std::to_string(left + w / 2) + "\" y=\"" + std::to_string(y0 + 36) +
           "\" font-size=\"12\" text-anchor=\"middle\">" + xml_escape(spec.x) + (log ? " (log)" : "") + "</text>\n";
    svg += "<text x=\"20\" y=\"" + std::to_string(top + height / 2) +
           "\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 20 " +
           std::to_string(top + height / 2) + ")\">" + xml_escape(spec.y) + (log ? " (log)" : "") + "</text>\n";
    for (std::size_t si = 0; si < series.size(); ++si) {
        const auto &s = series[si];
        const char *c = palette(si);
        std::string path;
        for (const auto &p : s.points) {
            if (log && !(p.mean > 0.0)) {
                continue;
            }
            path += (path.empty() ? "M" : " L") + num(px(p.x)) + " " + num(py(p.mean));
        }
        svg += "<g class=\"series\" data-name=\"" + xml_escape(s.name) + "\">\n";
        if (!path.empty()) {
            svg += "<path d=\"" + path + "\" fill=\"none\" stroke=\"" + c + "\" stroke-width=\"1.5\"/>\n";
        }
        for (const auto &p : s.points) {
            if (log && !(p.min > 0.0)) {
                continue;
            }
            const std::string x = num(px(p.x));
            if (p.max > p.min) {
                svg += "<line x1=\"" + x + "\" y1=\"" + num(py(p.min)) + "\" x2=\"" + x + "\" y2=\"" +
                       num(py(p.max)) + "\" stroke=\"" + c + "\"/>\n";
            }
            svg += "<circle cx=\"" + x + "\" cy=\"" + num(py(p.mean)) + "\" r=\"3\" fill=\"" + c + "\"/>\n";
        }
        svg += "</g>\n";
        if (!log) {
            const int ly = top + 12 + static_cast<int>(si) * 16;
            svg += "<rect x=\"" + std::to_string(left + w + 12) + "\" y=\"" + std::to_string(ly - 8) +
                   "\" width=\"10\" height=\"10\" fill=\"" + c + "\"/>\n";
            svg += "<text x=\"" + std::to_string(left + w + 28) + "\" y=\"" + std::to_string(ly) +
                   "\" font-size=\"11\">" + xml_escape(s.name) + "</text>\n";
        }
    }
}

} // namespace detail

/// Two-panel SVG (linear above, log-log below). Byte-identical for equal input.
inline std::string render_svg(const CsvTable &t, const PlotSpec &spec = {}) {
    const std::vector<Series> series = plot_series(t, spec);
    const int height = 2 * spec.panel_height + 30;
    std::string svg = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(spec.width) + "\" height=\"" +
           std::to_string(height) + "\" viewBox=\"0 0 " + std::to_string(spec.width) + " " +
           std::to_string(height) + "\" font-family=\"sans-serif\">\n";
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    const std::string title = spec.title.empty() ? spec.y + " vs " + spec.x : spec.title;
    svg += "<text x=\"" + std::to_string(spec.width / 2) + "\" y=\"20\" font-size=\"14\" text-anchor=\"middle\">" +
           detail::xml_escape(title) + "</text>\n";
    svg += "<g class=\"panel\" data-scale=\"linear\">\n";
    detail::panel(svg, series, spec, false, 35);
    svg += "</g>\n<g class=\"panel\" data-scale=\"log-log\">\n";
    detail::panel(svg, series, spec, true, 35 + spec.panel_height);
    svg += "</g>\n</svg>\n";
    return svg;
}

/// Log-log scatter of per-x means on a character grid; series are marked
/// with letters a, b, c, ...
inline std::string render_ascii(const CsvTable &t, const PlotSpec &spec = {}, int cols = 64, int rows = 18) {
    const std::vector<Series> series = plot_series(t, spec);
    std::vector<double> xs, ys;
    for (const auto &s : series) {
        for (const auto &p : s.points) {
            if (p.x > 0.0 && p.mean > 0.0) {
                xs.push_back(p.x);
                ys.push_back(p.mean);
            }
        }
    }
    if (xs.empty()) {
        fail(ErrorKind::NonPositiveValue, "log-log preview needs positive values");
    }
    const auto [xmin, xmax] = std::minmax_element(xs.begin(), xs.end());
    const auto [ymin, ymax] = std::minmax_element(ys.begin(), ys.end());
    const double lx0 = std::log10(*xmin), lx1 = std::log10(*xmax);
    const double ly0 = std::log10(*ymin), ly1 = std::log10(*ymax);
    std::vector<std::string> grid(static_cast<std::size_t>(rows), std::string(static_cast<std::size_t>(cols), ' '));
    for (std::size_t si = 0; si < series.size(); ++si) {
        for (const auto &p : series[si].points) {
            if (!(p.x > 0.0 && p.mean > 0.0)) {
                continue;
            }
            const double fx = lx1 > lx0 ? (std::log10(p.x) - lx0) / (lx1 - lx0) : 0.5;
            const double fy = ly1 > ly0 ? (std::log10(p.mean) - ly0) / (ly1 - ly0) : 0.5;
            const auto c = static_cast<std::size_t>(std::lround(fx * (cols - 1)));
            const auto r = static_cast<std::size_t>(std::lround((1.0 - fy) * (rows - 1)));
            grid[r][c] = static_cast<char>('a' + static_cast<int>(si % 26));
        }
    }
    std::string out = spec.y + " (log) vs " + spec.x + " (log)\n";
    out += detail::tick_label(*ymax) + "\n";
    for (const auto &line : grid) {
        out += "|" + line + "\n";
    }
    out += "+" + std::string(static_cast<std::size_t>(cols), '-') + "\n";
    out += detail::tick_label(*ymin) + " at bottom; x from " + detail::tick_label(*xmin) + " to " +
           detail::tick_label(*xmax) + "\n";
    for (std::size_t si = 0; si < series.size(); ++si) {
        out += std::string(1, static_cast<char>('a' + static_cast<int>(si % 26))) + " = " + series[si].name + "\n";
    }
    return out;
}

} // namespace ckg
