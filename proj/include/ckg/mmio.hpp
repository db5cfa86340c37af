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
 * Matrix Market I/O for Hamiltonians, jump sets and superoperators.
 * Writes coordinate complex files (hermitian storage when requested) with
 * `%key=value` metadata lines; reads coordinate or array files of any field
 * and symmetry. A jump set is stored as one (M·n) x n file with `%jumps=M`.
 */

#pragma once

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <string>

#include "ckg/errors.hpp"
#include "ckg/hamiltonian.hpp"
#include "ckg/jumps.hpp"
#include "ckg/matrix_core.hpp"

namespace ckg {

using MatrixMeta = std::map<std::string, std::string>;

struct MarketMatrix {
    ComplexMatrix matrix;
    MatrixMeta meta;
};

/// Writes nonzero entries (lower triangle only when `hermitian`).
inline void write_market(std::ostream &out, const ComplexMatrix &a, bool hermitian,
                         const MatrixMeta &meta = {}) {
    if (hermitian && (a.rows() != a.cols() || !is_hermitian(a))) {
        fail(ErrorKind::NonHermitianInput, "hermitian Matrix Market storage needs a hermitian matrix");
    }
    out << "%%MatrixMarket matrix coordinate complex " << (hermitian ? "hermitian" : "general") << "\n";
    for (const auto &[k, v] : meta) {
        out << "%" << k << "=" << v << "\n";
    }
    std::size_t nnz = 0;
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
        for (Eigen::Index i = hermitian ? j : 0; i < a.rows(); ++i) {
            nnz += a(i, j) != cplx(0.0);
        }
    }
    out << a.rows() << " " << a.cols() << " " << nnz << "\n";
    out << std::setprecision(17);
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
        for (Eigen::Index i = hermitian ? j : 0; i < a.rows(); ++i) {
            if (a(i, j) != cplx(0.0)) {
                out << i + 1 << " " << j + 1 << " " << a(i, j).real() << " " << a(i, j).imag() << "\n";
            }
        }
    }
}

inline MarketMatrix read_market(std::istream &in) {
    std::string line;
    if (!std::getline(in, line)) {
        fail(ErrorKind::ParseError, "empty Matrix Market stream");
    }
    std::string lower = line;
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    std::istringstream banner(lower);
    std::string tag, object, format, field, symmetry;
    banner >> tag >> object >> format >> field >> symmetry;
    if (tag != "%%matrixmarket" || object != "matrix" ||
        (format != "coordinate" && format != "array")) {
        fail(ErrorKind::ParseError, "unsupported Matrix Market banner '" + line + "'");
    }
    const bool is_complex = field == "complex";
    const bool is_pattern = field == "pattern";
    if (!is_complex && !is_pattern && field != "real" && field != "integer" && field != "double") {
        fail(ErrorKind::ParseError, "unsupported field '" + field + "'");
    }
    if (symmetry != "general" && symmetry != "symmetric" && symmetry != "hermitian" &&
        symmetry != "skew-symmetric") {
        fail(ErrorKind::ParseError, "unsupported symmetry '" + symmetry + "'");
    }
    MarketMatrix mm;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        if (line[0] != '%') {
            break;
        }
        const auto eq = line.find('=');
        if (eq != std::string::npos && eq > 1) {
            mm.meta[line.substr(1, eq - 1)] = line.substr(eq + 1);
        }
    }
    std::istringstream size_line(line);
    long rows = 0, cols = 0, nnz = 0;
    size_line >> rows >> cols;
    if (format == "coordinate") {
        size_line >> nnz;
    }
    if (!size_line || rows <= 0 || cols <= 0 || nnz < 0) {
        fail(ErrorKind::ParseError, "bad Matrix Market size line '" + line + "'");
    }
    mm.matrix = ComplexMatrix::Zero(rows, cols);
    auto read_value = [&](std::istream &s) {
        if (is_pattern) {
            return cplx(1.0);
        }
        double re = 0.0, im = 0.0;
        s >> re;
        if (is_complex) {
            s >> im;
        }
        if (!s) {
            fail(ErrorKind::ParseError, "truncated Matrix Market entry");
        }
        return cplx(re, im);
    };
    auto place = [&](long i, long j, cplx v) {
        if (i < 0 || j < 0 || i >= rows || j >= cols) {
            fail(ErrorKind::ParseError, "Matrix Market index out of range");
        }
        mm.matrix(i, j) += v;
        if (i != j) {
            if (symmetry == "symmetric") {
                mm.matrix(j, i) += v;
            } else if (symmetry == "hermitian") {
                mm.matrix(j, i) += std::conj(v);
            } else if (symmetry == "skew-symmetric") {
                mm.matrix(j, i) -= v;
            }
        }
    };
    if (format == "coordinate") {
        for (long k = 0; k < nnz; ++k) {
            long i = 0, j = 0;
            if (!(in >> i >> j)) {
                fail(ErrorKind::ParseError, "truncated Matrix Market entry list");
            }
            place(i - 1, j - 1, read_value(in));
        }
    } else {
        const bool full = symmetry == "general";
        for (long j = 0; j < cols; ++j) {
            for (long i = full ? 0 : j + (symmetry == "skew-symmetric"); i < rows; ++i) {
                place(i, j, read_value(in));
            }
        }
    }
    return mm;
}

inline void write_market_file(const std::string &path, const ComplexMatrix &a, bool hermitian,
                              const MatrixMeta &meta = {}) {
    std::ofstream out(path);
    if (!out) {
        fail(ErrorKind::IoError, "cannot write '" + path + "'");
    }
    write_market(out, a, hermitian, meta);
}

inline MarketMatrix read_market_file(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        fail(ErrorKind::IoError, "cannot open '" + path + "'");
    }
    return read_market(in);
}

inline MatrixMeta hamiltonian_meta(const Hamiltonian &h) {
    MatrixMeta meta{{"family", std::string(to_string(h.family()))}};
    for (const auto &[k, v] : h.params()) {
        meta[k] = std::to_string(v);
    }
    return meta;
}

inline void save_hamiltonian(const std::string &path, const Hamiltonian &h) {
    write_market_file(path, h.matrix(), true, hamiltonian_meta(h));
}

/**
 * Loads a Hamiltonian. When the metadata names a generator family with its
 * parameters, the generator is rerun (restoring closed-form eigenbases) and
 * must reproduce the stored matrix to 1e-12; otherwise the result is custom.
 */
inline Hamiltonian load_hamiltonian(const std::string &path) {
    MarketMatrix mm = read_market_file(path);
    if (mm.matrix.rows() != mm.matrix.cols()) {
        fail(ErrorKind::DimensionMismatch, "Hamiltonian file is not square");
    }
    auto num = [&](const char *k) -> std::optional<std::uint64_t> {
        auto it = mm.meta.find(k);
        if (it == mm.meta.end()) {
            return std::nullopt;
        }
        try {
            return std::stoull(it->second);
        } catch (const std::exception &) {
            fail(ErrorKind::ParseError, std::string("bad metadata value for ") + k);
        }
    };
    auto fam = mm.meta.find("family");
    std::optional<Hamiltonian> regenerated;
    if (fam != mm.meta.end()) {
        const Family f = family_from_string(fam->second);
        const auto n = num("n"), d = num("d"), seed = num("seed"), n0 = num("n0"), m = num("m");
        if (f == Family::cycle && n) {
            regenerated = make_cycle(static_cast<std::int64_t>(*n));
        } else if (f == Family::path && n) {
            regenerated = make_path(static_cast<std::int64_t>(*n));
        } else if (f == Family::hypercube && d) {
            regenerated = make_hypercube(static_cast<std::int64_t>(*d));
        } else if (f == Family::regular && n && d && seed) {
            regenerated = make_random_regular(static_cast<std::int64_t>(*n), static_cast<std::int64_t>(*d), *seed);
        } else if (f == Family::pauli_string && n0 && m && seed) {
            regenerated = make_pauli_string(static_cast<int>(*n0), static_cast<std::int64_t>(*m), *seed);
        }
    }
    if (regenerated) {
        if (regenerated->dim() != mm.matrix.rows() ||
            (regenerated->matrix() - mm.matrix).cwiseAbs().maxCoeff() > 1e-12) {
            fail(ErrorKind::InvariantViolation, "stored matrix does not match its generator metadata");
        }
        return *regenerated;
    }
    return Hamiltonian(std::move(mm.matrix), Family::custom);
}

inline void save_jumps(const std::string &path, const JumpSet &js) {
    const Eigen::Index n = js.dim();
    const auto m = static_cast<Eigen::Index>(js.size());
    ComplexMatrix stacked(m * n, n);
    for (Eigen::Index a = 0; a < m; ++a) {
        stacked.middleRows(a * n, n) = js.jumps[static_cast<std::size_t>(a)];
    }
    MatrixMeta meta{{"jumps", std::to_string(m)}, {"kind", std::string(to_string(js.kind))}};
    if (js.seed) {
        meta["seed"] = std::to_string(*js.seed);
    }
    write_market_file(path, stacked, false, meta);
}

inline JumpSet load_jumps(const std::string &path) {
    MarketMatrix mm = read_market_file(path);
    const Eigen::Index n = mm.matrix.cols();
    Eigen::Index m = 1;
    if (auto it = mm.meta.find("jumps"); it != mm.meta.end()) {
        m = std::stol(it->second);
    }
    if (m < 1 || mm.matrix.rows() != m * n) {
        fail(ErrorKind::DimensionMismatch, "jump file rows must equal M·n");
    }
    JumpSet js;
    for (Eigen::Index a = 0; a < m; ++a) {
        js.jumps.push_back(mm.matrix.middleRows(a * n, n));
    }
    if (auto it = mm.meta.find("kind"); it != mm.meta.end()) {
        js.kind = jump_kind_from_string(it->second);
    }
    if (auto it = mm.meta.find("seed"); it != mm.meta.end()) {
        js.seed = std::stoull(it->second);
    }
    return js;
}

} // namespace ckg
