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
 * Hamiltonian families: cycle, path, hypercube, random regular graphs and
 * random signed Pauli sums, plus a lazily cached eigensystem and Bohr table.
 */

#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ckg/errors.hpp"
#include "ckg/matrix_core.hpp"

namespace ckg {

/// Default cap on dense storage, in bytes.
inline constexpr std::size_t kMemoryBudgetBytes = std::size_t{2} << 30;

/// Fails with DimensionTooLarge when a dense `dim` x `dim` complex matrix
/// would exceed `budget` bytes.
inline void check_dense_budget(std::size_t dim, std::size_t budget = kMemoryBudgetBytes) {
    const long double bytes = static_cast<long double>(dim) * dim * sizeof(cplx);
    if (bytes > static_cast<long double>(budget)) {
        fail(ErrorKind::DimensionTooLarge, "dense " + std::to_string(dim) + "x" +
                                               std::to_string(dim) +
                                               " matrix exceeds the memory budget");
    }
}

enum class Family { cycle, path, hypercube, regular, pauli_string, custom };

constexpr std::string_view to_string(Family f) {
    switch (f) {
    case Family::cycle: return "cycle";
    case Family::path: return "path";
    case Family::hypercube: return "hypercube";
    case Family::regular: return "regular";
    case Family::pauli_string: return "pauli_string";
    case Family::custom: return "custom";
    }
    return "custom";
}

inline Family family_from_string(std::string_view s) {
    for (Family f : {Family::cycle, Family::path, Family::hypercube, Family::regular,
                     Family::pauli_string, Family::custom}) {
        if (s == to_string(f)) {
            return f;
        }
    }
    fail(ErrorKind::BadParameter, "unknown Hamiltonian family '" + std::string(s) + "'");
}

using Params = std::map<std::string, std::uint64_t>;

/**
 * Hermitian matrix plus family metadata. The eigensystem and Bohr table are
 * computed on first use and shared between copies; concurrent readers see
 * either nothing or the finished cache.
 */
class Hamiltonian {
  public:
    Hamiltonian(ComplexMatrix matrix, Family family, Params params = {})
        : matrix_(std::make_shared<const ComplexMatrix>(std::move(matrix))),
          family_(family), params_(std::move(params)), cache_(std::make_shared<Cache>()) {
        if (matrix_->rows() == 0 || !is_hermitian(*matrix_)) {
            fail(ErrorKind::NonHermitianInput, "Hamiltonian matrix must be non-empty and hermitian");
        }
    }

    /// Adopts an eigensystem known in closed form. `labels[j]` tags
    /// eigenvector j (momentum for cycles, bitstring for hypercubes).
    Hamiltonian(ComplexMatrix matrix, Family family, Params params, EigenSystem eig,
                std::vector<std::int64_t> labels)
        : Hamiltonian(std::move(matrix), family, std::move(params)) {
        if (eig.dim() != dim() || eig.vectors.rows() != dim() ||
            static_cast<Eigen::Index>(labels.size()) != dim()) {
            fail(ErrorKind::DimensionMismatch, "attached eigensystem has the wrong size");
        }
        labels_ = std::move(labels);
        std::call_once(cache_->once, [&] { cache_->fill(std::move(eig)); });
    }

    const ComplexMatrix &matrix() const { return *matrix_; }
    Family family() const { return family_; }
    const Params &params() const { return params_; }
    Eigen::Index dim() const { return matrix_->rows(); }

    std::optional<std::uint64_t> param(const std::string &key) const {
        auto it = params_.find(key);
        return it == params_.end() ? std::nullopt : std::optional(it->second);
    }

    const EigenSystem &eig() const {
        std::call_once(cache_->once, [&] { cache_->fill(hermitian_eigendecompose(*matrix_)); });
        return cache_->eig;
    }

    /// ν_lm = E_l − E_m.
    const RealMatrix &bohr() const {
        eig();
        return cache_->bohr;
    }

    /// ‖H‖ = max |E_j|.
    double norm() const { return eig().values.cwiseAbs().maxCoeff(); }

    /// Eigenvector labels from a closed-form basis; empty otherwise.
    const std::vector<std::int64_t> &labels() const { return labels_; }

    std::string id() const {
        std::string s(to_string(family_));
        s += "(";
        bool first = true;
        for (const auto &[k, v] : params_) {
            s += (first ? "" : ",") + k + "=" + std::to_string(v);
            first = false;
        }
        return s + ")";
    }

  private:
    struct Cache {
        std::once_flag once;
        EigenSystem eig;
        RealMatrix bohr;

        void fill(EigenSystem e) {
            eig = std::move(e);
            const Eigen::Index n = eig.dim();
            bohr.resize(n, n);
            for (Eigen::Index m = 0; m < n; ++m) {
                for (Eigen::Index l = 0; l < n; ++l) {
                    bohr(l, m) = eig.values[l] - eig.values[m];
                }
            }
        }
    };

    std::shared_ptr<const ComplexMatrix> matrix_;
    Family family_;
    Params params_;
    std::vector<std::int64_t> labels_;
    std::shared_ptr<Cache> cache_;
};

inline const RealMatrix &bohr_table(const Hamiltonian &h) { return h.bohr(); }

/**
 * n-cycle adjacency with its Fourier eigenbasis
 * |j> = n^{-1/2} Σ_a ζ^{-aj} |e_a>, ζ = e^{2πi/n}, eigenvalue 2cos(2πj/n).
 * Eigenvectors are sorted by energy, with momentum j ahead of n − j inside
 * each degenerate pair; labels() returns the momenta.
 */
inline Hamiltonian make_cycle(std::int64_t n) {
    if (n < 3) {
        fail(ErrorKind::BadSize, "cycle needs n >= 3, got " + std::to_string(n));
    }
    ComplexMatrix a = ComplexMatrix::Zero(n, n);
    for (std::int64_t i = 0; i < n; ++i) {
        a(i, (i + 1) % n) = 1.0;
        a((i + 1) % n, i) = 1.0;
    }
    std::vector<std::int64_t> order(static_cast<std::size_t>(n));
    auto energy = [n](std::int64_t j) {
        return 2.0 * std::cos(2.0 * std::numbers::pi * static_cast<double>(std::min(j, n - j)) /
                              static_cast<double>(n));
    };
    for (std::int64_t j = 0; j < n; ++j) {
        order[static_cast<std::size_t>(j)] = j;
    }
    std::stable_sort(order.begin(), order.end(), [&](std::int64_t x, std::int64_t y) {
        const double ex = energy(x), ey = energy(y);
        return ex != ey ? ex < ey : x < y;
    });
    EigenSystem es;
    es.values.resize(n);
    es.vectors.resize(n, n);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (std::int64_t c = 0; c < n; ++c) {
        const std::int64_t j = order[static_cast<std::size_t>(c)];
        es.values[c] = energy(j);
        for (std::int64_t s = 0; s < n; ++s) {
            const double ang = -2.0 * std::numbers::pi * static_cast<double>((s * j) % n) /
                               static_cast<double>(n);
            es.vectors(s, c) = scale * cplx(std::cos(ang), std::sin(ang));
        }
    }
    return Hamiltonian(std::move(a), Family::cycle, {{"n", static_cast<std::uint64_t>(n)}},
                       std::move(es), std::move(order));
}

inline Hamiltonian make_path(std::int64_t n) {
    if (n < 2) {
        fail(ErrorKind::BadSize, "path needs n >= 2, got " + std::to_string(n));
    }
    ComplexMatrix a = ComplexMatrix::Zero(n, n);
    for (std::int64_t i = 0; i + 1 < n; ++i) {
        a(i, i + 1) = 1.0;
        a(i + 1, i) = 1.0;
    }
    return Hamiltonian(std::move(a), Family::path, {{"n", static_cast<std::uint64_t>(n)}});
}

/**
 * d-dimensional hypercube adjacency, equal to Σ_i X_i with qubit 0 as the
 * most significant bit. The attached eigenbasis is the Hadamard product
 * basis; vector b has energy d − 2·popcount(b) and label b.
 */
inline Hamiltonian make_hypercube(std::int64_t d, std::size_t budget = kMemoryBudgetBytes) {
    if (d < 1) {
        fail(ErrorKind::BadSize, "hypercube needs d >= 1, got " + std::to_string(d));
    }
    if (d > 30) {
        fail(ErrorKind::DimensionTooLarge, "hypercube dimension 2^" + std::to_string(d));
    }
    const std::int64_t n = std::int64_t{1} << d;
    check_dense_budget(static_cast<std::size_t>(n), budget);
    ComplexMatrix a = ComplexMatrix::Zero(n, n);
    for (std::int64_t b = 0; b < n; ++b) {
        for (std::int64_t i = 0; i < d; ++i) {
            a(b ^ (std::int64_t{1} << i), b) = 1.0;
        }
    }
    std::vector<std::int64_t> order(static_cast<std::size_t>(n));
    for (std::int64_t b = 0; b < n; ++b) {
        order[static_cast<std::size_t>(b)] = b;
    }
    auto pop = [](std::int64_t b) { return std::popcount(static_cast<std::uint64_t>(b)); };
    std::stable_sort(order.begin(), order.end(),
                     [&](std::int64_t x, std::int64_t y) { return pop(x) > pop(y); });
    EigenSystem es;
    es.values.resize(n);
    es.vectors.resize(n, n);
    const double scale = std::pow(2.0, -0.5 * static_cast<double>(d));
    for (std::int64_t c = 0; c < n; ++c) {
        const std::int64_t b = order[static_cast<std::size_t>(c)];
        es.values[c] = static_cast<double>(d - 2 * pop(b));
        for (std::int64_t s = 0; s < n; ++s) {
            es.vectors(s, c) = (pop(s & b) % 2 == 0) ? scale : -scale;
        }
    }
    return Hamiltonian(std::move(a), Family::hypercube, {{"d", static_cast<std::uint64_t>(d)}},
                       std::move(es), std::move(order));
}

/// Restarts allowed before random-regular generation gives up.
inline constexpr int kRegularRetryBudget = 1000;

/**
 * Uniformly-ish random simple d-regular graph on n vertices.
 *
 * Stubs are paired one edge at a time, each step choosing uniformly among
 * stub pairs that keep the graph simple; when no such pair remains the
 * attempt restarts. The output depends only on (n, d, seed).
 */
inline Hamiltonian make_random_regular(std::int64_t n, std::int64_t d, std::uint64_t seed) {
    if (n < 1 || d < 1 || d >= n || (n * d) % 2 != 0) {
        fail(ErrorKind::InfeasibleDegree, "no simple " + std::to_string(d) + "-regular graph on " +
                                              std::to_string(n) + " vertices");
    }
    std::mt19937_64 rng(seed);
    const auto un = static_cast<std::size_t>(n);
    for (int attempt = 0; attempt < kRegularRetryBudget; ++attempt) {
        std::vector<std::int64_t> stubs;
        stubs.reserve(un * static_cast<std::size_t>(d));
        for (std::int64_t v = 0; v < n; ++v) {
            for (std::int64_t k = 0; k < d; ++k) {
                stubs.push_back(v);
            }
        }
        std::vector<std::vector<char>> adj(un, std::vector<char>(un, 0));
        auto ok = [&](std::int64_t u, std::int64_t v) {
            return u != v && !adj[static_cast<std::size_t>(u)][static_cast<std::size_t>(v)];
        };
        bool stuck = false;
        while (!stubs.empty() && !stuck) {
            std::uniform_int_distribution<std::size_t> pick(0, stubs.size() - 1);
            bool paired = false;
            for (int tries = 0; tries < 64 && !paired; ++tries) {
                std::size_t i = pick(rng), j = pick(rng);
                if (i != j && ok(stubs[i], stubs[j])) {
                    if (i < j) {
                        std::swap(i, j);
                    }
                    const std::int64_t u = stubs[i], v = stubs[j];
                    adj[static_cast<std::size_t>(u)][static_cast<std::size_t>(v)] = 1;
                    adj[static_cast<std::size_t>(v)][static_cast<std::size_t>(u)] = 1;
                    stubs.erase(stubs.begin() + static_cast<std::ptrdiff_t>(i));
                    stubs.erase(stubs.begin() + static_cast<std::ptrdiff_t>(j));
                    paired = true;
                }
            }
            if (!paired) {
                // Random probing failed; list the admissible pairs explicitly.
                std::vector<std::pair<std::size_t, std::size_t>> cand;
                for (std::size_t i = 0; i < stubs.size(); ++i) {
                    for (std::size_t j = i + 1; j < stubs.size(); ++j) {
                        if (ok(stubs[i], stubs[j])) {
                            cand.emplace_back(j, i);
                        }
                    }
                }
                if (cand.empty()) {
                    stuck = true;
                    break;
                }
                std::uniform_int_distribution<std::size_t> pc(0, cand.size() - 1);
                const auto [i, j] = cand[pc(rng)];
                const std::int64_t u = stubs[i], v = stubs[j];
                adj[static_cast<std::size_t>(u)][static_cast<std::size_t>(v)] = 1;
                adj[static_cast<std::size_t>(v)][static_cast<std::size_t>(u)] = 1;
                stubs.erase(stubs.begin() + static_cast<std::ptrdiff_t>(i));
                stubs.erase(stubs.begin() + static_cast<std::ptrdiff_t>(j));
            }
        }
        if (stuck) {
            continue;
        }
        ComplexMatrix a = ComplexMatrix::Zero(n, n);
        for (std::size_t u = 0; u < un; ++u) {
            for (std::size_t v = 0; v < un; ++v) {
                if (adj[u][v]) {
                    a(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(v)) = 1.0;
                }
            }
        }
        return Hamiltonian(std::move(a), Family::regular,
                           {{"n", static_cast<std::uint64_t>(n)},
                            {"d", static_cast<std::uint64_t>(d)},
                            {"seed", seed}});
    }
    fail(ErrorKind::GenerationFailure, "random regular generation exhausted its retry budget");
}

/// n0-qubit Pauli string as X and Z bit masks (bit n0−1−q is qubit q).
struct PauliString {
    std::uint64_t x = 0;
    std::uint64_t z = 0;
    int n0 = 1;

    static PauliString parse(std::string_view s) {
        if (s.empty() || s.size() > 62) {
            fail(ErrorKind::ParseError, "Pauli string must have 1..62 letters");
        }
        PauliString p;
        p.n0 = static_cast<int>(s.size());
        for (int q = 0; q < p.n0; ++q) {
            const std::uint64_t bit = std::uint64_t{1} << (p.n0 - 1 - q);
            switch (s[static_cast<std::size_t>(q)]) {
            case 'I': break;
            case 'X': p.x |= bit; break;
            case 'Y': p.x |= bit; p.z |= bit; break;
            case 'Z': p.z |= bit; break;
            default: fail(ErrorKind::ParseError, "bad Pauli letter in '" + std::string(s) + "'");
            }
        }
        return p;
    }

    std::string str() const {
        std::string s(static_cast<std::size_t>(n0), 'I');
        for (int q = 0; q < n0; ++q) {
            const std::uint64_t bit = std::uint64_t{1} << (n0 - 1 - q);
            const bool bx = x & bit, bz = z & bit;
            s[static_cast<std::size_t>(q)] = bx ? (bz ? 'Y' : 'X') : (bz ? 'Z' : 'I');
        }
        return s;
    }

    /// P|b> = i^{#Y} (−1)^{popcount(b & z)} |b ⊕ x>.
    cplx phase(std::uint64_t b) const {
        static constexpr cplx ipow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
        const int ny = std::popcount(x & z);
        const int sgn = std::popcount(b & z) % 2 == 0 ? 1 : -1;
        return ipow[ny % 4] * static_cast<double>(sgn);
    }

    ComplexMatrix matrix() const {
        const std::uint64_t n = std::uint64_t{1} << n0;
        ComplexMatrix p = ComplexMatrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
        for (std::uint64_t b = 0; b < n; ++b) {
            p(static_cast<Eigen::Index>(b ^ x), static_cast<Eigen::Index>(b)) = phase(b);
        }
        return p;
    }

    static PauliString random(int n0, std::mt19937_64 &rng) {
        std::uniform_int_distribution<int> letter(0, 3);
        PauliString p;
        p.n0 = n0;
        for (int q = 0; q < n0; ++q) {
            const std::uint64_t bit = std::uint64_t{1} << (n0 - 1 - q);
            const int c = letter(rng);
            if (c == 1 || c == 2) {
                p.x |= bit;
            }
            if (c == 2 || c == 3) {
                p.z |= bit;
            }
        }
        return p;
    }
};

/// Σ_j signs[j]/√m · strings[j].
inline ComplexMatrix pauli_sum(int n0, const std::vector<PauliString> &strings,
                               const std::vector<int> &signs) {
    if (strings.size() != signs.size() || strings.empty()) {
        fail(ErrorKind::DimensionMismatch, "pauli_sum needs one sign per string");
    }
    const std::uint64_t n = std::uint64_t{1} << n0;
    const double w = 1.0 / std::sqrt(static_cast<double>(strings.size()));
    ComplexMatrix h = ComplexMatrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t j = 0; j < strings.size(); ++j) {
        if (strings[j].n0 != n0) {
            fail(ErrorKind::DimensionMismatch, "Pauli string length differs from n0");
        }
        for (std::uint64_t b = 0; b < n; ++b) {
            h(static_cast<Eigen::Index>(b ^ strings[j].x), static_cast<Eigen::Index>(b)) +=
                w * static_cast<double>(signs[j]) * strings[j].phase(b);
        }
    }
    return h;
}

/// Random signed Pauli sum H = Σ_j r_j/√m σ_j over all 4^{n0} strings.
inline Hamiltonian make_pauli_string(int n0, std::int64_t m, std::uint64_t seed,
                                     std::size_t budget = kMemoryBudgetBytes) {
    if (n0 < 1 || m < 1) {
        fail(ErrorKind::BadSize, "Pauli ensemble needs n0 >= 1 and m >= 1");
    }
    if (n0 > 30) {
        fail(ErrorKind::DimensionTooLarge, "Pauli ensemble dimension 2^" + std::to_string(n0));
    }
    check_dense_budget(std::size_t{1} << n0, budget);
    std::mt19937_64 rng(seed);
    std::bernoulli_distribution coin(0.5);
    std::vector<PauliString> strings;
    std::vector<int> signs;
    for (std::int64_t j = 0; j < m; ++j) {
        strings.push_back(PauliString::random(n0, rng));
        signs.push_back(coin(rng) ? 1 : -1);
    }
    return Hamiltonian(pauli_sum(n0, strings, signs), Family::pauli_string,
                       {{"n0", static_cast<std::uint64_t>(n0)},
                        {"m", static_cast<std::uint64_t>(m)},
                        {"seed", seed}});
}

struct SpectralProfile {
    double lambda_min = 0.0;
    double window = 0.0;
    double delta = 0.0;
    std::int64_t count = 0;
};

/// Fraction of eigenvalues within C/β of the minimum (inclusive, 1e-9 slack).
inline SpectralProfile spectral_profile(const Hamiltonian &h, double beta, double c) {
    if (!(beta > 0.0) || !(c > 0.0)) {
        fail(ErrorKind::BadParameter, "spectral_profile needs beta > 0 and C > 0");
    }
    const RealVector &e = h.eig().values;
    SpectralProfile p;
    p.lambda_min = e.minCoeff();
    p.window = c / beta;
    for (Eigen::Index j = 0; j < e.size(); ++j) {
        if (e[j] - p.lambda_min <= p.window + 1e-9) {
            ++p.count;
        }
    }
    p.delta = static_cast<double>(p.count) / static_cast<double>(e.size());
    return p;
}

/**
 * Mass of the semicircle density ρ(x) = √(4(d−1) − x²) / (2π(d−1)) on
 * [a, b], clipped to its support [−2√(d−1), 2√(d−1)].
 */
inline double semicircle_mass(std::int64_t d, double a, double b) {
    if (d < 2) {
        fail(ErrorKind::BadParameter, "semicircle mass needs degree >= 2");
    }
    const double r = 2.0 * std::sqrt(static_cast<double>(d - 1));
    auto cdf = [&](double x) {
        x = std::clamp(x, -r, r);
        const double area = 0.5 * (x * std::sqrt(r * r - x * x) + r * r * std::asin(x / r)) + 0.25 * std::numbers::pi * r * r;
        return area / (0.5 * std::numbers::pi * r * r);
    };
    return b <= a ? 0.0 : cdf(b) - cdf(a);
}

/// Fraction of eigenvalues of h in the closed interval [a, b].
inline double eigenvalue_fraction(const Hamiltonian &h, double a, double b) {
    const RealVector &e = h.eig().values;
    std::int64_t count = 0;
    for (Eigen::Index j = 0; j < e.size(); ++j) {
        count += e[j] >= a && e[j] <= b;
    }
    return static_cast<double>(count) / static_cast<double>(e.size());
}

/// Default regular-graph degree for size n: round(log2 n).
inline std::int64_t default_regular_degree(std::int64_t n) {
    return static_cast<std::int64_t>(std::llround(std::log2(static_cast<double>(n))));
}

} // namespace ckg
