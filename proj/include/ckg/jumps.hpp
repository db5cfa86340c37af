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

#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "ckg/errors.hpp"
#include "ckg/hamiltonian.hpp"
#include "ckg/matrix_core.hpp"
#include "ckg/rng.hpp"

namespace ckg {

enum class JumpKind { graph_local, haar_design, pauli_design, hypercube_z, custom };

constexpr std::string_view to_string(JumpKind k) {
    switch (k) {
    case JumpKind::graph_local: return "graph_local";
    case JumpKind::haar_design: return "haar_design";
    case JumpKind::pauli_design: return "pauli_design";
    case JumpKind::hypercube_z: return "hypercube_z";
    case JumpKind::custom: return "custom";
    }
    return "custom";
}

inline JumpKind jump_kind_from_string(std::string_view s) {
    for (JumpKind k : {JumpKind::graph_local, JumpKind::haar_design, JumpKind::pauli_design,
                       JumpKind::hypercube_z, JumpKind::custom}) {
        if (s == to_string(k)) {
            return k;
        }
    }
    fail(ErrorKind::BadParameter, "unknown jump kind '" + std::string(s) + "'");
}

struct JumpSet {
    std::vector<ComplexMatrix> jumps;
    JumpKind kind = JumpKind::custom;
    std::optional<std::uint64_t> seed;

    Eigen::Index dim() const { return jumps.empty() ? 0 : jumps.front().rows(); }
    std::size_t size() const { return jumps.size(); }

    std::string descriptor() const {
        std::string s(to_string(kind));
        s += "(M=" + std::to_string(jumps.size());
        if (seed) {
            s += ",seed=" + std::to_string(*seed);
        }
        return s + ")";
    }
};

inline constexpr double kAdjointTol = 1e-12;
inline constexpr double kNormalizationTol = 1e-9;

struct JumpValidation {
    double adjoint_residual = 0.0;
    double normalization_sum = 0.0;
    double normalization_residual = 0.0;
    bool adjoint_closed = false;
    bool normalized = false;
    /// Index of the first jump whose adjoint is missing, if any.
    std::optional<std::size_t> unmatched;

    bool ok() const { return adjoint_closed && normalized; }
};

/**
 * Checks adjoint closure by greedy multiset matching of each A^a against an
 * unused A^b ≈ A^{a†} (max-entry distance), and the normalization Σ‖A†A‖ = 1.
 */
inline JumpValidation validate(const JumpSet &js) {
    JumpValidation r;
    const std::size_t m = js.size();
    for (const auto &a : js.jumps) {
        if (a.rows() != js.dim() || a.cols() != js.dim()) {
            fail(ErrorKind::DimensionMismatch, "jumps must share one square dimension");
        }
    }
    std::vector<char> used(m, 0);
    for (std::size_t a = 0; a < m; ++a) {
        const ComplexMatrix adj = js.jumps[a].adjoint();
        double best = std::numeric_limits<double>::infinity();
        std::size_t best_b = m;
        for (std::size_t b = 0; b < m; ++b) {
            if (used[b]) {
                continue;
            }
            const double dist = (js.jumps[b] - adj).cwiseAbs().maxCoeff();
            if (dist < best) {
                best = dist;
                best_b = b;
                if (dist == 0.0) {
                    break;
                }
            }
        }
        if (best_b < m && best <= kAdjointTol) {
            used[best_b] = 1;
        } else if (!r.unmatched) {
            r.unmatched = a;
        }
        r.adjoint_residual = std::max(r.adjoint_residual, best);
    }
    r.adjoint_closed = m > 0 && !r.unmatched;
    for (const auto &a : js.jumps) {
        const double s = operator_norm(a);
        r.normalization_sum += s * s;
    }
    r.normalization_residual = std::abs(r.normalization_sum - 1.0);
    r.normalized = r.normalization_residual <= kNormalizationTol;
    return r;
}

/// A^a = n^{−1/2} |e_a><e_a| for a = 0..n−1.
inline JumpSet graph_local(Eigen::Index n) {
    if (n < 1) {
        fail(ErrorKind::BadSize, "graph_local needs n >= 1");
    }
    JumpSet js;
    js.kind = JumpKind::graph_local;
    const double w = 1.0 / std::sqrt(static_cast<double>(n));
    for (Eigen::Index a = 0; a < n; ++a) {
        ComplexMatrix p = ComplexMatrix::Zero(n, n);
        p(a, a) = w;
        js.jumps.push_back(std::move(p));
    }
    return js;
}

inline void require_even_m(std::int64_t m) {
    if (m < 2 || m % 2 != 0) {
        fail(ErrorKind::BadM, "M must be even and >= 2, got " + std::to_string(m));
    }
}

/// M/2 Haar unitaries and their adjoints, each scaled by M^{−1/2}, listed as
/// U_1, U_1†, U_2, U_2†, ...
inline JumpSet haar_design(Eigen::Index n, std::int64_t m, std::uint64_t seed) {
    require_even_m(m);
    JumpSet js;
    js.kind = JumpKind::haar_design;
    js.seed = seed;
    std::mt19937_64 rng(seed);
    const double w = 1.0 / std::sqrt(static_cast<double>(m));
    for (std::int64_t k = 0; k < m / 2; ++k) {
        const ComplexMatrix u = haar_unitary(n, rng);
        js.jumps.push_back(w * u);
        js.jumps.push_back(w * u.adjoint());
    }
    return js;
}

/// M/2 uniformly random n0-qubit Pauli strings, each listed twice with
/// weight M^{−1/2}.
inline JumpSet pauli_design(int n0, std::int64_t m, std::uint64_t seed) {
    require_even_m(m);
    if (n0 < 1 || n0 > 30) {
        fail(ErrorKind::BadSize, "pauli_design needs 1 <= n0 <= 30");
    }
    JumpSet js;
    js.kind = JumpKind::pauli_design;
    js.seed = seed;
    std::mt19937_64 rng(seed);
    const double w = 1.0 / std::sqrt(static_cast<double>(m));
    for (std::int64_t k = 0; k < m / 2; ++k) {
        const ComplexMatrix p = w * PauliString::random(n0, rng).matrix();
        js.jumps.push_back(p);
        js.jumps.push_back(p);
    }
    return js;
}

/// Z on qubit a (qubit 0 most significant), scaled by d^{−1/2}.
inline JumpSet hypercube_z(int d) {
    if (d < 1 || d > 30) {
        fail(ErrorKind::BadSize, "hypercube_z needs 1 <= d <= 30");
    }
    JumpSet js;
    js.kind = JumpKind::hypercube_z;
    const Eigen::Index n = Eigen::Index{1} << d;
    const double w = 1.0 / std::sqrt(static_cast<double>(d));
    for (int a = 0; a < d; ++a) {
        ComplexMatrix z = ComplexMatrix::Zero(n, n);
        const Eigen::Index bit = Eigen::Index{1} << (d - 1 - a);
        for (Eigen::Index b = 0; b < n; ++b) {
            z(b, b) = (b & bit) ? -w : w;
        }
        js.jumps.push_back(std::move(z));
    }
    return js;
}

struct CustomJumpOptions {
    /// Append the adjoint of every unmatched jump, then rescale.
    bool symmetrize = false;
};

/// Wraps user-supplied jumps. Without `symmetrize`, a set that is not
/// adjoint-closed raises NotAdjointClosed; normalization is never relaxed.
inline JumpSet make_custom(std::vector<ComplexMatrix> jumps, CustomJumpOptions opt = {}) {
    JumpSet js;
    js.jumps = std::move(jumps);
    if (js.jumps.empty()) {
        fail(ErrorKind::BadM, "custom jump set is empty");
    }
    JumpValidation v = validate(js);
    if (!v.adjoint_closed) {
        if (!opt.symmetrize) {
            fail(ErrorKind::NotAdjointClosed,
                 "jump " + std::to_string(v.unmatched.value_or(0)) +
                     " has no adjoint partner (residual " + std::to_string(v.adjoint_residual) + ")");
        }
        const std::size_t m = js.size();
        for (std::size_t a = 0; a < m; ++a) {
            JumpSet probe;
            probe.jumps = js.jumps;
            const JumpValidation pv = validate(probe);
            if (pv.adjoint_closed) {
                break;
            }
            js.jumps.push_back(js.jumps[*pv.unmatched].adjoint());
        }
        double total = 0;
        for (const auto &a : js.jumps) {
            const double s = operator_norm(a);
            total += s * s;
        }
        for (auto &a : js.jumps) {
            a /= std::sqrt(total);
        }
        v = validate(js);
    }
    if (!v.ok()) {
        fail(ErrorKind::InvariantViolation,
             "custom jump set fails validation: normalization sum " +
                 std::to_string(v.normalization_sum));
    }
    return js;
}

} // namespace ckg
