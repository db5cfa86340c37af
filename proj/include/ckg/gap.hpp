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
 * Spectral gaps of detailed-balanced generators, block structure, analytic
 * lower bounds and mixing-time estimates.
 *
 * All superoperators act on vectorized operators in the energy eigenbasis.
 * The gap is read off the KMS-symmetrized generator S = Ŵ^{−1/2} L Ŵ^{1/2},
 * which is hermitian and negative semidefinite; its null vector is √ρ_β.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "ckg/errors.hpp"
#include "ckg/hamiltonian.hpp"
#include "ckg/krylov.hpp"
#include "ckg/lindblad.hpp"
#include "ckg/matrix_core.hpp"
#include "ckg/parallel.hpp"
#include "ckg/rng.hpp"

namespace ckg {

struct GapOptions {
    double db_tol = 1e-8;
    /// Dense eigensolver up to this superoperator dimension, Lanczos above.
    Eigen::Index dense_max = 1024;
    bool full_spectrum = false;
    /// Eigenvalues with |λ| <= null_rel_tol · ‖S‖ count as null modes.
    double null_rel_tol = 1e-8;
    double overlap_threshold = 1.0 - 1e-6;
    LanczosOptions lanczos;
};

struct GapReport {
    double gap = 0.0;
    double zero_mode_overlap = 0.0;
    bool degenerate_fixed_point = false;
    int null_multiplicity = 0;
    /// Largest eigenvalue of the symmetrized generator (≈ 0 from below).
    double max_eigenvalue = 0.0;
    /// Spectral radius of the symmetrized generator.
    double spectral_radius = 0.0;
    double db_residual = 0.0;
    std::string method;
    std::optional<double> classical_gap;
    std::optional<double> dephasing_min;
    std::optional<double> canonical_bound;
    std::optional<std::vector<double>> gershgorin_bounds;
    std::optional<std::vector<double>> spectrum;
};

/**
 * Gap of L against ρ_β. Fails with NotDetailedBalanced when the KMS
 * symmetrization is invalid. A null space of dimension > 1, or a null mode
 * that does not overlap √ρ_β, sets `degenerate_fixed_point`; the gap is then
 * the smallest |λ| on the complement of the identified null mode.
 */
inline GapReport spectral_gap(const ComplexMatrix &l, const GibbsState &g, const GapOptions &opt = {}) {
    GapReport r;
    r.db_residual = db_residual(l, g);
    if (r.db_residual > opt.db_tol) {
        fail(ErrorKind::NotDetailedBalanced,
             "db_residual " + std::to_string(r.db_residual) + " exceeds " + std::to_string(opt.db_tol));
    }
    ComplexMatrix s = kms_symmetrize(l, g);
    s = 0.5 * (s + s.adjoint()).eval();
    const ComplexVector v0 = sqrt_gibbs_vector(g);
    const Eigen::Index dim = s.rows();

    if (dim <= opt.dense_max || opt.full_spectrum) {
        r.method = "dense";
        const EigenSystem es = hermitian_eigensystem_raw(s, 1.0);
        r.spectral_radius = es.values.cwiseAbs().maxCoeff();
        const double null_tol = opt.null_rel_tol * std::max(r.spectral_radius, 1e-300);
        Eigen::Index null_idx = 0;
        double best = -1.0;
        for (Eigen::Index j = 0; j < dim; ++j) {
            const double o = std::norm(es.vectors.col(j).dot(v0));
            if (o > best) {
                best = o;
                null_idx = j;
            }
            if (std::abs(es.values[j]) <= null_tol) {
                ++r.null_multiplicity;
            }
        }
        r.zero_mode_overlap = best;
        r.max_eigenvalue = es.values[dim - 1];
        double gap = std::numeric_limits<double>::infinity();
        for (Eigen::Index j = 0; j < dim; ++j) {
            if (j != null_idx) {
                gap = std::min(gap, std::abs(es.values[j]));
            }
        }
        r.gap = std::isfinite(gap) ? gap : 0.0;
        r.degenerate_fixed_point = dim == 1 || r.null_multiplicity > 1 ||
                                   best < opt.overlap_threshold ||
                                   std::abs(es.values[null_idx]) > null_tol;
        if (opt.full_spectrum) {
            r.spectrum = std::vector<double>(es.values.data(), es.values.data() + dim);
        }
        return r;
    }

    r.method = "lanczos";
    const double frob = s.norm();
    const double null_tol = opt.null_rel_tol * std::max(frob, 1e-300);
    auto op = [&](const ComplexVector &x) -> ComplexVector { return s * x; };
    const LanczosResult top = lanczos_largest(op, dim, {v0}, opt.lanczos);
    // The extreme opposite end gives the spectral radius.
    auto neg = [&](const ComplexVector &x) -> ComplexVector { return -(s * x); };
    LanczosOptions loose = opt.lanczos;
    loose.tol = 1e-6;
    r.spectral_radius = lanczos_largest(neg, dim, {}, loose).value;
    r.max_eigenvalue = std::max(top.value, 0.0);
    r.gap = std::max(-top.value, 0.0);
    const double v0_res = (s * v0).norm();
    r.zero_mode_overlap = r.gap > 0 ? std::max(0.0, 1.0 - std::pow(v0_res / r.gap, 2)) : 0.0;
    r.null_multiplicity = 1 + (r.gap <= null_tol ? 1 : 0);
    r.degenerate_fixed_point = r.null_multiplicity > 1 || r.zero_mode_overlap < opt.overlap_threshold;
    return r;
}

inline GapReport spectral_gap(const Superoperator &s, const GibbsState &g, const GapOptions &opt = {}) {
    return spectral_gap(s.matrix, g, opt);
}

/// Gap from the eigenvalues of L itself: the smallest |λ| after dropping
/// the eigenvalue closest to 0. Used to cross-validate the symmetrized path.
inline double unsymmetrized_gap(const ComplexMatrix &l) {
    const ComplexVector ev = general_eigenvalues(l);
    std::vector<double> mags(static_cast<std::size_t>(ev.size()));
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        mags[static_cast<std::size_t>(i)] = std::abs(ev[i]);
    }
    std::sort(mags.begin(), mags.end());
    return mags.size() > 1 ? mags[1] : 0.0;
}

// ---------------------------------------------------------------------------
// Block structure

/// Cluster label per flat index (l1, l2) from the Bohr frequency ν_{l1l2},
/// grouping sorted frequencies whose neighbours are within tol.
inline std::vector<std::int64_t> bohr_keys(const Hamiltonian &h, std::optional<double> tol = {}) {
    const Eigen::Index n = h.dim();
    const double t = tol.value_or(1e-9 * std::max(h.norm(), 1e-300));
    const RealMatrix &nu = h.bohr();
    std::vector<std::pair<double, Eigen::Index>> order;
    order.reserve(static_cast<std::size_t>(n * n));
    for (Eigen::Index l1 = 0; l1 < n; ++l1) {
        for (Eigen::Index l2 = 0; l2 < n; ++l2) {
            order.emplace_back(nu(l1, l2), l1 * n + l2);
        }
    }
    std::sort(order.begin(), order.end());
    std::vector<std::int64_t> keys(order.size());
    std::int64_t key = 0;
    for (std::size_t i = 0; i < order.size(); ++i) {
        if (i > 0 && order[i].first - order[i - 1].first > t) {
            ++key;
        }
        keys[static_cast<std::size_t>(order[i].second)] = key;
    }
    return keys;
}

/// Momentum transfer k_{l1} − k_{l2} mod n for Hamiltonians whose
/// eigenvectors carry momentum labels (cycles).
inline std::vector<std::int64_t> momentum_keys(const Hamiltonian &h) {
    const Eigen::Index n = h.dim();
    const auto &k = h.labels();
    if (static_cast<Eigen::Index>(k.size()) != n) {
        fail(ErrorKind::BadParameter, "momentum_keys needs eigenvector momentum labels");
    }
    std::vector<std::int64_t> keys(static_cast<std::size_t>(n * n));
    for (Eigen::Index l1 = 0; l1 < n; ++l1) {
        for (Eigen::Index l2 = 0; l2 < n; ++l2) {
            keys[static_cast<std::size_t>(l1 * n + l2)] =
                ((k[static_cast<std::size_t>(l1)] - k[static_cast<std::size_t>(l2)]) % n + n) % n;
        }
    }
    return keys;
}

struct Block {
    std::int64_t key = 0;
    std::vector<Eigen::Index> indices;
    ComplexMatrix matrix;
    /// Contains the diagonal pairs (l, l).
    bool classical = false;
};

struct BlockDecomposition {
    std::vector<Block> blocks;
    /// max |L[r, c]| over r, c in different blocks, divided by ‖L‖_F.
    double cross_coupling = 0.0;
    bool block_diagonal = true;
};

/**
 * Partitions flat indices by `keys` and extracts the diagonal blocks. When
 * entries couple different blocks beyond tol·‖L‖ the result reports
 * block_diagonal = false together with the coupling size; blocks are still
 * returned.
 */
inline BlockDecomposition block_decomposition(const ComplexMatrix &l, const std::vector<std::int64_t> &keys,
                                              double tol = 1e-12) {
    const Eigen::Index nn = l.rows();
    if (static_cast<Eigen::Index>(keys.size()) != nn || l.cols() != nn) {
        fail(ErrorKind::DimensionMismatch, "block_decomposition: key count differs from dimension");
    }
    const auto n = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(nn))));
    std::map<std::int64_t, std::vector<Eigen::Index>> groups;
    for (Eigen::Index i = 0; i < nn; ++i) {
        groups[keys[static_cast<std::size_t>(i)]].push_back(i);
    }
    BlockDecomposition out;
    const double norm = std::max(l.norm(), 1e-300);
    double cross = 0.0;
    for (Eigen::Index c = 0; c < nn; ++c) {
        for (Eigen::Index r = 0; r < nn; ++r) {
            if (keys[static_cast<std::size_t>(r)] != keys[static_cast<std::size_t>(c)]) {
                cross = std::max(cross, std::abs(l(r, c)));
            }
        }
    }
    out.cross_coupling = cross / norm;
    out.block_diagonal = out.cross_coupling <= tol;
    for (auto &[key, idx] : groups) {
        Block b;
        b.key = key;
        b.indices = idx;
        const auto m = static_cast<Eigen::Index>(idx.size());
        b.matrix.resize(m, m);
        for (Eigen::Index j = 0; j < m; ++j) {
            for (Eigen::Index i = 0; i < m; ++i) {
                b.matrix(i, j) = l(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
            }
        }
        b.classical = std::any_of(idx.begin(), idx.end(), [&](Eigen::Index f) { return f / n == f % n; });
        out.blocks.push_back(std::move(b));
    }
    return out;
}

/// Population generator G_lm = Re L[(l,l),(m,m)].
inline RealMatrix classical_block(const ComplexMatrix &l) {
    const auto n = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(l.rows()))));
    RealMatrix g(n, n);
    for (Eigen::Index m = 0; m < n; ++m) {
        for (Eigen::Index q = 0; q < n; ++q) {
            g(q, m) = l(q * n + q, m * n + m).real();
        }
    }
    return g;
}

// ---------------------------------------------------------------------------
// Classical chains and analytic bounds

namespace detail {

inline void require_generator(const RealMatrix &g, const RealVector &pi) {
    const Eigen::Index n = g.rows();
    if (g.cols() != n || pi.size() != n) {
        fail(ErrorKind::DimensionMismatch, "generator and distribution sizes differ");
    }
    if (!(pi.minCoeff() > 0.0)) {
        fail(ErrorKind::BadParameter, "stationary distribution must be strictly positive");
    }
    const double scale = std::max(g.cwiseAbs().maxCoeff(), 1e-300);
    for (Eigen::Index m = 0; m < n; ++m) {
        if (std::abs(g.col(m).sum()) > 1e-10 * scale) {
            fail(ErrorKind::NotGenerator, "column " + std::to_string(m) + " does not sum to zero");
        }
        for (Eigen::Index l = 0; l < n; ++l) {
            if (l != m && g(l, m) < -1e-12 * scale) {
                fail(ErrorKind::NotGenerator, "negative off-diagonal rate");
            }
        }
    }
}

} // namespace detail

/// Gap of a reversible generator G with stationary distribution π, via the
/// symmetrization D^{−1/2} G D^{1/2}; the null mode is found by overlap
/// with √π.
inline double classical_gap(const RealMatrix &g, const RealVector &pi) {
    detail::require_generator(g, pi);
    const Eigen::Index n = g.rows();
    if (n == 1) {
        return 0.0;
    }
    const RealVector sq = pi.cwiseSqrt();
    RealMatrix sym(n, n);
    for (Eigen::Index m = 0; m < n; ++m) {
        for (Eigen::Index l = 0; l < n; ++l) {
            sym(l, m) = g(l, m) * sq[m] / sq[l];
        }
    }
    const RealMatrix h = 0.5 * (sym + sym.transpose());
    const EigenSystem es = hermitian_eigensystem_raw(h.cast<cplx>(), 1.0);
    const ComplexVector v0 = (sq / sq.norm()).cast<cplx>();
    Eigen::Index null_idx = 0;
    double best = -1.0;
    for (Eigen::Index j = 0; j < n; ++j) {
        const double o = std::norm(es.vectors.col(j).dot(v0));
        if (o > best) {
            best = o;
            null_idx = j;
        }
    }
    double gap = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < n; ++j) {
        if (j != null_idx) {
            gap = std::min(gap, std::abs(es.values[j]));
        }
    }
    return gap;
}

/// min over ordered pairs l ≠ m of G_lm / π_l, valid when every transition
/// rate is positive.
inline double canonical_path_bound(const RealMatrix &g, const RealVector &pi) {
    detail::require_generator(g, pi);
    const Eigen::Index n = g.rows();
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index m = 0; m < n; ++m) {
        for (Eigen::Index l = 0; l < n; ++l) {
            if (l == m) {
                continue;
            }
            if (!(g(l, m) > 0.0)) {
                fail(ErrorKind::SparseChain, "zero transition rate " + std::to_string(m) + " -> " +
                                                 std::to_string(l));
            }
            best = std::min(best, g(l, m) / pi[l]);
        }
    }
    return best;
}

/// Column Gershgorin bound min_m(|B_mm| − Σ_{l≠m} |B_lm|); may be negative.
inline double gershgorin_bound(const ComplexMatrix &b) {
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index m = 0; m < b.cols(); ++m) {
        double off = 0.0;
        for (Eigen::Index l = 0; l < b.rows(); ++l) {
            if (l != m) {
                off += std::abs(b(l, m));
            }
        }
        best = std::min(best, std::abs(b(m, m)) - off);
    }
    return best;
}

/// Smallest |λ| of a block.
inline double block_min_abs_eigenvalue(const ComplexMatrix &b) {
    return general_eigenvalues(b).cwiseAbs().minCoeff();
}

/**
 * Gap report for the structured Haar average: classical block ⊕ diagonal
 * dephasing, so gap = min(classical gap, min |dephasing entry|).
 */
inline GapReport averaged_gap(const AveragedLindbladian &avg, const GibbsState &g) {
    GapReport r;
    r.method = "averaged";
    r.classical_gap = classical_gap(avg.classical, g.p);
    double deph = std::numeric_limits<double>::infinity();
    for (Eigen::Index m1 = 0; m1 < avg.n; ++m1) {
        for (Eigen::Index m2 = 0; m2 < avg.n; ++m2) {
            if (m1 != m2) {
                deph = std::min(deph, std::abs(avg.dephasing(m1, m2)));
            }
        }
    }
    r.dephasing_min = std::isfinite(deph) ? std::optional(deph) : std::nullopt;
    r.gap = std::min(*r.classical_gap, r.dephasing_min.value_or(*r.classical_gap));
    try {
        r.canonical_bound = canonical_path_bound(avg.classical, g.p);
    } catch (const Error &e) {
        if (e.kind() != ErrorKind::SparseChain) {
            throw;
        }
    }
    r.zero_mode_overlap = 1.0;
    r.null_multiplicity = 1;
    r.spectral_radius = std::max(avg.classical.cwiseAbs().colwise().sum().maxCoeff(),
                                 avg.dephasing.cwiseAbs().maxCoeff());
    return r;
}

/// Upper-bound witness: −Re⟨u, S u⟩ / ⟨u, u⟩ for u projected off √ρ_β.
inline double rayleigh_witness(const ComplexMatrix &l, const GibbsState &g, ComplexVector u) {
    const ComplexMatrix s = kms_symmetrize(l, g);
    const ComplexVector v0 = sqrt_gibbs_vector(g);
    u -= v0 * v0.dot(u);
    const double nu = u.squaredNorm();
    if (nu == 0.0) {
        fail(ErrorKind::BadParameter, "rayleigh_witness: trial vector lies along the fixed point");
    }
    return -u.dot(s * u).real() / nu;
}

/// Flat indicator of all pairs (l1, l2) with momentum transfer k.
inline ComplexVector momentum_indicator(const Hamiltonian &h, std::int64_t k) {
    const auto keys = momentum_keys(h);
    ComplexVector u = ComplexVector::Zero(static_cast<Eigen::Index>(keys.size()));
    for (std::size_t i = 0; i < keys.size(); ++i) {
        if (keys[i] == k) {
            u[static_cast<Eigen::Index>(i)] = 1.0;
        }
    }
    return u;
}

// ---------------------------------------------------------------------------
// Mixing

struct MixingBound {
    /// log(max_j ρ_jj^{−1/2}) / gap.
    double tight = 0.0;
    /// loose_constant · (β‖H‖ + ½ log n) / gap.
    double loose = 0.0;
    double loose_constant = 1.0;
};

inline MixingBound mixing_bound(double gap, const GibbsState &g) {
    if (!(gap > 0.0)) {
        fail(ErrorKind::ZeroGap, "mixing bound needs a positive gap");
    }
    MixingBound b;
    b.tight = -0.5 * g.log_p.minCoeff() / gap;
    const double n = static_cast<double>(g.dim());
    b.loose = b.loose_constant * (g.beta * g.norm_h + 0.5 * std::log(n)) / gap;
    return b;
}

struct MixingOptions {
    double ratio = 1.25;
    /// Grid stops at cap_factor · t_bound.
    double cap_factor = 10.0;
    /// Raise InvariantViolation when t_measured exceeds t_bound.
    bool assert_bound = true;
    double db_tol = 1e-8;
    unsigned threads = 1;
};

struct MixingEstimate {
    double t_measured = 0.0;
    double t_bound = 0.0;
    /// log(‖ρ_β^{−1/2}‖ / (2ε)) / gap, which bounds the trace-distance
    /// mixing time at accuracy ε for every start.
    double t_bound_epsilon = 0.0;
    double epsilon = 0.0;
    double gap = 0.0;
    bool reached = true;
    /// Index of the start that took longest.
    std::size_t worst_start = 0;
    /// Starts whose trace distance increased somewhere along the grid.
    std::size_t non_monotone_starts = 0;
    double max_increase = 0.0;
    std::vector<double> grid;
};

/// All energy-basis pure states plus `random_count` Haar-random pure states.
inline std::vector<ComplexMatrix> default_starts(Eigen::Index n, std::uint64_t seed, int random_count = 5) {
    std::vector<ComplexMatrix> out;
    for (Eigen::Index i = 0; i < n; ++i) {
        ComplexMatrix r = ComplexMatrix::Zero(n, n);
        r(i, i) = 1.0;
        out.push_back(std::move(r));
    }
    std::mt19937_64 rng(seed);
    for (int k = 0; k < random_count; ++k) {
        const ComplexVector v = random_unit_vector(n, rng);
        out.push_back(v * v.adjoint());
    }
    return out;
}

/**
 * Exact evolution e^{tL} ρ0 through the eigendecomposition of the symmetrized
 * generator, on the grid t_k = t0 · ratio^k with t0 = 0.01/‖S‖ up to
 * cap_factor · t_bound. t_measured is the worst first-passage time over the
 * starts of trace distance <= ε. With assert_bound, a measured time above
 * t_bound · (1 + 1e-6) raises InvariantViolation.
 */
inline MixingEstimate simulate_mixing(const ComplexMatrix &l, const GibbsState &g, double epsilon,
                                      const std::vector<ComplexMatrix> &starts, const MixingOptions &opt = {}) {
    if (!(epsilon > 0.0 && epsilon < 1.0)) {
        fail(ErrorKind::BadParameter, "epsilon must lie in (0, 1)");
    }
    const double db = db_residual(l, g);
    if (db > opt.db_tol) {
        fail(ErrorKind::NotDetailedBalanced, "db_residual " + std::to_string(db));
    }
    const Eigen::Index n = g.dim();
    ComplexMatrix s = kms_symmetrize(l, g);
    s = 0.5 * (s + s.adjoint()).eval();
    const EigenSystem es = hermitian_eigensystem_raw(s, 1.0);
    const Eigen::Index dim = s.rows();
    const ComplexVector v0 = sqrt_gibbs_vector(g);
    Eigen::Index null_idx = 0;
    double best = -1.0;
    for (Eigen::Index j = 0; j < dim; ++j) {
        const double o = std::norm(es.vectors.col(j).dot(v0));
        if (o > best) {
            best = o;
            null_idx = j;
        }
    }
    double gap = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < dim; ++j) {
        if (j != null_idx) {
            gap = std::min(gap, std::abs(es.values[j]));
        }
    }
    MixingEstimate est;
    est.epsilon = epsilon;
    est.gap = std::isfinite(gap) ? gap : 0.0;
    est.t_bound = mixing_bound(est.gap, g).tight;
    est.t_bound_epsilon = est.t_bound + std::log(1.0 / (2.0 * epsilon)) / est.gap;
    const double radius = std::max(es.values.cwiseAbs().maxCoeff(), 1e-300);
    for (double t = 0.01 / radius; t <= opt.cap_factor * est.t_bound; t *= opt.ratio) {
        est.grid.push_back(t);
    }
    // Ŵ^{±1/2} as elementwise scalings.
    const RealVector logw = detail::log_kms_weights(g);
    const RealVector half = (0.5 * logw.array()).exp();
    const RealVector inv_half = (-0.5 * logw.array()).exp();
    RealVector lambda = es.values.cwiseMin(0.0);
    lambda[null_idx] = 0.0;
    const ComplexMatrix rho_beta = g.rho();

    struct PerStart {
        double t_first = std::numeric_limits<double>::infinity();
        bool monotone = true;
        double max_increase = 0.0;
    };
    std::vector<PerStart> results(starts.size());
    parallel_for(starts.size(), opt.threads, [&](std::size_t i) {
        if (starts[i].rows() != n) {
            fail(ErrorKind::DimensionMismatch, "start state has the wrong size");
        }
        const ComplexVector y = es.vectors.adjoint() * (inv_half.cast<cplx>().asDiagonal() * vectorize(starts[i]));
        double prev = std::numeric_limits<double>::infinity();
        PerStart &ps = results[i];
        for (double t : est.grid) {
            const ComplexVector z = (t * lambda.array()).exp().cast<cplx>().matrix().cwiseProduct(y);
            const ComplexVector x = half.cast<cplx>().asDiagonal() * (es.vectors * z);
            ComplexMatrix d = devectorize(x) - rho_beta;
            d = 0.5 * (d + d.adjoint()).eval();
            const double td = 0.5 * hermitian_eigenvalues(d, 1.0).cwiseAbs().sum();
            if (td > prev + 1e-12) {
                ps.monotone = false;
                ps.max_increase = std::max(ps.max_increase, td - prev);
            }
            prev = td;
            if (td <= epsilon && !std::isfinite(ps.t_first)) {
                ps.t_first = t;
            }
        }
    });
    est.t_measured = 0.0;
    for (std::size_t i = 0; i < results.size(); ++i) {
        if (i == 0 || results[i].t_first > est.t_measured) {
            est.t_measured = results[i].t_first;
            est.worst_start = i;
        }
        if (!results[i].monotone) {
            ++est.non_monotone_starts;
            est.max_increase = std::max(est.max_increase, results[i].max_increase);
        }
    }
    est.reached = std::isfinite(est.t_measured);
    if (opt.assert_bound && !(est.t_measured <= est.t_bound * (1.0 + 1e-6))) {
        fail(ErrorKind::InvariantViolation, "measured mixing time " + std::to_string(est.t_measured) +
                                                " exceeds bound " + std::to_string(est.t_bound));
    }
    return est;
}

// ---------------------------------------------------------------------------
// Spectral profile comparison

struct DeltaGapRecord {
    double delta = 0.0;
    std::int64_t count = 0;
    double gap = 0.0;
    double ratio = 0.0;
};

inline DeltaGapRecord delta_gap_check(const Hamiltonian &h, double beta, double c, double gap) {
    const SpectralProfile p = spectral_profile(h, beta, c);
    return {p.delta, p.count, gap, gap / p.delta};
}

// ---------------------------------------------------------------------------
// Hypercube closed form

/// min((α(−2)+α(2))/d, (α(−2)+α(2)−2θ(2,−2))/(2d)).
inline double hypercube_gap_closed_form(int d, const FilterParams &fp) {
    if (d < 1) {
        fail(ErrorKind::BadSize, "hypercube dimension must be >= 1");
    }
    const double s = alpha(-2.0, fp) + alpha(2.0, fp);
    const double dd = static_cast<double>(d);
    return std::min(s / dd, (s - 2.0 * theta(2.0, -2.0, fp)) / (2.0 * dd));
}

} // namespace ckg
