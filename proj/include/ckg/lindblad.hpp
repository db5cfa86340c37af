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
 * Assembly of the Gaussian-filtered detailed-balance Lindbladian as an
 * explicit n² x n² matrix in the vectorized energy eigenbasis.
 *
 * Index conventions: Ã^a = V† A^a V, ν_lm = E_l − E_m, row (l1, l2) and
 * column (m1, m2) flatten as l1·n + l2 and m1·n + m2. With
 *
 *   T_pq = Σ_a Σ_j conj(Ã^a_jp) Ã^a_jq θ(ν_jp, ν_jq)
 *
 * the three parts are
 *
 *   L_t[(l1,l2),(m1,m2)] =  Σ_a Ã^a_{l1m1} conj(Ã^a_{l2m2}) θ(ν_{l1m1}, ν_{l2m2})
 *   L_d[(l1,l2),(m1,m2)] = −½ (δ_{l1m1} T_{m2l2} + δ_{l2m2} T_{l1m1})
 *   L_c = −i[B, ·],  B_pq = (i/2) tanh(βν_pq/4) T_pq
 *
 * so that L_c[(l1,l2),(m1,m2)] = ½ (δ_{l2m2} t_{l1m1} − δ_{l1m1} t_{m2l2}) with
 * t_pq = tanh(βν_pq/4) T_pq. CoherentSign::as_printed flips L_c; that variant
 * is kept only so the sign can be adjudicated numerically.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "ckg/errors.hpp"
#include "ckg/filters.hpp"
#include "ckg/hamiltonian.hpp"
#include "ckg/jumps.hpp"
#include "ckg/matrix_core.hpp"
#include "ckg/parallel.hpp"
#include "ckg/rng.hpp"

namespace ckg {

/// Thermal state, diagonal in the energy basis.
struct GibbsState {
    RealVector p;
    RealVector log_p;
    double beta = 0.0;
    double norm_h = 0.0;

    Eigen::Index dim() const { return p.size(); }

    ComplexMatrix rho() const {
        ComplexMatrix r = ComplexMatrix::Zero(dim(), dim());
        r.diagonal() = p.cast<cplx>();
        return r;
    }
};

/// p_j ∝ e^{−β(E_j − E_min)}.
inline GibbsState gibbs_state(const Hamiltonian &h, double beta) {
    if (!(beta >= 0.0) || !std::isfinite(beta)) {
        fail(ErrorKind::BadParameter, "beta must be finite and >= 0");
    }
    const RealVector &e = h.eig().values;
    const double emin = e.minCoeff();
    GibbsState g;
    g.beta = beta;
    g.norm_h = e.cwiseAbs().maxCoeff();
    g.log_p = -beta * (e.array() - emin).matrix();
    const double log_z = std::log(g.log_p.array().exp().sum());
    g.log_p.array() -= log_z;
    g.p = g.log_p.array().exp().matrix();
    return g;
}

namespace detail {

inline void require_regular_weights(const GibbsState &g) {
    const double bh = g.beta * g.norm_h;
    if (bh > 700.0 || !(g.p.minCoeff() > std::numeric_limits<double>::min())) {
        fail(ErrorKind::SingularWeight,
             "Gibbs weights underflow (beta*||H|| = " + std::to_string(bh) + ")");
    }
}

/// log of the KMS weight √(p_{l1} p_{l2}) at every flat index.
inline RealVector log_kms_weights(const GibbsState &g) {
    const Eigen::Index n = g.dim();
    RealVector s(n * n);
    for (Eigen::Index l1 = 0; l1 < n; ++l1) {
        for (Eigen::Index l2 = 0; l2 < n; ++l2) {
            s[l1 * n + l2] = 0.5 * (g.log_p[l1] + g.log_p[l2]);
        }
    }
    return s;
}

} // namespace detail

/// ‖L − Ŵ L† Ŵ^{−1}‖_F / ‖L‖_F with Ŵ = diag(√(ρ_{l1l1} ρ_{l2l2})).
inline double db_residual(const ComplexMatrix &l, const GibbsState &g) {
    detail::require_regular_weights(g);
    const Eigen::Index nn = l.rows();
    if (nn != g.dim() * g.dim() || l.cols() != nn) {
        fail(ErrorKind::DimensionMismatch, "db_residual: superoperator and state sizes differ");
    }
    const RealVector s = detail::log_kms_weights(g);
    const double scale = l.norm();
    if (scale == 0.0) {
        return 0.0;
    }
    // Tiled so that both l(r, c) and l(c, r) stay in cache.
    constexpr Eigen::Index kTile = 64;
    double acc = 0.0;
    for (Eigen::Index c0 = 0; c0 < nn; c0 += kTile) {
        const Eigen::Index c1 = std::min(nn, c0 + kTile);
        for (Eigen::Index r0 = 0; r0 < nn; r0 += kTile) {
            const Eigen::Index r1 = std::min(nn, r0 + kTile);
            for (Eigen::Index c = c0; c < c1; ++c) {
                for (Eigen::Index r = r0; r < r1; ++r) {
                    const cplx lr = l(r, c);
                    const cplx lc = l(c, r);
                    if (lr == cplx(0.0) && lc == cplx(0.0)) {
                        continue;
                    }
                    acc += std::norm(lr - std::exp(s[r] - s[c]) * std::conj(lc));
                }
            }
        }
    }
    return std::sqrt(acc) / scale;
}

/// Ŵ^{−1/2} L Ŵ^{1/2}; hermitian exactly when L is KMS-detailed-balanced.
inline ComplexMatrix kms_symmetrize(const ComplexMatrix &l, const GibbsState &g) {
    detail::require_regular_weights(g);
    const RealVector s = detail::log_kms_weights(g);
    ComplexMatrix out(l.rows(), l.cols());
    for (Eigen::Index c = 0; c < l.cols(); ++c) {
        for (Eigen::Index r = 0; r < l.rows(); ++r) {
            out(r, c) = l(r, c) * std::exp(0.5 * (s[c] - s[r]));
        }
    }
    return out;
}

/// Null vector of the symmetrized generator: √p_l on diagonal pairs.
inline ComplexVector sqrt_gibbs_vector(const GibbsState &g) {
    const Eigen::Index n = g.dim();
    ComplexVector v = ComplexVector::Zero(n * n);
    for (Eigen::Index l = 0; l < n; ++l) {
        v[l * n + l] = std::sqrt(g.p[l]);
    }
    return v;
}

/// −i[B, ·] in the row-major vectorization: −i(B ⊗ I − I ⊗ Bᵀ).
inline ComplexMatrix commutator_superop(const ComplexMatrix &b) {
    const Eigen::Index n = b.rows();
    const ComplexMatrix id = ComplexMatrix::Identity(n, n);
    return cplx(0, -1) * (kron(b, id) - kron(id, b.transpose()));
}

/// devectorize(L · vectorize(X)).
inline ComplexMatrix apply_superop(const ComplexMatrix &l, const ComplexMatrix &x) {
    return devectorize(l * vectorize(x));
}

enum class CoherentSign { kms, as_printed };

struct LindbladParts {
    ComplexMatrix transition;
    ComplexMatrix decay;
    ComplexMatrix coherent;
};

struct Provenance {
    std::string hamiltonian;
    std::string jumps;
    FilterParams filter;
    std::string builder;
};

struct BuildResiduals {
    double db = 0.0;
    double fixed_point = 0.0;
    double trace = 0.0;
    double unitality = 0.0;
    double norm = 0.0;
};

struct Superoperator {
    Eigen::Index n = 0;
    ComplexMatrix matrix;
    std::optional<LindbladParts> parts;
    Provenance provenance;
    std::optional<BuildResiduals> residuals;
};

struct BuildOptions {
    /// Run detailed-balance, fixed-point and trace checks and fail loudly.
    bool check = true;
    bool validate_jumps = true;
    bool keep_parts = false;
    CoherentSign sign = CoherentSign::kms;
    unsigned threads = 1;
    double db_tol = 1e-8;
    double fixed_point_tol = 1e-8;
    double trace_tol = 1e-9;
    std::size_t memory_budget = kMemoryBudgetBytes;
};

/// Invariant residuals of a superoperator against a Gibbs state. Scales use
/// the Frobenius norm of L.
inline BuildResiduals residuals(const ComplexMatrix &l, const GibbsState &g) {
    const Eigen::Index n = g.dim();
    BuildResiduals r;
    r.norm = l.norm();
    r.db = db_residual(l, g);
    ComplexVector lr = ComplexVector::Zero(n * n);
    for (Eigen::Index m = 0; m < n; ++m) {
        lr += l.col(m * n + m) * g.p[m];
    }
    r.fixed_point = lr.norm();
    ComplexVector tr = ComplexVector::Zero(n * n);
    for (Eigen::Index k = 0; k < n; ++k) {
        tr += l.row(k * n + k).transpose();
    }
    r.trace = tr.cwiseAbs().maxCoeff();
    r.unitality = tr.norm();
    return r;
}

namespace detail {

inline std::vector<ComplexMatrix> rotate_jumps(const JumpSet &js, const ComplexMatrix &v) {
    std::vector<ComplexMatrix> out;
    out.reserve(js.size());
    for (const auto &a : js.jumps) {
        out.push_back(v.adjoint() * a * v);
    }
    return out;
}

struct Assembly {
    ComplexMatrix l;
    ComplexMatrix t;
    std::optional<LindbladParts> parts;
};

inline Assembly assemble(const Hamiltonian &h, const std::vector<ComplexMatrix> &at, const Kernel &k,
                         CoherentSign sign, bool keep_parts, unsigned threads) {
    const Eigen::Index n = h.dim();
    const Eigen::Index nn = n * n;
    const auto m = static_cast<Eigen::Index>(at.size());
    const RealMatrix &nu = h.bohr();

    // x(l·n + q, a) = Ã^a_lq and xt(q·n + l, a) = conj(Ã^a_lq).
    ComplexMatrix x(nn, m), xt(nn, m);
    for (Eigen::Index a = 0; a < m; ++a) {
        const ComplexMatrix &aa = at[static_cast<std::size_t>(a)];
        for (Eigen::Index l = 0; l < n; ++l) {
            for (Eigen::Index q = 0; q < n; ++q) {
                x(l * n + q, a) = aa(l, q);
                xt(q * n + l, a) = std::conj(aa(l, q));
            }
        }
    }

    Assembly out;
    out.l = ComplexMatrix::Zero(nn, nn);
    if (keep_parts) {
        out.parts = LindbladParts{ComplexMatrix::Zero(nn, nn), ComplexMatrix::Zero(nn, nn),
                                  ComplexMatrix::Zero(nn, nn)};
    }

    // Transition term, rows (l1, ·) per task. g(m2·n + l2, m1) holds
    // Σ_a Ã_{l1m1} conj(Ã_{l2m2}), so the inner l2 loop writes contiguously.
    parallel_for(static_cast<std::size_t>(n), threads, [&](std::size_t task) {
        const auto l1 = static_cast<Eigen::Index>(task);
        const ComplexMatrix g = xt * x.middleRows(l1 * n, n).transpose();
        for (Eigen::Index m1 = 0; m1 < n; ++m1) {
            const double nu1 = nu(l1, m1);
            for (Eigen::Index m2 = 0; m2 < n; ++m2) {
                const Eigen::Index col = m1 * n + m2;
                for (Eigen::Index l2 = 0; l2 < n; ++l2) {
                    const cplx w = g(m2 * n + l2, m1);
                    if (w == cplx(0.0)) {
                        continue;
                    }
                    const cplx v = w * k(nu1, nu(l2, m2));
                    out.l(l1 * n + l2, col) = v;
                    if (keep_parts) {
                        out.parts->transition(l1 * n + l2, col) = v;
                    }
                }
            }
        }
    });

    // T_pq = Σ_j θ(ν_jp, ν_jq) Σ_a conj(Ã_jp) Ã_jq.
    out.t = ComplexMatrix::Zero(n, n);
    ComplexMatrix y(m, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index a = 0; a < m; ++a) {
            y.row(a) = at[static_cast<std::size_t>(a)].row(j);
        }
        const ComplexMatrix kj = y.adjoint() * y;
        for (Eigen::Index q = 0; q < n; ++q) {
            for (Eigen::Index p = 0; p < n; ++p) {
                if (kj(p, q) != cplx(0.0)) {
                    out.t(p, q) += kj(p, q) * k(nu(j, p), nu(j, q));
                }
            }
        }
    }

    const double beta = k.params().beta;
    ComplexMatrix tw(n, n);
    for (Eigen::Index q = 0; q < n; ++q) {
        for (Eigen::Index p = 0; p < n; ++p) {
            tw(p, q) = std::tanh(0.25 * beta * nu(p, q)) * out.t(p, q);
        }
    }
    const double cs = sign == CoherentSign::kms ? 0.5 : -0.5;

    auto add = [&](ComplexMatrix *part, Eigen::Index r, Eigen::Index c, cplx v) {
        out.l(r, c) += v;
        if (part) {
            (*part)(r, c) += v;
        }
    };
    ComplexMatrix *decay = keep_parts ? &out.parts->decay : nullptr;
    ComplexMatrix *coh = keep_parts ? &out.parts->coherent : nullptr;
    for (Eigen::Index a1 = 0; a1 < n; ++a1) {
        for (Eigen::Index b2 = 0; b2 < n; ++b2) {
            for (Eigen::Index c2 = 0; c2 < n; ++c2) {
                // δ_{l1m1} terms: row (a1, b2), column (a1, c2).
                add(decay, a1 * n + b2, a1 * n + c2, -0.5 * out.t(c2, b2));
                add(coh, a1 * n + b2, a1 * n + c2, -cs * tw(c2, b2));
                // δ_{l2m2} terms: row (b2, a1), column (c2, a1).
                add(decay, b2 * n + a1, c2 * n + a1, -0.5 * out.t(b2, c2));
                add(coh, b2 * n + a1, c2 * n + a1, cs * tw(b2, c2));
            }
        }
    }
    return out;
}

inline void require_compatible(const Hamiltonian &h, const JumpSet &js, const BuildOptions &opt) {
    if (js.size() == 0 || js.dim() != h.dim()) {
        fail(ErrorKind::DimensionMismatch, "jump dimension " + std::to_string(js.dim()) +
                                               " differs from Hamiltonian dimension " +
                                               std::to_string(h.dim()));
    }
    check_dense_budget(static_cast<std::size_t>(h.dim() * h.dim()), opt.memory_budget);
    if (opt.validate_jumps) {
        const JumpValidation v = validate(js);
        if (!v.adjoint_closed) {
            fail(ErrorKind::NotAdjointClosed,
                 "jump set is not adjoint-closed (residual " + std::to_string(v.adjoint_residual) + ")");
        }
        if (!v.normalized) {
            fail(ErrorKind::InvariantViolation,
                 "jump normalization sum is " + std::to_string(v.normalization_sum));
        }
    }
}

inline void enforce(const BuildResiduals &r, const BuildOptions &opt, const std::string &what) {
    const double scale = std::max(r.norm, 1e-300);
    std::string msg;
    if (r.db > opt.db_tol) {
        msg += " db_residual=" + std::to_string(r.db);
    }
    if (r.fixed_point > opt.fixed_point_tol * scale) {
        msg += " fixed_point=" + std::to_string(r.fixed_point / scale);
    }
    if (r.trace > opt.trace_tol) {
        msg += " trace=" + std::to_string(r.trace);
    }
    if (!msg.empty()) {
        fail(ErrorKind::InvariantViolation, what + " violates invariants:" + msg);
    }
}

} // namespace detail

/**
 * Dense assembly of the Lindbladian for (H, jumps, filter). Gaussian mode
 * uses θ; Davies mode uses Metropolis weights on exactly matched Bohr
 * frequencies. Throws InvariantViolation if the built matrix fails detailed
 * balance, the fixed-point test or trace annihilation.
 */
inline Superoperator build(const Hamiltonian &h, const JumpSet &js, const FilterParams &fp,
                           const BuildOptions &opt = {}) {
    fp.check();
    detail::require_compatible(h, js, opt);
    const Kernel k = Kernel::for_hamiltonian(fp, h.norm());
    detail::Assembly as = detail::assemble(h, detail::rotate_jumps(js, h.eig().vectors), k,
                                           opt.sign, opt.keep_parts, opt.threads);
    Superoperator s;
    s.n = h.dim();
    s.matrix = std::move(as.l);
    s.parts = std::move(as.parts);
    s.provenance = {h.id(), js.descriptor(), fp,
                    fp.mode == FilterMode::gaussian ? "ckg" : "davies"};
    if (opt.check) {
        const GibbsState g = gibbs_state(h, fp.beta);
        s.residuals = residuals(s.matrix, g);
        detail::enforce(*s.residuals, opt, "build(" + h.id() + ", " + js.descriptor() + ")");
    }
    return s;
}

/// σ_E → 0 limit: Metropolis filter with Bohr matching tolerance 1e-9·‖H‖.
inline Superoperator build_davies(const Hamiltonian &h, const JumpSet &js, double beta,
                                  const BuildOptions &opt = {}) {
    return build(h, js, FilterParams{beta, 0.0, FilterMode::davies}, opt);
}

/**
 * Closed-form Haar average L_μ, stored compactly: `classical` is the n x n
 * population generator G_lm = L[(l,l),(m,m)], `dephasing(m1, m2)` is the
 * diagonal entry at (m1, m2) for m1 ≠ m2. Every other entry is zero.
 */
struct AveragedLindbladian {
    Eigen::Index n = 0;
    RealMatrix classical;
    RealMatrix dephasing;
    Provenance provenance;

    ComplexMatrix to_dense(std::size_t budget = kMemoryBudgetBytes) const {
        check_dense_budget(static_cast<std::size_t>(n * n), budget);
        ComplexMatrix l = ComplexMatrix::Zero(n * n, n * n);
        for (Eigen::Index m1 = 0; m1 < n; ++m1) {
            for (Eigen::Index m2 = 0; m2 < n; ++m2) {
                if (m1 == m2) {
                    for (Eigen::Index q = 0; q < n; ++q) {
                        l(q * n + q, m1 * n + m1) = classical(q, m1);
                    }
                } else {
                    l(m1 * n + m2, m1 * n + m2) = dephasing(m1, m2);
                }
            }
        }
        return l;
    }
};

inline AveragedLindbladian build_average_structured(const Hamiltonian &h, const FilterParams &fp) {
    fp.check();
    const Kernel k = Kernel::for_hamiltonian(fp, h.norm());
    const Eigen::Index n = h.dim();
    const RealMatrix &nu = h.bohr();
    const double inv_n = 1.0 / static_cast<double>(n);
    RealMatrix a(n, n);
    for (Eigen::Index m = 0; m < n; ++m) {
        for (Eigen::Index j = 0; j < n; ++j) {
            a(j, m) = k.diag(nu(j, m)) * inv_n;
        }
    }
    // out(m) = Σ_j α(ν_jm)/n, the total decay rate out of level m.
    const RealVector out = a.colwise().sum().transpose();
    AveragedLindbladian avg;
    avg.n = n;
    avg.classical = a;
    for (Eigen::Index m = 0; m < n; ++m) {
        avg.classical(m, m) = -(out[m] - a(m, m));
    }
    avg.dephasing = RealMatrix::Zero(n, n);
    for (Eigen::Index m1 = 0; m1 < n; ++m1) {
        for (Eigen::Index m2 = 0; m2 < n; ++m2) {
            if (m1 != m2) {
                avg.dephasing(m1, m2) = -0.5 * (out[m1] + out[m2]);
            }
        }
    }
    avg.provenance = {h.id(), "average", fp, "average"};
    return avg;
}

/// Dense form of the Haar-averaged Lindbladian.
inline Superoperator build_average(const Hamiltonian &h, const FilterParams &fp,
                                   const BuildOptions &opt = {}) {
    const AveragedLindbladian avg = build_average_structured(h, fp);
    Superoperator s;
    s.n = h.dim();
    s.matrix = avg.to_dense(opt.memory_budget);
    s.provenance = avg.provenance;
    if (opt.check) {
        s.residuals = residuals(s.matrix, gibbs_state(h, fp.beta));
        detail::enforce(*s.residuals, opt, "build_average(" + h.id() + ")");
    }
    return s;
}

struct CoherentCrossCheck {
    /// ‖−i[B,·] − L_c(sign)‖_F / ‖L_c‖_F.
    double residual = 0.0;
    double db_kms = 0.0;
    double db_as_printed = 0.0;
};

/**
 * B in the energy basis, B_pq = (i/2) tanh(βν_pq/4) T_pq, together with
 * the cross-check of −i[B,·] against the element-wise L_c assembled with
 * `sign`. A disagreement beyond 1e-8·‖L_c‖ raises CrossCheckFailure and
 * reports the detailed-balance residual of both sign choices.
 */
inline ComplexMatrix coherent_operator(const Hamiltonian &h, const JumpSet &js, const FilterParams &fp,
                                       CoherentSign sign = CoherentSign::kms,
                                       CoherentCrossCheck *report = nullptr) {
    fp.check();
    BuildOptions opt;
    detail::require_compatible(h, js, opt);
    const Kernel k = Kernel::for_hamiltonian(fp, h.norm());
    const auto at = detail::rotate_jumps(js, h.eig().vectors);
    const detail::Assembly as = detail::assemble(h, at, k, sign, true, 1);
    const Eigen::Index n = h.dim();
    const RealMatrix &nu = h.bohr();
    ComplexMatrix b(n, n);
    for (Eigen::Index q = 0; q < n; ++q) {
        for (Eigen::Index p = 0; p < n; ++p) {
            b(p, q) = cplx(0, 0.5) * std::tanh(0.25 * fp.beta * nu(p, q)) * as.t(p, q);
        }
    }
    const ComplexMatrix &lc = as.parts->coherent;
    const double lc_norm = lc.norm();
    const double diff = (commutator_superop(b) - lc).norm();
    CoherentCrossCheck cc;
    cc.residual = lc_norm > 0 ? diff / lc_norm : diff;
    const bool agree = diff <= 1e-8 * lc_norm + 1e-13;
    if (report || !agree) {
        const GibbsState g = gibbs_state(h, fp.beta);
        const ComplexMatrix base = as.parts->transition + as.parts->decay;
        const double s = sign == CoherentSign::kms ? 1.0 : -1.0;
        cc.db_kms = db_residual(base + s * lc, g);
        cc.db_as_printed = db_residual(base - s * lc, g);
    }
    if (report) {
        *report = cc;
    }
    if (!agree) {
        fail(ErrorKind::CrossCheckFailure,
             "commutator form and element form of the coherent term disagree (relative residual " +
                 std::to_string(cc.residual) + "; db_residual kms=" + std::to_string(cc.db_kms) +
                 ", as printed=" + std::to_string(cc.db_as_printed) + ")");
    }
    return b;
}

/// Estimate of ‖L‖_{∞→∞} as the largest ‖L[X]‖ over random unitaries and
/// random pure states X (all of operator norm 1), in the energy basis.
inline double estimate_inf_norm(const ComplexMatrix &l, int samples, std::uint64_t seed) {
    const auto n = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(l.rows()))));
    std::mt19937_64 rng(seed);
    double best = 0.0;
    for (int s = 0; s < samples; ++s) {
        ComplexMatrix x;
        if (s % 2 == 0) {
            x = haar_unitary(n, rng);
        } else {
            const ComplexVector v = random_unit_vector(n, rng);
            x = v * v.adjoint();
        }
        best = std::max(best, operator_norm(apply_superop(l, x)));
    }
    return best;
}

} // namespace ckg
