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
 * Dense complex linear algebra used by every other module: Hermitian
 * eigendecomposition (LAPACK zheevd behind a deterministic post-processing
 * step), norms, trace distance and the row-major operator vectorization
 * that indexes superoperators.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

#ifndef lapack_complex_float
#define lapack_complex_float std::complex<float>
#endif
#ifndef lapack_complex_double
#define lapack_complex_double std::complex<double>
#endif
#include <lapacke.h>

#include "ckg/errors.hpp"

namespace ckg {

using cplx = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

/// Eigenvalues ascending; column j of `vectors` belongs to `values[j]`.
struct EigenSystem {
    RealVector values;
    ComplexMatrix vectors;

    Eigen::Index dim() const { return values.size(); }
};

inline double max_abs_entry(const ComplexMatrix &a) {
    return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff();
}

/// max_ij |A_ij - conj(A_ji)|.
inline double hermiticity_residual(const ComplexMatrix &a) {
    if (a.rows() != a.cols()) {
        fail(ErrorKind::DimensionMismatch, "hermiticity of a non-square matrix");
    }
    return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

inline bool is_hermitian(const ComplexMatrix &a, double rel_tol = 1e-12) {
    return hermiticity_residual(a) <= rel_tol * std::max(max_abs_entry(a), 1e-300);
}

namespace detail {

inline void require_square(const ComplexMatrix &a, const char *what) {
    if (a.rows() != a.cols()) {
        fail(ErrorKind::DimensionMismatch,
             std::string(what) + ": expected a square matrix, got " +
                 std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
    }
}

inline void require_hermitian(const ComplexMatrix &a, double rel_tol, const char *what) {
    require_square(a, what);
    const double res = hermiticity_residual(a);
    const double scale = max_abs_entry(a);
    if (res > rel_tol * scale) {
        fail(ErrorKind::NonHermitianInput, std::string(what) + ": hermiticity residual " +
                                               std::to_string(res) + " exceeds " +
                                               std::to_string(rel_tol) + " * maxAbsEntry");
    }
}

// Rotate a degenerate cluster's basis onto the Gram-Schmidt orthonormalization
// of its projections of e_0, e_1, ... so the result does not depend on which
// basis LAPACK happened to return.
inline void canonicalize_cluster(ComplexMatrix &vecs, Eigen::Index begin, Eigen::Index end) {
    const Eigen::Index k = end - begin;
    const Eigen::Index n = vecs.rows();
    const ComplexMatrix block = vecs.middleCols(begin, k);
    ComplexMatrix coeffs(k, k);
    Eigen::Index found = 0;
    for (double threshold : {1e-3, 1e-8}) {
        for (Eigen::Index i = 0; i < n && found < k; ++i) {
            ComplexVector c = block.row(i).adjoint();
            for (int pass = 0; pass < 2; ++pass) {
                for (Eigen::Index j = 0; j < found; ++j) {
                    c -= coeffs.col(j) * coeffs.col(j).dot(c);
                }
            }
            const double nrm = c.norm();
            if (nrm > threshold) {
                coeffs.col(found++) = c / nrm;
            }
        }
        if (found == k) {
            break;
        }
    }
    if (found < k) {
        fail(ErrorKind::ConvergenceFailure, "degenerate cluster canonicalization lost rank");
    }
    vecs.middleCols(begin, k) = block * coeffs;
}

inline void fix_phase(Eigen::Ref<ComplexVector> v) {
    const double vmax = v.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (std::abs(v[i]) >= 0.5 * vmax) {
            v *= std::conj(v[i]) / std::abs(v[i]);
            return;
        }
    }
}

} // namespace detail

/// Relative width below which neighbouring eigenvalues are treated as one
/// degenerate cluster.
inline constexpr double kDegeneracyRelTol = 1e-9;

/**
 * Hermitian eigendecomposition with a reproducible basis.
 *
 * Eigenvalues closer than kDegeneracyRelTol * ||A|| are grouped; inside each
 * group the eigenvectors are replaced by the Gram-Schmidt orthonormalization
 * of the projected canonical basis vectors e_0, e_1, ... (ascending). Every
 * eigenvector's phase is then fixed so that its first entry with at least half
 * the maximal modulus is real and positive.
 */
inline EigenSystem hermitian_eigendecompose(const ComplexMatrix &a, double herm_rel_tol = 1e-12) {
    detail::require_hermitian(a, herm_rel_tol, "hermitian_eigendecompose");
    const lapack_int n = static_cast<lapack_int>(a.rows());
    EigenSystem es;
    es.values.resize(n);
    if (n == 0) {
        return es;
    }
    es.vectors = 0.5 * (a + a.adjoint());
    const lapack_int info = LAPACKE_zheevd(LAPACK_COL_MAJOR, 'V', 'L', n, es.vectors.data(), n,
                                           es.values.data());
    if (info != 0) {
        fail(ErrorKind::ConvergenceFailure, "zheevd returned info=" + std::to_string(info));
    }
    const double scale = es.values.cwiseAbs().maxCoeff();
    Eigen::Index begin = 0;
    for (Eigen::Index j = 1; j <= n; ++j) {
        if (j == n || es.values[j] - es.values[j - 1] > kDegeneracyRelTol * scale) {
            if (j - begin > 1) {
                detail::canonicalize_cluster(es.vectors, begin, j);
            }
            begin = j;
        }
    }
    for (Eigen::Index j = 0; j < n; ++j) {
        detail::fix_phase(es.vectors.col(j));
    }
    return es;
}

/// Eigenpairs straight from zheevd, without the basis canonicalization.
inline EigenSystem hermitian_eigensystem_raw(const ComplexMatrix &a, double herm_rel_tol = 1e-12) {
    detail::require_hermitian(a, herm_rel_tol, "hermitian_eigensystem_raw");
    const lapack_int n = static_cast<lapack_int>(a.rows());
    EigenSystem es;
    es.values.resize(n);
    es.vectors = 0.5 * (a + a.adjoint());
    if (n == 0) {
        return es;
    }
    const lapack_int info = LAPACKE_zheevd(LAPACK_COL_MAJOR, 'V', 'L', n, es.vectors.data(), n,
                                           es.values.data());
    if (info != 0) {
        fail(ErrorKind::ConvergenceFailure, "zheevd returned info=" + std::to_string(info));
    }
    return es;
}

/// Eigenvalues only (ascending); cheaper than the full decomposition.
inline RealVector hermitian_eigenvalues(const ComplexMatrix &a, double herm_rel_tol = 1e-12) {
    detail::require_hermitian(a, herm_rel_tol, "hermitian_eigenvalues");
    const lapack_int n = static_cast<lapack_int>(a.rows());
    RealVector w(n);
    if (n == 0) {
        return w;
    }
    ComplexMatrix work = 0.5 * (a + a.adjoint());
    const lapack_int info =
        LAPACKE_zheevd(LAPACK_COL_MAJOR, 'N', 'L', n, work.data(), n, w.data());
    if (info != 0) {
        fail(ErrorKind::ConvergenceFailure, "zheevd returned info=" + std::to_string(info));
    }
    return w;
}

/// Eigenvalues of a general complex matrix (unordered).
inline ComplexVector general_eigenvalues(const ComplexMatrix &a) {
    detail::require_square(a, "general_eigenvalues");
    const lapack_int n = static_cast<lapack_int>(a.rows());
    ComplexVector w(n);
    if (n == 0) {
        return w;
    }
    ComplexMatrix work = a;
    const lapack_int info = LAPACKE_zgeev(LAPACK_COL_MAJOR, 'N', 'N', n, work.data(), n, w.data(),
                                          nullptr, 1, nullptr, 1);
    if (info != 0) {
        fail(ErrorKind::ConvergenceFailure, "zgeev returned info=" + std::to_string(info));
    }
    return w;
}

/// Largest singular value.
inline double operator_norm(const ComplexMatrix &a) {
    if (a.size() == 0) {
        return 0.0;
    }
    const lapack_int m = static_cast<lapack_int>(a.rows());
    const lapack_int n = static_cast<lapack_int>(a.cols());
    ComplexMatrix work = a;
    RealVector s(std::min(m, n));
    std::vector<double> superb(static_cast<std::size_t>(std::max<lapack_int>(1, std::min(m, n))));
    const lapack_int info = LAPACKE_zgesvd(LAPACK_COL_MAJOR, 'N', 'N', m, n, work.data(), m,
                                           s.data(), nullptr, 1, nullptr, 1, superb.data());
    if (info != 0) {
        fail(ErrorKind::ConvergenceFailure, "zgesvd returned info=" + std::to_string(info));
    }
    return s[0];
}

/// ½ Σ |eig(ρ − σ)| for two density matrices.
inline double trace_distance(const ComplexMatrix &rho, const ComplexMatrix &sigma) {
    if (rho.rows() != sigma.rows() || rho.cols() != sigma.cols()) {
        fail(ErrorKind::DimensionMismatch, "trace_distance operands differ in shape");
    }
    for (const ComplexMatrix *m : {&rho, &sigma}) {
        if (m->rows() != m->cols() || hermiticity_residual(*m) > 1e-10 ||
            std::abs(m->trace() - cplx(1.0)) > 1e-10) {
            fail(ErrorKind::NotAState, "trace_distance needs hermitian unit-trace operands");
        }
    }
    return 0.5 * hermitian_eigenvalues(rho - sigma, 1.0).cwiseAbs().sum();
}

/// Position of the basis operator |l1><l2| in a vectorized n x n operator.
struct VecIndex {
    Eigen::Index l1 = 0;
    Eigen::Index l2 = 0;

    constexpr Eigen::Index flat(Eigen::Index n) const { return l1 * n + l2; }
    static constexpr VecIndex from_flat(Eigen::Index flat, Eigen::Index n) {
        return {flat / n, flat % n};
    }
};

/// Row-major flattening: entry (l1, l2) lands at l1 * n + l2.
inline ComplexVector vectorize(const ComplexMatrix &x) {
    detail::require_square(x, "vectorize");
    const Eigen::Index n = x.rows();
    ComplexVector v(n * n);
    for (Eigen::Index l1 = 0; l1 < n; ++l1) {
        for (Eigen::Index l2 = 0; l2 < n; ++l2) {
            v[l1 * n + l2] = x(l1, l2);
        }
    }
    return v;
}

inline ComplexMatrix devectorize(const ComplexVector &v) {
    const auto n = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(v.size()))));
    if (n * n != v.size()) {
        fail(ErrorKind::DimensionMismatch,
             "devectorize: length " + std::to_string(v.size()) + " is not a perfect square");
    }
    ComplexMatrix x(n, n);
    for (Eigen::Index l1 = 0; l1 < n; ++l1) {
        for (Eigen::Index l2 = 0; l2 < n; ++l2) {
            x(l1, l2) = v[l1 * n + l2];
        }
    }
    return x;
}

inline ComplexMatrix kron(const ComplexMatrix &a, const ComplexMatrix &b) {
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

} // namespace ckg
