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
 * Lanczos iteration with full reorthogonalization for the largest eigenvalue
 * of a hermitian operator on the orthogonal complement of given vectors.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "ckg/errors.hpp"
#include "ckg/matrix_core.hpp"
#include "ckg/rng.hpp"

namespace ckg {

struct LanczosOptions {
    int max_iter = 400;
    /// Stop when the Ritz residual is below tol times the spectral radius seen.
    double tol = 1e-10;
    int check_every = 5;
    std::uint64_t seed = 0x5eed;
};

struct LanczosResult {
    double value = 0.0;
    ComplexVector vector;
    double residual = 0.0;
    int iterations = 0;
    bool converged = false;
};

/**
 * Largest algebraic eigenvalue of the hermitian map `op` restricted to the
 * complement of `deflate` (orthonormal vectors). `op(x)` returns A·x.
 * Throws ConvergenceFailure if max_iter is exhausted.
 */
template <class Op>
LanczosResult lanczos_largest(Op op, Eigen::Index dim, const std::vector<ComplexVector> &deflate,
                              const LanczosOptions &opt = {}) {
    auto project = [&](ComplexVector &v) {
        for (const auto &d : deflate) {
            v -= d * d.dot(v);
        }
    };
    const Eigen::Index free_dim = dim - static_cast<Eigen::Index>(deflate.size());
    if (free_dim <= 0) {
        fail(ErrorKind::DimensionMismatch, "lanczos: no complement left after deflation");
    }
    std::mt19937_64 rng(opt.seed);
    ComplexVector q = random_unit_vector(dim, rng);
    project(q);
    q.normalize();

    const int kmax = static_cast<int>(std::min<Eigen::Index>(opt.max_iter, free_dim));
    std::vector<ComplexVector> basis;
    std::vector<double> alpha, beta;
    LanczosResult res;
    for (int k = 0; k < kmax; ++k) {
        basis.push_back(q);
        ComplexVector w = op(q);
        project(w);
        const double a = q.dot(w).real();
        alpha.push_back(a);
        // Two passes of classical Gram-Schmidt against the whole basis.
        for (int pass = 0; pass < 2; ++pass) {
            for (const auto &b : basis) {
                w -= b * b.dot(w);
            }
            project(w);
        }
        const double bnext = w.norm();
        const bool breakdown = bnext <= 1e-14 * std::max(1.0, std::abs(a));
        const bool last = k + 1 == kmax;
        if ((k + 1) % opt.check_every == 0 || breakdown || last) {
            const auto m = static_cast<Eigen::Index>(alpha.size());
            Eigen::VectorXd diag(m), off(std::max<Eigen::Index>(m - 1, 0));
            for (Eigen::Index i = 0; i < m; ++i) {
                diag[i] = alpha[static_cast<std::size_t>(i)];
            }
            for (Eigen::Index i = 0; i + 1 < m; ++i) {
                off[i] = beta[static_cast<std::size_t>(i)];
            }
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
            tri.computeFromTridiagonal(diag, off, Eigen::ComputeEigenvectors);
            const Eigen::VectorXd &ev = tri.eigenvalues();
            const double radius = std::max(std::abs(ev[0]), std::abs(ev[m - 1]));
            const Eigen::VectorXd s = tri.eigenvectors().col(m - 1);
            res.value = ev[m - 1];
            res.residual = bnext * std::abs(s[m - 1]);
            res.iterations = k + 1;
            if (breakdown || res.residual <= opt.tol * std::max(radius, 1e-300) || last) {
                res.converged = breakdown || res.residual <= opt.tol * std::max(radius, 1e-300) ||
                                m == free_dim;
                res.vector = ComplexVector::Zero(dim);
                for (Eigen::Index i = 0; i < m; ++i) {
                    res.vector += s[i] * basis[static_cast<std::size_t>(i)];
                }
                res.vector.normalize();
                break;
            }
        }
        beta.push_back(bnext);
        q = w / bnext;
    }
    if (!res.converged) {
        fail(ErrorKind::ConvergenceFailure,
             "lanczos did not converge in " + std::to_string(res.iterations) +
                 " iterations (residual " + std::to_string(res.residual) + ")");
    }
    return res;
}

} // namespace ckg
