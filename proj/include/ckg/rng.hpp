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
#include <random>
#include <string>

#include "ckg/matrix_core.hpp"

namespace ckg {

/// One step of the splitmix64 finalizer.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Child seed for task `index` under `root`; independent of scheduling.
constexpr std::uint64_t derive_seed(std::uint64_t root, std::uint64_t index) {
    return splitmix64(splitmix64(root) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

/// Matrix of i.i.d. standard complex normals (E|z|^2 = 1).
inline ComplexMatrix ginibre(Eigen::Index n, std::mt19937_64 &rng) {
    std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
    ComplexMatrix g(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = 0; i < n; ++i) {
            const double re = normal(rng);
            g(i, j) = cplx(re, normal(rng));
        }
    }
    return g;
}

/// Haar-distributed unitary: QR of a Ginibre sample with R's diagonal
/// phases moved onto Q.
inline ComplexMatrix haar_unitary(Eigen::Index n, std::mt19937_64 &rng) {
    ComplexMatrix q = ginibre(n, rng);
    const auto ln = static_cast<lapack_int>(n);
    ComplexVector tau(n);
    lapack_int info = LAPACKE_zgeqrf(LAPACK_COL_MAJOR, ln, ln, q.data(), ln, tau.data());
    if (info != 0) {
        fail(ErrorKind::ConvergenceFailure, "zgeqrf returned info=" + std::to_string(info));
    }
    ComplexVector phase(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const cplx r = q(i, i);
        phase[i] = std::abs(r) > 0 ? r / std::abs(r) : cplx(1.0);
    }
    info = LAPACKE_zungqr(LAPACK_COL_MAJOR, ln, ln, ln, q.data(), ln, tau.data());
    if (info != 0) {
        fail(ErrorKind::ConvergenceFailure, "zungqr returned info=" + std::to_string(info));
    }
    return q * phase.asDiagonal();
}

/// Uniformly random unit vector in C^n.
inline ComplexVector random_unit_vector(Eigen::Index n, std::mt19937_64 &rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    ComplexVector v(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double re = normal(rng);
        v[i] = cplx(re, normal(rng));
    }
    return v / v.norm();
}

} // namespace ckg
