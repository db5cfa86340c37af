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

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "ckg/matrix_core.hpp"
#include "ckg/rng.hpp"

using namespace ckg;
using Catch::Approx;

namespace {

ComplexMatrix random_hermitian(Eigen::Index n, std::mt19937_64 &rng) {
    ComplexMatrix g = ginibre(n, rng);
    return 0.5 * (g + g.adjoint());
}

ComplexMatrix random_pure_state(Eigen::Index n, std::mt19937_64 &rng) {
    ComplexVector psi = ginibre(n, rng).col(0);
    psi.normalize();
    return psi * psi.adjoint();
}

} // namespace

TEST_CASE("diagonal input sorts eigenvalues and permutes basis vectors") {
    ComplexMatrix a = ComplexMatrix::Zero(3, 3);
    a(0, 0) = 3;
    a(1, 1) = 1;
    a(2, 2) = 2;
    const EigenSystem es = hermitian_eigendecompose(a);
    CHECK(es.values[0] == Approx(1.0));
    CHECK(es.values[1] == Approx(2.0));
    CHECK(es.values[2] == Approx(3.0));
    CHECK(std::abs(es.vectors(1, 0)) == Approx(1.0));
    CHECK(std::abs(es.vectors(2, 1)) == Approx(1.0));
    CHECK(std::abs(es.vectors(0, 2)) == Approx(1.0));
}

TEST_CASE("Pauli X eigenvectors") {
    ComplexMatrix x(2, 2);
    x << 0, 1, 1, 0;
    const EigenSystem es = hermitian_eigendecompose(x);
    CHECK(es.values[0] == Approx(-1.0));
    CHECK(es.values[1] == Approx(1.0));
    const double r = 1.0 / std::sqrt(2.0);
    CHECK(std::abs(es.vectors(0, 0) - cplx(r)) < 1e-12);
    CHECK(std::abs(es.vectors(1, 0) - cplx(-r)) < 1e-12);
    CHECK(std::abs(es.vectors(0, 1) - cplx(r)) < 1e-12);
    CHECK(std::abs(es.vectors(1, 1) - cplx(r)) < 1e-12);
}

TEST_CASE("six-cycle adjacency spectrum") {
    ComplexMatrix a = ComplexMatrix::Zero(6, 6);
    for (int i = 0; i < 6; ++i) {
        a(i, (i + 1) % 6) = 1;
        a((i + 1) % 6, i) = 1;
    }
    const RealVector w = hermitian_eigendecompose(a).values;
    const double expect[] = {-2, -1, -1, 1, 1, 2};
    for (int j = 0; j < 6; ++j) {
        CHECK(std::abs(w[j] - expect[j]) < 1e-12);
    }
}

TEST_CASE("degenerate clusters resolve to a reproducible basis") {
    std::mt19937_64 rng(7);
    // Identity conjugated by a random unitary is still the identity, so any
    // returned basis is legal; the canonical one is the standard basis.
    const ComplexMatrix id = ComplexMatrix::Identity(5, 5);
    const EigenSystem es = hermitian_eigendecompose(id);
    CHECK((es.vectors - ComplexMatrix::Identity(5, 5)).norm() < 1e-12);

    ComplexMatrix a = ComplexMatrix::Zero(6, 6);
    for (int i = 0; i < 6; ++i) {
        a(i, (i + 1) % 6) = 1;
        a((i + 1) % 6, i) = 1;
    }
    const ComplexMatrix u = haar_unitary(6, rng);
    const ComplexMatrix b = u * a * u.adjoint();
    const EigenSystem e1 = hermitian_eigendecompose(b);
    const EigenSystem e2 = hermitian_eigendecompose(ComplexMatrix(b));
    CHECK((e1.vectors - e2.vectors).norm() == 0.0);
    // Within each 2-fold cluster the first vector has no component
    // orthogonal to the projection of e_0.
    for (int c : {1, 3}) {
        const ComplexVector v0 = e1.vectors.col(c);
        const ComplexVector v1 = e1.vectors.col(c + 1);
        CHECK(std::abs(v1[0]) < 1e-10);
        CHECK(std::abs(v0[0]) > 1e-3);
    }
}

TEST_CASE("non-hermitian input is rejected") {
    ComplexMatrix a(2, 2);
    a << 0, 1, 0, 0;
    CHECK_THROWS_AS(hermitian_eigendecompose(a), Error);
    try {
        hermitian_eigendecompose(a);
    } catch (const Error &e) {
        CHECK(e.kind() == ErrorKind::NonHermitianInput);
    }
}

TEST_CASE("eigendecomposition invariants on random instances") {
    std::mt19937_64 rng(2026);
    std::uniform_int_distribution<int> dim(1, 64);
    for (int trial = 0; trial < 1000; ++trial) {
        const int n = dim(rng);
        const ComplexMatrix a = random_hermitian(n, rng);
        const EigenSystem es = hermitian_eigendecompose(a);
        const double anorm = a.norm();
        const ComplexMatrix &v = es.vectors;
        REQUIRE((a * v - v * es.values.asDiagonal()).norm() <= 1e-10 * n * anorm);
        REQUIRE((v.adjoint() * v - ComplexMatrix::Identity(n, n)).norm() <= 1e-10 * n);
        REQUIRE((v * es.values.asDiagonal() * v.adjoint() - a).norm() <= 1e-9 * n * anorm);
        for (int j = 1; j < n; ++j) {
            REQUIRE(es.values[j] >= es.values[j - 1]);
        }
    }
}

TEST_CASE("operator norm") {
    CHECK(operator_norm(ComplexMatrix::Identity(7, 7)) == Approx(1.0).epsilon(1e-12));
    ComplexMatrix d = ComplexMatrix::Zero(2, 2);
    d(0, 0) = -3;
    d(1, 1) = 2;
    CHECK(operator_norm(d) == Approx(3.0).epsilon(1e-12));

    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const ComplexMatrix g = ginibre(8, rng);
        const double oracle =
            std::sqrt(hermitian_eigendecompose(g.adjoint() * g, 1e-10).values.maxCoeff());
        CHECK(std::abs(operator_norm(g) - oracle) <= 1e-10 * oracle);
    }
    for (int trial = 0; trial < 20; ++trial) {
        const ComplexMatrix u = haar_unitary(12, rng);
        CHECK(std::abs(operator_norm(u) - 1.0) <= 1e-10);
    }
}

TEST_CASE("trace distance") {
    ComplexMatrix p0 = ComplexMatrix::Zero(2, 2);
    ComplexMatrix p1 = ComplexMatrix::Zero(2, 2);
    p0(0, 0) = 1;
    p1(1, 1) = 1;
    CHECK(trace_distance(p0, p0) == Approx(0.0).margin(1e-15));
    CHECK(trace_distance(p0, p1) == Approx(1.0));

    ComplexMatrix half = 0.5 * ComplexMatrix::Identity(2, 2);
    ComplexMatrix skew = ComplexMatrix::Zero(2, 2);
    skew(0, 0) = 0.75;
    skew(1, 1) = 0.25;
    CHECK(trace_distance(half, skew) == Approx(0.25));

    CHECK_THROWS_AS(trace_distance(p0, ComplexMatrix::Identity(2, 2)), Error);

    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 200; ++trial) {
        const ComplexMatrix a = random_pure_state(4, rng);
        const ComplexMatrix b = random_pure_state(4, rng);
        const ComplexMatrix c = 0.5 * (random_pure_state(4, rng) + random_pure_state(4, rng));
        const double ab = trace_distance(a, b);
        CHECK(ab == Approx(trace_distance(b, a)).epsilon(1e-12));
        CHECK(ab <= trace_distance(a, c) + trace_distance(c, b) + 1e-12);
    }
}

TEST_CASE("vectorization convention") {
    ComplexMatrix x = ComplexMatrix::Zero(2, 2);
    x(0, 1) = 1;
    const ComplexVector v = vectorize(x);
    CHECK(v.size() == 4);
    CHECK(v[1] == cplx(1.0));
    CHECK(v.norm() == 1.0);

    std::mt19937_64 rng(3);
    const ComplexMatrix a = ginibre(5, rng);
    const ComplexMatrix b = ginibre(5, rng);
    CHECK(devectorize(vectorize(a)) == a);
    const cplx s(0.3, -1.2), t(2.0, 0.5);
    CHECK((vectorize(s * a + t * b) - (s * vectorize(a) + t * vectorize(b))).norm() < 1e-13);

    for (Eigen::Index f = 0; f < 25; ++f) {
        CHECK(VecIndex::from_flat(f, 5).flat(5) == f);
    }
    CHECK_THROWS_AS(devectorize(ComplexVector::Zero(5)), Error);
}

TEST_CASE("general eigenvalues agree with the hermitian path") {
    std::mt19937_64 rng(9);
    const ComplexMatrix a = random_hermitian(10, rng);
    ComplexVector w = general_eigenvalues(a);
    std::vector<double> re;
    for (auto z : w) {
        CHECK(std::abs(z.imag()) < 1e-10);
        re.push_back(z.real());
    }
    std::sort(re.begin(), re.end());
    const RealVector h = hermitian_eigenvalues(a);
    for (int j = 0; j < 10; ++j) {
        CHECK(std::abs(re[j] - h[j]) < 1e-10);
    }
}
