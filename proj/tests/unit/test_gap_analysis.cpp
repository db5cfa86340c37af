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

#include "ckg/gap.hpp"

using namespace ckg;

namespace {

FilterParams gp(double beta, double sigma) { return {beta, sigma, FilterMode::gaussian}; }

Hamiltonian random_hamiltonian(Eigen::Index n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const ComplexMatrix g = ginibre(n, rng);
    return Hamiltonian(0.5 * (g + g.adjoint()), Family::custom, {{"seed", seed}});
}

ErrorKind kind_of(auto &&fn) {
    try {
        fn();
    } catch (const Error &e) {
        return e.kind();
    }
    FAIL("no error raised");
    return ErrorKind::IoError;
}

} // namespace

TEST_CASE("one-dimensional system has a degenerate fixed point and zero gap") {
    const Hamiltonian h(ComplexMatrix::Zero(1, 1), Family::custom);
    JumpSet js;
    js.jumps.push_back(ComplexMatrix::Ones(1, 1));
    const Superoperator s = build(h, js, gp(1, 0.25));
    const GapReport r = spectral_gap(s, gibbs_state(h, 1.0));
    CHECK(r.degenerate_fixed_point);
    CHECK(r.gap == 0.0);
}

TEST_CASE("two-state chain") {
    RealMatrix g(2, 2);
    g << -1, 1, 1, -1;
    const RealVector pi = RealVector::Constant(2, 0.5);
    CHECK(canonical_path_bound(g, pi) == Catch::Approx(2.0).epsilon(1e-15));
    CHECK(classical_gap(g, pi) == Catch::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("canonical path bound never exceeds the classical gap") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.05, 1.0);
    for (int t = 0; t < 50; ++t) {
        const Eigen::Index n = 2 + t % 7;
        RealVector pi(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            pi[i] = u(rng);
        }
        pi /= pi.sum();
        // Reversible chain: G_lm = c_lm π_l with symmetric conductances.
        RealMatrix g = RealMatrix::Zero(n, n);
        for (Eigen::Index l = 0; l < n; ++l) {
            for (Eigen::Index m = l + 1; m < n; ++m) {
                const double c = u(rng);
                g(l, m) = c * pi[l];
                g(m, l) = c * pi[m];
            }
        }
        for (Eigen::Index m = 0; m < n; ++m) {
            g(m, m) = -(g.col(m).sum() - g(m, m));
        }
        const double bound = canonical_path_bound(g, pi);
        const double gap = classical_gap(g, pi);
        REQUIRE(bound <= gap + 1e-12);
    }
}

TEST_CASE("canonical path bound of the averaged classical block") {
    const Hamiltonian h = random_hamiltonian(5, 2);
    const FilterParams fp = gp(1.0, 0.25);
    const AveragedLindbladian avg = build_average_structured(h, fp);
    const GibbsState g = gibbs_state(h, 1.0);
    double want = 1e300;
    for (Eigen::Index l = 0; l < 5; ++l) {
        for (Eigen::Index m = 0; m < 5; ++m) {
            if (l != m) {
                want = std::min(want, alpha(h.bohr()(l, m), fp) / (5.0 * g.p[l]));
            }
        }
    }
    CHECK(std::abs(canonical_path_bound(avg.classical, g.p) - want) <= 1e-14 * want);
    CHECK(canonical_path_bound(avg.classical, g.p) <= classical_gap(avg.classical, g.p) + 1e-12);
}

TEST_CASE("generator validation") {
    RealMatrix bad(2, 2);
    bad << -1, 2, 1, -1;
    const RealVector pi = RealVector::Constant(2, 0.5);
    CHECK(kind_of([&] { canonical_path_bound(bad, pi); }) == ErrorKind::NotGenerator);
    RealMatrix neg(2, 2);
    neg << 1, -1, -1, 1;
    CHECK(kind_of([&] { canonical_path_bound(neg, pi); }) == ErrorKind::NotGenerator);
    RealMatrix sparse = RealMatrix::Zero(3, 3);
    sparse(1, 0) = 1;
    sparse(0, 0) = -1;
    sparse(0, 1) = 1;
    sparse(1, 1) = -1;
    CHECK(kind_of([&] { canonical_path_bound(sparse, RealVector::Constant(3, 1.0 / 3)); }) ==
          ErrorKind::SparseChain);
}

TEST_CASE("gershgorin bound") {
    ComplexMatrix b(2, 2);
    b << 2, -1, -1, 2;
    CHECK(gershgorin_bound(b) == 1.0);
    CHECK(block_min_abs_eigenvalue(b) == Catch::Approx(1.0));
}

TEST_CASE("hypercube gap matches the closed form") {
    for (int d = 1; d <= 3; ++d) {
        for (const FilterParams fp : {gp(1.0, 0.25), gp(2.0, 0.5), gp(0.5, 1.0)}) {
            const Hamiltonian h = make_hypercube(d);
            const Superoperator s = build(h, hypercube_z(d), fp);
            const GapReport r = spectral_gap(s, gibbs_state(h, fp.beta));
            const double want = hypercube_gap_closed_form(d, fp);
            CHECK(!r.degenerate_fixed_point);
            CHECK(std::abs(r.gap - want) <= 1e-8 * want);
        }
    }
    // The coherence block of a single qubit, eigensolved directly.
    const FilterParams fp = gp(1.0, 0.25);
    const Hamiltonian h1 = make_hypercube(1);
    const Superoperator s1 = build(h1, hypercube_z(1), fp);
    const BlockDecomposition bd = block_decomposition(s1.matrix, bohr_keys(h1));
    CHECK(bd.block_diagonal);
    for (const Block &b : bd.blocks) {
        if (!b.classical) {
            REQUIRE(b.matrix.rows() == 1);
            const double want = (alpha(-2, fp) + alpha(2, fp) - 2 * theta(2, -2, fp)) / 2;
            CHECK(std::abs(std::abs(b.matrix(0, 0)) - want) < 1e-13);
            CHECK(std::abs(gershgorin_bound(b.matrix) - want) < 1e-13);
        }
    }
    // d·gap is independent of d.
    for (int d = 2; d <= 12; ++d) {
        CHECK(std::abs(d * hypercube_gap_closed_form(d, fp) - hypercube_gap_closed_form(1, fp)) < 1e-15);
    }
}

TEST_CASE("cycle block structure and bounds") {
    for (std::int64_t n : {4, 6, 9}) {
        const Hamiltonian h = make_cycle(n);
        const Superoperator s = build(h, graph_local(n), gp(1.0, 0.25));
        const BlockDecomposition bd = block_decomposition(s.matrix, momentum_keys(h));
        CHECK(bd.block_diagonal);
        CHECK(bd.cross_coupling <= 1e-12);
        REQUIRE(bd.blocks.size() == static_cast<std::size_t>(n));
        const GapReport full = spectral_gap(s, gibbs_state(h, 1.0));
        double block_min = 1e300;
        for (const Block &b : bd.blocks) {
            CHECK(b.classical == (b.key == 0));
            if (b.key != 0) {
                const double m = block_min_abs_eigenvalue(b.matrix);
                CHECK(gershgorin_bound(b.matrix) <= m + 1e-8);
                block_min = std::min(block_min, m);
            }
        }
        const GibbsState g = gibbs_state(h, 1.0);
        const RealMatrix cls = classical_block(s.matrix);
        const double cg = classical_gap(cls, g.p);
        CHECK(canonical_path_bound(cls, g.p) <= cg + 1e-8);
        CHECK(std::abs(std::min(cg, block_min) - full.gap) <= 1e-8 * full.gap);
        // Rayleigh witness in the k = 1 sector bounds the gap from above.
        CHECK(rayleigh_witness(s.matrix, g, momentum_indicator(h, 1)) >= full.gap - 1e-12);
    }
}

TEST_CASE("averaged generator block structure and gap") {
    const Hamiltonian h = random_hamiltonian(5, 9);
    const FilterParams fp = gp(1.0, 0.25);
    const Superoperator avg = build_average(h, fp);
    std::vector<std::int64_t> keys(25);
    for (Eigen::Index i = 0; i < 25; ++i) {
        keys[static_cast<std::size_t>(i)] = i / 5 == i % 5 ? -1 : i;
    }
    const BlockDecomposition bd = block_decomposition(avg.matrix, keys, 0.0);
    CHECK(bd.block_diagonal);
    CHECK(bd.blocks.size() == 21);
    const GibbsState g = gibbs_state(h, 1.0);
    const GapReport dense = spectral_gap(avg, g);
    const GapReport st = averaged_gap(build_average_structured(h, fp), g);
    CHECK(std::abs(dense.gap - st.gap) <= 1e-10 * st.gap);
    CHECK(st.gap == std::min(*st.classical_gap, *st.dephasing_min));
    CHECK(*st.canonical_bound <= *st.classical_gap + 1e-8);
}

TEST_CASE("generic CKG generator is not block diagonal") {
    const Hamiltonian h = random_hamiltonian(4, 3);
    const Superoperator s = build(h, haar_design(4, 2, 1), gp(1.0, 0.25));
    const BlockDecomposition bd = block_decomposition(s.matrix, bohr_keys(h));
    CHECK_FALSE(bd.block_diagonal);
    CHECK(bd.cross_coupling > 1e-6);
}

TEST_CASE("symmetrized and unsymmetrized gaps agree") {
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
        const Hamiltonian h = random_hamiltonian(3 + seed % 3, seed);
        const Superoperator s = build(h, haar_design(h.dim(), 4, seed), gp(1.5, 0.3));
        GapOptions opt;
        opt.full_spectrum = true;
        const GapReport r = spectral_gap(s, gibbs_state(h, 1.5), opt);
        CHECK(r.zero_mode_overlap >= 1 - 1e-6);
        CHECK(r.null_multiplicity == 1);
        CHECK(r.max_eigenvalue <= 1e-8 * r.spectral_radius);
        CHECK(std::abs(unsymmetrized_gap(s.matrix) - r.gap) <= 1e-6 * r.gap);
        REQUIRE(r.spectrum);
        CHECK(r.spectrum->size() == static_cast<std::size_t>(h.dim() * h.dim()));
    }
}

TEST_CASE("Lanczos agrees with the dense path") {
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        const Hamiltonian h = random_hamiltonian(7, 20 + seed);
        const Superoperator s = build(h, haar_design(7, 6, seed), gp(1.0, 0.25));
        const GibbsState g = gibbs_state(h, 1.0);
        const GapReport dense = spectral_gap(s, g);
        GapOptions opt;
        opt.dense_max = 0;
        const GapReport kr = spectral_gap(s, g, opt);
        CHECK(kr.method == "lanczos");
        CHECK(std::abs(kr.gap - dense.gap) <= 1e-8 * dense.gap);
        CHECK(std::abs(kr.spectral_radius - dense.spectral_radius) <= 1e-4 * dense.spectral_radius);
        CHECK_FALSE(kr.degenerate_fixed_point);
    }
}

TEST_CASE("gap requires detailed balance") {
    const Hamiltonian h = random_hamiltonian(3, 7);
    const ComplexMatrix lh = commutator_superop(h.eig().values.cast<cplx>().asDiagonal().toDenseMatrix());
    CHECK(kind_of([&] { spectral_gap(lh, gibbs_state(h, 1.0)); }) == ErrorKind::NotDetailedBalanced);
}

TEST_CASE("mixing bound") {
    const Hamiltonian h(ComplexMatrix::Identity(4, 4), Family::custom);
    const GibbsState g = gibbs_state(h, 0.0);
    CHECK(std::abs(mixing_bound(1.0, g).tight - std::log(2.0)) < 1e-15);
    CHECK(std::abs(mixing_bound(2.0, g).tight - std::log(2.0) / 2) < 1e-15);
    CHECK(mixing_bound(1.0, g).loose >= mixing_bound(1.0, g).tight - 1e-15);
    CHECK(kind_of([&] { mixing_bound(0.0, g); }) == ErrorKind::ZeroGap);
    const Hamiltonian hc = make_cycle(6);
    const GibbsState gc = gibbs_state(hc, 2.0);
    CHECK(mixing_bound(0.5, gc).loose >= mixing_bound(0.5, gc).tight);
}

TEST_CASE("simulated mixing stays below the bound") {
    for (const Hamiltonian &h : {make_cycle(8), make_hypercube(3)}) {
        const JumpSet js = h.family() == Family::cycle ? graph_local(8) : hypercube_z(3);
        const GibbsState g = gibbs_state(h, 1.0);
        // Energy resolution 1/β, energy-basis starts: the bound without an
        // accuracy term holds.
        const Superoperator s = build(h, js, gp(1.0, 1.0));
        const MixingEstimate est = simulate_mixing(s.matrix, g, 0.01, default_starts(8, 1, 0));
        CHECK(est.reached);
        CHECK(est.t_measured <= est.t_bound * (1 + 1e-6));
        CHECK(est.t_measured > 0);
        CHECK(est.non_monotone_starts == 0);
        const MixingEstimate at_fixed = simulate_mixing(s.matrix, g, 0.01, {g.rho()});
        CHECK(at_fixed.t_measured == at_fixed.grid.front());
        // Random starts, or σ_E = 0.25: only the accuracy-corrected bound is
        // guaranteed.
        MixingOptions mo;
        mo.assert_bound = false;
        const MixingEstimate e1 = simulate_mixing(s.matrix, g, 0.01, default_starts(8, 1), mo);
        CHECK(e1.t_measured <= e1.t_bound_epsilon);
        const Superoperator sharp = build(h, js, gp(1.0, 0.25));
        const MixingEstimate e2 = simulate_mixing(sharp.matrix, g, 0.01, default_starts(8, 1), mo);
        CHECK(e2.t_measured <= e2.t_bound_epsilon);
        mo.assert_bound = true;
        if (e2.t_measured > e2.t_bound) {
            CHECK(kind_of([&] { simulate_mixing(sharp.matrix, g, 0.01, default_starts(8, 1), mo); }) ==
                  ErrorKind::InvariantViolation);
        }
    }
}

TEST_CASE("delta comparison") {
    const Hamiltonian hc = make_hypercube(8);
    const DeltaGapRecord r = delta_gap_check(hc, 1.0, 2.0, 0.5);
    CHECK(r.count == 9);
    CHECK(r.delta == 9.0 / 256.0);
    CHECK(r.ratio == Catch::Approx(0.5 * 256.0 / 9.0));
    // β‖H‖ <= C/2: every level is inside the window.
    const Hamiltonian cyc = make_cycle(10);
    const DeltaGapRecord b = delta_gap_check(cyc, 0.5, 2.0, 0.3);
    CHECK(b.delta == 1.0);
    CHECK(b.ratio == 0.3);
}
