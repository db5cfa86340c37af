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
#include <random>

#include "ckg/filters.hpp"
#include "oracles.hpp"

using namespace ckg;
using Catch::Approx;

namespace {

FilterParams gp(double beta, double sigma) { return {beta, sigma, FilterMode::gaussian}; }

} // namespace

TEST_CASE("gamma") {
    const FilterParams fp = gp(1.0, 1.0);
    CHECK(ckg::gamma(-0.5, fp) == 1.0);
    CHECK(ckg::gamma(-3.0, fp) == 1.0);
    CHECK(ckg::gamma(0.0, fp) == Approx(std::exp(-0.5)).epsilon(1e-15));
    for (double w : {-5.0, 0.0, 3.0, 100.0}) {
        CHECK(ckg::gamma(w, gp(0.0, 0.7)) == 1.0);
    }
    double prev = 2.0;
    for (double w = -4; w <= 4; w += 0.01) {
        const double g = ckg::gamma(w, gp(2.0, 0.5));
        CHECK(g <= prev);
        CHECK(g > 0.0);
        CHECK(g <= 1.0);
        prev = g;
    }
    CHECK_THROWS_AS(ckg::gamma(0.0, FilterParams{1.0, 0.0, FilterMode::davies}), Error);
    CHECK_THROWS_AS(ckg::gamma(0.0, gp(1.0, 0.0)), Error);
}

TEST_CASE("metropolis") {
    CHECK(metropolis(-1.0, 3.0) == 1.0);
    CHECK(metropolis(0.0, 3.0) == 1.0);
    CHECK(metropolis(1.0, 1.0) == Approx(std::exp(-1.0)).epsilon(1e-15));
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-5, 5), b(0, 4);
    for (int i = 0; i < 1000; ++i) {
        const double w = u(rng), beta = b(rng);
        CHECK(std::abs(metropolis(w, beta) - std::exp(-beta * w) * metropolis(-w, beta)) <= 1e-12);
    }
}

TEST_CASE("alpha closed form") {
    for (double nu : {-3.0, 0.0, 0.4, 7.0}) {
        CHECK(std::abs(alpha(nu, gp(0.0, 0.3)) - 1.0) < 1e-15);
    }
    // Quadrature oracle at the documented point and across a grid.
    CHECK(std::abs(alpha(0.0, gp(1.0, 1.0)) - oracle::alpha_quad(0.0, 1.0, 1.0)) <= 1e-10);
    for (double beta : {0.1, 1.0, 4.0}) {
        for (double sigma : {0.25, 1.0 / beta, 1.0}) {
            for (double nu = -6; nu <= 6; nu += 0.37) {
                const double a = alpha(nu, gp(beta, sigma));
                REQUIRE(std::abs(a - oracle::alpha_quad(nu, beta, sigma)) <= 1e-10);
            }
        }
    }
}

TEST_CASE("alpha functional equation") {
    for (double beta : {0.1, 1.0, 4.0}) {
        for (double sigma : {0.25, 1.0 / beta}) {
            for (double norm_h : {1.0, 2.0, 8.0}) {
                for (double nu = -4 * norm_h; nu <= 4 * norm_h; nu += norm_h / 50) {
                    const FilterParams fp = gp(beta, sigma);
                    REQUIRE(std::abs(alpha(nu, fp) - std::exp(-beta * nu) * alpha(-nu, fp)) <= 1e-12);
                }
            }
        }
    }
}

TEST_CASE("alpha range, monotonicity and overflow guard") {
    for (double beta : {0.1, 1.0, 4.0, 20.0}) {
        const FilterParams fp = gp(beta, 0.25);
        double prev = 1.0 + 1e-15;
        for (double nu = -40; nu <= 40; nu += 0.05) {
            const double a = alpha(nu, fp);
            REQUIRE(std::isfinite(a));
            // Only genuine underflow (e^{−βν} below the smallest double) may give 0.
            REQUIRE((a > 0.0 || beta * nu > 700.0));
            REQUIRE(a <= 1.0 + 1e-15);
            REQUIRE(a <= prev + 1e-15);
            prev = a;
        }
    }
    // β‖H‖ ≈ 20 pushes e^{−βν} to e^{400}; the scaled form stays finite.
    const FilterParams hot = gp(20.0, 0.05);
    CHECK(std::isfinite(alpha(-20.0, hot)));
    CHECK(alpha(-20.0, hot) == Approx(1.0));
    CHECK(std::abs(alpha(20.0, hot) - std::exp(-400.0) * alpha(-20.0, hot)) <= 1e-300);
}

TEST_CASE("theta") {
    const FilterParams fp = gp(1.0, 0.25);
    for (double nu = -3; nu <= 3; nu += 0.25) {
        CHECK(theta(nu, nu, fp) == alpha(nu, fp));
    }
    CHECK(theta(2, -2, fp) == Approx(alpha(0, fp) * std::exp(-2 / (0.25 * 0.25))).epsilon(1e-14));
    for (double beta : {0.1, 1.0, 4.0}) {
        for (double sigma : {0.25, 0.5, 1.0}) {
            const FilterParams p = gp(beta, sigma);
            for (double a = -2; a <= 2; a += 0.5) {
                for (double b = -2; b <= 2; b += 0.5) {
                    const double t = theta(a, b, p);
                    REQUIRE(t == theta(b, a, p));
                    REQUIRE(std::abs(t - alpha(0.5 * (a + b), p) *
                                             std::exp(-(a - b) * (a - b) / (8 * sigma * sigma))) <= 1e-12);
                    REQUIRE(std::abs(t - oracle::theta_quad(a, b, beta, sigma)) <= 1e-9);
                }
            }
        }
    }
}

TEST_CASE("window functions") {
    const FilterParams fp = gp(1.0, 0.4);
    CHECK(f_hat(0.0, fp) == Approx(std::pow(0.4 * std::sqrt(2 * std::numbers::pi), -0.5)).epsilon(1e-15));
    const double norm_hat = oracle::integrate([&](double w) { return f_hat(w, fp) * f_hat(w, fp); },
                                              -40 * 0.4, 40 * 0.4, {0.0});
    CHECK(std::abs(norm_hat - 1.0) <= 1e-10);
    const double norm_t = oracle::integrate([&](double t) { return f_window(t, fp) * f_window(t, fp); },
                                            -40 / 0.4, 40 / 0.4, {0.0});
    CHECK(std::abs(norm_t - 1.0) <= 1e-10);
    // f̂² is the N(0, σ²) density.
    for (double w : {-1.0, 0.0, 0.3, 2.0}) {
        const double dens = std::exp(-w * w / (2 * 0.16)) / (0.4 * std::sqrt(2 * std::numbers::pi));
        CHECK(f_hat(w, fp) * f_hat(w, fp) == Approx(dens).epsilon(1e-14));
    }
    CHECK_THROWS_AS(f_hat(0.0, FilterParams{1, 0, FilterMode::davies}), Error);
}

TEST_CASE("Davies limit") {
    const double beta = 1.5;
    for (double nu : {-2.0, -0.7, 0.5, 1.8}) {
        double prev_err = 1e9;
        for (double sigma : {1.0, 0.5, 0.25, 0.125}) {
            const double err = std::abs(alpha(nu, gp(beta, sigma)) - metropolis(nu, beta));
            CHECK(err < prev_err);
            prev_err = err;
        }
        CHECK(prev_err < 0.1);
    }
    const Kernel k(FilterParams{beta, 0.0, FilterMode::davies}, 1e-9);
    CHECK(k(0.3, 0.3) == metropolis(0.3, beta));
    CHECK(k(0.3, 0.3 + 1e-10) == metropolis(0.3 + 5e-11, beta));
    CHECK(k(0.3, 0.31) == 0.0);
    CHECK(k.diag(-1.0) == 1.0);
    const Kernel g(gp(beta, 0.3), 0.0);
    CHECK(g(0.2, -0.4) == theta(0.2, -0.4, gp(beta, 0.3)));
}
