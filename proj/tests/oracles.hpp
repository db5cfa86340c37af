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

// Independent reference implementations used only by the tests. None of
// these call into the closed forms they are compared against.

#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "ckg/filters.hpp"

namespace ckg::oracle {

/// ∫_a^b f over pieces split at `cuts`, each piece by adaptive 61-point
/// Gauss-Kronrod.
template <class F>
double integrate(F f, double a, double b, std::vector<double> cuts = {}) {
    cuts.push_back(a);
    cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double lo = std::max(a, cuts[i]);
        const double hi = std::min(b, cuts[i + 1]);
        if (hi > lo) {
            total += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, lo, hi, 8,
                                                                                   1e-14);
        }
    }
    return total;
}

inline double gamma_direct(double w, double beta, double sigma) {
    const double x = w + 0.5 * beta * sigma * sigma;
    return x <= 0 ? 1.0 : std::exp(-beta * x);
}

inline double f_hat_direct(double w, double sigma) {
    return std::pow(sigma * std::sqrt(2 * std::numbers::pi), -0.5) * std::exp(-w * w / (4 * sigma * sigma));
}

/// ∫ γ(ω) g(ν − ω) dω by quadrature.
inline double alpha_quad(double nu, double beta, double sigma) {
    const double kink = -0.5 * beta * sigma * sigma;
    auto f = [&](double w) {
        const double z = (nu - w) / sigma;
        return gamma_direct(w, beta, sigma) * std::exp(-0.5 * z * z) /
               (sigma * std::sqrt(2 * std::numbers::pi));
    };
    return integrate(f, nu - 40 * sigma, nu + 40 * sigma, {kink, nu});
}

/// ∫ f̂(ω − ν1) f̂(ω − ν2) γ(ω) dω by quadrature.
inline double theta_quad(double nu1, double nu2, double beta, double sigma) {
    const double kink = -0.5 * beta * sigma * sigma;
    const double c = 0.5 * (nu1 + nu2);
    auto f = [&](double w) {
        return f_hat_direct(w - nu1, sigma) * f_hat_direct(w - nu2, sigma) *
               gamma_direct(w, beta, sigma);
    };
    return integrate(f, c - 40 * sigma, c + 40 * sigma, {kink, c});
}

} // namespace ckg::oracle
