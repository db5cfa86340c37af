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
 * Scalar kernels of the Gaussian-filtered construction.
 *
 * With g the centred Gaussian density of width σ and s = βσ²/2:
 *
 *   γ(ω)      = exp(−β max(ω + s, 0))
 *   α(ν)      = (γ ∗ g)(ν)
 *             = ½ erfc((ν + s)/(σ√2)) + ½ e^{−βν} erfc((s − ν)/(σ√2))
 *   θ(ν1, ν2) = α((ν1 + ν2)/2) exp(−(ν1 − ν2)²/(8σ²))
 *
 * The first erfc term is the mass of g where γ is flat; the second comes from
 * completing the square in the exponential tail. α(ν) = e^{−βν} α(−ν) holds
 * term by term because the two erfc arguments swap under ν → −ν.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <string_view>

#include "ckg/errors.hpp"

namespace ckg {

enum class FilterMode { gaussian, davies };

constexpr std::string_view to_string(FilterMode m) {
    return m == FilterMode::gaussian ? "gaussian" : "davies";
}

inline FilterMode filter_mode_from_string(std::string_view s) {
    if (s == "gaussian" || s == "ckg") {
        return FilterMode::gaussian;
    }
    if (s == "davies") {
        return FilterMode::davies;
    }
    fail(ErrorKind::BadParameter, "unknown filter mode '" + std::string(s) + "'");
}

struct FilterParams {
    double beta = 1.0;
    double sigma_E = 0.25;
    FilterMode mode = FilterMode::gaussian;

    void check() const {
        if (!(beta >= 0.0) || !std::isfinite(beta)) {
            fail(ErrorKind::BadParameter, "beta must be finite and >= 0");
        }
        if (mode == FilterMode::gaussian && !(sigma_E > 0.0 && std::isfinite(sigma_E))) {
            fail(ErrorKind::BadParameter, "sigma_E must be > 0 in gaussian mode");
        }
    }
};

namespace detail {

inline void require_gaussian(const FilterParams &fp, const char *what) {
    if (fp.mode != FilterMode::gaussian) {
        fail(ErrorKind::ModeMismatch, std::string(what) + " is defined only in gaussian mode");
    }
    fp.check();
}

/// erfcx(x) = e^{x²} erfc(x) for x >= 0.
inline double erfcx_nonneg(double x) {
    if (x < 25.0) {
        return std::exp(x * x) * std::erfc(x);
    }
    // Asymptotic series; at x >= 25 the terms shrink by 1/(2x²) <= 8e-4.
    const double inv2x2 = 1.0 / (2.0 * x * x);
    double term = 1.0, sum = 1.0;
    for (int k = 1; k < 8; ++k) {
        term *= -(2.0 * k - 1.0) * inv2x2;
        sum += term;
    }
    return sum / (x * std::sqrt(std::numbers::pi));
}

/// e^{a} erfc(x) without intermediate overflow.
inline double exp_times_erfc(double a, double x) {
    if (x <= 0.0) {
        return std::exp(a) * std::erfc(x);
    }
    return std::exp(a - x * x) * erfcx_nonneg(x);
}

} // namespace detail

/// γ(ω) = exp(−β max(ω + βσ²/2, 0)).
inline double gamma(double omega, const FilterParams &fp) {
    detail::require_gaussian(fp, "gamma");
    return std::exp(-fp.beta * std::max(omega + 0.5 * fp.beta * fp.sigma_E * fp.sigma_E, 0.0));
}

/// min(1, e^{−βω}).
inline double metropolis(double omega, double beta) {
    return omega <= 0.0 ? 1.0 : std::exp(-beta * omega);
}

namespace detail {

inline double alpha_unchecked(double nu, const FilterParams &fp) {
    const double s = 0.5 * fp.beta * fp.sigma_E * fp.sigma_E;
    const double scale = 1.0 / (fp.sigma_E * std::numbers::sqrt2);
    const double flat = 0.5 * std::erfc((nu + s) * scale);
    const double tail = 0.5 * detail::exp_times_erfc(-fp.beta * nu, (s - nu) * scale);
    return flat + tail;
}

inline double theta_unchecked(double nu1, double nu2, const FilterParams &fp) {
    const double d = nu1 - nu2;
    return alpha_unchecked(0.5 * (nu1 + nu2), fp) * std::exp(-d * d / (8.0 * fp.sigma_E * fp.sigma_E));
}

} // namespace detail

/// Closed form of γ ∗ g (see file comment).
inline double alpha(double nu, const FilterParams &fp) {
    detail::require_gaussian(fp, "alpha");
    return detail::alpha_unchecked(nu, fp);
}

inline double theta(double nu1, double nu2, const FilterParams &fp) {
    detail::require_gaussian(fp, "theta");
    return detail::theta_unchecked(nu1, nu2, fp);
}

/// Time-domain window f(t) = e^{−σ²t²} (σ√(2/π))^{1/2}.
inline double f_window(double t, const FilterParams &fp) {
    detail::require_gaussian(fp, "f_window");
    const double s = fp.sigma_E;
    return std::exp(-s * s * t * t) * std::sqrt(s * std::sqrt(2.0 / std::numbers::pi));
}

/// f̂(ω) = (σ√(2π))^{−1/2} exp(−ω²/(4σ²)); f̂² is the N(0, σ²) density.
inline double f_hat(double omega, const FilterParams &fp) {
    detail::require_gaussian(fp, "f_hat");
    const double s = fp.sigma_E;
    return std::exp(-omega * omega / (4.0 * s * s)) /
           std::sqrt(s * std::sqrt(2.0 * std::numbers::pi));
}

/**
 * Two-frequency kernel used by the assembler. Gaussian mode evaluates θ;
 * Davies mode evaluates metropolis((ν1+ν2)/2) when |ν1 − ν2| <= match_tol
 * and 0 otherwise.
 */
class Kernel {
  public:
    Kernel(FilterParams fp, double match_tol) : fp_(fp), match_tol_(match_tol) { fp_.check(); }

    /// Davies matching tolerance 1e-9·‖H‖ (floored to avoid an exact-zero band).
    static Kernel for_hamiltonian(FilterParams fp, double norm_h) {
        return Kernel(fp, 1e-9 * std::max(norm_h, 1e-300));
    }

    const FilterParams &params() const { return fp_; }
    double match_tol() const { return match_tol_; }

    double operator()(double nu1, double nu2) const {
        if (fp_.mode == FilterMode::gaussian) {
            return detail::theta_unchecked(nu1, nu2, fp_);
        }
        return std::abs(nu1 - nu2) <= match_tol_ ? metropolis(0.5 * (nu1 + nu2), fp_.beta) : 0.0;
    }

    /// Diagonal kernel α(ν) (Metropolis in Davies mode).
    double diag(double nu) const {
        return fp_.mode == FilterMode::gaussian ? detail::alpha_unchecked(nu, fp_)
                                                : metropolis(nu, fp_.beta);
    }

  private:
    FilterParams fp_;
    double match_tol_;
};

} // namespace ckg
