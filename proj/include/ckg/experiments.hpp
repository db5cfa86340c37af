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
 * Experiment plumbing: instance construction from a parameter record, sweep
 * configuration and execution, CSV and JSON emission, log-log slope fits and
 * per-instance verification reports.
 */

#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "ckg/errors.hpp"
#include "ckg/expr.hpp"
#include "ckg/filters.hpp"
#include "ckg/gap.hpp"
#include "ckg/hamiltonian.hpp"
#include "ckg/jumps.hpp"
#include "ckg/lindblad.hpp"
#include "ckg/parallel.hpp"
#include "ckg/rng.hpp"
#include "ckg/toml_lite.hpp"

namespace ckg {

using json = nlohmann::json;

/// Jump-kind label for the closed-form Haar average, used in place of a
/// sampled jump set.
inline constexpr std::string_view kHaarAverage = "haar_average";

// ---------------------------------------------------------------------------
// Instances

struct InstanceSpec {
    Family family = Family::cycle;
    /// Vertex count for cycle, path and regular graphs.
    std::int64_t n = 0;
    /// Hypercube dimension or regular degree.
    std::int64_t d = 0;
    /// Qubits and term count for the Pauli ensemble.
    int n0 = 0;
    std::int64_t terms = 0;
    std::uint64_t seed = 1;
    std::string jump_kind = "graph_local";
    std::int64_t m = 0;
    std::uint64_t jump_seed = 2;
};

inline Hamiltonian make_hamiltonian(const InstanceSpec &s) {
    switch (s.family) {
    case Family::cycle: return make_cycle(s.n);
    case Family::path: return make_path(s.n);
    case Family::hypercube: return make_hypercube(s.d);
    case Family::regular: return make_random_regular(s.n, s.d, s.seed);
    case Family::pauli_string: return make_pauli_string(s.n0, s.terms, s.seed);
    case Family::custom: break;
    }
    fail(ErrorKind::BadParameter, "custom Hamiltonians must be loaded from a file");
}

/// log2(dim) when dim is a power of two; BadParameter otherwise.
inline int qubit_count(Eigen::Index dim) {
    int q = 0;
    while ((Eigen::Index{1} << q) < dim) {
        ++q;
    }
    if ((Eigen::Index{1} << q) != dim) {
        fail(ErrorKind::BadParameter, "dimension " + std::to_string(dim) + " is not a power of two");
    }
    return q;
}

inline JumpSet make_jumps(const InstanceSpec &s, Eigen::Index dim) {
    const JumpKind k = jump_kind_from_string(s.jump_kind);
    switch (k) {
    case JumpKind::graph_local: return graph_local(dim);
    case JumpKind::haar_design: return haar_design(dim, s.m, s.jump_seed);
    case JumpKind::pauli_design: return pauli_design(qubit_count(dim), s.m, s.jump_seed);
    case JumpKind::hypercube_z: return hypercube_z(qubit_count(dim));
    case JumpKind::custom: break;
    }
    fail(ErrorKind::BadParameter, "custom jump sets must be loaded from a file");
}

/// Relative detailed-balance residual of the compact Haar average; the
/// dephasing part is diagonal and contributes nothing.
inline double db_residual(const AveragedLindbladian &avg, const GibbsState &g) {
    double acc = 0.0;
    const double scale = std::sqrt(avg.classical.squaredNorm() + avg.dephasing.squaredNorm());
    for (Eigen::Index m = 0; m < avg.n; ++m) {
        for (Eigen::Index q = 0; q < avg.n; ++q) {
            const double r = avg.classical(q, m) - std::exp(g.log_p[q] - g.log_p[m]) * avg.classical(m, q);
            acc += r * r;
        }
    }
    return scale == 0.0 ? 0.0 : std::sqrt(acc) / scale;
}

// ---------------------------------------------------------------------------
// Hypercube factorization

namespace detail {

/// O acting on bit q of a d-bit register, identity elsewhere.
inline ComplexMatrix embed_qubit(const ComplexMatrix &o, int q, int d) {
    const Eigen::Index n = Eigen::Index{1} << d;
    const Eigen::Index mask = Eigen::Index{1} << q;
    ComplexMatrix x = ComplexMatrix::Zero(n, n);
    for (Eigen::Index r = 0; r < n; ++r) {
        for (int b = 0; b < 2; ++b) {
            const Eigen::Index c = b ? (r | mask) : (r & ~mask);
            x(r, c) = o((r & mask) ? 1 : 0, b);
        }
    }
    return x;
}

/// Tr over all bits except q, divided by 2^{d−1}.
inline ComplexMatrix reduce_to_qubit(const ComplexMatrix &y, int q, int d) {
    const Eigen::Index n = Eigen::Index{1} << d;
    const Eigen::Index mask = Eigen::Index{1} << q;
    ComplexMatrix t = ComplexMatrix::Zero(2, 2);
    for (Eigen::Index r = 0; r < n; ++r) {
        for (int b = 0; b < 2; ++b) {
            t((r & mask) ? 1 : 0, b) += y(r, b ? (r | mask) : (r & ~mask));
        }
    }
    return t / static_cast<double>(n / 2);
}

/// L applied to an operator given in the computational basis, with L in the
/// eigenbasis whose vectors are the columns of v.
inline ComplexMatrix apply_in_basis(const ComplexMatrix &l, const ComplexMatrix &v, const ComplexMatrix &x) {
    return v * apply_superop(l, v.adjoint() * x * v) * v.adjoint();
}

} // namespace detail

struct FactorizationResidual {
    /// Worst ‖L†[O_q] − R_q ⊗ I‖_F / ‖L‖_F over qubits and matrix units O.
    double locality = 0.0;
    /// Worst ‖R_q − L_1†[O]/d‖_F / ‖L‖_F, with L_1 the single-qubit build.
    double single_qubit = 0.0;
};

/**
 * Checks that the hypercube Lindbladian with hypercube_z jumps acts on each
 * single-qubit observable only through that qubit, as 1/d times the d = 1
 * Lindbladian. Uses the adjoint, which is unital, so other factors stay
 * identity.
 */
inline FactorizationResidual hypercube_factorization(const Hamiltonian &h, const ComplexMatrix &l,
                                                     const FilterParams &fp) {
    const int d = qubit_count(h.dim());
    const Hamiltonian h1 = make_hypercube(1);
    BuildOptions o;
    o.check = false;
    const ComplexMatrix l1 = build(h1, hypercube_z(1), fp, o).matrix.adjoint();
    const ComplexMatrix ladj = l.adjoint();
    const double scale = std::max(l.norm(), 1e-300);
    FactorizationResidual r;
    for (int q = 0; q < d; ++q) {
        for (int a = 0; a < 2; ++a) {
            for (int b = 0; b < 2; ++b) {
                ComplexMatrix unit = ComplexMatrix::Zero(2, 2);
                unit(a, b) = 1.0;
                const ComplexMatrix y = detail::apply_in_basis(ladj, h.eig().vectors, detail::embed_qubit(unit, q, d));
                const ComplexMatrix red = detail::reduce_to_qubit(y, q, d);
                r.locality = std::max(r.locality, (y - detail::embed_qubit(red, q, d)).norm() / scale);
                const ComplexMatrix ref = detail::apply_in_basis(l1, h1.eig().vectors, unit) / static_cast<double>(d);
                r.single_qubit = std::max(r.single_qubit, (red - ref).norm() / scale);
            }
        }
    }
    return r;
}

/// Gap of the d-qubit hypercube with hypercube_z jumps from the 4 x 4
/// single-qubit generator.
inline double hypercube_gap_factorized(int d, const FilterParams &fp) {
    if (d < 1) {
        fail(ErrorKind::BadSize, "hypercube dimension must be >= 1");
    }
    const Hamiltonian h1 = make_hypercube(1);
    const Superoperator s = build(h1, hypercube_z(1), fp);
    return spectral_gap(s, gibbs_state(h1, fp.beta)).gap / static_cast<double>(d);
}

// ---------------------------------------------------------------------------
// Verification

struct VerifyCheck {
    std::string name;
    bool passed = false;
    double residual = 0.0;
    double tolerance = 0.0;
    std::string detail;
};

struct VerifyReport {
    std::string instance;
    std::vector<VerifyCheck> checks;

    bool ok() const {
        return std::all_of(checks.begin(), checks.end(), [](const VerifyCheck &c) { return c.passed; });
    }

    const VerifyCheck *find(std::string_view name) const {
        for (const auto &c : checks) {
            if (c.name == name) {
                return &c;
            }
        }
        return nullptr;
    }

    json to_json() const {
        json j;
        j["instance"] = instance;
        j["ok"] = ok();
        j["checks"] = json::array();
        for (const auto &c : checks) {
            json cj{{"name", c.name}, {"passed", c.passed}, {"residual", c.residual}, {"tolerance", c.tolerance}};
            if (!c.detail.empty()) {
                cj["detail"] = c.detail;
            }
            j["checks"].push_back(cj);
        }
        return j;
    }
};

struct VerifyOptions {
    double db_tol = 1e-8;
    double fixed_point_tol = 1e-8;
    double trace_tol = 1e-9;
    double kernel_tol = 1e-12;
    double spectrum_tol = 1e-9;
    Eigen::Index spectrum_dense_max = 1024;
    /// Distinct Bohr frequencies sampled for the kernel identities.
    std::size_t max_frequencies = 64;
    unsigned threads = 1;
};

/**
 * Runs every invariant check on one instance and reports each with its
 * residual. Never throws for a failed check; construction errors of the
 * instance itself propagate.
 */
inline VerifyReport verify_instance(const Hamiltonian &h, const JumpSet &js, const FilterParams &fp,
                                    const VerifyOptions &opt = {}) {
    VerifyReport rep;
    rep.instance = h.id() + " " + js.descriptor();
    auto add = [&](std::string name, double residual, double tol, std::string detail = {}) {
        rep.checks.push_back({std::move(name), residual <= tol, residual, tol, std::move(detail)});
    };
    const JumpValidation jv = validate(js);
    add("jumps_adjoint_closed", jv.adjoint_closed ? jv.adjoint_residual : std::max(jv.adjoint_residual, 1.0),
        kAdjointTol, jv.unmatched ? "jump " + std::to_string(*jv.unmatched) + " has no adjoint partner" : "");
    add("jumps_normalized", jv.normalization_residual, kNormalizationTol);

    BuildOptions bo;
    bo.check = false;
    bo.validate_jumps = false;
    bo.threads = opt.threads;
    const Superoperator s = build(h, js, fp, bo);
    const GibbsState g = gibbs_state(h, fp.beta);
    const BuildResiduals r = residuals(s.matrix, g);
    const double scale = std::max(r.norm, 1e-300);
    add("detailed_balance", r.db, opt.db_tol);
    add("fixed_point", r.fixed_point / scale, opt.fixed_point_tol);
    add("trace_annihilation", r.trace / scale, opt.trace_tol);
    add("adjoint_unitality", r.unitality / scale, opt.trace_tol);

    if (s.matrix.rows() <= opt.spectrum_dense_max) {
        ComplexMatrix sym = kms_symmetrize(s.matrix, g);
        const double herm = (sym - sym.adjoint()).norm() / std::max(sym.norm(), 1e-300);
        sym = 0.5 * (sym + sym.adjoint()).eval();
        const RealVector ev = hermitian_eigenvalues(sym, 1.0);
        const double top = ev.maxCoeff() / std::max(ev.cwiseAbs().maxCoeff(), 1e-300);
        add("spectrum_real_nonpositive", std::max(herm, std::max(top, 0.0)), opt.spectrum_tol);
    }

    if (fp.mode == FilterMode::gaussian) {
        std::vector<double> freqs;
        const RealMatrix &nu = h.bohr();
        for (Eigen::Index i = 0; i < nu.size(); ++i) {
            freqs.push_back(nu.data()[i]);
        }
        std::sort(freqs.begin(), freqs.end());
        const double tol = 1e-9 * std::max(h.norm(), 1.0);
        freqs.erase(std::unique(freqs.begin(), freqs.end(),
                                [&](double a, double b) { return std::abs(a - b) <= tol; }),
                    freqs.end());
        if (freqs.size() > opt.max_frequencies) {
            std::vector<double> picked;
            for (std::size_t k = 0; k < opt.max_frequencies; ++k) {
                picked.push_back(freqs[k * (freqs.size() - 1) / (opt.max_frequencies - 1)]);
            }
            freqs = std::move(picked);
        }
        double kms = 0.0, theta_sym = 0.0, theta_kms = 0.0, theta_diag = 0.0;
        for (double a : freqs) {
            kms = std::max(kms, std::abs(alpha(a, fp) - std::exp(-fp.beta * a) * alpha(-a, fp)));
            theta_diag = std::max(theta_diag, std::abs(theta(a, a, fp) - alpha(a, fp)));
            for (double b : freqs) {
                const double t = theta(a, b, fp);
                theta_sym = std::max(theta_sym, std::abs(t - theta(b, a, fp)));
                theta_kms = std::max(theta_kms,
                                     std::abs(t - std::exp(-0.5 * fp.beta * (a + b)) * theta(-a, -b, fp)));
            }
        }
        add("alpha_kms", kms, opt.kernel_tol);
        add("theta_symmetry", theta_sym, opt.kernel_tol);
        add("theta_kms", theta_kms, opt.kernel_tol);
        add("theta_diagonal", theta_diag, opt.kernel_tol);
    }

    if (h.family() == Family::hypercube && js.kind == JumpKind::hypercube_z) {
        const FactorizationResidual f = hypercube_factorization(h, s.matrix, fp);
        add("hypercube_locality", f.locality, 1e-10);
        add("hypercube_single_qubit", f.single_qubit, 1e-10);
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Sweeps

struct SweepConfig {
    std::string name = "sweep";
    Family family = Family::cycle;
    /// Swept size: n for cycle, path and regular; d for hypercube; n0 for
    /// Pauli strings.
    std::vector<std::int64_t> sizes;
    /// Regular degree rule (variables: size, n).
    std::string degree_rule = "round(log2(n))";
    /// Pauli term-count rule (variables: size, n0, n).
    std::string terms_rule = "2000";
    std::string jump_kind = "graph_local";
    /// Jump count rule (variables: size, n, d, n0, normH, beta, sigma_E).
    std::string m_rule = "8*ceil(log2(n))";
    /// Explicit jump counts swept as a second axis; replaces m_rule.
    std::vector<std::int64_t> m_values;
    /// Variables: size, n, d, n0, normH.
    std::string beta_rule = "1";
    /// Variables: size, n, d, n0, normH, beta.
    std::string sigma_rule = "0.25";
    FilterMode filter = FilterMode::gaussian;
    double c_window = 2.0;
    int reps = 1;
    std::uint64_t root_seed = 1;
    /// auto, dense, closed_form.
    std::string method = "auto";
    bool verify = false;
    bool full_spectrum = false;
    bool mixing = false;
    double epsilon = 0.01;
    std::size_t memory_budget = kMemoryBudgetBytes;
    unsigned threads = 0;
    bool timing = true;

    void validate() const {
        if (sizes.empty()) {
            fail(ErrorKind::BadParameter, "sweep needs at least one size");
        }
        if (reps < 1) {
            fail(ErrorKind::BadParameter, "reps must be >= 1");
        }
        if (method != "auto" && method != "dense" && method != "closed_form") {
            fail(ErrorKind::BadParameter, "method must be auto, dense or closed_form");
        }
        if (!(epsilon > 0.0 && epsilon < 1.0)) {
            fail(ErrorKind::BadParameter, "epsilon must lie in (0, 1)");
        }
        if (jump_kind != kHaarAverage) {
            jump_kind_from_string(jump_kind);
        }
        if (!m_values.empty() && jump_kind != "haar_design" && jump_kind != "pauli_design") {
            fail(ErrorKind::BadParameter, "M values apply to haar_design and pauli_design only");
        }
        for (std::int64_t m : m_values) {
            if (m < 1) {
                fail(ErrorKind::BadM, "M values must be >= 1");
            }
        }
        for (std::int64_t s : sizes) {
            if (s < 1) {
                fail(ErrorKind::BadSize, "sizes must be >= 1");
            }
            const long double dim = family == Family::hypercube || family == Family::pauli_string
                                        ? std::ldexp(1.0L, static_cast<int>(std::min<std::int64_t>(s, 62)))
                                        : static_cast<long double>(s);
            const bool structured = jump_kind == kHaarAverage ||
                                    (family == Family::hypercube && method != "dense" && s > 5);
            if (!structured) {
                const long double bytes = dim * dim * dim * dim * sizeof(cplx);
                if (bytes > static_cast<long double>(memory_budget)) {
                    fail(ErrorKind::DimensionTooLarge,
                         "size " + std::to_string(s) + " needs a superoperator beyond the memory budget");
                }
            }
        }
    }

    json to_json() const {
        return json{{"name", name},
                    {"hamiltonian",
                     {{"family", std::string(to_string(family))},
                      {"sizes", sizes},
                      {"degree", degree_rule},
                      {"terms", terms_rule}}},
                    {"jumps", {{"kind", jump_kind}, {"M", m_rule}, {"M_values", m_values}}},
                    {"filter",
                     {{"beta", beta_rule}, {"sigma_E", sigma_rule}, {"mode", std::string(to_string(filter))}}},
                    {"sweep",
                     {{"reps", reps},
                      {"root_seed", root_seed},
                      {"C", c_window},
                      {"method", method},
                      {"verify", verify},
                      {"full_spectrum", full_spectrum},
                      {"mixing", mixing},
                      {"epsilon", epsilon},
                      {"memory_budget_bytes", memory_budget},
                      {"threads", threads},
                      {"timing", timing}}}};
    }
};

namespace detail {

inline std::string rule_string(const json &v, const std::string &key) {
    if (v.is_string()) {
        return v.get<std::string>();
    }
    if (v.is_number_integer()) {
        return std::to_string(v.get<std::int64_t>());
    }
    if (v.is_number()) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.17g", v.get<double>());
        return buf;
    }
    fail(ErrorKind::ParseError, "'" + key + "' must be a number or a rule string");
}

template <class T>
T get_as(const json &table, const char *key, T fallback) {
    if (!table.is_object() || !table.contains(key)) {
        return fallback;
    }
    try {
        return table.at(key).get<T>();
    } catch (const json::exception &) {
        fail(ErrorKind::ParseError, std::string("bad type for '") + key + "'");
    }
}

inline void check_keys(const json &table, const std::string &section, std::set<std::string> allowed) {
    if (!table.is_object()) {
        return;
    }
    for (const auto &[k, v] : table.items()) {
        if (!allowed.count(k)) {
            fail(ErrorKind::ParseError, "unknown key '" + section + "." + k + "'");
        }
    }
}

} // namespace detail

/// Reads the scenario layout ([hamiltonian], [jumps], [filter], [sweep]).
inline SweepConfig sweep_config_from_json(const json &j) {
    detail::check_keys(j, "", {"name", "hamiltonian", "jumps", "filter", "sweep"});
    SweepConfig c;
    c.name = detail::get_as<std::string>(j, "name", c.name);
    const json empty = json::object();
    const json &hj = j.contains("hamiltonian") ? j.at("hamiltonian") : empty;
    const json &jj = j.contains("jumps") ? j.at("jumps") : empty;
    const json &fj = j.contains("filter") ? j.at("filter") : empty;
    const json &sj = j.contains("sweep") ? j.at("sweep") : empty;
    detail::check_keys(hj, "hamiltonian", {"family", "sizes", "size_range", "degree", "terms"});
    detail::check_keys(jj, "jumps", {"kind", "M", "M_values"});
    detail::check_keys(fj, "filter", {"beta", "sigma_E", "mode"});
    detail::check_keys(sj, "sweep", {"reps", "root_seed", "C", "method", "verify", "full_spectrum", "mixing",
                                     "epsilon", "memory_budget_bytes", "memory_budget_gib", "threads", "timing"});
    c.family = family_from_string(detail::get_as<std::string>(hj, "family", "cycle"));
    if (hj.contains("sizes")) {
        c.sizes = detail::get_as<std::vector<std::int64_t>>(hj, "sizes", {});
    }
    if (hj.contains("size_range")) {
        const auto r = detail::get_as<std::vector<std::int64_t>>(hj, "size_range", {});
        if (r.size() != 3 || r[2] < 1 || r[1] < r[0]) {
            fail(ErrorKind::ParseError, "size_range must be [start, stop, step] with step >= 1");
        }
        for (std::int64_t s = r[0]; s <= r[1]; s += r[2]) {
            c.sizes.push_back(s);
        }
    }
    if (hj.contains("degree")) c.degree_rule = detail::rule_string(hj.at("degree"), "degree");
    if (hj.contains("terms")) c.terms_rule = detail::rule_string(hj.at("terms"), "terms");
    c.jump_kind = detail::get_as<std::string>(jj, "kind", c.jump_kind);
    if (jj.contains("M")) c.m_rule = detail::rule_string(jj.at("M"), "M");
    c.m_values = detail::get_as<std::vector<std::int64_t>>(jj, "M_values", {});
    if (fj.contains("beta")) c.beta_rule = detail::rule_string(fj.at("beta"), "beta");
    if (fj.contains("sigma_E")) c.sigma_rule = detail::rule_string(fj.at("sigma_E"), "sigma_E");
    c.filter = filter_mode_from_string(detail::get_as<std::string>(fj, "mode", "gaussian"));
    c.reps = detail::get_as<int>(sj, "reps", c.reps);
    c.root_seed = detail::get_as<std::uint64_t>(sj, "root_seed", c.root_seed);
    c.c_window = detail::get_as<double>(sj, "C", c.c_window);
    c.method = detail::get_as<std::string>(sj, "method", c.method);
    c.verify = detail::get_as<bool>(sj, "verify", c.verify);
    c.full_spectrum = detail::get_as<bool>(sj, "full_spectrum", c.full_spectrum);
    c.mixing = detail::get_as<bool>(sj, "mixing", c.mixing);
    c.epsilon = detail::get_as<double>(sj, "epsilon", c.epsilon);
    if (sj.contains("memory_budget_gib")) {
        c.memory_budget = static_cast<std::size_t>(detail::get_as<double>(sj, "memory_budget_gib", 2.0) *
                                                   static_cast<double>(std::size_t{1} << 30));
    }
    c.memory_budget = detail::get_as<std::size_t>(sj, "memory_budget_bytes", c.memory_budget);
    c.threads = detail::get_as<unsigned>(sj, "threads", c.threads);
    c.timing = detail::get_as<bool>(sj, "timing", c.timing);
    c.validate();
    return c;
}

/**
 * Applies a `section.key=value` override to a parsed scenario. The value is
 * read as a TOML value, falling back to a bare string.
 */
inline void apply_override(json &j, const std::string &assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) {
        fail(ErrorKind::ParseError, "override '" + assignment + "' must look like key=value");
    }
    const std::string key = assignment.substr(0, eq);
    const std::string raw = assignment.substr(eq + 1);
    json value;
    try {
        value = parse_toml("v = " + raw).at("v");
    } catch (const Error &) {
        value = raw;
    }
    json *t = &j;
    std::size_t start = 0;
    for (;;) {
        const auto dot = key.find('.', start);
        const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (part.empty()) {
            fail(ErrorKind::ParseError, "override key '" + key + "' has an empty part");
        }
        if (dot == std::string::npos) {
            (*t)[part] = value;
            return;
        }
        t = &(*t)[part];
        if (t->is_null()) {
            *t = json::object();
        }
        start = dot + 1;
    }
}

inline SweepConfig load_sweep_config(const std::string &path, const std::vector<std::string> &overrides = {}) {
    json j = load_toml(path);
    for (const auto &o : overrides) {
        apply_override(j, o);
    }
    return sweep_config_from_json(j);
}

struct SweepRow {
    std::string family;
    std::int64_t n = 0;
    std::optional<std::int64_t> d;
    std::optional<double> beta;
    std::optional<double> sigma_E;
    std::string jump_kind;
    std::optional<std::int64_t> m;
    std::uint64_t seed = 0;
    std::optional<double> gap;
    std::optional<double> classical_gap;
    std::optional<double> dephasing_min;
    std::optional<double> canonical_bound;
    std::optional<double> delta;
    std::optional<double> mixing_bound;
    std::optional<double> t_measured;
    std::optional<double> db_residual;
    std::optional<double> wall_time_ms;
    std::string status = "ok";
    /// Swept size, jump count (0 without an M axis) and repetition index;
    /// sort keys, not emitted.
    std::int64_t size = 0;
    std::int64_t m_axis = 0;
    int rep = 0;
};

inline const std::vector<std::string> &sweep_columns() {
    static const std::vector<std::string> cols{
        "family", "n", "d", "beta", "sigma_E", "jump_kind", "M", "seed", "gap", "classical_gap",
        "dephasing_min", "canonical_bound", "delta", "mixing_bound", "t_measured", "db_residual",
        "wall_time_ms", "status"};
    return cols;
}

namespace detail {

inline std::string fmt_double(const std::optional<double> &v) {
    if (!v) {
        return "";
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", *v);
    return buf;
}

inline std::string fmt_int(const std::optional<std::int64_t> &v) { return v ? std::to_string(*v) : ""; }

/// Keeps a free-text field inside one CSV cell.
inline std::string csv_safe(std::string s) {
    for (char &c : s) {
        if (c == ',' || c == '\n' || c == '\r' || c == '"') {
            c = ';';
        }
    }
    return s;
}

} // namespace detail

inline std::string to_csv(const std::vector<SweepRow> &rows) {
    std::string out;
    const auto &cols = sweep_columns();
    for (std::size_t i = 0; i < cols.size(); ++i) {
        out += (i ? "," : "") + cols[i];
    }
    out += "\n";
    for (const auto &r : rows) {
        const std::vector<std::string> cells{
            r.family, std::to_string(r.n), detail::fmt_int(r.d), detail::fmt_double(r.beta),
            detail::fmt_double(r.sigma_E), r.jump_kind, detail::fmt_int(r.m), std::to_string(r.seed),
            detail::fmt_double(r.gap), detail::fmt_double(r.classical_gap), detail::fmt_double(r.dephasing_min),
            detail::fmt_double(r.canonical_bound), detail::fmt_double(r.delta), detail::fmt_double(r.mixing_bound),
            detail::fmt_double(r.t_measured), detail::fmt_double(r.db_residual), detail::fmt_double(r.wall_time_ms),
            detail::csv_safe(r.status)};
        for (std::size_t i = 0; i < cells.size(); ++i) {
            out += (i ? "," : "") + cells[i];
        }
        out += "\n";
    }
    return out;
}

/// Seed of repetition `rep` at swept size `size`; depends only on the task,
/// not on scheduling or on which other sizes are swept.
inline std::uint64_t sweep_seed(std::uint64_t root, std::int64_t size, int rep) {
    return derive_seed(derive_seed(root, static_cast<std::uint64_t>(size)), static_cast<std::uint64_t>(rep));
}

/// Everything needed to build one sweep instance.
struct ResolvedInstance {
    InstanceSpec spec;
    Eigen::Index n = 0;
    std::optional<std::int64_t> d;
    FilterParams fp;
    /// Hypercube with hypercube_z jumps through the single-qubit generator;
    /// no Hamiltonian is built.
    bool factorized = false;
    bool average = false;
    std::optional<Hamiltonian> h;
};

/// Resolves the rules of `cfg` at one (size, M, seed) task.
inline ResolvedInstance resolve_instance(const SweepConfig &cfg, std::int64_t size, std::int64_t m_axis,
                                         std::uint64_t seed) {
    ResolvedInstance ri;
    InstanceSpec &spec = ri.spec;
    RuleVars vars{{"size", static_cast<double>(size)}};
    spec.family = cfg.family;
    spec.seed = seed;
    spec.jump_seed = derive_seed(seed, 1 + static_cast<std::uint64_t>(m_axis));
    ri.average = cfg.jump_kind == kHaarAverage;
    spec.jump_kind = ri.average ? "haar_design" : cfg.jump_kind;
    switch (cfg.family) {
    case Family::cycle:
    case Family::path:
        spec.n = size;
        break;
    case Family::regular:
        spec.n = size;
        vars["n"] = static_cast<double>(size);
        spec.d = eval_integer_rule(cfg.degree_rule, vars);
        ri.d = spec.d;
        break;
    case Family::hypercube:
        spec.d = size;
        ri.d = size;
        break;
    case Family::pauli_string:
        spec.n0 = static_cast<int>(size);
        vars["n0"] = static_cast<double>(size);
        vars["n"] = std::ldexp(1.0, static_cast<int>(size));
        spec.terms = eval_integer_rule(cfg.terms_rule, vars);
        ri.d = size;
        break;
    case Family::custom:
        fail(ErrorKind::BadParameter, "sweeps need a generator family");
    }
    ri.factorized = cfg.family == Family::hypercube && spec.jump_kind == "hypercube_z" && !ri.average &&
                    (cfg.method == "closed_form" || (cfg.method == "auto" && size > 5));
    if (cfg.method == "closed_form" && !ri.factorized) {
        fail(ErrorKind::BadParameter, "closed_form applies to hypercube with hypercube_z jumps only");
    }
    ri.n = cfg.family == Family::hypercube || cfg.family == Family::pauli_string ? (Eigen::Index{1} << size) : size;
    vars["n"] = static_cast<double>(ri.n);
    vars["d"] = static_cast<double>(spec.d);
    vars["n0"] = static_cast<double>(spec.n0);
    if (ri.factorized) {
        // ‖Σ X_i‖ = d; the factorized path never needs the 2^d-dim matrix.
        vars["normH"] = static_cast<double>(size);
    } else {
        ri.h = make_hamiltonian(spec);
        vars["normH"] = ri.h->norm();
    }
    const double beta = eval_rule(cfg.beta_rule, vars);
    vars["beta"] = beta;
    const double sigma = eval_rule(cfg.sigma_rule, vars);
    ri.fp = FilterParams{beta, sigma, cfg.filter};
    ri.fp.check();
    if (!ri.average && !ri.factorized &&
        (spec.jump_kind == "haar_design" || spec.jump_kind == "pauli_design")) {
        spec.m = m_axis > 0 ? m_axis : eval_integer_rule(cfg.m_rule, vars);
    }
    return ri;
}

namespace detail {

inline void fill_row(const SweepConfig &cfg, SweepRow &row) {
    const std::int64_t size = row.size;
    const ResolvedInstance ri = resolve_instance(cfg, size, row.m_axis, row.seed);
    row.n = ri.n;
    row.d = ri.d;
    row.beta = ri.fp.beta;
    row.sigma_E = ri.fp.sigma_E;
    const FilterParams &fp = ri.fp;
    const double beta = fp.beta;

    if (ri.factorized) {
        const Hamiltonian h1 = make_hypercube(1);
        const Superoperator s1 = build(h1, hypercube_z(1), fp);
        const GapReport g1 = spectral_gap(s1, gibbs_state(h1, beta));
        row.gap = g1.gap / static_cast<double>(size);
        row.db_residual = g1.db_residual;
        row.m = size;
        // Levels −d + 2k carry binomial multiplicities.
        const double window = cfg.c_window / beta;
        double count = 0.0;
        for (std::int64_t k = 0; k <= size; ++k) {
            if (2.0 * static_cast<double>(k) <= window + 1e-9) {
                count += std::exp(std::lgamma(size + 1.0) - std::lgamma(k + 1.0) - std::lgamma(size - k + 1.0));
            }
        }
        row.delta = count / std::ldexp(1.0, static_cast<int>(size));
        const double log_min_p = -beta * 2.0 * static_cast<double>(size) -
                                 static_cast<double>(size) * std::log1p(std::exp(-2.0 * beta));
        row.mixing_bound = -0.5 * log_min_p / *row.gap;
        return;
    }

    const Hamiltonian &h = *ri.h;
    const Eigen::Index n = ri.n;
    const GibbsState g = gibbs_state(h, beta);
    row.delta = spectral_profile(h, beta, cfg.c_window).delta;

    if (ri.average) {
        const AveragedLindbladian avg = build_average_structured(h, fp);
        const GapReport rep = averaged_gap(avg, g);
        row.gap = rep.gap;
        row.classical_gap = rep.classical_gap;
        row.dephasing_min = rep.dephasing_min;
        row.canonical_bound = rep.canonical_bound;
        row.db_residual = db_residual(avg, g);
    } else {
        check_dense_budget(static_cast<std::size_t>(n * n), cfg.memory_budget);
        const JumpSet js = make_jumps(ri.spec, n);
        row.m = static_cast<std::int64_t>(js.size());
        BuildOptions bo;
        bo.memory_budget = cfg.memory_budget;
        const Superoperator s = build(h, js, fp, bo);
        GapOptions go;
        go.full_spectrum = cfg.full_spectrum;
        const GapReport rep = spectral_gap(s, g, go);
        row.gap = rep.gap;
        row.db_residual = rep.db_residual;
        const RealMatrix cb = classical_block(s.matrix);
        row.classical_gap = classical_gap(cb, g.p);
        try {
            row.canonical_bound = canonical_path_bound(cb, g.p);
        } catch (const Error &e) {
            if (e.kind() != ErrorKind::SparseChain) {
                throw;
            }
        }
        if (cfg.mixing) {
            MixingOptions mo;
            mo.assert_bound = false;
            row.t_measured = simulate_mixing(s.matrix, g, cfg.epsilon, default_starts(n, row.seed, 0), mo).t_measured;
        }
        if (cfg.verify) {
            const VerifyReport vr = verify_instance(h, js, fp);
            if (!vr.ok()) {
                std::string failed;
                for (const auto &c : vr.checks) {
                    if (!c.passed) {
                        failed += (failed.empty() ? "" : " ") + c.name;
                    }
                }
                row.status = "verify_failed: " + failed;
            }
        }
    }
    if (row.gap && *row.gap > 0.0) {
        row.mixing_bound = mixing_bound(*row.gap, g).tight;
    }
}

} // namespace detail

/// Unfilled rows, one per (size, M, rep) task, sorted in that order.
inline std::vector<SweepRow> sweep_tasks(const SweepConfig &cfg) {
    cfg.validate();
    std::vector<SweepRow> rows;
    std::vector<std::int64_t> sizes = cfg.sizes;
    std::sort(sizes.begin(), sizes.end());
    sizes.erase(std::unique(sizes.begin(), sizes.end()), sizes.end());
    std::vector<std::int64_t> ms = cfg.m_values;
    std::sort(ms.begin(), ms.end());
    ms.erase(std::unique(ms.begin(), ms.end()), ms.end());
    if (ms.empty()) {
        ms.push_back(0);
    }
    for (std::int64_t s : sizes) {
        for (std::int64_t m : ms) {
            for (int r = 0; r < cfg.reps; ++r) {
                SweepRow row;
                row.family = std::string(to_string(cfg.family));
                row.jump_kind = cfg.jump_kind;
                row.size = s;
                row.n = cfg.family == Family::hypercube || cfg.family == Family::pauli_string
                            ? (std::int64_t{1} << std::min<std::int64_t>(s, 62))
                            : s;
                row.m_axis = m;
                row.rep = r;
                row.seed = sweep_seed(cfg.root_seed, s, r);
                rows.push_back(std::move(row));
            }
        }
    }
    return rows;
}

/// Fills every task of `cfg`. Failures are recorded in the row's status;
/// the sweep itself only throws on an invalid config.
inline std::vector<SweepRow> run_sweep(const SweepConfig &cfg) {
    std::vector<SweepRow> rows = sweep_tasks(cfg);
    // Largest tasks first so a long tail does not idle the other workers.
    std::vector<std::size_t> order(rows.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        order[i] = rows.size() - 1 - i;
    }
    parallel_for(order.size(), cfg.threads, [&](std::size_t k) {
        SweepRow &row = rows[order[k]];
        const auto t0 = std::chrono::steady_clock::now();
        try {
            detail::fill_row(cfg, row);
        } catch (const Error &e) {
            row.status = e.what();
        } catch (const std::exception &e) {
            row.status = std::string("error: ") + e.what();
        }
        if (cfg.timing) {
            row.wall_time_ms =
                std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        }
    });
    return rows;
}

// ---------------------------------------------------------------------------
// CSV tables and fits

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(std::string_view name) const {
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (header[i] == name) {
                return i;
            }
        }
        fail(ErrorKind::MissingColumn, "column '" + std::string(name) + "' not found");
    }

    bool has_column(std::string_view name) const {
        return std::find(header.begin(), header.end(), name) != header.end();
    }

    /// Rows with status "ok", or every row when there is no status column.
    std::vector<std::size_t> ok_rows() const {
        std::vector<std::size_t> out;
        const bool has_status = has_column("status");
        const std::size_t sc = has_status ? column("status") : 0;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (!has_status || rows[i][sc] == "ok") {
                out.push_back(i);
            }
        }
        return out;
    }
};

inline CsvTable parse_csv(std::string_view text) {
    CsvTable t;
    std::size_t pos = 0;
    bool first = true;
    while (pos < text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) {
            end = text.size();
        }
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        if (!line.empty() && line.back() == '\r') {
            line.remove_suffix(1);
        }
        if (line.empty()) {
            continue;
        }
        std::vector<std::string> cells;
        std::size_t s = 0;
        for (;;) {
            const std::size_t c = line.find(',', s);
            cells.emplace_back(line.substr(s, c == std::string_view::npos ? std::string_view::npos : c - s));
            if (c == std::string_view::npos) {
                break;
            }
            s = c + 1;
        }
        if (first) {
            t.header = std::move(cells);
            first = false;
        } else {
            if (cells.size() != t.header.size()) {
                fail(ErrorKind::ParseError, "CSV row has " + std::to_string(cells.size()) + " cells, header has " +
                                                std::to_string(t.header.size()));
            }
            t.rows.push_back(std::move(cells));
        }
    }
    if (first) {
        fail(ErrorKind::ParseError, "CSV is empty");
    }
    return t;
}

inline CsvTable load_csv(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        fail(ErrorKind::IoError, "cannot open '" + path + "'");
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_csv(ss.str());
}

struct SlopeFit {
    double slope = 0.0;
    double intercept = 0.0;
    double stderr_slope = 0.0;
    std::size_t points = 0;

    json to_json() const {
        return json{{"slope", slope}, {"intercept", intercept}, {"stderr", stderr_slope}, {"points", points}};
    }
};

/// Ordinary least squares of log y on log x.
inline SlopeFit fit_slope(const std::vector<double> &x, const std::vector<double> &y) {
    if (x.size() != y.size()) {
        fail(ErrorKind::DimensionMismatch, "fit_slope needs equal-length x and y");
    }
    if (x.size() < 3) {
        fail(ErrorKind::InsufficientData, "fit_slope needs at least 3 points, got " + std::to_string(x.size()));
    }
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0) || !std::isfinite(x[i]) || !std::isfinite(y[i])) {
            fail(ErrorKind::NonPositiveValue, "log-log fit needs positive finite values");
        }
        lx.push_back(std::log(x[i]));
        ly.push_back(std::log(y[i]));
    }
    const auto k = static_cast<double>(lx.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= k;
    my /= k;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
    }
    if (sxx == 0.0) {
        fail(ErrorKind::InsufficientData, "fit_slope needs at least two distinct x values");
    }
    SlopeFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double ssr = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        const double r = ly[i] - f.intercept - f.slope * lx[i];
        ssr += r * r;
    }
    f.stderr_slope = std::sqrt(ssr / (k - 2.0) / sxx);
    f.points = lx.size();
    return f;
}

/// Per-x means of a CSV column pair, over ok rows with non-empty cells.
inline std::map<double, std::vector<double>> group_by_x(const CsvTable &t, std::string_view x_col,
                                                        std::string_view y_col) {
    const std::size_t xc = t.column(x_col), yc = t.column(y_col);
    std::map<double, std::vector<double>> groups;
    for (std::size_t i : t.ok_rows()) {
        const auto &row = t.rows[i];
        if (row[xc].empty() || row[yc].empty()) {
            continue;
        }
        try {
            groups[std::stod(row[xc])].push_back(std::stod(row[yc]));
        } catch (const std::exception &) {
            fail(ErrorKind::ParseError, "non-numeric cell in '" + std::string(x_col) + "' or '" +
                                            std::string(y_col) + "'");
        }
    }
    return groups;
}

/// Fit over a CSV; with `aggregate`, repeated x values are replaced by the
/// mean of their y values.
inline SlopeFit fit_slope(const CsvTable &t, std::string_view x_col, std::string_view y_col, bool aggregate = true) {
    std::vector<double> x, y;
    for (const auto &[xv, ys] : group_by_x(t, x_col, y_col)) {
        if (aggregate) {
            double s = 0.0;
            for (double v : ys) {
                s += v;
            }
            x.push_back(xv);
            y.push_back(s / static_cast<double>(ys.size()));
        } else {
            for (double v : ys) {
                x.push_back(xv);
                y.push_back(v);
            }
        }
    }
    return fit_slope(x, y);
}

/// Per-point statistics, failure count and, with >= 3 points, the slope of
/// the mean gap against n (or against M when M is swept).
inline json sweep_summary(const SweepConfig &cfg, const std::vector<SweepRow> &rows) {
    json points = json::array();
    std::size_t failures = 0;
    std::vector<double> xs, ys;
    std::map<std::pair<std::int64_t, std::int64_t>, std::vector<const SweepRow *>> by_point;
    for (const auto &r : rows) {
        by_point[{r.size, r.m_axis}].push_back(&r);
        failures += r.status != "ok";
    }
    const bool m_axis = !cfg.m_values.empty();
    for (const auto &[key, rs] : by_point) {
        std::vector<double> gaps;
        for (const SweepRow *r : rs) {
            if (r->status == "ok" && r->gap) {
                gaps.push_back(*r->gap);
            }
        }
        json p{{"size", key.first}, {"n", rs.front()->n}, {"rows", rs.size()}, {"ok", gaps.size()}};
        if (m_axis) {
            p["M"] = key.second;
        }
        if (!gaps.empty()) {
            double sum = 0.0;
            for (double g : gaps) {
                sum += g;
            }
            const double mean = sum / static_cast<double>(gaps.size());
            p["gap"] = {{"mean", mean},
                        {"min", *std::min_element(gaps.begin(), gaps.end())},
                        {"max", *std::max_element(gaps.begin(), gaps.end())}};
            if (mean > 0.0) {
                xs.push_back(static_cast<double>(m_axis ? key.second : rs.front()->n));
                ys.push_back(mean);
            }
        }
        points.push_back(p);
    }
    json s{{"name", cfg.name}, {"rows", rows.size()}, {"failures", failures}, {"points", points}};
    const bool single_axis = !m_axis || cfg.sizes.size() == 1;
    if (xs.size() >= 3 && single_axis) {
        s[m_axis ? "gap_vs_M" : "gap_vs_n"] = fit_slope(xs, ys).to_json();
    }
    return s;
}

struct SweepOutputs {
    std::filesystem::path csv;
    std::filesystem::path summary;
    std::filesystem::path config;
};

/// Writes <name>.csv, <name>.summary.json and <name>.config.json into `dir`.
inline SweepOutputs write_sweep_outputs(const std::filesystem::path &dir, const SweepConfig &cfg,
                                        const std::vector<SweepRow> &rows) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        fail(ErrorKind::IoError, "cannot create '" + dir.string() + "'");
    }
    SweepOutputs out{dir / (cfg.name + ".csv"), dir / (cfg.name + ".summary.json"), dir / (cfg.name + ".config.json")};
    auto write = [](const std::filesystem::path &p, const std::string &text) {
        std::ofstream f(p, std::ios::binary);
        if (!f) {
            fail(ErrorKind::IoError, "cannot write '" + p.string() + "'");
        }
        f << text;
    };
    write(out.config, cfg.to_json().dump(2) + "\n");
    write(out.csv, to_csv(rows));
    write(out.summary, sweep_summary(cfg, rows).dump(2) + "\n");
    return out;
}

} // namespace ckg
