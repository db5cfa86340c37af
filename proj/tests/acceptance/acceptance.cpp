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


// Acceptance checks. Each criterion prints one PASS or FAIL line; "info:"
// lines carry the measured numbers. The exit status is nonzero when any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cstdarg>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "ckg/experiments.hpp"
#include "ckg/gap.hpp"
#include "ckg/krylov.hpp"
#include "oracles.hpp"

namespace {

using namespace ckg;

void info(const char *fmt, ...) __attribute__((format(printf, 1, 2)));
void info(const char *fmt, ...) {
    std::printf("  info: ");
    va_list ap;
    va_start(ap, fmt);
    std::vprintf(fmt, ap);
    va_end(ap);
    std::printf("\n");
    std::fflush(stdout);
}

std::string scenario(const std::string &name) { return std::string(CKG_SOURCE_DIR) + "/scenarios/" + name + ".toml"; }

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

/// Gap from the momentum blocks: the classical gap and the smallest |λ| of
/// every coherence block.
struct BlockGap {
    double gap = 0.0;
    double classical = 0.0;
    double coherence = 0.0;
};

BlockGap cycle_block_gap(std::int64_t n, const FilterParams &fp) {
    const Hamiltonian h = make_cycle(n);
    const GibbsState g = gibbs_state(h, fp.beta);
    BuildOptions bo;
    bo.check = false;
    const Superoperator s = build(h, graph_local(n), fp, bo);
    const BlockDecomposition bd = block_decomposition(s.matrix, momentum_keys(h));
    BlockGap r;
    r.coherence = std::numeric_limits<double>::infinity();
    for (const auto &b : bd.blocks) {
        if (!b.classical) {
            r.coherence = std::min(r.coherence, block_min_abs_eigenvalue(b.matrix));
        }
    }
    r.classical = classical_gap(classical_block(s.matrix), g.p);
    r.gap = std::min(r.classical, r.coherence);
    return r;
}

// ---------------------------------------------------------------------------

bool criterion1() {
    SweepConfig cfg = load_sweep_config(scenario("thm1_cycle_slope"));
    cfg.timing = false;
    const std::vector<SweepRow> rows = run_sweep(cfg);
    std::vector<double> ns, gaps;
    for (const auto &r : rows) {
        if (r.status != "ok" || !r.gap) {
            info("n=%lld failed: %s", static_cast<long long>(r.n), r.status.c_str());
            return false;
        }
        ns.push_back(static_cast<double>(r.n));
        gaps.push_back(*r.gap);
    }
    const SlopeFit f = fit_slope(ns, gaps);
    info("cycle n=%lld..%lld slope %.4f (stderr %.4f), target [-3.5, -2.5]", static_cast<long long>(rows.front().n),
         static_cast<long long>(rows.back().n), f.slope, f.stderr_slope);
    // Local slopes beyond the swept range show the approach to the asymptote.
    const FilterParams fp = rows.front().beta && rows.front().sigma_E
                                ? FilterParams{*rows.front().beta, *rows.front().sigma_E}
                                : FilterParams{};
    double prev_n = ns.back(), prev_gap = gaps.back();
    for (std::int64_t n : {32, 48}) {
        const BlockGap b = cycle_block_gap(n, fp);
        const double local = std::log(b.gap / prev_gap) / std::log(static_cast<double>(n) / prev_n);
        info("n=%lld gap %.6e (classical %.6e), local slope from n=%g: %.3f", static_cast<long long>(n), b.gap,
             b.classical, prev_n, local);
        prev_n = static_cast<double>(n);
        prev_gap = b.gap;
    }
    return f.slope >= -3.5 && f.slope <= -2.5;
}

bool criterion2() {
    const FilterParams fp{1.0, 0.25};
    bool ok = true;
    double worst = 0.0;
    for (int d = 2; d <= 5; ++d) {
        const Hamiltonian h = make_hypercube(d);
        const Superoperator s = build(h, hypercube_z(d), fp);
        const GapReport r = spectral_gap(s, gibbs_state(h, fp.beta));
        const double cf = hypercube_gap_closed_form(d, fp);
        const double rel = std::abs(r.gap - cf) / cf;
        worst = std::max(worst, rel);
        ok = ok && rel <= 1e-8;
        if (d <= 4) {
            const FactorizationResidual fr = hypercube_factorization(h, s.matrix, fp);
            info("d=%d product structure residuals %.2e, %.2e", d, fr.locality, fr.single_qubit);
            ok = ok && fr.locality <= 1e-10 && fr.single_qubit <= 1e-10;
        }
    }
    info("d=2..5 dense gap vs closed form: worst relative deviation %.2e", worst);
    const double c_ref = hypercube_gap_closed_form(6, fp) * 6.0;
    const double f_ref = hypercube_gap_factorized(6, fp) * 6.0;
    double spread = 0.0, fspread = 0.0;
    for (int d = 6; d <= 12; ++d) {
        spread = std::max(spread, std::abs(hypercube_gap_closed_form(d, fp) * d - c_ref) / c_ref);
        fspread = std::max(fspread, std::abs(hypercube_gap_factorized(d, fp) * d - f_ref) / f_ref);
    }
    info("d=6..12 gap*d = %.12f, spread %.2e (closed form), %.2e (single-qubit generator)", c_ref, spread, fspread);
    info("closed form vs single-qubit generator at d=6: %.2e", std::abs(c_ref - f_ref) / c_ref);
    return ok && spread <= 1e-10 && fspread <= 1e-10 && std::abs(c_ref - f_ref) / c_ref <= 1e-8;
}

bool criterion3() {
    bool ok = true;
    {
        const Hamiltonian h = make_random_regular(8, 4, 31);
        const FilterParams fp{1.0 / h.norm(), 0.25};
        BuildOptions bo;
        bo.check = false;
        const ComplexMatrix avg = build_average(h, fp).matrix;
        ComplexMatrix sum = ComplexMatrix::Zero(avg.rows(), avg.cols());
        double dev125 = 0.0, dev500 = 0.0;
        for (int k = 1; k <= 500; ++k) {
            sum += build(h, haar_design(8, 2, derive_seed(3003, static_cast<std::uint64_t>(k))), fp, bo).matrix;
            if (k == 125) {
                dev125 = (sum / 125.0 - avg).cwiseAbs().maxCoeff();
            }
        }
        dev500 = (sum / 500.0 - avg).cwiseAbs().maxCoeff();
        const double ratio = dev500 / (dev125 * std::sqrt(125.0 / 500.0));
        info("n=8 4-regular: max deviation %.3e at 125 samples, %.3e at 500; ratio to 1/sqrt(N) extrapolation %.3f",
             dev125, dev500, ratio);
        ok = ok && ratio >= 0.2 && ratio <= 5.0;
    }
    const double floor = 0.1 * std::exp(-2.0);
    for (std::int64_t n : {16, 32, 64}) {
        double lo = std::numeric_limits<double>::infinity();
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            const Hamiltonian h = make_random_regular(n, 4, seed);
            const FilterParams fp{1.0 / h.norm(), 0.25};
            const GapReport r = averaged_gap(build_average_structured(h, fp), gibbs_state(h, fp.beta));
            lo = std::min(lo, r.gap);
        }
        info("n=%lld averaged gap min over 5 seeds %.4f (floor %.4f)", static_cast<long long>(n), lo, floor);
        ok = ok && lo >= floor;
    }
    return ok;
}

bool criterion4() {
    SweepConfig cfg = load_sweep_config(scenario("thm2_bounded_design"));
    cfg.timing = false;
    const std::vector<SweepRow> rows = run_sweep(cfg);
    std::map<std::int64_t, double> lo;
    for (const auto &r : rows) {
        if (r.status != "ok" || !r.gap) {
            info("n=%lld seed %llu failed: %s", static_cast<long long>(r.n), static_cast<unsigned long long>(r.seed),
                 r.status.c_str());
            return false;
        }
        auto it = lo.find(r.n);
        lo[r.n] = it == lo.end() ? *r.gap : std::min(it->second, *r.gap);
    }
    for (const auto &[n, g] : lo) {
        info("n=%lld min gap %.4f over %d seeds", static_cast<long long>(n), g, cfg.reps);
    }
    if (!lo.count(16) || !lo.count(64)) {
        return false;
    }
    const double drop = (lo[16] - lo[64]) / lo[16];
    info("relative decrease 16 -> 64: %.4f (limit 0.25)", drop);
    return drop < 0.25;
}

struct InvariantTally {
    std::size_t instances = 0;
    double db = 0.0, fixed_point = 0.0, trace = 0.0, top = 0.0;
    std::string worst;

    void add(const std::string &id, double d, double f, double t, double s) {
        ++instances;
        if (d > 1e-8 || f > 1e-8 || t > 1e-9 || s > 1e-9) {
            worst = id;
        }
        db = std::max(db, d);
        fixed_point = std::max(fixed_point, f);
        trace = std::max(trace, t);
        top = std::max(top, s);
    }
    bool ok() const { return db <= 1e-8 && fixed_point <= 1e-8 && trace <= 1e-9 && top <= 1e-9; }
};

/// Largest eigenvalue of the KMS-symmetrized generator over its spectral
/// radius (dense) or over ‖L‖_F (Lanczos).
double top_eigenvalue(const ComplexMatrix &l, const GibbsState &g) {
    ComplexMatrix sym = kms_symmetrize(l, g);
    sym = 0.5 * (sym + sym.adjoint()).eval();
    if (sym.rows() <= 1024) {
        const RealVector ev = hermitian_eigenvalues(sym, 1.0);
        return ev.maxCoeff() / std::max(ev.cwiseAbs().maxCoeff(), 1e-300);
    }
    const LanczosResult r = lanczos_largest([&](const ComplexVector &x) { return ComplexVector(sym * x); },
                                            sym.rows(), {});
    return r.value / std::max(l.norm(), 1e-300);
}

void dense_invariants(const std::string &id, const ComplexMatrix &l, const GibbsState &g, InvariantTally &t) {
    const BuildResiduals r = residuals(l, g);
    const double scale = std::max(r.norm, 1e-300);
    t.add(id, r.db, r.fixed_point / scale, r.unitality / scale, top_eigenvalue(l, g));
}

void average_invariants(const std::string &id, const AveragedLindbladian &avg, const GibbsState &g,
                        InvariantTally &t) {
    const double scale = std::max(std::sqrt(avg.classical.squaredNorm() + avg.dephasing.squaredNorm()), 1e-300);
    const double fp = (avg.classical * g.p).norm() / scale;
    const double tr = avg.classical.colwise().sum().norm() / scale;
    const RealVector sq = g.p.cwiseSqrt();
    RealMatrix sym = sq.cwiseInverse().asDiagonal() * avg.classical * sq.asDiagonal();
    sym = 0.5 * (sym + sym.transpose()).eval();
    const RealVector ev = hermitian_eigenvalues(sym.cast<cplx>(), 1.0);
    const double radius = std::max({ev.cwiseAbs().maxCoeff(), avg.dephasing.cwiseAbs().maxCoeff(), 1e-300});
    const double top = std::max(ev.maxCoeff(), avg.dephasing.maxCoeff() * (avg.n > 1 ? 1.0 : 0.0)) / radius;
    t.add(id, db_residual(avg, g), fp, tr, top);
}

bool criterion5() {
    InvariantTally t;
    BuildOptions bo;
    bo.check = false;
    for (const char *name : {"fig1", "thm1_cycle_slope", "thm2_bounded_design", "thm3_regular_delta",
                             "hypercube_local", "pauli_string_profile", "concentration_M"}) {
        const SweepConfig cfg = load_sweep_config(scenario(name));
        const std::size_t before = t.instances;
        for (const SweepRow &row : sweep_tasks(cfg)) {
            const ResolvedInstance ri = resolve_instance(cfg, row.size, row.m_axis, row.seed);
            const std::string id = std::string(name) + " size " + std::to_string(row.size) + " rep " +
                                   std::to_string(row.rep);
            if (ri.factorized) {
                const Hamiltonian h1 = make_hypercube(1);
                dense_invariants(id, build(h1, hypercube_z(1), ri.fp, bo).matrix, gibbs_state(h1, ri.fp.beta), t);
            } else if (ri.average) {
                average_invariants(id, build_average_structured(*ri.h, ri.fp), gibbs_state(*ri.h, ri.fp.beta), t);
            } else {
                const JumpSet js = make_jumps(ri.spec, ri.n);
                dense_invariants(id, build(*ri.h, js, ri.fp, bo).matrix, gibbs_state(*ri.h, ri.fp.beta), t);
            }
        }
        info("%s: %zu instances", name, t.instances - before);
    }
    info("%zu instances: db %.2e, fixed point %.2e, adjoint unitality %.2e, top eigenvalue %.2e", t.instances, t.db,
         t.fixed_point, t.trace, t.top);
    if (!t.ok()) {
        info("worst offender: %s", t.worst.c_str());
    }
    return t.ok();
}

bool criterion6() {
    double kms = 0.0, fact = 0.0, aq = 0.0, tq = 0.0, tkms = 0.0;
    for (double beta : {0.1, 0.5, 1.0, 2.0, 5.0}) {
        for (double sigma : {0.05, 0.25, 1.0}) {
            const FilterParams fp{beta, sigma};
            for (int i = -40; i <= 40; ++i) {
                const double nu = 0.25 * i;
                kms = std::max(kms, std::abs(alpha(nu, fp) - std::exp(-beta * nu) * alpha(-nu, fp)));
                aq = std::max(aq, std::abs(alpha(nu, fp) - oracle::alpha_quad(nu, beta, sigma)));
                for (int j = -40; j <= 40; j += 4) {
                    const double mu = 0.25 * j;
                    const double t = theta(nu, mu, fp);
                    const double dd = nu - mu;
                    fact = std::max(fact, std::abs(t - alpha(0.5 * (nu + mu), fp) *
                                                           std::exp(-dd * dd / (8.0 * sigma * sigma))));
                    tkms = std::max(tkms, std::abs(t - std::exp(-0.5 * beta * (nu + mu)) * theta(-nu, -mu, fp)));
                    if (j % 8 == 0 && i % 2 == 0) {
                        tq = std::max(tq, std::abs(t - oracle::theta_quad(nu, mu, beta, sigma)));
                    }
                }
            }
        }
    }
    info("alpha KMS %.2e, theta KMS %.2e, theta factorization %.2e (tol 1e-12)", kms, tkms, fact);
    info("alpha vs quadrature %.2e (tol 1e-10), theta vs quadrature %.2e (tol 1e-9)", aq, tq);
    return kms <= 1e-12 && tkms <= 1e-12 && fact <= 1e-12 && aq <= 1e-10 && tq <= 1e-9;
}

bool criterion7() {
    const FilterParams fp{1.0, 0.25};
    bool ok = true;
    double cross = 0.0, coherent = 0.0;
    for (std::int64_t n = 3; n <= 16; ++n) {
        const Hamiltonian h = make_cycle(n);
        const GibbsState g = gibbs_state(h, fp.beta);
        BuildOptions bo;
        bo.keep_parts = true;
        const Superoperator s = build(h, graph_local(n), fp, bo);
        const double scale = s.matrix.norm();
        const BlockDecomposition bd = block_decomposition(s.matrix, momentum_keys(h));
        cross = std::max(cross, bd.cross_coupling);
        coherent = std::max(coherent, s.parts->coherent.norm() / scale);
        const double cg = classical_gap(classical_block(s.matrix), g.p);
        try {
            const double cb = canonical_path_bound(classical_block(s.matrix), g.p);
            if (cb > cg * (1 + 1e-10)) {
                info("n=%lld canonical bound %.6e exceeds classical gap %.6e", static_cast<long long>(n), cb, cg);
                ok = false;
            }
        } catch (const Error &e) {
            if (e.kind() != ErrorKind::SparseChain) {
                throw;
            }
        }
        for (const auto &b : bd.blocks) {
            if (b.classical) {
                continue;
            }
            const double gb = gershgorin_bound(b.matrix);
            const double m = block_min_abs_eigenvalue(b.matrix);
            if (gb > m * (1 + 1e-10)) {
                info("n=%lld block %lld Gershgorin %.6e exceeds %.6e", static_cast<long long>(n),
                     static_cast<long long>(b.key), gb, m);
                ok = false;
            }
        }
    }
    info("n=3..16: cross-block coupling %.2e, coherent part %.2e (relative to L)", cross, coherent);
    return ok && cross <= 1e-12 && coherent <= 1e-12;
}

bool mixing_case(const std::string &label, const Hamiltonian &h, const JumpSet &js, const FilterParams &fp,
                 bool random, bool report_only) {
    const GibbsState g = gibbs_state(h, fp.beta);
    const Superoperator s = build(h, js, fp);
    MixingOptions mo;
    mo.assert_bound = false;
    const auto starts = random ? default_starts(h.dim(), 77, 5) : default_starts(h.dim(), 0, 0);
    const MixingEstimate e = simulate_mixing(s.matrix, g, 0.01, starts, mo);
    if (random) {
        info("%s sigma %.3g with random starts: t_measured %.4f, t_bound %.4f, t_bound_epsilon %.4f", label.c_str(),
             fp.sigma_E, e.t_measured, e.t_bound, e.t_bound_epsilon);
    } else {
        info("%s sigma %.3g energy starts: t_measured %.4f, t_bound %.4f%s", label.c_str(), fp.sigma_E, e.t_measured,
             e.t_bound, report_only ? " (not graded)" : "");
    }
    return e.reached && e.t_measured <= e.t_bound;
}

bool criterion8() {
    const double beta = 1.0;
    const FilterParams fp{beta, 1.0 / beta};
    bool ok = mixing_case("cycle n=8", make_cycle(8), graph_local(8), fp, false, false);
    ok = mixing_case("hypercube d=3", make_hypercube(3), hypercube_z(3), fp, false, false) && ok;
    const FilterParams narrow{beta, 0.25};
    mixing_case("cycle n=8", make_cycle(8), graph_local(8), narrow, false, true);
    mixing_case("hypercube d=3", make_hypercube(3), hypercube_z(3), narrow, false, true);
    mixing_case("cycle n=8", make_cycle(8), graph_local(8), fp, true, true);
    return ok;
}

bool criterion9() {
    const Hamiltonian h = make_random_regular(16, 4, 9);
    const FilterParams fp{1.0 / h.norm(), 0.25};
    const ComplexMatrix avg = build_average(h, fp).matrix;
    BuildOptions bo;
    bo.check = false;
    std::vector<double> ms, devs;
    for (std::int64_t m : {8, 32, 128, 512}) {
        std::vector<double> d;
        for (std::uint64_t trial = 0; trial < 20; ++trial) {
            const JumpSet js = haar_design(16, m, derive_seed(derive_seed(909, static_cast<std::uint64_t>(m)), trial));
            d.push_back((build(h, js, fp, bo).matrix - avg).norm());
        }
        ms.push_back(static_cast<double>(m));
        devs.push_back(median(d));
        info("M=%lld median Frobenius deviation %.4e", static_cast<long long>(m), devs.back());
    }
    const SlopeFit f = fit_slope(ms, devs);
    info("slope %.4f (target -0.5 +/- 0.15)", f.slope);
    return std::abs(f.slope + 0.5) <= 0.15;
}

bool criterion10() {
    const SpectralProfile p = spectral_profile(make_hypercube(8), 1.0, 2.0);
    info("hypercube d=8: delta = %lld/256", static_cast<long long>(p.count));
    bool ok = p.delta == 9.0 / 256.0;
    for (std::int64_t n : {32, 64, 128}) {
        const std::int64_t d = default_regular_degree(n);
        const double lo = -2.0 * std::sqrt(static_cast<double>(d - 1));
        double frac = 0.0;
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            frac += eigenvalue_fraction(make_random_regular(n, d, seed), lo, lo + 1.0) / 20.0;
        }
        const double mass = semicircle_mass(d, lo, lo + 1.0);
        info("n=%lld d=%lld low-edge fraction %.4f, semicircle mass %.4f, ratio %.3f", static_cast<long long>(n),
             static_cast<long long>(d), frac, mass, frac / mass);
        ok = ok && frac / mass >= 1.0 / 3.0 && frac / mass <= 3.0;
    }
    int bounded = 0;
    double worst = 0.0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const double norm = make_pauli_string(7, 2000, seed).norm();
        worst = std::max(worst, norm);
        bounded += norm <= 4.0;
    }
    info("Pauli n0=7, 2000 terms: norm <= 4 on %d/10 seeds (largest %.4f)", bounded, worst);
    return ok && bounded >= 9;
}

struct Criterion {
    int id;
    double budget_s;
    std::function<bool()> run;
};

} // namespace

int main() {
    const std::vector<Criterion> all{
        {1, 120, criterion1},  {2, 180, criterion2}, {3, 600, criterion3}, {4, 600, criterion4},
        {5, 300, criterion5},  {6, 60, criterion6},  {7, 120, criterion7}, {8, 120, criterion8},
        {9, 600, criterion9},  {10, 600, criterion10}};
    int failed = 0;
    for (const auto &c : all) {
        const auto t0 = std::chrono::steady_clock::now();
        bool ok = false;
        try {
            ok = c.run();
        } catch (const std::exception &e) {
            info("error: %s", e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_time = secs <= c.budget_s;
        if (!in_time) {
            info("runtime %.1f s exceeds %.0f s", secs, c.budget_s);
        }
        const bool pass = ok && in_time;
        failed += !pass;
        std::printf("criterion %d: %s (%.1f s)\n", c.id, pass ? "PASS" : "FAIL", secs);
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(all.size()) - failed, all.size());
    return failed == 0 ? 0 : 1;
}
