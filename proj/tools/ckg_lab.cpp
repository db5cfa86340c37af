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


// Command-line front end: instance generation, builds, gaps, mixing,
// verification, sweeps, fits and plots.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "ckg/experiments.hpp"
#include "ckg/gap.hpp"
#include "ckg/lindblad.hpp"
#include "ckg/mmio.hpp"
#include "ckg/plot.hpp"

namespace {

using ckg::json;

struct InstanceArgs {
    std::string ham_file;
    std::string family = "cycle";
    std::int64_t n = 8;
    std::int64_t d = 0;
    int n0 = 0;
    std::int64_t terms = 0;
    std::uint64_t seed = 1;
    std::string jumps_file;
    std::string jump_kind = "graph_local";
    std::int64_t m = 0;
    std::uint64_t jump_seed = 2;
    double beta = 1.0;
    double sigma = 0.25;
    std::string filter = "gaussian";
    unsigned threads = 1;

    void add_hamiltonian(CLI::App *app) {
        app->add_option("--ham", ham_file, "Hamiltonian Matrix Market file");
        app->add_option("--family", family, "cycle, path, hypercube, regular or pauli_string");
        app->add_option("--n", n, "vertex count (cycle, path, regular)");
        app->add_option("--d", d, "hypercube dimension or regular degree");
        app->add_option("--n0", n0, "qubits (pauli_string)");
        app->add_option("--terms", terms, "Pauli term count (pauli_string)");
        app->add_option("--seed", seed, "generator seed");
    }

    void add_jumps(CLI::App *app) {
        app->add_option("--jumps", jumps_file, "jump set Matrix Market file");
        app->add_option("--jump-kind", jump_kind, "graph_local, haar_design, pauli_design or hypercube_z");
        app->add_option("--M", m, "jump count (haar_design, pauli_design)");
        app->add_option("--jump-seed", jump_seed, "jump sampling seed");
    }

    void add_filter(CLI::App *app) {
        app->add_option("--beta", beta, "inverse temperature");
        app->add_option("--sigma", sigma, "energy resolution sigma_E");
        app->add_option("--filter", filter, "gaussian or davies");
        app->add_option("--threads", threads, "assembly threads");
    }

    ckg::InstanceSpec spec() const {
        ckg::InstanceSpec s;
        s.family = ckg::family_from_string(family);
        s.n = n;
        s.d = d;
        s.n0 = n0;
        s.terms = terms;
        s.seed = seed;
        s.jump_kind = jump_kind;
        s.m = m;
        s.jump_seed = jump_seed;
        if (s.family == ckg::Family::regular && s.d == 0) {
            s.d = ckg::default_regular_degree(n);
        }
        return s;
    }

    ckg::Hamiltonian hamiltonian() const {
        return ham_file.empty() ? ckg::make_hamiltonian(spec()) : ckg::load_hamiltonian(ham_file);
    }

    ckg::JumpSet jumps(Eigen::Index dim) const {
        return jumps_file.empty() ? ckg::make_jumps(spec(), dim) : ckg::load_jumps(jumps_file);
    }

    ckg::FilterParams filter_params() const {
        ckg::FilterParams fp{beta, sigma, ckg::filter_mode_from_string(filter)};
        fp.check();
        return fp;
    }
};

void emit(const json &j, const std::string &out) {
    if (out.empty()) {
        std::cout << j.dump(2) << "\n";
        return;
    }
    std::ofstream f(out);
    if (!f) {
        ckg::fail(ckg::ErrorKind::IoError, "cannot write '" + out + "'");
    }
    f << j.dump(2) << "\n";
}

json opt_json(const std::optional<double> &v) { return v ? json(*v) : json(nullptr); }

json gap_json(const ckg::GapReport &r) {
    json j{{"gap", r.gap},
           {"method", r.method},
           {"db_residual", r.db_residual},
           {"zero_mode_overlap", r.zero_mode_overlap},
           {"degenerate_fixed_point", r.degenerate_fixed_point},
           {"null_multiplicity", r.null_multiplicity},
           {"max_eigenvalue", r.max_eigenvalue},
           {"spectral_radius", r.spectral_radius},
           {"classical_gap", opt_json(r.classical_gap)},
           {"dephasing_min", opt_json(r.dephasing_min)},
           {"canonical_bound", opt_json(r.canonical_bound)}};
    if (r.spectrum) {
        j["spectrum"] = *r.spectrum;
    }
    return j;
}

int run(int argc, char **argv) {
    CLI::App app{"ckg_lab: Lindbladian Gibbs-sampler experiments"};
    app.require_subcommand(1);
    InstanceArgs ia;
    std::string out;

    auto *gen_ham = app.add_subcommand("gen-ham", "generate a Hamiltonian and write it as Matrix Market");
    ia.add_hamiltonian(gen_ham);
    gen_ham->add_option("--out", out, "output .mtx")->required();

    int drop = -1;
    auto *gen_jumps = app.add_subcommand("gen-jumps", "generate a jump set and write it as Matrix Market");
    ia.add_hamiltonian(gen_jumps);
    ia.add_jumps(gen_jumps);
    gen_jumps->add_option("--drop", drop, "remove jump at this index (negative control)");
    gen_jumps->add_option("--out", out, "output .mtx")->required();

    std::string report;
    auto *build_cmd = app.add_subcommand("build", "assemble the superoperator");
    ia.add_hamiltonian(build_cmd);
    ia.add_jumps(build_cmd);
    ia.add_filter(build_cmd);
    build_cmd->add_option("--out", out, "output .mtx for L");
    build_cmd->add_option("--report", report, "JSON report path (default stdout)");

    bool average = false, full_spectrum = false;
    auto *gap_cmd = app.add_subcommand("gap", "spectral gap of the built or Haar-averaged Lindbladian");
    ia.add_hamiltonian(gap_cmd);
    ia.add_jumps(gap_cmd);
    ia.add_filter(gap_cmd);
    gap_cmd->add_flag("--average", average, "use the closed-form Haar average");
    gap_cmd->add_flag("--full-spectrum", full_spectrum, "include the symmetrized spectrum");
    gap_cmd->add_option("--out", out, "JSON output path");

    double epsilon = 0.01;
    int random_starts = 0;
    std::uint64_t start_seed = 7;
    auto *mix_cmd = app.add_subcommand("mix", "simulated mixing time against the gap bound");
    ia.add_hamiltonian(mix_cmd);
    ia.add_jumps(mix_cmd);
    ia.add_filter(mix_cmd);
    mix_cmd->add_option("--epsilon", epsilon, "trace-distance target");
    mix_cmd->add_option("--random-starts", random_starts, "Haar-random pure starts added to the energy basis");
    mix_cmd->add_option("--start-seed", start_seed, "seed for random starts");
    mix_cmd->add_option("--out", out, "JSON output path");

    auto *verify_cmd = app.add_subcommand("verify", "run every invariant check on one instance");
    ia.add_hamiltonian(verify_cmd);
    ia.add_jumps(verify_cmd);
    ia.add_filter(verify_cmd);
    verify_cmd->add_option("--out", out, "JSON output path");

    std::string config, out_dir = "results";
    std::vector<std::string> overrides;
    std::optional<unsigned> sweep_threads;
    std::optional<int> reps;
    std::optional<std::uint64_t> root_seed;
    bool no_timing = false;
    auto *sweep_cmd = app.add_subcommand("sweep", "run a scenario sweep");
    sweep_cmd->add_option("--config", config, "scenario TOML")->required();
    sweep_cmd->add_option("--set", overrides, "override section.key=value")->take_all();
    sweep_cmd->add_option("--out-dir", out_dir, "output directory");
    sweep_cmd->add_option("--threads", sweep_threads, "worker threads (default: hardware)");
    sweep_cmd->add_option("--reps", reps, "seeds per point");
    sweep_cmd->add_option("--root-seed", root_seed, "root seed");
    sweep_cmd->add_flag("--no-timing", no_timing, "leave wall_time_ms empty for byte-stable CSV");

    std::string csv, x_col = "n", y_col = "gap";
    bool no_aggregate = false;
    auto *fit_cmd = app.add_subcommand("fit", "log-log least-squares slope of a CSV column pair");
    fit_cmd->add_option("--csv", csv, "sweep CSV")->required();
    fit_cmd->add_option("--x", x_col, "x column");
    fit_cmd->add_option("--y", y_col, "y column");
    fit_cmd->add_flag("--no-aggregate", no_aggregate, "fit every row instead of per-x means");

    std::string title;
    bool ascii = false;
    auto *plot_cmd = app.add_subcommand("plot", "two-panel SVG of a sweep CSV");
    plot_cmd->add_option("--csv", csv, "sweep CSV")->required();
    plot_cmd->add_option("--out", out, "output .svg")->required();
    plot_cmd->add_option("--x", x_col, "x column");
    plot_cmd->add_option("--y", y_col, "y column");
    plot_cmd->add_option("--title", title, "plot title");
    plot_cmd->add_flag("--ascii", ascii, "print an ASCII log-log preview");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? ckg::kExitOk : ckg::kExitUsage;
    }

    if (*gen_ham) {
        const ckg::Hamiltonian h = ia.hamiltonian();
        ckg::save_hamiltonian(out, h);
        emit({{"instance", h.id()}, {"dim", h.dim()}, {"norm", h.norm()}, {"path", out}}, "");
    } else if (*gen_jumps) {
        const ckg::Hamiltonian h = ia.hamiltonian();
        ckg::JumpSet js = ia.jumps(h.dim());
        if (drop >= 0) {
            if (static_cast<std::size_t>(drop) >= js.size()) {
                ckg::fail(ckg::ErrorKind::BadParameter, "--drop index out of range");
            }
            js.jumps.erase(js.jumps.begin() + drop);
        }
        ckg::save_jumps(out, js);
        const ckg::JumpValidation v = ckg::validate(js);
        emit({{"jumps", js.descriptor()},
              {"dim", js.dim()},
              {"adjoint_closed", v.adjoint_closed},
              {"normalization_sum", v.normalization_sum},
              {"path", out}},
             "");
    } else if (*build_cmd) {
        const ckg::Hamiltonian h = ia.hamiltonian();
        ckg::BuildOptions bo;
        bo.threads = ia.threads;
        const ckg::Superoperator s = ckg::build(h, ia.jumps(h.dim()), ia.filter_params(), bo);
        if (!out.empty()) {
            ckg::write_market_file(out, s.matrix, false,
                                   {{"hamiltonian", s.provenance.hamiltonian}, {"jumps", s.provenance.jumps},
                                    {"builder", s.provenance.builder}});
        }
        const ckg::BuildResiduals &r = *s.residuals;
        emit({{"hamiltonian", s.provenance.hamiltonian},
              {"jumps", s.provenance.jumps},
              {"builder", s.provenance.builder},
              {"dim", s.matrix.rows()},
              {"norm", r.norm},
              {"db_residual", r.db},
              {"fixed_point", r.fixed_point / r.norm},
              {"trace", r.trace / r.norm},
              {"unitality", r.unitality / r.norm}},
             report);
    } else if (*gap_cmd) {
        const ckg::Hamiltonian h = ia.hamiltonian();
        const ckg::FilterParams fp = ia.filter_params();
        const ckg::GibbsState g = ckg::gibbs_state(h, fp.beta);
        ckg::GapReport r;
        if (average) {
            r = ckg::averaged_gap(ckg::build_average_structured(h, fp), g);
        } else {
            ckg::BuildOptions bo;
            bo.threads = ia.threads;
            ckg::GapOptions go;
            go.full_spectrum = full_spectrum;
            const ckg::Superoperator s = ckg::build(h, ia.jumps(h.dim()), fp, bo);
            r = ckg::spectral_gap(s, g, go);
            const ckg::RealMatrix cb = ckg::classical_block(s.matrix);
            r.classical_gap = ckg::classical_gap(cb, g.p);
            try {
                r.canonical_bound = ckg::canonical_path_bound(cb, g.p);
            } catch (const ckg::Error &e) {
                if (e.kind() != ckg::ErrorKind::SparseChain) {
                    throw;
                }
            }
        }
        json j = gap_json(r);
        j["instance"] = h.id();
        if (r.gap > 0.0) {
            const ckg::MixingBound mb = ckg::mixing_bound(r.gap, g);
            j["mixing_bound"] = mb.tight;
            j["mixing_bound_loose"] = mb.loose;
        }
        emit(j, out);
    } else if (*mix_cmd) {
        const ckg::Hamiltonian h = ia.hamiltonian();
        const ckg::FilterParams fp = ia.filter_params();
        ckg::BuildOptions bo;
        bo.threads = ia.threads;
        const ckg::Superoperator s = ckg::build(h, ia.jumps(h.dim()), fp, bo);
        ckg::MixingOptions mo;
        mo.assert_bound = false;
        mo.threads = ia.threads;
        const ckg::MixingEstimate m = ckg::simulate_mixing(
            s.matrix, ckg::gibbs_state(h, fp.beta), epsilon, ckg::default_starts(h.dim(), start_seed, random_starts), mo);
        emit({{"instance", h.id()},
              {"epsilon", m.epsilon},
              {"gap", m.gap},
              {"t_measured", m.t_measured},
              {"t_bound", m.t_bound},
              {"t_bound_epsilon", m.t_bound_epsilon},
              {"within_bound", m.t_measured <= m.t_bound},
              {"reached", m.reached},
              {"worst_start", m.worst_start},
              {"non_monotone_starts", m.non_monotone_starts}},
             out);
    } else if (*verify_cmd) {
        const ckg::Hamiltonian h = ia.hamiltonian();
        ckg::VerifyOptions vo;
        vo.threads = ia.threads;
        const ckg::VerifyReport r = ckg::verify_instance(h, ia.jumps(h.dim()), ia.filter_params(), vo);
        emit(r.to_json(), out);
        return r.ok() ? ckg::kExitOk : ckg::kExitInvariant;
    } else if (*sweep_cmd) {
        json j = ckg::load_toml(config);
        for (const auto &o : overrides) {
            ckg::apply_override(j, o);
        }
        ckg::SweepConfig cfg = ckg::sweep_config_from_json(j);
        if (sweep_threads) cfg.threads = *sweep_threads;
        if (reps) cfg.reps = *reps;
        if (root_seed) cfg.root_seed = *root_seed;
        if (no_timing) cfg.timing = false;
        cfg.validate();
        const std::vector<ckg::SweepRow> rows = ckg::run_sweep(cfg);
        const ckg::SweepOutputs paths = ckg::write_sweep_outputs(out_dir, cfg, rows);
        json s = ckg::sweep_summary(cfg, rows);
        s["csv"] = paths.csv.string();
        s["config"] = paths.config.string();
        emit(s, "");
    } else if (*fit_cmd) {
        const ckg::SlopeFit f = ckg::fit_slope(ckg::load_csv(csv), x_col, y_col, !no_aggregate);
        json j = f.to_json();
        j["x"] = x_col;
        j["y"] = y_col;
        emit(j, "");
    } else if (*plot_cmd) {
        const ckg::CsvTable t = ckg::load_csv(csv);
        ckg::PlotSpec spec;
        spec.x = x_col;
        spec.y = y_col;
        spec.title = title;
        const std::string svg = ckg::render_svg(t, spec);
        std::ofstream f(out, std::ios::binary);
        if (!f) {
            ckg::fail(ckg::ErrorKind::IoError, "cannot write '" + out + "'");
        }
        f << svg;
        if (ascii) {
            std::cout << ckg::render_ascii(t, spec);
        }
    }
    return ckg::kExitOk;
}

} // namespace

int main(int argc, char **argv) {
    try {
        return run(argc, argv);
    } catch (const ckg::Error &e) {
        std::cerr << "error: " << e.what() << "\n";
        return ckg::exit_code(e.kind());
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return ckg::kExitNumerical;
    }
}
