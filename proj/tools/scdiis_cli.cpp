/*
 * Copyright 2026 The scdiis Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Command-line driver over the libscdiis C API.

#include <scdiis/scdiis.h>

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace {

namespace fs = std::filesystem;

struct Failure {
    int exit_code;
    std::string message;
};

int exit_code_for(scdiis_status s) {
    switch (s) {
    case SCDIIS_OK: return 0;
    case SCDIIS_INVALID_ARGUMENT:
    case SCDIIS_PARSE_ERROR:
    case SCDIIS_IO_ERROR: return 1;
    default: return 2;
    }
}

void check(scdiis_status s, const std::string& context) {
    if (s == SCDIIS_OK) return;
    throw Failure{exit_code_for(s),
                  context + ": " + scdiis_status_name(s) + ": " + scdiis_last_error()};
}

template <class T, void (*Free)(T*)>
struct Deleter {
    void operator()(T* p) const { Free(p); }
};
template <class T, void (*Free)(T*)>
using Handle = std::unique_ptr<T, Deleter<T, Free>>;

using ConfigH = Handle<scdiis_config, scdiis_config_free>;
using GeometryH = Handle<scdiis_geometry, scdiis_geometry_free>;
using SolutionH = Handle<scdiis_solution, scdiis_solution_free>;
using DatasetH = Handle<scdiis_dataset, scdiis_dataset_free>;
using KernelH = Handle<scdiis_kernel, scdiis_kernel_free>;
using PredictorH = Handle<scdiis_predictor, scdiis_predictor_free>;
using ReportsH = Handle<scdiis_reports, scdiis_reports_free>;
using CorrelationH = Handle<scdiis_correlation, scdiis_correlation_free>;
using TrajectoryH = Handle<scdiis_trajectory, scdiis_trajectory_free>;

struct Globals {
    std::string config_path;
    std::optional<std::string> seed;
    std::optional<std::string> norm;
    std::optional<std::string> jobs;
    std::string out = "out";
    std::vector<std::string> sets;
};

// subcommand flag -> config key, applied when given
struct Overrides {
    std::vector<std::pair<std::string, std::optional<std::string>*>> bound;

    void bind(CLI::App* app, const std::string& flag, const std::string& key,
              const std::string& help) {
        auto* slot = new std::optional<std::string>();
        storage.emplace_back(slot);
        app->add_option(flag, *slot, help + " (" + key + ")");
        bound.emplace_back(key, slot);
    }
    std::vector<std::unique_ptr<std::optional<std::string>>> storage;
};

std::string read_config_value(const scdiis_config* cfg, const std::string& key) {
    std::size_t needed = 0;
    check(scdiis_config_get(cfg, key.c_str(), nullptr, 0, &needed), "config");
    std::string buf(needed, '\0');
    check(scdiis_config_get(cfg, key.c_str(), buf.data(), buf.size(), &needed), "config");
    buf.resize(needed - 1);
    return buf;
}

ConfigH build_config(const Globals& g, const Overrides& o) {
    scdiis_config* raw = nullptr;
    if (g.config_path.empty())
        check(scdiis_config_new(&raw), "config");
    else
        check(scdiis_config_load(g.config_path.c_str(), &raw), "config " + g.config_path);
    ConfigH cfg(raw);
    for (const std::string& kv : g.sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos)
            throw Failure{1, "--set expects key=value, got '" + kv + "'"};
        check(scdiis_config_set(cfg.get(), kv.substr(0, eq).c_str(), kv.substr(eq + 1).c_str()),
              "--set " + kv);
    }
    for (const auto& [key, slot] : o.bound)
        if (*slot) check(scdiis_config_set(cfg.get(), key.c_str(), (*slot)->c_str()), "--" + key);
    if (g.seed) check(scdiis_config_set(cfg.get(), "seed", g.seed->c_str()), "--seed");
    if (g.norm) check(scdiis_config_set(cfg.get(), "norm", g.norm->c_str()), "--norm");
    if (g.jobs) check(scdiis_config_set(cfg.get(), "jobs", g.jobs->c_str()), "--jobs");
    return cfg;
}

fs::path prepare_out(const Globals& g, const scdiis_config* cfg) {
    std::error_code ec;
    fs::create_directories(g.out, ec);
    if (ec) throw Failure{1, "cannot create output directory " + g.out + ": " + ec.message()};
    const fs::path path = fs::path(g.out) / "config.txt";
    check(scdiis_config_write(cfg, path.string().c_str()), "config.txt");
    return fs::path(g.out);
}

GeometryH load_geometry(const std::string& path) {
    scdiis_geometry* raw = nullptr;
    check(scdiis_geometry_read_xyz(path.c_str(), &raw), "geometry " + path);
    return GeometryH(raw);
}

DatasetH load_dataset(const std::string& dir) {
    scdiis_dataset* raw = nullptr;
    check(scdiis_dataset_load(dir.c_str(), &raw), "dataset " + dir);
    return DatasetH(raw);
}

KernelH fit_kernel(const scdiis_config* cfg, const scdiis_dataset* train) {
    scdiis_kernel* raw = nullptr;
    check(scdiis_kernel_fit(cfg, train, &raw), "kernel fit");
    return KernelH(raw);
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    f << text;
    if (!f) throw Failure{1, "cannot write " + path.string()};
}

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// ---- subcommands -------------------------------------------------------------

struct ScfArgs {
    std::string geometry;
};

int run_scf(const Globals& g, const Overrides& o, const ScfArgs& a) {
    ConfigH cfg = build_config(g, o);
    GeometryH geom = load_geometry(a.geometry);
    const fs::path out = prepare_out(g, cfg.get());
    scdiis_solution* raw = nullptr;
    const scdiis_status s = scdiis_scf_solve(cfg.get(), geom.get(), &raw);
    const std::string message = scdiis_last_error();
    SolutionH sol(raw);
    if (sol) check(scdiis_solution_write(sol.get(), out.string().c_str()), "writing SCF outputs");
    check(s == SCDIIS_NO_CONVERGENCE ? SCDIIS_OK : s, "scf");
    std::printf("converged=%d iterations=%d e_total=%s gap=%s strict_diis=%s\n",
                scdiis_solution_converged(sol.get()), scdiis_solution_iterations(sol.get()),
                num(scdiis_solution_e_total(sol.get())).c_str(),
                num(scdiis_solution_gap(sol.get())).c_str(),
                num(scdiis_solution_strict_diis(sol.get())).c_str());
    if (s == SCDIIS_NO_CONVERGENCE) throw Failure{2, "scf: NoConvergence: " + message};
    return 0;
}

struct GenArgs {
    std::string geometry;
};

int run_gen(const Globals& g, const Overrides& o, const GenArgs& a) {
    ConfigH cfg = build_config(g, o);
    GeometryH geom = load_geometry(a.geometry);
    const fs::path out = prepare_out(g, cfg.get());
    const std::string log = (out / "gen.log").string();
    scdiis_dataset* raw = nullptr;
    check(scdiis_dataset_generate(cfg.get(), geom.get(), log.c_str(), &raw), "gen");
    DatasetH ds(raw);
    check(scdiis_dataset_save(ds.get(), (out / "dataset").string().c_str()), "saving dataset");
    std::printf("entries=%d dataset=%s\n", scdiis_dataset_size(ds.get()),
                (out / "dataset").string().c_str());
    return 0;
}

struct ValidateArgs {
    std::string dataset;
    std::string source = "oracle-noise";
    std::string train;
    std::string predictions;
};

int run_validate(const Globals& g, const Overrides& o, const ValidateArgs& a) {
    ConfigH cfg = build_config(g, o);
    DatasetH ds = load_dataset(a.dataset);
    const fs::path out = prepare_out(g, cfg.get());
    scdiis_reports* raw = nullptr;
    if (a.source == "oracle-noise") {
        check(scdiis_validate_oracle(cfg.get(), ds.get(), &raw), "validate");
    } else if (a.source == "exact" || a.source == "kernel") {
        scdiis_predictor* praw = nullptr;
        KernelH kernel;
        DatasetH train;
        if (a.source == "exact") {
            check(scdiis_predictor_exact(cfg.get(), &praw), "predictor");
        } else {
            if (a.train.empty()) throw Failure{1, "validate --source kernel needs --train DIR"};
            train = load_dataset(a.train);
            kernel = fit_kernel(cfg.get(), train.get());
            check(scdiis_predictor_kernel(kernel.get(), &praw), "predictor");
        }
        PredictorH pred(praw);
        check(scdiis_validate_predictor(cfg.get(), ds.get(), pred.get(), &raw), "validate");
    } else if (a.source == "external-file" || a.source == "external") {
        if (a.predictions.empty())
            throw Failure{1, "validate --source external needs --predictions DIR"};
        check(scdiis_validate_external(cfg.get(), ds.get(), a.predictions.c_str(), &raw), "validate");
    } else {
        throw Failure{1, "unknown --source '" + a.source + "'"};
    }
    ReportsH reports(raw);
    check(scdiis_reports_write_csv(reports.get(), (out / "reports.csv").string().c_str()),
          "writing reports");
    std::printf("rows=%d reports=%s\n", scdiis_reports_count(reports.get()),
                (out / "reports.csv").string().c_str());
    return 0;
}

struct StatsArgs {
    std::string reports;
    std::string condition = "self_diis";
    std::string targets = "strict_diis,mae,d_e_total,d_gap";
};

int run_stats(const Globals& g, const Overrides& o, const StatsArgs& a) {
    ConfigH cfg = build_config(g, o);
    scdiis_reports* rraw = nullptr;
    check(scdiis_reports_read_csv(a.reports.c_str(), &rraw), "reports " + a.reports);
    ReportsH reports(rraw);
    const fs::path out = prepare_out(g, cfg.get());
    scdiis_correlation* craw = nullptr;
    check(scdiis_correlation_run(cfg.get(), reports.get(), a.condition.c_str(), a.targets.c_str(), &craw),
          "stats");
    CorrelationH corr(craw);
    check(scdiis_correlation_write(corr.get(), out.string().c_str()), "writing stats");
    for (int t = 0; t < scdiis_correlation_n_targets(corr.get()); ++t) {
        double r2_mean = 0, r2_std = 0;
        check(scdiis_correlation_fit(corr.get(), t, 0, nullptr, nullptr, &r2_mean), "stats");
        check(scdiis_correlation_fit(corr.get(), t, 1, nullptr, nullptr, &r2_std), "stats");
        std::printf("target %d: r2_mean=%.6f r2_std=%.6f\n", t, r2_mean, r2_std);
    }
    return 0;
}

struct GradArgs {
    std::string geometry;
    std::string source = "oracle-noise";
    std::string train;
};

PredictorH make_predictor(const scdiis_config* cfg, const std::string& source, const std::string& train_dir,
                          DatasetH& train, KernelH& kernel) {
    scdiis_predictor* raw = nullptr;
    if (source == "exact") {
        check(scdiis_predictor_exact(cfg, &raw), "predictor");
    } else if (source == "oracle-noise") {
        check(scdiis_predictor_oracle(cfg, &raw), "predictor");
    } else if (source == "kernel") {
        if (train_dir.empty()) throw Failure{1, "--source kernel needs --train DIR"};
        train = load_dataset(train_dir);
        kernel = fit_kernel(cfg, train.get());
        check(scdiis_predictor_kernel(kernel.get(), &raw), "predictor");
    } else {
        throw Failure{1, "unknown --source '" + source + "' (exact|oracle-noise|kernel)"};
    }
    return PredictorH(raw);
}

int run_grad(const Globals& g, const Overrides& o, const GradArgs& a) {
    ConfigH cfg = build_config(g, o);
    GeometryH geom = load_geometry(a.geometry);
    const fs::path out = prepare_out(g, cfg.get());
    DatasetH train;
    KernelH kernel;
    PredictorH pred = make_predictor(cfg.get(), a.source, a.train, train, kernel);
    const int n = scdiis_geometry_n_atoms(geom.get());
    std::vector<double> grad(3 * static_cast<std::size_t>(n));
    check(scdiis_self_diis_gradient(cfg.get(), geom.get(), pred.get(), grad.data()), "grad");
    std::string csv = "atom,species,dx,dy,dz\n";
    for (int i = 0; i < n; ++i)
        csv += std::to_string(i) + "," + scdiis_geometry_species(geom.get(), i) + "," +
               num(grad[3 * i]) + "," + num(grad[3 * i + 1]) + "," + num(grad[3 * i + 2]) + "\n";
    write_file(out / "grad.csv", csv);
    std::printf("atoms=%d grad=%s\n", n, (out / "grad.csv").string().c_str());
    return 0;
}

struct MdArgs {
    std::string geometry;
    std::string train;
};

int run_md(const Globals& g, const Overrides& o, const MdArgs& a) {
    ConfigH cfg = build_config(g, o);
    GeometryH geom = load_geometry(a.geometry);
    const std::string mode = read_config_value(cfg.get(), "md.mode");
    DatasetH train;
    KernelH kernel;
    PredictorH pred;
    double threshold = 0.0;
    if (mode != "exact") {
        if (a.train.empty()) throw Failure{1, "md --mode " + mode + " needs --train DIR"};
        pred = make_predictor(cfg.get(), "kernel", a.train, train, kernel);
        if (read_config_value(cfg.get(), "md.threshold") == "auto")
            check(scdiis_kernel_loo_threshold(cfg.get(), kernel.get(), train.get(), &threshold),
                  "threshold");
    }
    const fs::path out = prepare_out(g, cfg.get());
    scdiis_trajectory* raw = nullptr;
    const scdiis_status s = scdiis_md_run(cfg.get(), geom.get(), pred.get(), threshold, &raw);
    const std::string message = scdiis_last_error();
    TrajectoryH traj(raw);
    if (traj) check(scdiis_trajectory_write(traj.get(), out.string().c_str()), "writing trajectory");
    std::printf("frames=%d diverged=%d threshold=%s\n", scdiis_trajectory_n_frames(traj.get()),
                scdiis_trajectory_diverged(traj.get()), num(scdiis_trajectory_threshold(traj.get())).c_str());
    if (s != SCDIIS_OK)
        throw Failure{exit_code_for(s), std::string("md: ") + scdiis_status_name(s) + ": " + message};
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Self-consistency checks for predicted Hamiltonian and density matrices"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_version_flag("--version", scdiis_version());

    Globals g;
    app.add_option("--config", g.config_path, "key = value configuration file")->check(CLI::ExistingFile);
    app.add_option("--seed", g.seed, "global random seed");
    app.add_option("--norm", g.norm, "error norm: frobenius or mae");
    app.add_option("--jobs", g.jobs, "worker threads (results do not depend on it)");
    app.add_option("--out", g.out, "output directory")->capture_default_str();
    app.add_option("--set", g.sets, "configuration override key=value (repeatable)");

    Overrides o;

    ScfArgs scf;
    auto* c_scf = app.add_subcommand("scf", "converge one geometry; writes H/D/S.scvm, solution.txt, scf_trace.csv");
    c_scf->add_option("--geometry", scf.geometry, "xyz file")->required();
    o.bind(c_scf, "--max-iter", "scf.max_iter", "iteration limit");
    o.bind(c_scf, "--tol", "scf.tol", "convergence threshold");
    o.bind(c_scf, "--diis", "scf.diis", "true or false");

    GenArgs gen;
    auto* c_gen = app.add_subcommand("gen", "generate a labelled dataset into OUT/dataset");
    c_gen->add_option("--geometry", gen.geometry, "seed xyz file")->required();
    o.bind(c_gen, "--n", "gen.n", "number of entries");
    o.bind(c_gen, "--mode", "gen.mode", "random_perturb or md_sample");
    o.bind(c_gen, "--amplitude", "gen.amplitude", "displacement bound, A");
    o.bind(c_gen, "--temperature", "gen.temperature", "sampling temperature, K");
    o.bind(c_gen, "--equilibration", "gen.equilibration", "discarded MD steps");
    o.bind(c_gen, "--stride", "gen.stride", "MD steps between frames");

    ValidateArgs val;
    auto* c_val = app.add_subcommand("validate", "DIIS error report for a predictor over a dataset; writes reports.csv");
    c_val->add_option("--dataset", val.dataset, "dataset directory")->required();
    c_val->add_option("--source", val.source, "exact, oracle-noise, kernel or external")->capture_default_str();
    c_val->add_option("--train", val.train, "training dataset for --source kernel");
    c_val->add_option("--predictions", val.predictions, "directory of <entry>/H.scvm, D.scvm");
    o.bind(c_val, "--sigma", "validate.sigma", "noise amplitude when n-sigma is 1");
    o.bind(c_val, "--sigma-min", "validate.sigma_min", "smallest swept amplitude");
    o.bind(c_val, "--sigma-max", "validate.sigma_max", "largest swept amplitude");
    o.bind(c_val, "--n-sigma", "validate.n_sigma", "number of log-spaced amplitudes");
    o.bind(c_val, "--samples-per-sigma", "validate.samples_per_sigma", "0 = one per entry");
    o.bind(c_val, "--noise-mode", "surrogate.noise_mode", "independent or shared");

    StatsArgs st;
    auto* c_st = app.add_subcommand("stats", "binned correlation of report columns; writes summary/bins/plot CSVs");
    c_st->add_option("--reports", st.reports, "reports.csv from validate")->required();
    c_st->add_option("--condition", st.condition, "self_diis or strict_diis")->capture_default_str();
    c_st->add_option("--targets", st.targets, "comma-separated target columns")->capture_default_str();
    o.bind(c_st, "--bins", "stats.n_bins", "number of bins");
    o.bind(c_st, "--scheme", "stats.scheme", "equal_count or equal_width");
    o.bind(c_st, "--min-count", "stats.min_count", "smallest bin kept in the fits");
    o.bind(c_st, "--raw-fit", "stats.fit_raw_points", "fit the mean line on raw records");

    GradArgs gr;
    auto* c_gr = app.add_subcommand("grad", "self-DIIS gradient with respect to atom positions; writes grad.csv");
    c_gr->add_option("--geometry", gr.geometry, "xyz file")->required();
    c_gr->add_option("--source", gr.source, "exact, oracle-noise or kernel")->capture_default_str();
    c_gr->add_option("--train", gr.train, "training dataset for --source kernel");
    o.bind(c_gr, "--sigma", "validate.sigma", "oracle noise amplitude");
    o.bind(c_gr, "--step", "grad.step", "finite-difference step, A");

    MdArgs md;
    auto* c_md = app.add_subcommand("md", "NVT dynamics; writes traj.xyz, md.csv, md_meta.txt");
    c_md->add_option("--geometry", md.geometry, "initial xyz file")->required();
    c_md->add_option("--train", md.train, "training dataset for the kernel surrogate");
    o.bind(c_md, "--mode", "md.mode", "exact, surrogate_only or predictor_corrector");
    o.bind(c_md, "--steps", "md.n_steps", "number of steps");
    o.bind(c_md, "--dt", "md.dt", "time step, fs");
    o.bind(c_md, "--t-target", "md.t_target", "thermostat temperature, K");
    o.bind(c_md, "--tau", "md.tau", "Berendsen time constant, fs (inf disables)");
    o.bind(c_md, "--threshold", "md.threshold", "self-DIIS gate or auto");
    o.bind(c_md, "--frozen", "md.frozen", "orthogonal or atomic");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (c_scf->parsed()) return run_scf(g, o, scf);
        if (c_gen->parsed()) return run_gen(g, o, gen);
        if (c_val->parsed()) return run_validate(g, o, val);
        if (c_st->parsed()) return run_stats(g, o, st);
        if (c_gr->parsed()) return run_grad(g, o, gr);
        if (c_md->parsed()) return run_md(g, o, md);
    } catch (const Failure& f) {
        std::fprintf(stderr, "scdiis: %s\n", f.message.c_str());
        return f.exit_code;
    }
    return 1;
}
