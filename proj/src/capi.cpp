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

#include "scdiis/scdiis.h"

#include <fmt/format.h>

#include <cstring>
#include <fstream>
#include <memory>
#include <new>
#include <string>

#include "scdiis/pipeline.hpp"
#include "scdiis/settings.hpp"
#include "scdiis/stats.hpp"
#include "scdiis/xyz.hpp"

using namespace scdiis;

struct scdiis_config {
    Config c;
};
struct scdiis_geometry {
    Geometry g;
};
struct scdiis_matrix {
    Matrix m;
};
struct scdiis_solution {
    ScfSolution s;
    std::vector<ScfTraceRow> trace;
};
struct scdiis_dataset {
    Dataset ds;
};
struct scdiis_kernel {
    std::shared_ptr<const KernelModel> m;
};
struct scdiis_predictor {
    std::unique_ptr<Predictor> p;
};
struct scdiis_reports {
    std::vector<ReportRow> rows;
};
struct scdiis_correlation {
    CorrelationReport r;
};
struct scdiis_trajectory {
    Trajectory t;
    Geometry g0;
    MdMode mode = MdMode::Exact;
};

namespace {

thread_local std::string g_last_error;

scdiis_status to_status(ErrorCode c) { return static_cast<scdiis_status>(static_cast<int>(c)); }

template <class F>
scdiis_status guarded(F&& f) {
    try {
        g_last_error.clear();
        return f();
    } catch (const Error& e) {
        g_last_error = e.what();
        return to_status(e.code());
    } catch (const std::bad_alloc&) {
        g_last_error = "out of memory";
        return SCDIIS_INTERNAL_ERROR;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return SCDIIS_INTERNAL_ERROR;
    }
}

void require(const void* p, const char* what) {
    if (p == nullptr) fail(ErrorCode::InvalidArgument, fmt::format("{} is NULL", what));
}

template <class T>
void clear_out(T** out) {
    require(out, "output pointer");
    *out = nullptr;
}

std::string solution_text(const ScfSolution& s) {
    std::string energies;
    for (Eigen::Index i = 0; i < s.orbitals.energies.size(); ++i)
        energies += (i ? " " : "") + format_double(s.orbitals.energies(i));
    return fmt::format("e_total = {}\ngap = {}\nstrict_diis = {}\niterations = {}\nconverged = {}\n"
                       "orbital_energies = {}\n",
                       format_double(s.e_total), format_double(s.gap), format_double(s.strict_diis),
                       s.iterations, s.converged ? "true" : "false", energies);
}

std::optional<double> report_field(const ReportRow& row, std::string_view f) {
    const DiisReport& r = row.report;
    if (f == "self_diis") return r.self_diis;
    if (f == "strict_diis") return r.strict_diis;
    if (f == "label_diis") return r.label_diis;
    if (f == "mixed_hd") return r.mixed_hd;
    if (f == "mixed_dh") return r.mixed_dh;
    if (f == "mae_h" || f == "mae") return r.mae_h;
    if (f == "mae_d") return r.mae_d;
    if (f == "d_e_total") return r.d_e_total;
    if (f == "d_gap") return r.d_gap;
    if (f == "sigma") return row.sigma;
    if (f == "entry") return row.entry;
    fail(ErrorCode::InvalidArgument, fmt::format("unknown report field '{}'", f));
}

} // namespace

extern "C" {

const char* scdiis_version(void) { return "0.1.0"; }

const char* scdiis_last_error(void) { return g_last_error.c_str(); }

const char* scdiis_status_name(int status) {
    if (status == SCDIIS_INTERNAL_ERROR) return "InternalError";
    if (status < 0 || status > static_cast<int>(ErrorCode::ParseError)) return "unknown";
    return error_code_name(static_cast<ErrorCode>(status)).data();
}

// ---- configuration --------------------------------------------------------

scdiis_status scdiis_config_new(scdiis_config** out) {
    return guarded([&] {
        clear_out(out);
        *out = new scdiis_config{Config::defaults()};
        return SCDIIS_OK;
    });
}

scdiis_status scdiis_config_load(const char* path, scdiis_config** out) {
    return guarded([&] {
        clear_out(out);
        require(path, "path");
        *out = new scdiis_config{Config::load(path)};
        return SCDIIS_OK;
    });
}

scdiis_status scdiis_config_set(scdiis_config* cfg, const char* key, const char* value) {
    return guarded([&] {
        require(cfg, "config");
        require(key, "key");
        require(value, "value");
        cfg->c.set(key, value);
        return SCDIIS_OK;
    });
}

scdiis_status scdiis_config_get(const scdiis_config* cfg, const char* key, char* buf, size_t cap,
                                size_t* needed) {
    return guarded([&] {
        require(cfg, "config");
        require(key, "key");
        const std::string& v = cfg->c.get(key);
        if (needed) *needed = v.size() + 1;
        if (cap > 0) {
            require(buf, "buffer");
            const std::size_t n = std::min(cap - 1, v.size());
            std::memcpy(buf, v.data(), n);
            buf[n] = '\0';
            if (n < v.size()) fail(ErrorCode::InvalidArgument, "buffer too small");
        }
        return SCDIIS_OK;
    });
}

scdiis_status scdiis_config_write(const scdiis_config* cfg, const char* path) {
    return guarded([&] {
        require(cfg, "config");
        require(path, "path");
        write_text_file(path, cfg->c.to_text());
        return SCDIIS_OK;
    });
}

void scdiis_config_free(scdiis_config* cfg) { delete cfg; }

// ---- geometry ---------------------------------------------------------------

scdiis_status scdiis_geometry_read_xyz(const char* path, scdiis_geometry** out) {
    return guarded([&] {
        clear_out(out);
        require(path, "path");
        *out = new scdiis_geometry{read_xyz(path)};
        return SCDIIS_OK;
    });
}

scdiis_status scdiis_geometry_create(int n_atoms, const char* const* species, const double* coords,
                                     int n_electrons, scdiis_geometry** out) {
    return guarded([&] {
        clear_out(out);
        if (n_atoms < 1) fail(ErrorCode::InvalidArgument, "n_atoms must be >= 1");
        require(species, "species");
        require(coords, "coords");
        Geometry g;
        g.n_electrons = n_electrons;
        for (int a = 0; a < n_atoms; ++a) {
            require(species[a], "species tag");
            g.species.emplace_back(species[a]);
            g.positions.emplace_back(coords[3 * a], coords[3 * a + 1], coords[3 * a + 2]);
        }
        g.validate();
        *out = new scdiis_geometry{std::move(g)};
        return SCDIIS_OK;
    });
}

int scdiis_geometry_n_atoms(const scdiis_geometry* g) { return g ? g->g.n_atoms() : 0; }

int scdiis_geometry_n_electrons(const scdiis_geometry* g) { return g ? g->g.n_electrons : 0; }

const char* scdiis_geometry_species(const scdiis_geometry* g, int atom) {
    if (!g || atom < 0 || atom >= g->g.n_atoms()) return nullptr;
    return g->g.species[atom].c_str();
}

scdiis_status scdiis_geometry_coordinates(const scdiis_geometry* g, double* out) {
    return guarded([&] {
        require(g, "geometry");
        require(out, "output");
        const Vector x = g->g.coordinates();
        std::copy(x.data(), x.data() + x.size(), out);
        return SCDIIS_OK;
    });
}

scdiis_status scdiis_geometry_write_xyz(const scdiis_geometry* g, const char* path) {
    return guarded([&] {
        require(g, "geometry");
        require(path, "path");
        write_xyz(path, g->g);
        return SCDIIS_OK;
    });
}

void scdiis_geometry_free(scdiis_geometry* g) { delete g; }

// ---- matrices ---------------------------------------------------------------

scdiis_status scdiis_matrix_create(int n, const double* data, scdiis_matrix** out) {
    return guarded([&] {
        clear_out(out);
        if (n < 0) fail(ErrorCode::InvalidArgument, "matrix dimension must be >= 0");
        if (n > 0) require(data, "data");
        Matrix m(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) m(i, j) = data[i * n + j];
        *out = new scdiis_matrix{std::move(m)};
        return SCDIIS_OK;
    });
}

scdiis_status scdiis_matrix_read(const char* path, scdiis_matrix** out) {
    return guarded([&] {
        clear_out(out);
        require(path, "path");
        *out = new scdiis_matrix{read_scvm(path)};
        return SCDIIS_OK;
    });
}

scdiis_status scdiis_matrix_write(const scdiis_matrix* m, const char* path) {
    return guarded([&] {
        require(m, "matrix");
        require(path, "path");
        write_scvm(path, m->m);
        return SCDIIS_OK;
    });
}

int scdiis_matrix_rows(const scdiis_matrix* m) { return m ? static_cast<int>(m->m.rows()) : 0; }

int scdiis_matrix_cols(const scdiis_matrix* m) { return m ? static_cast<int>(m->m.cols()) : 0; }

scdiis_status scdiis_matrix_data(const scdiis_matrix* m, double* out) {
    return guarded([&] {
        require(m, "matrix");
        require(out, "output");
        for (Eigen::Index i = 0; i < m->m.rows(); ++i)
            for (Eigen::Index j = 0; j < m->m.cols(); ++j) out[i * m->m.cols() + j] = m->m(i, j);
        return SCDIIS_OK;
    });
}

void scdiis_matrix_free(scdiis_matrix* m) { delete m; }

// ---- SCF --------------------------------------------------------------------

scdiis_status scdiis_scf_solve(const scdiis_config* cfg, const scdiis_geometry* g,
                               scdiis_solution** out) {
    return guarded([&] {
        clear_out(out);
        require(cfg, "config");
        require(g, "geometry");
        const ScfConfig sc = scf_config(cfg->c);
        ScfRun run = scf_run(g->g, model_params(cfg->c), sc);
        const bool ok = run.solution.converged;
        const double err = run.solution.strict_diis;
        *out = new scdiis_solution{std::move(run.solution), std::move(run.trace)};
        if (!ok) {
            g_last_error = fmt::format("SCF did not converge in {} iterations (best error {:.3e}, tol {:.1e})",
                                       sc.max_iter, err, sc.tol);
            return SCDIIS_NO_CONVERGENCE;
        }
        return SCDIIS_OK;
    });
}

double scdiis_solution_e_total(const scdiis_solution* s) { return s ? s->s.e_total : 0.0; }
double scdiis_solution_gap(const scdiis_solution* s) { return s ? s->s.gap : 0.0; }
double scdiis_solution_strict_diis(const scdiis_solution* s) { return s ? s->s.strict_diis : 0.0; }
int scdiis_solution_iterations(const scdiis_solution* s) { return s ? s->s.iterations : 0; }
int scdiis_solution_converged(const scdiis_solution* s) { return s && s->s.converged ? 1 : 0; }

scdiis_status scdiis_solution_matrix(const scdiis_solution* s, char which, scdiis_matrix** out) {
    return guarded([&] {
        clear_out(out);
        require(s, "solution");
        switch (which) {
        case 'H': *out = new scdiis_matrix{s->s.hamiltonian}; break;
        case 'D': *out = new scdiis_matrix{s->s.density}; break;
        case 'S': *out = new scdiis_matrix{s->s.overlap}; break;
        default: fail(ErrorCode::InvalidArgument, fmt::format("unknown matrix '{}' (H|D|S)", which));
        }
        return SCDIIS_OK;
    });
}

scdiis_status scdiis_solution_write(const scdiis_solution* s, const char* dir) {
    return guarded([&] {
        require(s, "solution");
        require(dir, "dir");
        const std::filesystem::path d(dir);
        std::filesystem::create_directories(d);
        write_scvm(d / "H.scvm", s->s.hamiltonian);
        write_scvm(d / "D.scvm", s->s.density);
        write_scvm(d / "S.scvm", s->s.overlap);
        write_text_file(d / "solution.txt", solution_text(s->s));
        std::string trace = "iteration,diis_error,e_total\n";
        for (const ScfTraceRow& r : s->trace)
            trace += fmt::format("{},{},{}\n", r.iteration, format_double(r.diis_error),
                                 format_double(r.e_total));
        write_text_file(d / "scf_trace.csv", trace);
        return SCDIIS_OK;
    });
}

void scdiis_solution_free(scdiis_solution* s) { delete s; }

// ---- datasets ---------------------------------------------------------------

scdiis_status scdiis_dataset_generate(const scdiis_config* cfg, const scdiis_geometry* seed_geometry,
                                      const char* log_path, scdiis_dataset** out) {
    return guarded([&] {
        clear_out(out);
        require(cfg, "config");
        require(seed_geometry, "seed geometry");
        std::vector<std::string> log;
        auto write_log = [&] {
            if (!log_path) return;
            std::string text;
            for (const auto& l : log) text += l + "\n";
            write_text_file(log_path, text);
        };
        try {
            Dataset ds = generate_dataset(seed_geometry->g, model_params(cfg->c), scf_config(cfg->c),
                                          gen_config(cfg->c), &log);
            write_log();
            *out = new scdiis_dataset{std::move(ds)};
        } catch (...) {
            write_log();
            throw;
        }
        return SCDIIS_OK;
    });
}

scdiis_status scdiis_dataset_save(const scdiis_dataset* ds, const char* dir) {
    return guarded([&] {
        require(ds, "dataset");
        require(dir, "dir");
        save_dataset(ds->ds, dir);
        return SCDIIS_OK;
    });
}

scdiis_status scdiis_dataset_load(const char* dir, scdiis_dataset** out) {
    return guarded([&] {
        clear_out(out);
        require(dir, "dir");
        *out = new scdiis_dataset{load_dataset(dir)};
        return SCDIIS_OK;
    });
}

int scdiis_dataset_size(const scdiis_dataset* ds) { return ds ? ds->ds.size() : 0; }

scdiis_status scdiis_dataset_geometry(const scdiis_dataset* ds, int index, scdiis_geometry** out) {
    return guarded([&] {
        clear_out(out);
        require(ds, "dataset");
        if (index < 0 || index >= ds->ds.size())
            fail(ErrorCode::InvalidArgument, fmt::format("dataset index {} out of range", index));
        *out = new scdiis_geometry{ds->ds.entries[index].geometry};
        return SCDIIS_OK;
    });
}

void scdiis_dataset_free(scdiis_dataset* ds) { delete ds; }

// ---- surrogates ---------------------------------------------------------------

scdiis_status scdiis_kernel_fit(const scdiis_config* cfg, const scdiis_dataset* ds, scdiis_kernel** out) {
    return guarded([&] {
        clear_out(out);
        require(cfg, "config");
        require(ds, "dataset");
        auto m = std::make_shared<const KernelModel>(
            kernel_fit(ds->ds, kernel_bandwidth(cfg->c), cfg->c.get_int("surrogate.k_neighbors")));
        *out = new scdiis_kernel{std::move(m)};
        return SCDIIS_OK;
    });
}

double scdiis_kernel_bandwidth(const scdiis_kernel* k) { return k ? k->m->bandwidth : 0.0; }

scdiis_status scdiis_kernel_loo_threshold(const scdiis_config* cfg, const scdiis_kernel* k,
                                          const scdiis_dataset* ds, double* out) {
    return guarded([&] {
        require(cfg, "config");
        require(k, "kernel");
        require(ds, "dataset");
        require(out, "output");
        const auto loo = loo_self_diis(*k->m, ds->ds, model_params(cfg->c), config_norm(cfg->c));
        *out = percentile(loo, cfg->c.get_double("surrogate.threshold_percentile"));
        return SCDIIS_OK;
    });
}

void scdiis_kernel_free(scdiis_kernel* k) { delete k; }

scdiis_status scdiis_predictor_exact(const scdiis_config* cfg, scdiis_predictor** out) {
    return guarded([&] {
        clear_out(out);
        require(cfg, "config");
        *out = new scdiis_predictor{
            std::make_unique<ExactPredictor>(model_params(cfg->c), scf_config(cfg->c))};
        return SCDIIS_OK;
    });
}

scdiis_status scdiis_predictor_oracle(const scdiis_config* cfg, scdiis_predictor** out) {
    return guarded([&] {
        clear_out(out);
        require(cfg, "config");
        const double sigma = cfg->c.get_double("validate.sigma");
        *out = new scdiis_predictor{std::make_unique<OracleNoisePredictor>(
            model_params(cfg->c), scf_config(cfg->c), sigma, sigma,
            derive_seed(cfg->c.get_u64("seed"), "oracle-predictor"),
            parse_noise_mode(cfg->c.get("surrogate.noise_mode")))};
        return SCDIIS_OK;
    });
}

scdiis_status scdiis_predictor_kernel(const scdiis_kernel* k, scdiis_predictor** out) {
    return guarded([&] {
        clear_out(out);
        require(k, "kernel");
        *out = new scdiis_predictor{std::make_unique<KernelPredictor>(k->m)};
        return SCDIIS_OK;
    });
}

void scdiis_predictor_free(scdiis_predictor* p) { delete p; }

// ---- validation ---------------------------------------------------------------

scdiis_status scdiis_validate_oracle(const scdiis_config* cfg, const scdiis_dataset* ds,
                                     scdiis_reports** out) {
    return guarded([&] {
        clear_out(out);
        require(cfg, "config");
        require(ds, "dataset");
        const Config& c = cfg->c;
        SweepConfig sc;
        const int n_sigma = c.get_int("validate.n_sigma");
        sc.sigmas = n_sigma == 1 ? std::vector<double>{c.get_double("validate.sigma")}
                                 : logspace(c.get_double("validate.sigma_min"),
                                            c.get_double("validate.sigma_max"), n_sigma);
        sc.samples_per_sigma = c.get_int("validate.samples_per_sigma");
        sc.noise_mode = parse_noise_mode(c.get("surrogate.noise_mode"));
        sc.seed = c.get_u64("seed");
        sc.norm = config_norm(c);
        sc.jobs = c.get_int("jobs");
        *out = new scdiis_reports{validate_oracle_sweep(ds->ds, model_params(c), sc)};
        return SCDIIS_OK;
    });
}

scdiis_status scdiis_validate_predictor(const scdiis_config* cfg, const scdiis_dataset* ds,
                                        const scdiis_predictor* p, scdiis_reports** out) {
    return guarded([&] {
        clear_out(out);
        require(cfg, "config");
        require(ds, "dataset");
        require(p, "predictor");
        *out = new scdiis_reports{validate_predictor(ds->ds, model_params(cfg->c), *p->p,
                                                     config_norm(cfg->c), cfg->c.get_int("jobs"))};
        return SCDIIS_OK;
    });
}

scdiis_status scdiis_validate_external(const scdiis_config* cfg, const scdiis_dataset* ds,
                                       const char* dir, scdiis_reports** out) {
    return guarded([&] {
        clear_out(out);
        require(cfg, "config");
        require(ds, "dataset");
        require(dir, "dir");
        *out = new scdiis_reports{validate_external(ds->ds, model_params(cfg->c), dir,
                                                    config_norm(cfg->c), cfg->c.get_int("jobs"))};
        return SCDIIS_OK;
    });
}

scdiis_status scdiis_reports_read_csv(const char* path, scdiis_reports** out) {
    return guarded([&] {
        clear_out(out);
        require(path, "path");
        *out = new scdiis_reports{reports_from_csv(read_text_file(path))};
        return SCDIIS_OK;
    });
}

scdiis_status scdiis_reports_write_csv(const scdiis_reports* r, const char* path) {
    return guarded([&] {
        require(r, "reports");
        require(path, "path");
        write_text_file(path, reports_to_csv(r->rows));
        return SCDIIS_OK;
    });
}

int scdiis_reports_count(const scdiis_reports* r) { return r ? static_cast<int>(r->rows.size()) : 0; }

scdiis_status scdiis_reports_value(const scdiis_reports* r, int row, const char* field, double* out) {
    return guarded([&] {
        require(r, "reports");
        require(field, "field");
        require(out, "output");
        if (row < 0 || row >= static_cast<int>(r->rows.size()))
            fail(ErrorCode::InvalidArgument, fmt::format("report row {} out of range", row));
        const auto v = report_field(r->rows[row], field);
        if (!v) fail(ErrorCode::InvalidArgument, fmt::format("row {} has no '{}' value", row, field));
        *out = *v;
        return SCDIIS_OK;
    });
}

void scdiis_reports_free(scdiis_reports* r) { delete r; }

// ---- statistics ---------------------------------------------------------------

scdiis_status scdiis_correlation_run(const scdiis_config* cfg, const scdiis_reports* r,
                                     const char* condition, const char* targets,
                                     scdiis_correlation** out) {
    return guarded([&] {
        clear_out(out);
        require(cfg, "config");
        require(r, "reports");
        require(condition, "condition");
        require(targets, "targets");
        *out = new scdiis_correlation{correlation_report(reports_of(r->rows), parse_condition(condition),
                                                         parse_targets(targets), bin_config(cfg->c))};
        return SCDIIS_OK;
    });
}

int scdiis_correlation_n_targets(const scdiis_correlation* c) {
    return c ? static_cast<int>(c->r.targets.size()) : 0;
}

scdiis_status scdiis_correlation_fit(const scdiis_correlation* c, int target, int statistic,
                                     double* slope, double* intercept, double* r_squared) {
    return guarded([&] {
        require(c, "correlation");
        if (target < 0 || target >= static_cast<int>(c->r.targets.size()))
            fail(ErrorCode::InvalidArgument, fmt::format("target index {} out of range", target));
        if (statistic != 0 && statistic != 1)
            fail(ErrorCode::InvalidArgument, "statistic must be 0 (mean) or 1 (std)");
        const RegressionResult& f =
            statistic == 0 ? c->r.targets[target].mean_fit : c->r.targets[target].std_fit;
        if (slope) *slope = f.slope;
        if (intercept) *intercept = f.intercept;
        if (r_squared) *r_squared = f.r_squared;
        return SCDIIS_OK;
    });
}

scdiis_status scdiis_correlation_write(const scdiis_correlation* c, const char* dir) {
    return guarded([&] {
        require(c, "correlation");
        require(dir, "dir");
        const std::filesystem::path d(dir);
        std::filesystem::create_directories(d);
        write_text_file(d / "summary.csv", summary_csv(c->r));
        for (std::size_t i = 0; i < c->r.targets.size(); ++i) {
            const std::string name(target_name(c->r.targets[i].target));
            write_text_file(d / fmt::format("bins_{}.csv", name), bins_csv(c->r.targets[i].series));
            write_text_file(d / fmt::format("plot_{}.csv", name), plot_csv(c->r, i));
        }
        return SCDIIS_OK;
    });
}

void scdiis_correlation_free(scdiis_correlation* c) { delete c; }

// ---- gradients and dynamics -------------------------------------------------

scdiis_status scdiis_self_diis_gradient(const scdiis_config* cfg, const scdiis_geometry* g,
                                        const scdiis_predictor* p, double* out) {
    return guarded([&] {
        require(cfg, "config");
        require(g, "geometry");
        require(p, "predictor");
        require(out, "output");
        const Vector grad = self_diis_position_gradient(g->g, model_params(cfg->c), *p->p,
                                                        cfg->c.get_double("grad.step"),
                                                        config_norm(cfg->c), cfg->c.get_int("jobs"));
        std::copy(grad.data(), grad.data() + grad.size(), out);
        return SCDIIS_OK;
    });
}

scdiis_status scdiis_md_run(const scdiis_config* cfg, const scdiis_geometry* g0,
                            const scdiis_predictor* p, double threshold, scdiis_trajectory** out) {
    return guarded([&] {
        clear_out(out);
        require(cfg, "config");
        require(g0, "geometry");
        MdConfig mc = md_config(cfg->c);
        if (md_threshold_auto(cfg->c)) mc.threshold = threshold;
        Trajectory t = run_md(g0->g, model_params(cfg->c), p ? p->p.get() : nullptr, mc);
        const ErrorCode status = t.status;
        const std::string message = t.message;
        *out = new scdiis_trajectory{std::move(t), g0->g, mc.mode};
        if (status != ErrorCode::Ok) {
            g_last_error = message;
            return to_status(status);
        }
        return SCDIIS_OK;
    });
}

int scdiis_trajectory_n_frames(const scdiis_trajectory* t) {
    return t ? static_cast<int>(t->t.frames.size()) : 0;
}

int scdiis_trajectory_diverged(const scdiis_trajectory* t) { return t && t->t.diverged ? 1 : 0; }

double scdiis_trajectory_threshold(const scdiis_trajectory* t) { return t ? t->t.threshold : 0.0; }

scdiis_status scdiis_trajectory_value(const scdiis_trajectory* t, int frame, const char* field,
                                      double* out) {
    return guarded([&] {
        require(t, "trajectory");
        require(field, "field");
        require(out, "output");
        if (frame < 0 || frame >= static_cast<int>(t->t.frames.size()))
            fail(ErrorCode::InvalidArgument, fmt::format("frame {} out of range", frame));
        const MdFrame& f = t->t.frames[frame];
        const std::string_view name = field;
        if (name == "temperature") *out = f.temperature;
        else if (name == "e_total") *out = f.e_total;
        else if (name == "max_force") *out = f.max_force;
        else if (name == "self_diis") *out = f.self_diis;
        else if (name == "corrected") *out = f.corrected ? 1.0 : 0.0;
        else if (name == "step") *out = f.step;
        else fail(ErrorCode::InvalidArgument, fmt::format("unknown frame field '{}'", name));
        return SCDIIS_OK;
    });
}

scdiis_status scdiis_trajectory_write(const scdiis_trajectory* t, const char* dir) {
    return guarded([&] {
        require(t, "trajectory");
        require(dir, "dir");
        const std::filesystem::path d(dir);
        std::filesystem::create_directories(d);
        write_text_file(d / "traj.xyz", trajectory_xyz(t->t, t->g0));
        write_text_file(d / "md.csv", trajectory_csv(t->t));
        write_text_file(d / "md_meta.txt",
                        fmt::format("mode = {}\nthreshold = {}\nframes = {}\ndiverged = {}\nstatus = {}\n",
                                    md_mode_name(t->mode), format_double(t->t.threshold),
                                    t->t.frames.size(), t->t.diverged ? "true" : "false",
                                    error_code_name(t->t.status)));
        return SCDIIS_OK;
    });
}

void scdiis_trajectory_free(scdiis_trajectory* t) { delete t; }

} // extern "C"
