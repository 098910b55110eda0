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

#include "scdiis/mdsim.hpp"

#include <fmt/format.h>

#include <cmath>

#include "scdiis/util.hpp"

namespace scdiis {

std::string_view md_mode_name(MdMode m) {
    switch (m) {
    case MdMode::Exact: return "exact";
    case MdMode::SurrogateOnly: return "surrogate_only";
    case MdMode::PredictorCorrector: return "predictor_corrector";
    }
    return "unknown";
}

MdMode parse_md_mode(std::string_view text) {
    if (text == "exact") return MdMode::Exact;
    if (text == "surrogate_only") return MdMode::SurrogateOnly;
    if (text == "predictor_corrector") return MdMode::PredictorCorrector;
    fail(ErrorCode::ParseError,
         fmt::format("unknown md mode '{}' (exact|surrogate_only|predictor_corrector)", text));
}

void MdConfig::validate() const {
    if (!(dt > 0)) fail(ErrorCode::InvalidArgument, "md.dt must be > 0");
    if (n_steps < 0) fail(ErrorCode::InvalidArgument, "md.n_steps must be >= 0");
    if (!(tau >= dt)) fail(ErrorCode::InvalidArgument, "md.tau must be >= md.dt");
    if (!(t_target >= 0)) fail(ErrorCode::InvalidArgument, "md.t_target must be >= 0");
    if (!(fd_step > 0)) fail(ErrorCode::InvalidArgument, "md.fd_step must be > 0");
    if (mode == MdMode::PredictorCorrector && !(threshold >= 0))
        fail(ErrorCode::InvalidArgument, "md.threshold must be >= 0 in predictor_corrector mode");
    scf.validate();
}

std::vector<double> atom_masses(const Geometry& g, const ModelParams& p) {
    std::vector<double> m;
    m.reserve(g.species.size());
    for (const auto& sp : g.species) m.push_back(p.species(sp).mass);
    return m;
}

double temperature(const std::vector<Vec3>& velocities, const std::vector<double>& masses) {
    if (velocities.empty()) return 0.0;
    double ke = 0.0;
    for (std::size_t a = 0; a < velocities.size(); ++a)
        ke += 0.5 * masses[a] * velocities[a].squaredNorm();
    ke *= kAmuA2PerFs2InEv;
    return 2.0 * ke / (3.0 * static_cast<double>(velocities.size()) * kBoltzmannEv);
}

Vector forces_exact(const Geometry& g, const ModelParams& p, const ScfConfig& scf, double step,
                    int jobs) {
    const Vector x0 = g.coordinates();
    Vector f(x0.size());
    auto energy_at = [&](const Vector& x) {
        Geometry gx = g;
        gx.set_coordinates(x);
        return scf_solve(gx, p, scf).e_total;
    };
    parallel_for(static_cast<std::size_t>(x0.size()), jobs, [&](std::size_t k) {
        Vector xp = x0, xm = x0;
        xp(k) += step;
        xm(k) -= step;
        f(k) = -(energy_at(xp) - energy_at(xm)) / (2.0 * step);
    });
    return f;
}

namespace {

Matrix sqrt_spd(const Matrix& s) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(s);
    if (es.info() != Eigen::Success || es.eigenvalues()(0) <= 0)
        fail(ErrorCode::LinearDependence, "overlap is not positive definite");
    const Matrix& u = es.eigenvectors();
    Matrix r = u * es.eigenvalues().cwiseSqrt().asDiagonal() * u.transpose();
    return 0.5 * (r + r.transpose());
}

} // namespace

Vector forces_surrogate(const Geometry& g, const ModelParams& p, const Prediction& pred,
                        double step, FrozenDensity frozen, int jobs) {
    pred.validate();
    if (pred.d_pred.rows() != g.n_atoms())
        fail(ErrorCode::DimensionMismatch, "prediction does not match the geometry");

    Matrix frozen_part = pred.d_pred;
    if (frozen == FrozenDensity::Orthogonal) {
        const Matrix half = sqrt_spd(build_overlap(g, p));
        frozen_part = half * pred.d_pred * half;
    }

    const Vector x0 = g.coordinates();
    auto electronic_at = [&](const Vector& x) {
        Geometry gx = g;
        gx.set_coordinates(x);
        const Matrix s = build_overlap(gx, p);
        Matrix d = frozen_part;
        if (frozen == FrozenDensity::Orthogonal) {
            const Matrix xs = loewdin_inverse_sqrt(s);
            d = xs * frozen_part * xs;
        }
        return electronic_energy(d, s, build_h0(gx, p), gx, p);
    };

    Vector f = -repulsion_gradient(g, p);
    parallel_for(static_cast<std::size_t>(x0.size()), jobs, [&](std::size_t k) {
        Vector xp = x0, xm = x0;
        xp(k) += step;
        xm(k) -= step;
        f(k) -= (electronic_at(xp) - electronic_at(xm)) / (2.0 * step);
    });
    return f;
}

std::vector<Vec3> initial_velocities(const std::vector<double>& masses, double t_k, Rng& rng) {
    const std::size_t n = masses.size();
    std::vector<Vec3> v(n, Vec3::Zero());
    if (n == 0 || t_k <= 0) return v;
    std::normal_distribution<double> normal(0.0, 1.0);
    double mtot = 0.0;
    Vec3 momentum = Vec3::Zero();
    for (std::size_t a = 0; a < n; ++a) {
        const double sigma = std::sqrt(kBoltzmannEv * t_k / (masses[a] * kAmuA2PerFs2InEv));
        for (int c = 0; c < 3; ++c) v[a](c) = sigma * normal(rng);
        momentum += masses[a] * v[a];
        mtot += masses[a];
    }
    for (std::size_t a = 0; a < n; ++a) v[a] -= momentum / mtot;
    const double t_now = temperature(v, masses);
    if (t_now > 0) {
        const double scale = std::sqrt(t_k / t_now);
        for (auto& va : v) va *= scale;
    }
    return v;
}

namespace {

struct StepForces {
    Vector forces;
    double e_total = 0.0;
    double self_diis = 0.0;
    bool corrected = false;
};

class ForceField {
  public:
    ForceField(const ModelParams& p, const Predictor* surrogate, const MdConfig& cfg)
        : p_(p), surrogate_(surrogate), cfg_(cfg) {}

    StepForces evaluate(const Geometry& g) const {
        if (cfg_.mode == MdMode::Exact) return exact(g, 0.0, true);

        const Prediction pred = surrogate_->predict(g);
        const double err = self_diis(pred, build_overlap(g, p_), cfg_.norm);
        if (cfg_.mode == MdMode::PredictorCorrector && !(err <= cfg_.threshold))
            return exact(g, err, false);

        StepForces out;
        out.forces = forces_surrogate(g, p_, pred, cfg_.fd_step, cfg_.frozen, cfg_.jobs);
        out.e_total = surrogate_energy(g, pred);
        out.self_diis = err;
        return out;
    }

  private:
    StepForces exact(const Geometry& g, double gate_value, bool own_error) const {
        StepForces out;
        const ScfSolution sol = scf_solve(g, p_, cfg_.scf);
        out.forces = forces_exact(g, p_, cfg_.scf, cfg_.fd_step, cfg_.jobs);
        out.e_total = sol.e_total;
        out.self_diis = own_error ? sol.strict_diis : gate_value;
        out.corrected = cfg_.mode != MdMode::Exact;
        return out;
    }

    double surrogate_energy(const Geometry& g, const Prediction& pred) const {
        return energy(pred.d_pred, g, p_);
    }

    const ModelParams& p_;
    const Predictor* surrogate_;
    const MdConfig& cfg_;
};

double max_force_norm(const Vector& f) {
    double m = 0.0;
    for (Eigen::Index a = 0; a < f.size() / 3; ++a) m = std::max(m, f.segment<3>(3 * a).norm());
    return m;
}

bool blown_up(const Geometry& g, double t_inst) {
    if (!(t_inst <= 1e6)) return true;
    for (const Vec3& r : g.positions)
        if (!r.allFinite() || r.cwiseAbs().maxCoeff() > 1e3) return true;
    return false;
}

} // namespace

Trajectory run_md(const Geometry& g0, const ModelParams& p, const Predictor* surrogate,
                  const MdConfig& cfg) {
    cfg.validate();
    g0.validate();
    if (cfg.mode != MdMode::Exact && surrogate == nullptr)
        fail(ErrorCode::InvalidArgument,
             fmt::format("md mode {} needs a surrogate model", md_mode_name(cfg.mode)));

    Trajectory traj;
    traj.threshold = cfg.threshold;
    const std::vector<double> masses = atom_masses(g0, p);
    const int n = g0.n_atoms();
    Rng rng = make_rng(cfg.seed, "velocities");
    std::vector<Vec3> v = initial_velocities(masses, cfg.t_target, rng);
    Geometry g = g0;
    const ForceField field(p, surrogate, cfg);
    const bool thermostat = std::isfinite(cfg.tau);

    auto record = [&](int step, const StepForces& sf, double t_inst) {
        MdFrame fr;
        fr.step = step;
        fr.positions = g.positions;
        fr.velocities = v;
        fr.temperature = t_inst;
        fr.e_total = sf.e_total;
        fr.max_force = max_force_norm(sf.forces);
        fr.self_diis = sf.self_diis;
        fr.corrected = sf.corrected;
        traj.frames.push_back(std::move(fr));
    };
    auto abort_with = [&](const Error& e) {
        traj.status = e.code();
        traj.message = e.what();
        // a surrogate-driven collapse (atoms merging, singular overlap) is a blowup
        if (cfg.mode == MdMode::SurrogateOnly && e.code() != ErrorCode::NoConvergence) {
            traj.status = ErrorCode::NumericalBlowup;
            traj.diverged = true;
        }
    };

    StepForces sf;
    try {
        sf = field.evaluate(g);
    } catch (const Error& e) {
        abort_with(e);
        return traj;
    }
    record(0, sf, temperature(v, masses));

    const double conv = 1.0 / kAmuA2PerFs2InEv;
    for (int step = 1; step <= cfg.n_steps; ++step) {
        for (int a = 0; a < n; ++a) {
            v[a] += 0.5 * cfg.dt * conv / masses[a] * sf.forces.segment<3>(3 * a);
            g.positions[a] += cfg.dt * v[a];
        }
        if (blown_up(g, 0.0)) {
            traj.diverged = true;
            traj.status = ErrorCode::NumericalBlowup;
            traj.message = fmt::format("positions left the 1e3 A box at step {}", step);
            break;
        }
        try {
            sf = field.evaluate(g);
        } catch (const Error& e) {
            abort_with(e);
            break;
        }
        for (int a = 0; a < n; ++a)
            v[a] += 0.5 * cfg.dt * conv / masses[a] * sf.forces.segment<3>(3 * a);

        const double t_inst = temperature(v, masses);
        if (blown_up(g, t_inst)) {
            record(step, sf, t_inst);
            traj.diverged = true;
            traj.status = ErrorCode::NumericalBlowup;
            traj.message = fmt::format("temperature {:.3e} K at step {}", t_inst, step);
            break;
        }
        if (thermostat && t_inst > 0) {
            const double lambda = std::sqrt(1.0 + cfg.dt / cfg.tau * (cfg.t_target / t_inst - 1.0));
            for (auto& va : v) va *= lambda;
        }
        record(step, sf, t_inst);
    }
    return traj;
}

std::string trajectory_xyz(const Trajectory& traj, const Geometry& g0) {
    std::string out;
    for (const MdFrame& fr : traj.frames) {
        out += fmt::format("{}\nn_electrons={} step={} temperature={} e_total={}\n", fr.positions.size(),
                           g0.n_electrons, fr.step, format_double(fr.temperature),
                           format_double(fr.e_total));
        for (std::size_t a = 0; a < fr.positions.size(); ++a)
            out += fmt::format("{} {} {} {}\n", g0.species[a], format_double(fr.positions[a].x()),
                               format_double(fr.positions[a].y()),
                               format_double(fr.positions[a].z()));
    }
    return out;
}

std::string trajectory_csv(const Trajectory& traj) {
    std::string out = "step,temperature,e_total,max_force,self_diis,corrected\n";
    for (const MdFrame& fr : traj.frames)
        out += fmt::format("{},{},{},{},{},{}\n", fr.step, format_double(fr.temperature),
                           format_double(fr.e_total), format_double(fr.max_force),
                           format_double(fr.self_diis), fr.corrected ? 1 : 0);
    return out;
}

} // namespace scdiis
