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

#include "scdiis/scf.hpp"

#include <fmt/format.h>

#include <limits>

namespace scdiis {

void ScfConfig::validate() const {
    if (max_iter < 1) fail(ErrorCode::InvalidArgument, "scf.max_iter must be >= 1");
    if (!(tol > 0)) fail(ErrorCode::InvalidArgument, "scf.tol must be > 0");
    if (!(damping > 0 && damping <= 1))
        fail(ErrorCode::InvalidArgument, "scf.damping must lie in (0, 1]");
    if (diis_depth < 2) fail(ErrorCode::InvalidArgument, "scf.diis_depth must be >= 2");
    if (diis_start < 1) fail(ErrorCode::InvalidArgument, "scf.diis_start must be >= 1");
}

DiisHistory::DiisHistory(int capacity) : capacity_(capacity) {
    if (capacity < 2) fail(ErrorCode::InvalidArgument, "DIIS history needs capacity >= 2");
}

void DiisHistory::push(Matrix hamiltonian, Matrix error) {
    entries_.emplace_back(std::move(hamiltonian), std::move(error));
    while (size() > capacity_) entries_.pop_front();
}

void DiisHistory::drop_oldest() {
    if (!entries_.empty()) entries_.pop_front();
}

DiisExtrapolation diis_extrapolate(const DiisHistory& hist) {
    const int m = hist.size();
    if (m < 2) fail(ErrorCode::InvalidArgument, "DIIS extrapolation needs at least 2 trials");

    Matrix b(m + 1, m + 1);
    for (int k = 0; k < m; ++k)
        for (int l = k; l < m; ++l)
            b(k, l) = b(l, k) = (hist.error(k).array() * hist.error(l).array()).sum();
    // scale the Gram block to O(1); the coefficients are scale invariant
    const double scale = b.topLeftCorner(m, m).diagonal().maxCoeff();
    if (scale > 0) b.topLeftCorner(m, m) /= scale;
    b.row(m).setConstant(-1.0);
    b.col(m).setConstant(-1.0);
    b(m, m) = 0.0;

    Vector rhs = Vector::Zero(m + 1);
    rhs(m) = -1.0;

    Eigen::FullPivLU<Matrix> lu(b);
    lu.setThreshold(1e-14);
    if (!lu.isInvertible())
        fail(ErrorCode::SingularDiisSystem,
             fmt::format("DIIS system of {} trials is singular", m));
    const Vector sol = lu.solve(rhs);

    DiisExtrapolation out{Matrix::Zero(hist.hamiltonian(0).rows(), hist.hamiltonian(0).cols()),
                          sol.head(m)};
    for (int k = 0; k < m; ++k) out.hamiltonian += out.coeffs(k) * hist.hamiltonian(k);
    out.hamiltonian = 0.5 * (out.hamiltonian + out.hamiltonian.transpose());
    return out;
}

ScfRun scf_run(const Geometry& g, const ModelParams& p, const ScfConfig& cfg) {
    g.validate();
    p.validate();
    cfg.validate();

    const Matrix s = build_overlap(g, p);
    const Matrix h0 = build_h0(g, p);
    const Matrix x = loewdin_inverse_sqrt(s, cfg.lin_dep_tol);

    auto density_of = [&](const Matrix& h) {
        const EigSolution eig = gen_eigensolve_with(h, x);
        return build_density(eig.coeffs, aufbau_checked(eig.energies, g.n_electrons));
    };

    // core-Hamiltonian guess
    Matrix d = density_of(h0);
    DiisHistory hist(cfg.diis_depth);

    ScfRun run;
    ScfSolution best;
    double best_err = std::numeric_limits<double>::infinity();

    for (int it = 1; it <= cfg.max_iter; ++it) {
        const Matrix h = effective_hamiltonian(d, s, h0, g, p);
        Matrix e = commutator_error(h, d, s);
        const double err = error_magnitude(e, cfg.norm);
        const double etot = electronic_energy(d, s, h0, g, p) + repulsion_energy(g, p);
        run.trace.push_back({it, err, etot});

        if (err < best_err) {
            best_err = err;
            best.hamiltonian = h;
            best.density = d;
            best.e_total = etot;
            best.strict_diis = err;
            best.iterations = it;
        }
        if (err <= cfg.tol) {
            best.converged = true;
            break;
        }

        hist.push(h, std::move(e));
        Matrix h_next = h;
        bool extrapolated = false;
        if (cfg.use_diis && it >= cfg.diis_start) {
            while (hist.size() >= 2 && !extrapolated) {
                try {
                    h_next = diis_extrapolate(hist).hamiltonian;
                    extrapolated = true;
                } catch (const Error& ex) {
                    if (ex.code() != ErrorCode::SingularDiisSystem) throw;
                    hist.drop_oldest();
                }
            }
        }
        const Matrix d_new = density_of(h_next);
        d = extrapolated ? d_new : Matrix((1.0 - cfg.damping) * d + cfg.damping * d_new);
    }

    // on convergence the last iterate is also the best one
    run.solution = std::move(best);
    if (!run.solution.converged) run.solution.iterations = cfg.max_iter;
    run.solution.overlap = s;
    run.solution.orbitals = gen_eigensolve_with(run.solution.hamiltonian, x);
    run.solution.gap = homo_lumo_gap(run.solution.orbitals.energies, g.n_electrons);
    return run;
}

ScfSolution scf_solve(const Geometry& g, const ModelParams& p, const ScfConfig& cfg) {
    ScfRun run = scf_run(g, p, cfg);
    if (!run.solution.converged) {
        const double err = run.solution.strict_diis;
        throw NoConvergenceError(
            fmt::format("SCF did not converge in {} iterations (best error {:.3e}, tol {:.1e})",
                        cfg.max_iter, err, cfg.tol),
            std::move(run));
    }
    return std::move(run.solution);
}

std::vector<ScfTraceRow> scf_trace(const Geometry& g, const ModelParams& p,
                                   const ScfConfig& cfg) {
    ScfRun run = scf_run(g, p, cfg);
    if (!run.solution.converged)
        throw NoConvergenceError(
            fmt::format("SCF did not converge in {} iterations", cfg.max_iter), std::move(run));
    return std::move(run.trace);
}

} // namespace scdiis
