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

#pragma once

#include <deque>
#include <vector>

#include "scdiis/model.hpp"

namespace scdiis {

struct ScfConfig {
    int max_iter = 200;
    double tol = 1e-9;    ///< on error_magnitude(e, norm)
    double damping = 0.3; ///< fraction of the new density mixed in
    bool use_diis = true;
    int diis_depth = 8;
    int diis_start = 2;
    Norm norm = Norm::Frobenius;
    double lin_dep_tol = kDefaultLinDepTol;

    void validate() const;
};

/// Ring buffer of (trial Hamiltonian, error matrix) pairs, oldest first.
class DiisHistory {
  public:
    explicit DiisHistory(int capacity);

    void push(Matrix hamiltonian, Matrix error);
    void drop_oldest();
    void clear() { entries_.clear(); }

    int size() const { return static_cast<int>(entries_.size()); }
    int capacity() const { return capacity_; }
    const Matrix& hamiltonian(int k) const { return entries_[k].first; }
    const Matrix& error(int k) const { return entries_[k].second; }

  private:
    int capacity_;
    std::deque<std::pair<Matrix, Matrix>> entries_;
};

struct DiisExtrapolation {
    Matrix hamiltonian;
    Vector coeffs; ///< sums to 1
};

/// Pulay extrapolation: minimize ||sum c_k e_k||_F subject to sum c_k = 1
/// through the bordered (m+1)x(m+1) system.  Throws SingularDiisSystem.
DiisExtrapolation diis_extrapolate(const DiisHistory& hist);

struct ScfTraceRow {
    int iteration;
    double diis_error;
    double e_total;
};

struct ScfRun {
    ScfSolution solution; ///< converged result or the lowest-error iterate
    std::vector<ScfTraceRow> trace;
};

/// Raised when max_iter is exhausted; carries the best iterate seen.
class NoConvergenceError : public Error {
  public:
    NoConvergenceError(const std::string& what, ScfRun best)
        : Error(ErrorCode::NoConvergence, what), best_(std::move(best)) {}
    const ScfRun& best() const noexcept { return best_; }

  private:
    ScfRun best_;
};

/// Runs the fixed-point iteration and always returns; check
/// solution.converged.  Throws LinearDependence / FermiDegeneracy.
ScfRun scf_run(const Geometry& g, const ModelParams& p, const ScfConfig& cfg);

/// scf_run() that throws NoConvergenceError when not converged.
ScfSolution scf_solve(const Geometry& g, const ModelParams& p, const ScfConfig& cfg);

std::vector<ScfTraceRow> scf_trace(const Geometry& g, const ModelParams& p,
                                   const ScfConfig& cfg);

} // namespace scdiis
