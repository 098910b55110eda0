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

// Velocity-Verlet NVT dynamics with Berendsen rescaling.  Units: A, fs,
// amu, eV, K.

#include <cstdint>
#include <string>
#include <vector>

#include "scdiis/util.hpp"
#include "scdiis/validator.hpp"

namespace scdiis {

inline constexpr double kBoltzmannEv = 8.617333262e-5; // eV / K
inline constexpr double kAmuA2PerFs2InEv = 103.6426965; // 1 amu A^2 / fs^2 in eV

enum class MdMode { Exact, SurrogateOnly, PredictorCorrector };

std::string_view md_mode_name(MdMode m);
MdMode parse_md_mode(std::string_view text);

/// How forces_surrogate keeps the predicted density fixed while the atoms
/// move.  Orthogonal freezes S^(1/2) D S^(1/2) and re-expands it with the
/// displaced overlap, so D stays S-idempotent and the force is variational
/// at a converged density.  Atomic keeps the raw AO matrix.
enum class FrozenDensity { Orthogonal, Atomic };

struct MdConfig {
    double dt = 0.5;        // fs
    int n_steps = 1000;
    double t_target = 300;  // K
    double tau = 100;       // fs; infinity switches the thermostat off
    double threshold = 0.0; // self-DIIS gate, norm units
    MdMode mode = MdMode::Exact;
    std::uint64_t seed = 0;
    double fd_step = 1e-4;  // A
    FrozenDensity frozen = FrozenDensity::Orthogonal;
    Norm norm = Norm::Frobenius;
    ScfConfig scf;
    int jobs = 1;

    void validate() const;
};

struct MdFrame {
    int step = 0;
    std::vector<Vec3> positions;
    std::vector<Vec3> velocities; // A / fs
    double temperature = 0.0;     // K, before the thermostat rescale
    double e_total = 0.0;         // eV
    double max_force = 0.0;       // eV / A
    double self_diis = 0.0;
    bool corrected = false;
};

struct Trajectory {
    std::vector<MdFrame> frames;
    bool diverged = false;
    ErrorCode status = ErrorCode::Ok; ///< failure that ended the run early
    std::string message;
    double threshold = 0.0;
};

std::vector<double> atom_masses(const Geometry& g, const ModelParams& p);

/// T = 2 KE / (3 N k_B)
double temperature(const std::vector<Vec3>& velocities, const std::vector<double>& masses);

/// -dE_tot/dx by central differences of converged SCF energies.
Vector forces_exact(const Geometry& g, const ModelParams& p, const ScfConfig& scf,
                    double step = 1e-4, int jobs = 1);

/// Density-frozen force from a prediction: central differences of the
/// electronic energy with the predicted density held fixed (see
/// FrozenDensity), plus the analytic repulsion gradient.
Vector forces_surrogate(const Geometry& g, const ModelParams& p, const Prediction& pred,
                        double step = 1e-4, FrozenDensity frozen = FrozenDensity::Orthogonal,
                        int jobs = 1);

/// Maxwell-Boltzmann velocities at `t_k` with the centre-of-mass motion
/// removed and rescaled to exactly `t_k`.
std::vector<Vec3> initial_velocities(const std::vector<double>& masses, double t_k, Rng& rng);

/// `surrogate` is required for the surrogate_only and predictor_corrector
/// modes.  Failures end the run early and are reported in the Trajectory
/// (status/diverged) together with every frame computed so far.
Trajectory run_md(const Geometry& g0, const ModelParams& p, const Predictor* surrogate,
                  const MdConfig& cfg);

/// Multi-frame extended XYZ.
std::string trajectory_xyz(const Trajectory& traj, const Geometry& g0);
/// step,temperature,e_total,max_force,self_diis,corrected
std::string trajectory_csv(const Trajectory& traj);

} // namespace scdiis
