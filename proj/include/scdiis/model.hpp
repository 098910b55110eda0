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

// Charge-self-consistent tight-binding model with one s-like orbital per
// atom and a nonorthogonal Gaussian overlap:
//
//   S_ij  = exp(-alpha r_ij^2)
//   H0_ij = -t0 exp(-beta (r_ij - r0)),  H0_ii = eps0_i
//   q_i   = 1/2 (D S + S D)_ii
//   E(D)  = tr(D H0) + 1/2 sum_i U_i (q_i - qref_i)^2 + sum_{i<j} A exp(-r_ij / rho)
//
// The effective Hamiltonian returned by effective_hamiltonian() is the
// symmetrized derivative dE/dD.

#include <map>
#include <string>
#include <vector>

#include "scdiis/matcore.hpp"

namespace scdiis {

using Vec3 = Eigen::Vector3d;

inline constexpr double kMinAtomDistance = 0.3; // Angstrom

struct Geometry {
    std::vector<std::string> species;
    std::vector<Vec3> positions; // Angstrom
    int n_electrons = 0;

    int n_atoms() const { return static_cast<int>(positions.size()); }
    double distance(int i, int j) const { return (positions[i] - positions[j]).norm(); }

    /// Throws InvalidArgument / DegenerateInput on a malformed geometry.
    void validate() const;

    /// Flattened x0 y0 z0 x1 ...
    Vector coordinates() const;
    void set_coordinates(const Vector& xyz);
};

struct SpeciesParams {
    double eps0 = 0.0;      // eV
    double hubbard_u = 8.0; // eV
    double q_ref = 1.0;
    double mass = 12.011;   // amu
};

struct ModelParams {
    double t0 = 2.5;      // eV
    double beta = 2.0;    // 1/A
    double alpha = 0.7;   // 1/A^2
    double r0 = 1.4;      // A
    double rep_a = 500.0; // eV
    double rep_rho = 0.25; // A
    SpeciesParams generic;
    std::map<std::string, SpeciesParams> per_species;

    const SpeciesParams& species(const std::string& tag) const;
    void validate() const;
};

/// Converged (or best-so-far) self-consistent pair plus derived data.
struct ScfSolution {
    Matrix hamiltonian;
    Matrix density;
    Matrix overlap;
    EigSolution orbitals;
    double e_total = 0.0;     // eV
    double gap = 0.0;         // eV; 0 when every orbital is occupied
    double strict_diis = 0.0; // final ||H D S - S D H|| in the solve's norm
    int iterations = 0;
    bool converged = false;
};

Matrix build_overlap(const Geometry& g, const ModelParams& p);
Matrix build_h0(const Geometry& g, const ModelParams& p);

/// q_i = 1/2 (D S + S D)_ii
Vector mulliken_charges(const Matrix& d, const Matrix& s);

double repulsion_energy(const Geometry& g, const ModelParams& p);
/// d E_rep / d x, flattened like Geometry::coordinates()
Vector repulsion_gradient(const Geometry& g, const ModelParams& p);

/// E(D) without the nuclear repulsion, for precomputed S and H0.
double electronic_energy(const Matrix& d, const Matrix& s, const Matrix& h0,
                         const Geometry& g, const ModelParams& p);

double energy(const Matrix& d, const Geometry& g, const ModelParams& p);

/// H(D) = H0 + H1 with H1_ij = 1/2 S_ij (U_i dq_i + U_j dq_j).
Matrix effective_hamiltonian(const Matrix& d, const Matrix& s, const Matrix& h0,
                             const Geometry& g, const ModelParams& p);
Matrix effective_hamiltonian(const Matrix& d, const Geometry& g, const ModelParams& p);

/// HOMO-LUMO gap of an ascending spectrum; 0 if no orbital is empty.
double homo_lumo_gap(const Vector& energies, int n_electrons);

struct Observables {
    double e_total;
    double gap;
};

/// e_total from energy(D), gap from the stored spectrum.  Throws
/// FermiDegeneracy if HOMO and LUMO coincide.
Observables observables(const ScfSolution& sol, const Geometry& g, const ModelParams& p);

/// Planar regular ring in the xy plane with nearest-neighbour spacing `bond`.
Geometry ring_geometry(int n_atoms, double bond, int n_electrons, const std::string& species = "C");
/// Straight chain along x.
Geometry chain_geometry(int n_atoms, double bond, int n_electrons, const std::string& species = "C");

} // namespace scdiis
