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

#include "scdiis/model.hpp"

#include <fmt/format.h>

#include <cmath>

namespace scdiis {

void Geometry::validate() const {
    if (positions.empty()) fail(ErrorCode::InvalidArgument, "geometry has no atoms");
    if (species.size() != positions.size())
        fail(ErrorCode::InvalidArgument,
             fmt::format("geometry has {} species tags for {} atoms", species.size(),
                         positions.size()));
    for (const Vec3& r : positions)
        if (!r.allFinite()) fail(ErrorCode::InvalidArgument, "non-finite atom position");
    if (n_electrons <= 0 || n_electrons % 2 != 0)
        fail(ErrorCode::DegenerateInput,
             fmt::format("n_electrons must be even and positive, got {}", n_electrons));
    if (n_electrons > 2 * n_atoms())
        fail(ErrorCode::DegenerateInput,
             fmt::format("{} electrons exceed the capacity of {} orbitals", n_electrons,
                         n_atoms()));
    for (int i = 0; i < n_atoms(); ++i)
        for (int j = i + 1; j < n_atoms(); ++j)
            if (distance(i, j) < kMinAtomDistance)
                fail(ErrorCode::InvalidArgument,
                     fmt::format("atoms {} and {} are {:.4f} A apart (minimum {} A)", i, j,
                                 distance(i, j), kMinAtomDistance));
}

Vector Geometry::coordinates() const {
    Vector x(3 * positions.size());
    for (std::size_t a = 0; a < positions.size(); ++a) x.segment<3>(3 * a) = positions[a];
    return x;
}

void Geometry::set_coordinates(const Vector& xyz) {
    if (xyz.size() != 3 * static_cast<Eigen::Index>(positions.size()))
        fail(ErrorCode::DimensionMismatch, "coordinate vector does not match atom count");
    for (std::size_t a = 0; a < positions.size(); ++a) positions[a] = xyz.segment<3>(3 * a);
}

const SpeciesParams& ModelParams::species(const std::string& tag) const {
    auto it = per_species.find(tag);
    return it == per_species.end() ? generic : it->second;
}

void ModelParams::validate() const {
    if (!(t0 > 0)) fail(ErrorCode::InvalidArgument, "model.t0 must be > 0");
    if (!(alpha > 0)) fail(ErrorCode::InvalidArgument, "model.alpha must be > 0");
    if (!(beta > 0)) fail(ErrorCode::InvalidArgument, "model.beta must be > 0");
    if (!(rep_rho > 0)) fail(ErrorCode::InvalidArgument, "model.rep_rho must be > 0");
    auto check = [](const SpeciesParams& sp, const std::string& tag) {
        if (!(sp.hubbard_u >= 0))
            fail(ErrorCode::InvalidArgument, fmt::format("hubbard_u for '{}' must be >= 0", tag));
        if (!(sp.mass > 0))
            fail(ErrorCode::InvalidArgument, fmt::format("mass for '{}' must be > 0", tag));
    };
    check(generic, "*");
    for (const auto& [tag, sp] : per_species) check(sp, tag);
}

Matrix build_overlap(const Geometry& g, const ModelParams& p) {
    const int n = g.n_atoms();
    Matrix s = Matrix::Identity(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const double r = g.distance(i, j);
            s(i, j) = s(j, i) = std::exp(-p.alpha * r * r);
        }
    return s;
}

Matrix build_h0(const Geometry& g, const ModelParams& p) {
    const int n = g.n_atoms();
    Matrix h(n, n);
    for (int i = 0; i < n; ++i) {
        h(i, i) = p.species(g.species[i]).eps0;
        for (int j = i + 1; j < n; ++j)
            h(i, j) = h(j, i) = -p.t0 * std::exp(-p.beta * (g.distance(i, j) - p.r0));
    }
    return h;
}

Vector mulliken_charges(const Matrix& d, const Matrix& s) {
    require_same_dim({&d, &s}, "mulliken_charges");
    const Eigen::Index n = d.rows();
    Vector q(n);
    for (Eigen::Index i = 0; i < n; ++i)
        q(i) = 0.5 * (d.row(i).dot(s.col(i)) + s.row(i).dot(d.col(i)));
    return q;
}

double repulsion_energy(const Geometry& g, const ModelParams& p) {
    double e = 0.0;
    for (int i = 0; i < g.n_atoms(); ++i)
        for (int j = i + 1; j < g.n_atoms(); ++j)
            e += p.rep_a * std::exp(-g.distance(i, j) / p.rep_rho);
    return e;
}

Vector repulsion_gradient(const Geometry& g, const ModelParams& p) {
    Vector grad = Vector::Zero(3 * g.n_atoms());
    for (int i = 0; i < g.n_atoms(); ++i)
        for (int j = i + 1; j < g.n_atoms(); ++j) {
            const Vec3 rij = g.positions[i] - g.positions[j];
            const double r = rij.norm();
            const double de_dr = -p.rep_a / p.rep_rho * std::exp(-r / p.rep_rho);
            const Vec3 f = de_dr * rij / r;
            grad.segment<3>(3 * i) += f;
            grad.segment<3>(3 * j) -= f;
        }
    return grad;
}

namespace {

void require_model_dims(const Matrix& d, const Geometry& g) {
    if (d.rows() != g.n_atoms() || d.cols() != g.n_atoms())
        fail(ErrorCode::DimensionMismatch,
             fmt::format("density is {}x{} but geometry has {} atoms", d.rows(), d.cols(),
                         g.n_atoms()));
}

} // namespace

double electronic_energy(const Matrix& d, const Matrix& s, const Matrix& h0,
                         const Geometry& g, const ModelParams& p) {
    require_model_dims(d, g);
    const Vector q = mulliken_charges(d, s);
    double e = (d.transpose() * h0).trace();
    for (int i = 0; i < g.n_atoms(); ++i) {
        const SpeciesParams& sp = p.species(g.species[i]);
        const double dq = q(i) - sp.q_ref;
        e += 0.5 * sp.hubbard_u * dq * dq;
    }
    return e;
}

double energy(const Matrix& d, const Geometry& g, const ModelParams& p) {
    return electronic_energy(d, build_overlap(g, p), build_h0(g, p), g, p) +
           repulsion_energy(g, p);
}

Matrix effective_hamiltonian(const Matrix& d, const Matrix& s, const Matrix& h0,
                             const Geometry& g, const ModelParams& p) {
    require_model_dims(d, g);
    const int n = g.n_atoms();
    const Vector q = mulliken_charges(d, s);
    Vector shift(n);
    for (int i = 0; i < n; ++i) {
        const SpeciesParams& sp = p.species(g.species[i]);
        shift(i) = sp.hubbard_u * (q(i) - sp.q_ref);
    }
    Matrix h = h0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) h(i, j) += 0.5 * s(i, j) * (shift(i) + shift(j));
    return h;
}

Matrix effective_hamiltonian(const Matrix& d, const Geometry& g, const ModelParams& p) {
    return effective_hamiltonian(d, build_overlap(g, p), build_h0(g, p), g, p);
}

double homo_lumo_gap(const Vector& energies, int n_electrons) {
    const int homo = n_electrons / 2 - 1;
    if (homo < 0 || homo + 1 >= energies.size()) return 0.0;
    return energies(homo + 1) - energies(homo);
}

Observables observables(const ScfSolution& sol, const Geometry& g, const ModelParams& p) {
    aufbau_checked(sol.orbitals.energies, g.n_electrons);
    return {energy(sol.density, g, p), homo_lumo_gap(sol.orbitals.energies, g.n_electrons)};
}

Geometry ring_geometry(int n_atoms, double bond, int n_electrons, const std::string& species) {
    if (n_atoms < 3 || !(bond > 0)) fail(ErrorCode::InvalidArgument, "ring needs >= 3 atoms and bond > 0");
    const double pi = std::acos(-1.0);
    const double radius = bond / (2.0 * std::sin(pi / n_atoms));
    Geometry g;
    g.n_electrons = n_electrons;
    for (int i = 0; i < n_atoms; ++i) {
        const double phi = 2.0 * pi * i / n_atoms;
        g.species.push_back(species);
        g.positions.emplace_back(radius * std::cos(phi), radius * std::sin(phi), 0.0);
    }
    return g;
}

Geometry chain_geometry(int n_atoms, double bond, int n_electrons, const std::string& species) {
    if (n_atoms < 1 || !(bond > 0)) fail(ErrorCode::InvalidArgument, "chain needs >= 1 atom and bond > 0");
    Geometry g;
    g.n_electrons = n_electrons;
    for (int i = 0; i < n_atoms; ++i) {
        g.species.push_back(species);
        g.positions.emplace_back(bond * i, 0.0, 0.0);
    }
    return g;
}

} // namespace scdiis
