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

// Dense symmetric linear algebra for one-orbital-per-atom systems: the
// generalized eigenproblem H C = S C diag(eps), density construction from
// occupied orbitals and the commutator error e = H D S - S D H.

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <string_view>
#include <vector>

#include "scdiis/error.hpp"

namespace scdiis {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline constexpr double kDefaultLinDepTol = 1e-10;

/// Largest absolute entry, or 0 for an empty matrix.
double max_abs(const Matrix& m);

/// |M_ij - M_ji| <= tol * max(1, max|M|) for all i, j
bool is_symmetric(const Matrix& m, double tol = 1e-12);

/// Throws DimensionMismatch / InvalidArgument unless `m` is a finite,
/// square, symmetric matrix.  `what` names the operand in the message.
void require_symmetric(const Matrix& m, std::string_view what);

/// Throws DimensionMismatch unless all operands are n x n.
void require_same_dim(std::initializer_list<const Matrix*> ms, std::string_view op);

struct EigSolution {
    Matrix coeffs;   ///< columns S-orthonormal, ordered by ascending energy
    Vector energies; ///< ascending
};

/// Symmetric orthogonalizer X = S^(-1/2), so that X S X = I.
Matrix loewdin_inverse_sqrt(const Matrix& s, double lin_dep_tol = kDefaultLinDepTol);

/// Solves H C = S C diag(eps) through X^T H X.  Columns are sign-fixed so
/// that the first component with |c| > 1e-12 is positive.
EigSolution gen_eigensolve(const Matrix& h, const Matrix& s,
                           double lin_dep_tol = kDefaultLinDepTol);

/// Same as above with a precomputed orthogonalizer.
EigSolution gen_eigensolve_with(const Matrix& h, const Matrix& x);

/// Closed-shell aufbau occupations: 2 for the lowest n_electrons/2 orbitals.
struct Occupation {
    Vector occ;

    double electron_count() const { return occ.sum(); }
    int n_occupied() const;

    /// Rejects odd or out-of-range electron counts (DegenerateInput).
    static Occupation aufbau(int n_orbitals, int n_electrons);
};

/// aufbau() plus a FermiDegeneracy check against the supplied spectrum:
/// eps_HOMO and eps_LUMO closer than `degeneracy_tol` is rejected.
Occupation aufbau_checked(const Vector& energies, int n_electrons,
                          double degeneracy_tol = 1e-9);

/// D = C diag(occ) C^T
Matrix build_density(const Matrix& coeffs, const Occupation& occ);

/// e = H D S - S D H
Matrix commutator_error(const Matrix& h, const Matrix& d, const Matrix& s);

enum class Norm { Frobenius, ElementwiseMae };

/// frobenius: sqrt(sum e_ij^2); elementwise_mae: sum |e_ij| / n^2
double error_magnitude(const Matrix& e, Norm norm = Norm::Frobenius);

/// Accepts "frobenius" and "mae" (or "elementwise_mae").
Norm parse_norm(std::string_view text);
std::string_view norm_name(Norm norm);

// ---------------------------------------------------------------------------
// .scvm matrix files: "SCVM", u32 version (=1), u32 rows, u32 cols, then
// rows*cols little-endian float64 values in row-major order.

inline constexpr std::uint32_t kScvmVersion = 1;

std::vector<std::uint8_t> encode_scvm(const Matrix& m);
Matrix decode_scvm(const std::vector<std::uint8_t>& bytes);
void write_scvm(const std::filesystem::path& path, const Matrix& m);
Matrix read_scvm(const std::filesystem::path& path);

} // namespace scdiis
