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

#include "scdiis/matcore.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

namespace scdiis {

std::string_view error_code_name(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::Ok: return "Ok";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::LinearDependence: return "LinearDependence";
    case ErrorCode::DegenerateInput: return "DegenerateInput";
    case ErrorCode::FermiDegeneracy: return "FermiDegeneracy";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::SingularDiisSystem: return "SingularDiisSystem";
    case ErrorCode::PredictorFailure: return "PredictorFailure";
    case ErrorCode::GenerationExhausted: return "GenerationExhausted";
    case ErrorCode::EmptyDataset: return "EmptyDataset";
    case ErrorCode::SpeciesMismatch: return "SpeciesMismatch";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::NumericalBlowup: return "NumericalBlowup";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::ParseError: return "ParseError";
    }
    return "Unknown";
}

double max_abs(const Matrix& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

bool is_symmetric(const Matrix& m, double tol) {
    if (m.rows() != m.cols()) return false;
    const double bound = tol * std::max(1.0, max_abs(m));
    return ((m - m.transpose()).cwiseAbs().array() <= bound).all();
}

void require_symmetric(const Matrix& m, std::string_view what) {
    if (m.rows() != m.cols())
        fail(ErrorCode::DimensionMismatch,
             fmt::format("{} is {}x{}, expected a square matrix", what, m.rows(), m.cols()));
    if (!m.allFinite())
        fail(ErrorCode::InvalidArgument, fmt::format("{} has non-finite entries", what));
    if (!is_symmetric(m))
        fail(ErrorCode::InvalidArgument, fmt::format("{} is not symmetric", what));
}

void require_same_dim(std::initializer_list<const Matrix*> ms, std::string_view op) {
    if (ms.size() == 0) return;
    const auto n = (*ms.begin())->rows();
    for (const Matrix* m : ms) {
        if (m->rows() != n || m->cols() != n)
            fail(ErrorCode::DimensionMismatch,
                 fmt::format("{}: operand is {}x{}, expected {}x{}", op, m->rows(),
                             m->cols(), n, n));
    }
}

Matrix loewdin_inverse_sqrt(const Matrix& s, double lin_dep_tol) {
    require_symmetric(s, "overlap");
    Eigen::SelfAdjointEigenSolver<Matrix> es(s);
    if (es.info() != Eigen::Success)
        fail(ErrorCode::LinearDependence, "overlap eigendecomposition failed");
    const Vector& lam = es.eigenvalues();
    if (lam.size() > 0 && lam(0) <= lin_dep_tol)
        fail(ErrorCode::LinearDependence,
             fmt::format("overlap eigenvalue {:.3e} <= lin_dep_tol {:.1e}", lam(0), lin_dep_tol));
    const Matrix& u = es.eigenvectors();
    Matrix x = u * lam.cwiseSqrt().cwiseInverse().asDiagonal() * u.transpose();
    // symmetrize away the rounding asymmetry of the triple product
    return 0.5 * (x + x.transpose());
}

namespace {

void fix_column_signs(Matrix& c) {
    for (Eigen::Index j = 0; j < c.cols(); ++j) {
        for (Eigen::Index i = 0; i < c.rows(); ++i) {
            if (std::abs(c(i, j)) > 1e-12) {
                if (c(i, j) < 0.0) c.col(j) *= -1.0;
                break;
            }
        }
    }
}

} // namespace

EigSolution gen_eigensolve_with(const Matrix& h, const Matrix& x) {
    require_same_dim({&h, &x}, "gen_eigensolve");
    Matrix hp = x.transpose() * h * x;
    hp = 0.5 * (hp + hp.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> es(hp);
    if (es.info() != Eigen::Success)
        fail(ErrorCode::InvalidArgument, "eigendecomposition of orthogonalized H failed");
    EigSolution out{x * es.eigenvectors(), es.eigenvalues()};
    fix_column_signs(out.coeffs);
    return out;
}

EigSolution gen_eigensolve(const Matrix& h, const Matrix& s, double lin_dep_tol) {
    require_symmetric(h, "hamiltonian");
    require_same_dim({&h, &s}, "gen_eigensolve");
    return gen_eigensolve_with(h, loewdin_inverse_sqrt(s, lin_dep_tol));
}

int Occupation::n_occupied() const {
    return static_cast<int>((occ.array() > 0.0).count());
}

Occupation Occupation::aufbau(int n_orbitals, int n_electrons) {
    if (n_electrons <= 0 || n_electrons % 2 != 0)
        fail(ErrorCode::DegenerateInput,
             fmt::format("closed-shell occupation needs an even positive electron count, got {}",
                         n_electrons));
    if (n_electrons > 2 * n_orbitals)
        fail(ErrorCode::DegenerateInput,
             fmt::format("{} electrons do not fit in {} orbitals", n_electrons, n_orbitals));
    Occupation o{Vector::Zero(n_orbitals)};
    o.occ.head(n_electrons / 2).setConstant(2.0);
    return o;
}

Occupation aufbau_checked(const Vector& energies, int n_electrons, double degeneracy_tol) {
    Occupation o = Occupation::aufbau(static_cast<int>(energies.size()), n_electrons);
    const int homo = n_electrons / 2 - 1;
    if (homo + 1 < energies.size() &&
        energies(homo + 1) - energies(homo) <= degeneracy_tol)
        fail(ErrorCode::FermiDegeneracy,
             fmt::format("HOMO {:.12g} and LUMO {:.12g} are degenerate", energies(homo),
                         energies(homo + 1)));
    return o;
}

Matrix build_density(const Matrix& coeffs, const Occupation& occ) {
    if (coeffs.cols() != occ.occ.size())
        fail(ErrorCode::DimensionMismatch,
             fmt::format("build_density: {} orbitals but {} occupations", coeffs.cols(),
                         occ.occ.size()));
    Matrix d = coeffs * occ.occ.asDiagonal() * coeffs.transpose();
    return 0.5 * (d + d.transpose());
}

Matrix commutator_error(const Matrix& h, const Matrix& d, const Matrix& s) {
    require_same_dim({&h, &d, &s}, "commutator_error");
    const Matrix hds = h * d * s;
    const Matrix sdh = s * d * h;
    return hds - sdh;
}

double error_magnitude(const Matrix& e, Norm norm) {
    if (e.size() == 0) return 0.0;
    switch (norm) {
    case Norm::Frobenius: return e.norm();
    case Norm::ElementwiseMae: return e.cwiseAbs().sum() / static_cast<double>(e.size());
    }
    return 0.0;
}

Norm parse_norm(std::string_view text) {
    if (text == "frobenius") return Norm::Frobenius;
    if (text == "mae" || text == "elementwise_mae") return Norm::ElementwiseMae;
    fail(ErrorCode::ParseError, fmt::format("unknown norm '{}' (expected frobenius|mae)", text));
}

std::string_view norm_name(Norm norm) {
    return norm == Norm::Frobenius ? "frobenius" : "mae";
}

// ---------------------------------------------------------------------------

namespace {

constexpr char kMagic[4] = {'S', 'C', 'V', 'M'};
constexpr std::size_t kHeaderSize = 16;

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(const std::uint8_t* p) {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(p[i]) << (8 * i);
    return v;
}

std::uint64_t get_u64(const std::uint8_t* p) {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
    return v;
}

} // namespace

std::vector<std::uint8_t> encode_scvm(const Matrix& m) {
    std::vector<std::uint8_t> out;
    out.reserve(kHeaderSize + 8 * static_cast<std::size_t>(m.size()));
    out.insert(out.end(), std::begin(kMagic), std::end(kMagic));
    put_u32(out, kScvmVersion);
    put_u32(out, static_cast<std::uint32_t>(m.rows()));
    put_u32(out, static_cast<std::uint32_t>(m.cols()));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            put_u64(out, std::bit_cast<std::uint64_t>(m(i, j)));
    return out;
}

Matrix decode_scvm(const std::vector<std::uint8_t>& bytes) {
    if (bytes.size() < kHeaderSize) fail(ErrorCode::ParseError, "scvm: truncated header");
    if (std::memcmp(bytes.data(), kMagic, 4) != 0) fail(ErrorCode::ParseError, "scvm: bad magic");
    const std::uint32_t version = get_u32(bytes.data() + 4);
    if (version != kScvmVersion)
        fail(ErrorCode::ParseError, fmt::format("scvm: unsupported version {}", version));
    const std::uint32_t rows = get_u32(bytes.data() + 8);
    const std::uint32_t cols = get_u32(bytes.data() + 12);
    const std::size_t count = static_cast<std::size_t>(rows) * cols;
    if (bytes.size() != kHeaderSize + 8 * count)
        fail(ErrorCode::ParseError,
             fmt::format("scvm: {}x{} payload needs {} bytes, file has {}", rows, cols,
                         kHeaderSize + 8 * count, bytes.size()));
    Matrix m(rows, cols);
    const std::uint8_t* p = bytes.data() + kHeaderSize;
    for (std::uint32_t i = 0; i < rows; ++i)
        for (std::uint32_t j = 0; j < cols; ++j, p += 8)
            m(i, j) = std::bit_cast<double>(get_u64(p));
    return m;
}

void write_scvm(const std::filesystem::path& path, const Matrix& m) {
    const auto bytes = encode_scvm(m);
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) fail(ErrorCode::IoError, fmt::format("cannot open {} for writing", path.string()));
    f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!f) fail(ErrorCode::IoError, fmt::format("write to {} failed", path.string()));
}

Matrix read_scvm(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) fail(ErrorCode::IoError, fmt::format("cannot open {}", path.string()));
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)),
                                    std::istreambuf_iterator<char>());
    try {
        return decode_scvm(bytes);
    } catch (const Error& e) {
        fail(e.code(), fmt::format("{}: {}", path.string(), e.what()));
    }
}

} // namespace scdiis
