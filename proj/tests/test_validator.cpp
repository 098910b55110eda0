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

#include <doctest.h>
#include <fmt/format.h>

#include <cmath>
#include <memory>
#include <random>

#include "oracles.hpp"
#include "scdiis/pipeline.hpp"
#include "scdiis/surrogate.hpp"
#include "scdiis/validator.hpp"
#include "test_support.hpp"

using namespace scdiis;

namespace {

Matrix sym_noise(int n, double amp, std::mt19937_64& rng) {
    return oracle::random_symmetric(n, rng, amp);
}

ScfSolution solve_ring(std::uint64_t seed, int n = 6) {
    std::mt19937_64 rng(seed);
    return scf_solve(testing::perturbed_ring(n, 1.4, 0.1, rng), ModelParams{}, ScfConfig{});
}

Geometry ring_of(std::uint64_t seed, int n = 6) {
    std::mt19937_64 rng(seed);
    return testing::perturbed_ring(n, 1.4, 0.1, rng);
}

Dataset ring_dataset(int n, std::uint64_t seed) {
    GenConfig cfg;
    cfg.n = n;
    cfg.amplitude = 0.05;
    cfg.seed = seed;
    return generate_dataset(ring_geometry(6, 1.4, 6, "X"), ModelParams{}, ScfConfig{}, cfg);
}

} // namespace

TEST_CASE("self-DIIS hand case and converged pairs") {
    Matrix h(2, 2), d(2, 2);
    h << 0, -1, -1, 0;
    d << 2, 0, 0, 0;
    const Prediction pred{h, d, PredictionSource::ExternalFile};
    CHECK(self_diis(pred, Matrix::Identity(2, 2)) == doctest::Approx(2 * std::sqrt(2.0)));
    CHECK(self_diis(pred, Matrix::Identity(2, 2), Norm::ElementwiseMae) == doctest::Approx(1.0));

    const ScfSolution sol = solve_ring(1);
    const Prediction exact{sol.hamiltonian, sol.density, PredictionSource::Exact};
    CHECK(self_diis(exact, sol.overlap) <= 1e-9);
}

TEST_CASE("report of the label against itself is zero") {
    const Geometry g = ring_of(2);
    const ModelParams p;
    const ScfSolution sol = scf_solve(g, p, ScfConfig{});
    const Prediction pred{sol.hamiltonian, sol.density, PredictionSource::Exact};
    const DiisReport r = full_report(pred, sol, g, p);
    CHECK(r.self_diis <= 1e-8);
    CHECK(r.strict_diis <= 1e-8);
    CHECK(*r.label_diis <= 1e-8);
    CHECK(*r.mixed_hd <= 1e-8);
    CHECK(*r.mixed_dh <= 1e-8);
    CHECK(*r.mae_h == 0.0);
    CHECK(*r.mae_d == 0.0);
    CHECK(*r.d_e_total <= 1e-8);
    CHECK(*r.d_gap <= 1e-8);
}

TEST_CASE("density noise shows up in the mixed error only on the density side") {
    const Geometry g = ring_of(3);
    const ModelParams p;
    const ScfSolution sol = scf_solve(g, p, ScfConfig{});
    std::mt19937_64 rng(4);
    const Prediction pred{sol.hamiltonian, sol.density + sym_noise(6, 1e-3, rng),
                          PredictionSource::OracleNoise};
    const DiisReport r = full_report(pred, sol, g, p);
    CHECK(*r.mixed_hd > 1e-4);
    CHECK(*r.mixed_dh <= 1e-8);
    CHECK(*r.label_diis <= 1e-8);
    CHECK(r.self_diis == doctest::Approx(*r.mixed_hd));
    CHECK(*r.mae_h == 0.0);
    CHECK(*r.mae_d > 0.0);
}

TEST_CASE("diagonalizing a wrong Hamiltonian fools the self-DIIS error") {
    // The documented false negative: a pair that is consistent with itself
    // has zero self-DIIS error no matter how far H is from the label.
    const Geometry g = ring_of(5);
    const ModelParams p;
    const ScfSolution sol = scf_solve(g, p, ScfConfig{});
    std::mt19937_64 rng(6);
    for (int trial = 0; trial < 10; ++trial) {
        const Matrix h_wrong = sol.hamiltonian + sym_noise(6, 0.5, rng);
        const EigSolution eig = gen_eigensolve(h_wrong, sol.overlap);
        const Matrix d = build_density(eig.coeffs, Occupation::aufbau(6, 6));
        const DiisReport r = full_report({h_wrong, d, PredictionSource::ExternalFile}, sol, g, p);
        CHECK(r.self_diis <= 1e-9 * std::max(1.0, h_wrong.norm() * sol.overlap.norm()));
        CHECK(*r.mae_h > 0.1);
        CHECK(r.strict_diis > 1e-3);
    }
}

TEST_CASE("self-DIIS approaches the label error linearly in the noise") {
    const Geometry g = ring_of(7);
    const ModelParams p;
    const ScfSolution sol = scf_solve(g, p, ScfConfig{});
    auto gap_at = [&](double sigma) {
        const DiisReport r = full_report(oracle_noise_predict(sol, sigma, sigma, 11), sol, g, p);
        return std::abs(r.self_diis - *r.label_diis);
    };
    // L from the smallest amplitude must bound the larger ones
    const double lipschitz = 1.1 * gap_at(1e-6) / 1e-6;
    CHECK(lipschitz > 0.0);
    for (double sigma : {1e-5, 1e-4, 1e-3}) CHECK(gap_at(sigma) <= lipschitz * sigma);
}

TEST_CASE("report input checks") {
    const Geometry g = ring_of(8);
    const ModelParams p;
    const Prediction bad{Matrix::Identity(5, 5), Matrix::Identity(5, 5), PredictionSource::ExternalFile};
    CHECK_THROWS_AS(unlabeled_report(bad, g, p), Error);
    Matrix asym = Matrix::Identity(6, 6);
    asym(0, 1) = 1;
    CHECK_THROWS_AS(unlabeled_report({asym, Matrix::Identity(6, 6), PredictionSource::ExternalFile}, g, p),
                    Error);
    const DiisReport r = unlabeled_report(
        {build_h0(g, p), Matrix::Identity(6, 6), PredictionSource::ExternalFile}, g, p);
    CHECK_FALSE(r.label_diis.has_value());
    CHECK_FALSE(r.mae_h.has_value());
    CHECK(matrix_mae(Matrix::Ones(2, 2), Matrix::Zero(2, 2)) == 1.0);
}

TEST_CASE("gradient of the exact predictor vanishes") {
    const Geometry g = ring_of(9);
    const ExactPredictor exact(ModelParams{}, ScfConfig{});
    const Vector grad = self_diis_position_gradient(g, ModelParams{}, exact, 1e-4, Norm::Frobenius, 4);
    CHECK(grad.size() == 18);
    CHECK(grad.cwiseAbs().maxCoeff() <= 1e-5);
    CHECK_THROWS_AS(self_diis_position_gradient(g, ModelParams{}, exact, 0.0), Error);
}

TEST_CASE("kernel self-DIIS gradient off the training manifold") {
    const ModelParams p;
    const Dataset ds = ring_dataset(60, 1);
    const KernelPredictor kernel(std::make_shared<KernelModel>(kernel_fit(ds)));

    const Geometry probe = ring_of(12);
    const Vector g0 = self_diis_position_gradient(probe, p, kernel, 1e-4);
    Vec3 net = Vec3::Zero();
    for (int a = 0; a < 6; ++a) net += g0.segment<3>(3 * a);
    CHECK(net.norm() <= 1e-5 * std::max(1.0, g0.norm()));

    // pulling one atom outward raises the error, and the gradient says so
    const Geometry base = ring_geometry(6, 1.4, 6, "X");
    double last = 0.0;
    for (double delta : {0.1, 0.2, 0.4}) {
        Geometry g = base;
        const Vec3 out = g.positions[0].normalized();
        g.positions[0] += delta * out;
        const double value = self_diis(kernel.predict(g), build_overlap(g, p));
        CHECK(value > last);
        last = value;
        const Vector grad = self_diis_position_gradient(g, p, kernel, 1e-4);
        CHECK(grad.segment<3>(0).dot(out) > 0.0);
    }
}

TEST_CASE("serial predictors are evaluated on one thread") {
    struct Serial : Predictor {
        mutable int active = 0;
        mutable bool overlapped = false;
        ExactPredictor inner{ModelParams{}, ScfConfig{}};
        Prediction predict(const Geometry& g) const override {
            if (++active > 1) overlapped = true;
            Prediction out = inner.predict(g);
            --active;
            return out;
        }
        bool concurrent_safe() const override { return false; }
    } serial;
    self_diis_position_gradient(ring_of(10), ModelParams{}, serial, 1e-4, Norm::Frobenius, 8);
    CHECK_FALSE(serial.overlapped);
}

TEST_CASE("report CSV round trip") {
    const Dataset ds = ring_dataset(4, 2);
    SweepConfig sweep;
    sweep.sigmas = {1e-4, 1e-3};
    sweep.seed = 3;
    std::vector<ReportRow> rows = validate_oracle_sweep(ds, ModelParams{}, sweep);
    REQUIRE(rows.size() == 8);
    CHECK(rows[0].sigma == 1e-4);
    CHECK(rows[4].sigma == 1e-3);
    rows.push_back({0, PredictionSource::Kernel, 0.0, DiisReport{0.5, 0.25}});

    const std::string text = reports_to_csv(rows);
    CHECK(text.rfind(std::string(kReportCsvHeader) + "\n", 0) == 0);
    const std::vector<ReportRow> back = reports_from_csv(text);
    REQUIRE(back.size() == rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(back[i].entry == rows[i].entry);
        CHECK(back[i].source == rows[i].source);
        CHECK(back[i].report.self_diis == rows[i].report.self_diis);
        CHECK(back[i].report.d_gap == rows[i].report.d_gap);
        CHECK(back[i].report.mae_h == rows[i].report.mae_h);
    }
    CHECK_FALSE(back.back().report.mae_h.has_value());
    CHECK(reports_to_csv(back) == text);

    CHECK_THROWS_AS(reports_from_csv("a,b,c\n1,2,3\n"), Error);
    CHECK_THROWS_AS(reports_from_csv(std::string(kReportCsvHeader) + "\n1,2,exact\n"), Error);
    CHECK_THROWS_AS(reports_from_csv(""), Error);
}

TEST_CASE("external predictions from disk") {
    const ModelParams p;
    const Dataset ds = ring_dataset(3, 4);
    const auto dir = testing::scratch_dir("external");
    for (int k = 0; k < 3; ++k) {
        const auto sub = dir / fmt::format("{:05d}", k);
        std::filesystem::create_directories(sub);
        write_scvm(sub / "H.scvm", ds.entries[k].solution.hamiltonian);
        write_scvm(sub / "D.scvm", ds.entries[k].solution.density);
    }
    const auto rows = validate_external(ds, p, dir, Norm::Frobenius);
    REQUIRE(rows.size() == 3);
    for (const auto& r : rows) {
        CHECK(r.source == PredictionSource::ExternalFile);
        CHECK(r.report.self_diis <= 1e-8);
        CHECK(*r.report.mae_h == 0.0);
    }
    std::filesystem::remove(dir / "00001" / "D.scvm");
    CHECK_THROWS_AS(validate_external(ds, p, dir, Norm::Frobenius), Error);
}

TEST_CASE("prediction source names") {
    for (auto s : {PredictionSource::Exact, PredictionSource::OracleNoise, PredictionSource::Kernel,
                   PredictionSource::ExternalFile})
        CHECK(parse_source(source_name(s)) == s);
    CHECK_THROWS_AS(parse_source("gnn"), Error);
}
