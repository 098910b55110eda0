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

#include <cmath>
#include <fstream>
#include <iterator>
#include <random>

#include "scdiis/surrogate.hpp"
#include "scdiis/xyz.hpp"
#include "test_support.hpp"

using namespace scdiis;
namespace fs = std::filesystem;

namespace {

const Geometry kRing = ring_geometry(6, 1.4, 6, "X");

Dataset perturbed(int n, double amplitude, std::uint64_t seed, int jobs = 1) {
    GenConfig cfg;
    cfg.n = n;
    cfg.amplitude = amplitude;
    cfg.seed = seed;
    cfg.jobs = jobs;
    return generate_dataset(kRing, ModelParams{}, ScfConfig{}, cfg);
}

DatasetEntry entry_at(const Geometry& g) {
    return {g, scf_solve(g, ModelParams{}, ScfConfig{})};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Every file under `dir`, relative path -> bytes.
std::map<std::string, std::string> tree(const fs::path& dir) {
    std::map<std::string, std::string> out;
    for (const auto& e : fs::recursive_directory_iterator(dir))
        if (e.is_regular_file()) out[fs::relative(e.path(), dir).string()] = slurp(e.path());
    return out;
}

} // namespace

TEST_CASE("zero amplitude reproduces the seed") {
    const Dataset ds = perturbed(5, 0.0, 1);
    const ScfSolution ref = scf_solve(kRing, ModelParams{}, ScfConfig{});
    REQUIRE(ds.size() == 5);
    for (const auto& e : ds.entries) {
        CHECK(e.geometry.positions == kRing.positions);
        CHECK(e.solution.density == ref.density);
        CHECK(e.solution.hamiltonian == ref.hamiltonian);
    }
    CHECK(ds.metadata.at("mode") == "random_perturb");
    CHECK(ds.metadata.at("seed") == "1");
}

TEST_CASE("perturbations are uniform within the amplitude") {
    const Dataset ds = perturbed(40, 0.05, 2);
    double largest = 0.0;
    for (const auto& e : ds.entries)
        for (int a = 0; a < 6; ++a)
            largest = std::max(largest, (e.geometry.positions[a] - kRing.positions[a]).cwiseAbs().maxCoeff());
    CHECK(largest <= 0.05);
    CHECK(largest > 0.04);
    CHECK(ds.entries[0].geometry.positions != ds.entries[1].geometry.positions);
}

TEST_CASE("generation is deterministic and independent of the worker count") {
    const Dataset a = perturbed(100, 0.05, 7, 1);
    const Dataset b = perturbed(100, 0.05, 7, 4);
    const fs::path da = testing::scratch_dir("gen_a"), db = testing::scratch_dir("gen_b");
    save_dataset(a, da);
    save_dataset(b, db);
    const auto ta = tree(da), tb = tree(db);
    CHECK(ta.size() == 1 + 100 * 5);
    CHECK(ta == tb);

    const Dataset c = perturbed(100, 0.05, 8);
    CHECK(c.entries[0].geometry.positions != a.entries[0].geometry.positions);
}

TEST_CASE("dataset directory round trip") {
    const Dataset ds = perturbed(6, 0.05, 3);
    const fs::path dir = testing::scratch_dir("roundtrip");
    save_dataset(ds, dir);
    CHECK(fs::exists(dir / "manifest.txt"));
    for (const char* f : {"geometry.xyz", "H.scvm", "D.scvm", "S.scvm", "meta.txt"})
        CHECK(fs::exists(dir / "00005" / f));
    const Dataset back = load_dataset(dir);
    REQUIRE(back.size() == 6);
    CHECK(back.metadata == ds.metadata);
    for (int i = 0; i < 6; ++i) {
        CHECK(back.entries[i].solution.hamiltonian == ds.entries[i].solution.hamiltonian);
        CHECK(back.entries[i].solution.density == ds.entries[i].solution.density);
        CHECK(back.entries[i].solution.e_total == ds.entries[i].solution.e_total);
        CHECK(back.entries[i].geometry.positions == ds.entries[i].geometry.positions);
    }
    fs::remove(dir / "00002" / "H.scvm");
    CHECK_THROWS_AS(load_dataset(dir), Error);
    CHECK_THROWS_AS(load_dataset(dir / "nowhere"), Error);
}

TEST_CASE("error against the seed pair grows with amplitude") {
    const ScfSolution seed = scf_solve(kRing, ModelParams{}, ScfConfig{});
    const Prediction frozen{seed.hamiltonian, seed.density, PredictionSource::Exact};
    double last = 0.0;
    for (double amp : {0.02, 0.05, 0.1}) {
        const Dataset ds = perturbed(50, amp, 4);
        double mean = 0.0;
        for (const auto& e : ds.entries) mean += strict_diis(frozen, e.geometry, ModelParams{});
        mean /= ds.size();
        CHECK(mean > last);
        last = mean;
    }
}

TEST_CASE("exhausted generation") {
    // the symmetric seed converges in one step, every perturbed copy needs more
    ScfConfig tight;
    tight.max_iter = 1;
    GenConfig cfg;
    cfg.n = 3;
    cfg.amplitude = 0.05;
    std::vector<std::string> log;
    try {
        generate_dataset(kRing, ModelParams{}, tight, cfg, &log);
        FAIL("expected GenerationExhausted");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::GenerationExhausted);
    }
    CHECK(log.size() >= 30);

    cfg.n = 0;
    CHECK_THROWS_AS(generate_dataset(kRing, ModelParams{}, ScfConfig{}, cfg), Error);
    cfg.n = 2;
    cfg.amplitude = -1;
    CHECK_THROWS_AS(generate_dataset(kRing, ModelParams{}, ScfConfig{}, cfg), Error);
}

TEST_CASE("frames sampled from dynamics") {
    const Geometry g0 = read_xyz(testing::data_path("cluster4.xyz"));
    GenConfig cfg;
    cfg.mode = GenMode::MdSample;
    cfg.n = 12;
    cfg.temperature = 300;
    cfg.equilibration = 20;
    cfg.stride = 5;
    cfg.seed = 5;
    const Dataset ds = generate_dataset(g0, ModelParams{}, ScfConfig{}, cfg);
    REQUIRE(ds.size() == 12);
    CHECK(ds.metadata.at("mode") == "md_sample");
    CHECK(ds.metadata.at("stride") == "5");
    for (const auto& e : ds.entries) CHECK(e.solution.converged);
    CHECK(ds.entries[0].geometry.positions != ds.entries[1].geometry.positions);
    const Dataset again = generate_dataset(g0, ModelParams{}, ScfConfig{}, cfg);
    CHECK(again.entries[11].solution.density == ds.entries[11].solution.density);
    CHECK(parse_gen_mode(gen_mode_name(GenMode::MdSample)) == GenMode::MdSample);
}

TEST_CASE("oracle noise") {
    const ScfSolution label = scf_solve(kRing, ModelParams{}, ScfConfig{});
    const Prediction zero = oracle_noise_predict(label, 0.0, 0.0, 1);
    CHECK(zero.h_pred == label.hamiltonian);
    CHECK(zero.d_pred == label.density);
    CHECK(zero.source == PredictionSource::OracleNoise);

    const Prediction a = oracle_noise_predict(label, 1e-3, 1e-3, 42);
    const Prediction b = oracle_noise_predict(label, 1e-3, 1e-3, 42);
    CHECK(a.h_pred == b.h_pred);
    CHECK(a.d_pred == b.d_pred);
    CHECK(is_symmetric(a.h_pred, 0.0));
    CHECK(a.h_pred != oracle_noise_predict(label, 1e-3, 1e-3, 43).h_pred);
    CHECK((a.h_pred - label.hamiltonian) != (a.d_pred - label.density));

    const Prediction shared = oracle_noise_predict(label, 1e-3, 1e-3, 42, NoiseMode::Shared);
    CHECK(max_abs((shared.h_pred - label.hamiltonian) - (shared.d_pred - label.density)) < 1e-15);

    // every element deviates by N(0, sigma^2): mean |dev| = sigma sqrt(2/pi)
    const double sigma = 1e-2;
    double mae = 0.0;
    for (int s = 0; s < 1000; ++s)
        mae += matrix_mae(oracle_noise_predict(label, sigma, sigma, s).h_pred, label.hamiltonian);
    mae /= 1000;
    CHECK(mae == doctest::Approx(sigma * std::sqrt(2.0 / M_PI)).epsilon(0.2));
    CHECK_THROWS_AS(oracle_noise_predict(label, -1.0, 0.0, 1), Error);
}

TEST_CASE("oracle predictor is smooth in the coordinates") {
    const OracleNoisePredictor oracle(ModelParams{}, ScfConfig{}, 1e-3, 1e-3, 9);
    Geometry g = kRing;
    const Prediction a = oracle.predict(g);
    g.positions[0](0) += 1e-6;
    const Prediction b = oracle.predict(g);
    CHECK(max_abs(a.h_pred - b.h_pred) < 1e-4);
}

TEST_CASE("sorted distance descriptor") {
    const Vector d = distance_descriptor(kRing);
    REQUIRE(d.size() == 15);
    for (int i = 1; i < d.size(); ++i) CHECK(d(i) >= d(i - 1));
    CHECK(d(0) == doctest::Approx(1.4));
    CHECK(d(14) == doctest::Approx(2.8));
}

TEST_CASE("kernel recall, duplicates and averaging") {
    const Dataset ds = perturbed(20, 0.05, 11);
    const KernelModel m1 = kernel_fit(ds, std::nullopt, 1);
    for (int i : {0, 7, 19}) {
        const Prediction p = kernel_predict(m1, ds.entries[i].geometry);
        CHECK(p.h_pred == ds.entries[i].solution.hamiltonian);
        CHECK(p.d_pred == ds.entries[i].solution.density);
    }

    Dataset doubled = ds;
    doubled.entries.insert(doubled.entries.end(), ds.entries.begin(), ds.entries.end());
    const KernelModel all = kernel_fit(ds, 0.05, 20), all2 = kernel_fit(doubled, 0.05, 40);
    const Geometry q = perturbed(1, 0.05, 12).entries[0].geometry;
    CHECK(max_abs(kernel_predict(all, q).h_pred - kernel_predict(all2, q).h_pred) < 1e-13);
    CHECK(max_abs(kernel_predict(all, q).d_pred - kernel_predict(all2, q).d_pred) < 1e-13);

    // bonds 1.35 and 1.45 are equally far from 1.40 in descriptor space
    Dataset pair;
    pair.entries = {entry_at(ring_geometry(6, 1.35, 6, "X")), entry_at(ring_geometry(6, 1.45, 6, "X")),
                    entry_at(ring_geometry(6, 1.7, 6, "X"))};
    const KernelModel m2 = kernel_fit(pair, 0.1, 2);
    const Prediction mid = kernel_predict(m2, ring_geometry(6, 1.40, 6, "X"));
    const Matrix avg_h = 0.5 * (pair.entries[0].solution.hamiltonian + pair.entries[1].solution.hamiltonian);
    const Matrix avg_d = 0.5 * (pair.entries[0].solution.density + pair.entries[1].solution.density);
    CHECK(max_abs(mid.h_pred - avg_h) < 1e-9);
    CHECK(max_abs(mid.d_pred - avg_d) < 1e-9);

    // symmetric rings share eigenvectors, so blend two jittered frames instead
    Dataset two;
    two.entries = {ds.entries[0], ds.entries[1]};
    Geometry between = ds.entries[0].geometry;
    for (int a = 0; a < 6; ++a)
        between.positions[a] = 0.5 * (ds.entries[0].geometry.positions[a] + ds.entries[1].geometry.positions[a]);
    const Prediction blend = kernel_predict(kernel_fit(two, 0.05, 2), between);
    CHECK(self_diis(blend, build_overlap(between, ModelParams{})) > 1e-4);
}

TEST_CASE("kernel model fitting") {
    const Dataset ds = perturbed(30, 0.05, 13);
    const KernelModel m = kernel_fit(ds);
    CHECK(m.k_neighbors == 8);
    CHECK(m.bandwidth > 0.0);
    CHECK(kernel_fit(ds, std::nullopt, 100).k_neighbors == 30);
    CHECK(kernel_fit(ds, 0.3).bandwidth == 0.3);
    CHECK_THROWS_AS(kernel_fit(ds, 0.0), Error);
    CHECK_THROWS_AS(kernel_fit(ds, std::nullopt, 0), Error);
    try {
        kernel_fit(Dataset{});
        FAIL("expected EmptyDataset");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::EmptyDataset);
    }
    Geometry other = ds.entries[0].geometry;
    other.species[0] = "Y";
    try {
        kernel_predict(m, other);
        FAIL("expected SpeciesMismatch");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::SpeciesMismatch);
    }
    const Prediction p = kernel_predict(m, ds.entries[3].geometry);
    CHECK(is_symmetric(p.h_pred, 0.0));
    CHECK(is_symmetric(p.d_pred, 0.0));
    CHECK(p.h_pred.rows() == 6);
    CHECK(kernel_predict(m, ds.entries[3].geometry).h_pred == p.h_pred);
}

TEST_CASE("mixed species datasets are rejected") {
    Dataset ds = perturbed(3, 0.05, 14);
    ds.entries[1].geometry.species[2] = "Y";
    CHECK_THROWS_AS(ds.validate(), Error);
}

TEST_CASE("out-of-distribution queries stand out") {
    const Dataset ds = perturbed(100, 0.05, 15);
    const KernelModel m = kernel_fit(ds);
    const std::vector<double> loo = loo_self_diis(m, ds, ModelParams{});
    CHECK(loo.size() == 100);
    const double p95 = percentile(loo, 95);
    const Geometry squeezed = ring_geometry(6, 1.1, 6, "X");
    CHECK(self_diis(kernel_predict(m, squeezed), build_overlap(squeezed, ModelParams{})) > p95);
    std::vector<double> shaken;
    for (const auto& e : perturbed(20, 0.3, 16).entries)
        shaken.push_back(self_diis(kernel_predict(m, e.geometry), build_overlap(e.geometry, ModelParams{})));
    CHECK(percentile(shaken, 50) > p95);
}

TEST_CASE("leave-one-out errors on dynamics frames") {
    const Geometry g0 = read_xyz(testing::data_path("cluster4.xyz"));
    GenConfig cfg;
    cfg.mode = GenMode::MdSample;
    cfg.n = 200;
    cfg.equilibration = 50;
    cfg.stride = 2;
    cfg.seed = 6;
    const Dataset ds = generate_dataset(g0, ModelParams{}, ScfConfig{}, cfg);
    const KernelModel m = kernel_fit(ds);
    double mae = 0.0;
    for (int i = 0; i < ds.size(); ++i)
        mae += matrix_mae(kernel_predict(m, ds.entries[i].geometry, i).h_pred,
                          ds.entries[i].solution.hamiltonian);
    mae /= ds.size();
    MESSAGE("leave-one-out mae_h = " << mae);
    CHECK(std::isfinite(mae));
    CHECK(mae > 0.0);
}

TEST_CASE("percentiles") {
    CHECK(percentile({3, 1, 2}, 50) == 2.0);
    CHECK(percentile({0, 10}, 95) == doctest::Approx(9.5));
    CHECK(percentile({4}, 0) == 4.0);
    CHECK_THROWS_AS(percentile({}, 50), Error);
    CHECK_THROWS_AS(percentile({1}, 101), Error);
}
