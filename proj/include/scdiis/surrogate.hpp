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

// Stand-in predictors of (H, D): a noise-injected oracle and a kernel
// weighted nearest-neighbour regressor over single-molecule datasets.

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "scdiis/mdsim.hpp"

namespace scdiis {

struct DatasetEntry {
    Geometry geometry;
    ScfSolution solution;
};

struct Dataset {
    std::vector<DatasetEntry> entries;
    std::map<std::string, std::string> metadata; ///< generation config and seed

    int size() const { return static_cast<int>(entries.size()); }
    /// Shared species sequence, converged labels.
    void validate() const;
};

enum class GenMode { RandomPerturb, MdSample };

std::string_view gen_mode_name(GenMode m);
GenMode parse_gen_mode(std::string_view text);

struct GenConfig {
    int n = 100;
    GenMode mode = GenMode::RandomPerturb;
    double amplitude = 0.05;  ///< A, random_perturb
    double temperature = 300; ///< K, md_sample
    int equilibration = 400;  ///< md_sample steps discarded before sampling
    int stride = 10;          ///< md_sample steps between frames
    std::uint64_t seed = 0;
    int jobs = 1;
    MdConfig md; ///< dt, tau and force settings for md_sample
};

/// Skipped (non-converging) samples are replaced, up to 10 n attempts in
/// total; beyond that GenerationExhausted.  `log` receives one line per
/// skipped sample when non-null.
Dataset generate_dataset(const Geometry& seed_geometry, const ModelParams& p, const ScfConfig& scf,
                         const GenConfig& cfg, std::vector<std::string>* log = nullptr);

/// Directory layout: manifest.txt plus one zero-padded subdirectory per
/// entry holding geometry.xyz, H.scvm, D.scvm, S.scvm and meta.txt.
void save_dataset(const Dataset& ds, const std::filesystem::path& dir);
Dataset load_dataset(const std::filesystem::path& dir);

// ---------------------------------------------------------------------------

enum class NoiseMode { Independent, Shared };
NoiseMode parse_noise_mode(std::string_view text);

/// Adds symmetric Gaussian noise to the label: every element of the upper
/// triangle is drawn from N(0, sigma^2) and mirrored, so each element of the
/// output deviates by exactly N(0, sigma^2).  Shared mode reuses the same
/// draws for H and D.
Prediction oracle_noise_predict(const ScfSolution& label, double sigma_h, double sigma_d,
                                std::uint64_t seed, NoiseMode mode = NoiseMode::Independent);

/// SCF label plus fixed noise: the same seed at every geometry, so the
/// prediction is smooth in the coordinates.
class OracleNoisePredictor : public Predictor {
  public:
    OracleNoisePredictor(ModelParams p, ScfConfig scf, double sigma_h, double sigma_d,
                         std::uint64_t seed, NoiseMode mode = NoiseMode::Independent)
        : exact_(std::move(p), scf), sigma_h_(sigma_h), sigma_d_(sigma_d), seed_(seed), mode_(mode) {}
    Prediction predict(const Geometry& g) const override;

  private:
    ExactPredictor exact_;
    double sigma_h_, sigma_d_;
    std::uint64_t seed_;
    NoiseMode mode_;
};

// ---------------------------------------------------------------------------

/// Sorted interatomic distances.
Vector distance_descriptor(const Geometry& g);

struct KernelModel {
    std::vector<std::string> species;
    int n_electrons = 0;
    std::vector<Vector> descriptors;
    std::vector<Matrix> hamiltonians;
    std::vector<Matrix> densities;
    double bandwidth = 0.0; // A
    int k_neighbors = 8;

    int size() const { return static_cast<int>(descriptors.size()); }
};

/// `bandwidth` defaults to the median nearest-neighbour descriptor
/// distance of the training set; k is clamped to the dataset size.
KernelModel kernel_fit(const Dataset& ds, std::optional<double> bandwidth = std::nullopt,
                       int k_neighbors = 8);

/// Normalized Gaussian weights over the k nearest descriptors (ties broken
/// by training index); `exclude` drops one training entry (leave-one-out).
Prediction kernel_predict(const KernelModel& m, const Geometry& g, int exclude = -1);

class KernelPredictor : public Predictor {
  public:
    explicit KernelPredictor(std::shared_ptr<const KernelModel> m) : model_(std::move(m)) {}
    Prediction predict(const Geometry& g) const override { return kernel_predict(*model_, g); }
    const KernelModel& model() const { return *model_; }

  private:
    std::shared_ptr<const KernelModel> model_;
};

/// Self-DIIS of leave-one-out predictions over the training set.
std::vector<double> loo_self_diis(const KernelModel& m, const Dataset& ds, const ModelParams& p,
                                  Norm norm = Norm::Frobenius);

/// Linear-interpolation percentile, pct in [0, 100].
double percentile(std::vector<double> values, double pct);

} // namespace scdiis
