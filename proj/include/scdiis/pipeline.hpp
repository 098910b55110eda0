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

// Dataset-level drivers shared by the C API and the tests.

#include <filesystem>
#include <vector>

#include "scdiis/surrogate.hpp"

namespace scdiis {

struct SweepConfig {
    std::vector<double> sigmas;
    int samples_per_sigma = 0; ///< 0: one sample per dataset entry
    NoiseMode noise_mode = NoiseMode::Independent;
    std::uint64_t seed = 0;
    Norm norm = Norm::Frobenius;
    int jobs = 1;
};

/// n log-spaced values from lo to hi inclusive; {lo} when n = 1.
std::vector<double> logspace(double lo, double hi, int n);

/// Labels perturbed by oracle noise with sigma_h = sigma_d = sigma; rows
/// ordered by sigma, then sample.
std::vector<ReportRow> validate_oracle_sweep(const Dataset& ds, const ModelParams& p,
                                             const SweepConfig& cfg);

/// One row per dataset entry, labels from the dataset.
std::vector<ReportRow> validate_predictor(const Dataset& ds, const ModelParams& p,
                                          const Predictor& predictor, Norm norm, int jobs = 1);

/// Predictions read from `dir/<entry>/H.scvm` and `D.scvm`, entries named
/// as in the dataset layout.
std::vector<ReportRow> validate_external(const Dataset& ds, const ModelParams& p,
                                         const std::filesystem::path& dir, Norm norm, int jobs = 1);

std::vector<DiisReport> reports_of(const std::vector<ReportRow>& rows);

} // namespace scdiis
