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

#include "scdiis/pipeline.hpp"

#include <fmt/format.h>

#include <cmath>

#include "scdiis/util.hpp"

namespace scdiis {

std::vector<double> logspace(double lo, double hi, int n) {
    if (n < 1) fail(ErrorCode::InvalidArgument, "logspace needs n >= 1");
    if (!(lo > 0) || !(hi >= lo)) fail(ErrorCode::InvalidArgument, "logspace needs 0 < lo <= hi");
    if (n == 1) return {lo};
    std::vector<double> out(static_cast<std::size_t>(n));
    const double a = std::log10(lo), b = std::log10(hi);
    for (int i = 0; i < n; ++i) out[i] = std::pow(10.0, a + (b - a) * i / (n - 1));
    out.front() = lo;
    out.back() = hi;
    return out;
}

std::vector<ReportRow> validate_oracle_sweep(const Dataset& ds, const ModelParams& p,
                                             const SweepConfig& cfg) {
    ds.validate();
    if (cfg.sigmas.empty()) fail(ErrorCode::InvalidArgument, "no noise amplitudes");
    if (cfg.samples_per_sigma < 0) fail(ErrorCode::InvalidArgument, "samples_per_sigma must be >= 0");
    const std::size_t per = cfg.samples_per_sigma > 0 ? static_cast<std::size_t>(cfg.samples_per_sigma)
                                                      : ds.entries.size();
    std::vector<ReportRow> rows(cfg.sigmas.size() * per);
    parallel_for(rows.size(), cfg.jobs, [&](std::size_t k) {
        const std::size_t si = k / per, sample = k % per;
        const int entry = static_cast<int>(sample % ds.entries.size());
        const DatasetEntry& e = ds.entries[entry];
        const double sigma = cfg.sigmas[si];
        const std::uint64_t seed = derive_seed(derive_seed(cfg.seed, "oracle-noise", si), "sample", sample);
        const Prediction pred = oracle_noise_predict(e.solution, sigma, sigma, seed, cfg.noise_mode);
        rows[k] = {entry, PredictionSource::OracleNoise, sigma,
                   full_report(pred, e.solution, e.geometry, p, cfg.norm)};
    });
    return rows;
}

std::vector<ReportRow> validate_predictor(const Dataset& ds, const ModelParams& p,
                                          const Predictor& predictor, Norm norm, int jobs) {
    ds.validate();
    std::vector<ReportRow> rows(ds.entries.size());
    parallel_for(rows.size(), predictor.concurrent_safe() ? jobs : 1, [&](std::size_t k) {
        const DatasetEntry& e = ds.entries[k];
        const Prediction pred = predictor.predict(e.geometry);
        rows[k] = {static_cast<int>(k), pred.source, 0.0,
                   full_report(pred, e.solution, e.geometry, p, norm)};
    });
    return rows;
}

std::vector<ReportRow> validate_external(const Dataset& ds, const ModelParams& p,
                                         const std::filesystem::path& dir, Norm norm, int jobs) {
    ds.validate();
    std::vector<ReportRow> rows(ds.entries.size());
    parallel_for(rows.size(), jobs, [&](std::size_t k) {
        const auto sub = dir / fmt::format("{:05d}", k);
        Prediction pred{read_scvm(sub / "H.scvm"), read_scvm(sub / "D.scvm"),
                        PredictionSource::ExternalFile};
        const DatasetEntry& e = ds.entries[k];
        rows[k] = {static_cast<int>(k), PredictionSource::ExternalFile, 0.0,
                   full_report(pred, e.solution, e.geometry, p, norm)};
    });
    return rows;
}

std::vector<DiisReport> reports_of(const std::vector<ReportRow>& rows) {
    std::vector<DiisReport> out;
    out.reserve(rows.size());
    for (const ReportRow& r : rows) out.push_back(r.report);
    return out;
}

} // namespace scdiis
