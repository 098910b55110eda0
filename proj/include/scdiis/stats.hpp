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

// Grouping of records by an error coordinate, per-group statistics and
// least-squares fits.

#include <string>
#include <string_view>
#include <vector>

#include "scdiis/validator.hpp"

namespace scdiis {

enum class BinScheme { EqualWidth, EqualCount };

std::string_view bin_scheme_name(BinScheme s);
BinScheme parse_bin_scheme(std::string_view text);

struct BinConfig {
    int n_bins = 20;
    BinScheme scheme = BinScheme::EqualCount;
    int min_count = 5;
    bool fit_raw_points = false; ///< mean regression on the raw records instead of bin means

    void validate() const;
};

struct Bin {
    double lo = 0.0, hi = 0.0;
    double center = 0.0; ///< regression coordinate
    double x_mean = 0.0;
    int count = 0;
    double mean = 0.0;
    double std = 0.0; ///< unbiased; 0 for fewer than two records
    bool retained = false;
};

struct BinnedSeries {
    std::vector<double> edges; ///< n_bins + 1, ascending
    std::vector<Bin> bins;
    int total = 0;

    std::vector<const Bin*> retained() const;
};

/// Records are ordered by (x, y) first, so the result does not depend on
/// input order.  Equal-count bins split the ordered records into chunks
/// whose sizes differ by at most one.
BinnedSeries bin_records(const std::vector<double>& x, const std::vector<double>& y,
                         const BinConfig& cfg = {});

struct RegressionResult {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    int n_points = 0;
    double slope_stderr = 0.0;
    double intercept_stderr = 0.0;

    double operator()(double x) const { return slope * x + intercept; }
};

/// Ordinary least squares, at least 3 points.
RegressionResult linfit(const std::vector<double>& x, const std::vector<double>& y);

enum class Condition { SelfDiis, StrictDiis };
std::string_view condition_name(Condition c);
Condition parse_condition(std::string_view text);

enum class Target { StrictDiis, MaeH, MaeD, DEtotal, DGap };
std::string_view target_name(Target t);
/// "mae" is accepted for mae_h.
Target parse_target(std::string_view text);
std::vector<Target> parse_targets(std::string_view comma_list);

struct TargetCorrelation {
    Target target = Target::StrictDiis;
    BinnedSeries series;
    RegressionResult mean_fit;
    RegressionResult std_fit;
};

struct CorrelationReport {
    Condition condition = Condition::SelfDiis;
    BinConfig binning;
    std::vector<double> x;                    ///< condition value per record
    std::vector<std::vector<double>> y;       ///< per target, per record
    std::vector<TargetCorrelation> targets;
};

/// Fewer than 3 retained bins with distinct centers raises InsufficientData,
/// as does a report missing a requested target.
CorrelationReport correlation_report(const std::vector<DiisReport>& reports, Condition condition,
                                     const std::vector<Target>& targets, const BinConfig& cfg = {});

/// bin,lo,hi,center,x_mean,count,mean,std,retained
std::string bins_csv(const BinnedSeries& s);
/// condition,target,statistic,slope,intercept,r_squared,n_points,slope_stderr,intercept_stderr
std::string summary_csv(const CorrelationReport& r);
/// x,y,fit_mean,fit_std,band_lo,band_hi for every record ordered by x;
/// the band is fit_mean +- 3 fit_std.
std::string plot_csv(const CorrelationReport& r, std::size_t target_index);

} // namespace scdiis
