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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "scdiis/pipeline.hpp"
#include "scdiis/stats.hpp"
#include "test_support.hpp"

using namespace scdiis;

namespace {

struct Ols {
    double slope, intercept, r2;
};

Ols reference_fit(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    const double intercept = (sy - slope * sx) / n;
    double ss_res = 0, ss_tot = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        ss_res += std::pow(y[i] - slope * x[i] - intercept, 2);
        ss_tot += std::pow(y[i] - sy / n, 2);
    }
    return {slope, intercept, 1.0 - ss_res / ss_tot};
}

DiisReport report(double self, double strict, double mae) {
    DiisReport r;
    r.self_diis = self;
    r.strict_diis = strict;
    r.mae_h = mae;
    r.mae_d = mae;
    r.d_e_total = mae;
    r.d_gap = mae;
    return r;
}

std::vector<ReportRow> ring_sweep() {
    GenConfig gen;
    gen.n = 200;
    gen.amplitude = 0.05;
    gen.seed = 2;
    const Dataset ds = generate_dataset(ring_geometry(6, 1.4, 6, "C"), ModelParams{}, ScfConfig{}, gen);
    SweepConfig sweep;
    sweep.sigmas = logspace(1e-4, 1e-2, 9);
    sweep.seed = 3;
    return validate_oracle_sweep(ds, ModelParams{}, sweep);
}

} // namespace

TEST_CASE("bins of an exact line") {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0, 5);
    std::vector<double> x(500), y(500);
    for (int i = 0; i < 500; ++i) {
        x[i] = u(rng);
        y[i] = 2 * x[i];
    }
    for (BinScheme scheme : {BinScheme::EqualWidth, BinScheme::EqualCount}) {
        BinConfig cfg;
        cfg.scheme = scheme;
        const BinnedSeries s = bin_records(x, y, cfg);
        CHECK(s.bins.size() == 20);
        CHECK(s.edges.size() == 21);
        int total = 0;
        for (const Bin& b : s.bins) {
            total += b.count;
            if (b.count > 0) CHECK(b.mean == doctest::Approx(2 * b.x_mean).epsilon(1e-12));
            CHECK(b.x_mean >= b.lo - 1e-12);
            CHECK(b.x_mean <= b.hi + 1e-12);
        }
        CHECK(total == 500);
        CHECK(s.total == 500);
        CHECK(std::is_sorted(s.edges.begin(), s.edges.end()));
    }
}

TEST_CASE("constant targets have zero spread") {
    std::vector<double> x(100), y(100, 4.25);
    std::iota(x.begin(), x.end(), 0.0);
    const BinnedSeries s = bin_records(x, y);
    for (const Bin& b : s.bins) {
        CHECK(b.mean == 4.25);
        CHECK(b.std == 0.0);
    }
}

TEST_CASE("equal-count bins on a seeded sample") {
    std::mt19937_64 rng(7);
    std::lognormal_distribution<double> ln(0, 1);
    std::vector<double> x(10000), y(10000);
    for (int i = 0; i < 10000; ++i) {
        x[i] = ln(rng);
        y[i] = ln(rng);
    }
    const BinnedSeries s = bin_records(x, y);
    for (const Bin& b : s.bins) {
        CHECK(b.count == 500);
        CHECK(b.retained);
    }

    std::vector<double> x2(103), y2(103, 1.0);
    std::iota(x2.begin(), x2.end(), 0.0);
    for (const Bin& b : bin_records(x2, y2).bins) CHECK((b.count == 5 || b.count == 6));
}

TEST_CASE("unbiased per-bin standard deviation") {
    const std::vector<double> x = {1, 2, 3, 4, 5, 6}, y = {1, 3, 2, 8, 10, 9};
    BinConfig cfg;
    cfg.n_bins = 3;
    cfg.min_count = 1;
    const BinnedSeries s = bin_records(x, y, cfg);
    REQUIRE(s.bins.size() == 3);
    CHECK(s.bins[0].mean == 2.0);
    CHECK(s.bins[0].std == doctest::Approx(std::sqrt(2.0)));
    CHECK(s.bins[1].mean == 5.0);
    CHECK(s.bins[1].std == doctest::Approx(std::sqrt(18.0)));
}

TEST_CASE("sparse bins are not retained") {
    std::vector<double> x, y;
    for (int i = 0; i < 40; ++i) {
        x.push_back(i < 37 ? 0.01 * i : 10.0 + i);
        y.push_back(x.back());
    }
    BinConfig cfg;
    cfg.scheme = BinScheme::EqualWidth;
    cfg.n_bins = 5;
    const BinnedSeries s = bin_records(x, y, cfg);
    CHECK(s.bins.front().count == 37);
    CHECK(s.bins.front().retained);
    CHECK_FALSE(s.bins.back().retained);
    CHECK(s.retained().size() == 1);
}

TEST_CASE("binning does not depend on record order") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> nd;
    std::vector<double> x(300), y(300);
    for (int i = 0; i < 300; ++i) {
        x[i] = std::abs(nd(rng));
        y[i] = x[i] + 0.1 * nd(rng);
    }
    std::vector<int> perm(300);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<double> xs(300), ys(300);
    for (int i = 0; i < 300; ++i) {
        xs[i] = x[perm[i]];
        ys[i] = y[perm[i]];
    }
    CHECK(bins_csv(bin_records(x, y)) == bins_csv(bin_records(xs, ys)));
}

TEST_CASE("bin configuration checks") {
    BinConfig cfg;
    cfg.n_bins = 2;
    CHECK_THROWS_AS(cfg.validate(), Error);
    cfg = BinConfig{};
    cfg.min_count = 0;
    CHECK_THROWS_AS(cfg.validate(), Error);
    CHECK_THROWS_AS(bin_records({1, 2}, {1, 2, 3}), Error);
    CHECK_THROWS_AS(bin_records({1, 2, 3}, {1, 2, 3}), Error);
    CHECK(parse_bin_scheme("equal_width") == BinScheme::EqualWidth);
    CHECK(parse_bin_scheme(bin_scheme_name(BinScheme::EqualCount)) == BinScheme::EqualCount);
}

TEST_CASE("least squares") {
    const RegressionResult a = linfit({0, 1, 2, 3}, {1, 4, 7, 10});
    CHECK(a.slope == doctest::Approx(3));
    CHECK(a.intercept == doctest::Approx(1));
    CHECK(a.r_squared == doctest::Approx(1));
    CHECK(a.n_points == 4);
    CHECK(a(2.5) == doctest::Approx(8.5));

    const RegressionResult b = linfit({0, 1, 2}, {0, 1, 2});
    CHECK(b.slope == doctest::Approx(1));
    CHECK(std::abs(b.intercept) < 1e-14);
    CHECK(b.r_squared == doctest::Approx(1));

    std::mt19937_64 rng(4);
    std::normal_distribution<double> nd;
    std::vector<double> x(1000), y(1000);
    for (int i = 0; i < 1000; ++i) {
        x[i] = nd(rng);
        y[i] = nd(rng);
    }
    const RegressionResult noise = linfit(x, y);
    CHECK(noise.r_squared < 0.05);
    const Ols ref = reference_fit(x, y);
    CHECK(noise.slope == doctest::Approx(ref.slope).epsilon(1e-10));
    CHECK(noise.intercept == doctest::Approx(ref.intercept).epsilon(1e-10));
    CHECK(noise.r_squared == doctest::Approx(ref.r2).epsilon(1e-8));

    CHECK_THROWS_AS(linfit({1, 2}, {1, 2}), Error);
    try {
        linfit({1, 1, 1}, {1, 2, 3});
        FAIL("expected DegenerateInput");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DegenerateInput);
    }
    CHECK(linfit({1, 2, 3}, {5, 5, 5}).r_squared == 1.0);
}

TEST_CASE("binned regression recovers the slope") {
    std::mt19937_64 rng(10);
    std::uniform_real_distribution<double> u(0, 10);
    std::normal_distribution<double> nd(0, 2);
    for (int rep = 0; rep < 5; ++rep) {
        std::vector<double> x(2000), y(2000);
        for (int i = 0; i < 2000; ++i) {
            x[i] = u(rng);
            y[i] = 1.7 * x[i] - 0.4 + nd(rng);
        }
        std::vector<double> cx, cy;
        for (const Bin* b : bin_records(x, y).retained()) {
            cx.push_back(b->center);
            cy.push_back(b->mean);
        }
        const RegressionResult fit = linfit(cx, cy);
        CHECK(std::abs(fit.slope - 1.7) <= 3 * fit.slope_stderr);
    }
}

TEST_CASE("stderr of the slope matches the textbook formula") {
    const std::vector<double> x = {1, 2, 3, 4, 5}, y = {1.1, 1.9, 3.2, 3.9, 5.1};
    const RegressionResult r = linfit(x, y);
    const Ols ref = reference_fit(x, y);
    double ss_res = 0, sxx = 0;
    for (int i = 0; i < 5; ++i) {
        ss_res += std::pow(y[i] - ref.slope * x[i] - ref.intercept, 2);
        sxx += std::pow(x[i] - 3.0, 2);
    }
    CHECK(r.slope_stderr == doctest::Approx(std::sqrt(ss_res / 3 / sxx)));
    CHECK(r.intercept_stderr == doctest::Approx(std::sqrt(ss_res / 3 * (1.0 / 5 + 9.0 / sxx))));
}

TEST_CASE("correlation of a synthetic report set") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.1, 1.0);
    std::normal_distribution<double> nd(0, 0.01);
    std::vector<DiisReport> reports;
    for (int i = 0; i < 400; ++i) {
        const double s = u(rng);
        reports.push_back(report(s, 0.5 * s + nd(rng), 0.1 * s * (1 + nd(rng))));
    }
    const std::vector<Target> targets = parse_targets("strict_diis,mae,d_e_total,d_gap");
    const CorrelationReport r = correlation_report(reports, Condition::SelfDiis, targets);
    REQUIRE(r.targets.size() == 4);
    CHECK(r.targets[0].target == Target::StrictDiis);
    CHECK(r.targets[1].target == Target::MaeH);
    CHECK(r.targets[0].mean_fit.slope == doctest::Approx(0.5).epsilon(0.05));
    CHECK(r.targets[0].mean_fit.r_squared > 0.95);
    CHECK(r.targets[0].mean_fit.n_points == 20);
    CHECK(r.x.size() == 400);

    const std::string summary = summary_csv(r);
    CHECK(summary.rfind("condition,target,statistic,slope,intercept,r_squared,n_points,"
                        "slope_stderr,intercept_stderr\n",
                        0) == 0);
    CHECK(std::count(summary.begin(), summary.end(), '\n') == 1 + 8);
    CHECK(summary.find("self_diis,strict_diis,mean,") != std::string::npos);
    CHECK(summary.find("self_diis,d_gap,std,") != std::string::npos);

    const std::string bins = bins_csv(r.targets[0].series);
    CHECK(bins.rfind("bin,lo,hi,center,x_mean,count,mean,std,retained\n", 0) == 0);
    CHECK(std::count(bins.begin(), bins.end(), '\n') == 21);

    const std::string plot = plot_csv(r, 0);
    CHECK(plot.rfind("x,y,fit_mean,fit_std,band_lo,band_hi\n", 0) == 0);
    CHECK(std::count(plot.begin(), plot.end(), '\n') == 401);

    BinConfig raw;
    raw.fit_raw_points = true;
    const CorrelationReport rr = correlation_report(reports, Condition::SelfDiis, targets, raw);
    CHECK(rr.targets[0].mean_fit.n_points == 400);
}

TEST_CASE("correlation report is order invariant and deterministic") {
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<DiisReport> reports;
    for (int i = 0; i < 200; ++i) reports.push_back(report(u(rng), u(rng), u(rng)));
    std::vector<DiisReport> shuffled = reports;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    const auto targets = parse_targets("strict_diis,mae");
    const CorrelationReport a = correlation_report(reports, Condition::SelfDiis, targets);
    const CorrelationReport b = correlation_report(shuffled, Condition::SelfDiis, targets);
    CHECK(summary_csv(a) == summary_csv(b));
    CHECK(bins_csv(a.targets[1].series) == bins_csv(b.targets[1].series));
    CHECK(plot_csv(a, 1) == plot_csv(b, 1));
}

TEST_CASE("degenerate report sets") {
    const std::vector<DiisReport> same(50, report(0.2, 0.1, 0.05));
    try {
        correlation_report(same, Condition::SelfDiis, {Target::StrictDiis});
        FAIL("expected InsufficientData");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InsufficientData);
    }
    std::vector<DiisReport> unlabeled;
    for (int i = 0; i < 100; ++i) {
        DiisReport r;
        r.self_diis = 0.01 * i;
        r.strict_diis = 0.02 * i;
        unlabeled.push_back(r);
    }
    CHECK_NOTHROW(correlation_report(unlabeled, Condition::SelfDiis, {Target::StrictDiis}));
    CHECK_THROWS_AS(correlation_report(unlabeled, Condition::SelfDiis, {Target::MaeH}), Error);
    CHECK_THROWS_AS(parse_targets("strict_diis,energy"), Error);
    CHECK(parse_condition("strict_diis") == Condition::StrictDiis);
}

TEST_CASE("noisy-oracle sweep on the ring") {
    const std::vector<ReportRow> rows = ring_sweep();
    REQUIRE(rows.size() == 1800);
    const auto reports = reports_of(rows);
    const auto targets = parse_targets("strict_diis,mae,d_e_total,d_gap");
    const CorrelationReport count = correlation_report(reports, Condition::SelfDiis, targets);
    BinConfig width_cfg;
    width_cfg.scheme = BinScheme::EqualWidth;
    const CorrelationReport width = correlation_report(reports, Condition::SelfDiis, targets, width_cfg);
    const double r_count = count.targets[0].mean_fit.r_squared;
    const double r_width = width.targets[0].mean_fit.r_squared;
    MESSAGE("R2 equal_count " << r_count << ", equal_width " << r_width);
    CHECK(r_count >= 0.95);
    CHECK(std::abs(r_count - r_width) <= 0.1);
    CHECK(count.targets[1].mean_fit.r_squared >= 0.9);
    for (const auto& t : count.targets) {
        CHECK(std::isfinite(t.mean_fit.r_squared));
        CHECK(std::isfinite(t.std_fit.r_squared));
    }
}
