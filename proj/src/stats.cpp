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

#include "scdiis/stats.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "scdiis/util.hpp"

namespace scdiis {

std::string_view bin_scheme_name(BinScheme s) {
    return s == BinScheme::EqualWidth ? "equal_width" : "equal_count";
}

BinScheme parse_bin_scheme(std::string_view text) {
    if (text == "equal_width") return BinScheme::EqualWidth;
    if (text == "equal_count") return BinScheme::EqualCount;
    fail(ErrorCode::ParseError, fmt::format("unknown bin scheme '{}' (equal_width|equal_count)", text));
}

void BinConfig::validate() const {
    if (n_bins < 3) fail(ErrorCode::InvalidArgument, "n_bins must be >= 3");
    if (min_count < 1) fail(ErrorCode::InvalidArgument, "min_count must be >= 1");
}

std::vector<const Bin*> BinnedSeries::retained() const {
    std::vector<const Bin*> out;
    for (const Bin& b : bins)
        if (b.retained) out.push_back(&b);
    return out;
}

BinnedSeries bin_records(const std::vector<double>& x, const std::vector<double>& y,
                         const BinConfig& cfg) {
    cfg.validate();
    if (x.size() != y.size())
        fail(ErrorCode::DimensionMismatch, fmt::format("{} x values but {} y values", x.size(), y.size()));
    if (x.empty()) fail(ErrorCode::InsufficientData, "no records to bin");
    for (std::size_t i = 0; i < x.size(); ++i)
        if (!std::isfinite(x[i]) || !std::isfinite(y[i]))
            fail(ErrorCode::InvalidArgument, fmt::format("record {} is not finite", i));

    std::vector<std::pair<double, double>> rec(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) rec[i] = {x[i], y[i]};
    std::sort(rec.begin(), rec.end());

    const std::size_t n = rec.size();
    const std::size_t nb = static_cast<std::size_t>(cfg.n_bins);
    BinnedSeries s;
    s.total = static_cast<int>(n);
    s.edges.resize(nb + 1);
    std::vector<std::size_t> start(nb + 1); // record range of each bin

    if (cfg.scheme == BinScheme::EqualCount) {
        if (n < nb)
            fail(ErrorCode::InsufficientData,
                 fmt::format("{} records cannot fill {} equal-count bins", n, nb));
        const std::size_t base = n / nb, rem = n % nb;
        start[0] = 0;
        for (std::size_t b = 0; b < nb; ++b) start[b + 1] = start[b] + base + (b < rem ? 1 : 0);
        s.edges[0] = rec.front().first;
        s.edges[nb] = rec.back().first;
        for (std::size_t b = 1; b < nb; ++b)
            s.edges[b] = 0.5 * (rec[start[b] - 1].first + rec[start[b]].first);
    } else {
        const double lo = rec.front().first, hi = rec.back().first;
        const double w = (hi - lo) / static_cast<double>(nb);
        for (std::size_t b = 0; b <= nb; ++b) s.edges[b] = lo + w * static_cast<double>(b);
        s.edges[nb] = hi;
        std::size_t r = 0;
        for (std::size_t b = 0; b < nb; ++b) {
            start[b] = r;
            if (b + 1 == nb || w == 0.0)
                r = n; // constant x lands in bin 0
            else
                while (r < n && rec[r].first < s.edges[b + 1]) ++r;
        }
        start[nb] = n;
    }

    s.bins.resize(nb);
    for (std::size_t b = 0; b < nb; ++b) {
        Bin& bin = s.bins[b];
        bin.lo = s.edges[b];
        bin.hi = s.edges[b + 1];
        bin.center = 0.5 * (bin.lo + bin.hi);
        bin.count = static_cast<int>(start[b + 1] - start[b]);
        if (bin.count == 0) continue;
        double sx = 0.0, sy = 0.0;
        for (std::size_t r = start[b]; r < start[b + 1]; ++r) {
            sx += rec[r].first;
            sy += rec[r].second;
        }
        bin.x_mean = sx / bin.count;
        bin.mean = sy / bin.count;
        if (bin.count > 1) {
            double ss = 0.0;
            for (std::size_t r = start[b]; r < start[b + 1]; ++r)
                ss += (rec[r].second - bin.mean) * (rec[r].second - bin.mean);
            bin.std = std::sqrt(ss / (bin.count - 1));
        }
        bin.retained = bin.count >= cfg.min_count;
    }
    return s;
}

RegressionResult linfit(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size())
        fail(ErrorCode::DimensionMismatch, fmt::format("{} x values but {} y values", x.size(), y.size()));
    const std::size_t n = x.size();
    if (n < 3) fail(ErrorCode::InsufficientData, fmt::format("linear fit needs >= 3 points, got {}", n));
    const double xm = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
    const double ym = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - xm) * (x[i] - xm);
        sxy += (x[i] - xm) * (y[i] - ym);
    }
    if (!(sxx > 0)) fail(ErrorCode::DegenerateInput, "linear fit: all x values are identical");

    const bool y_constant = std::all_of(y.begin(), y.end(), [&](double v) { return v == y.front(); });
    RegressionResult r;
    r.n_points = static_cast<int>(n);
    r.slope = y_constant ? 0.0 : sxy / sxx;
    r.intercept = y_constant ? y.front() : ym - r.slope * xm;
    double ss_res = 0.0, ss_tot = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double e = y[i] - r(x[i]);
        ss_res += e * e;
        ss_tot += (y[i] - ym) * (y[i] - ym);
    }
    if (y_constant) ss_tot = ss_res = 0.0;
    if (ss_tot == 0.0) {
        if (ss_res > 0) fail(ErrorCode::DegenerateInput, "linear fit: SS_tot = 0 with SS_res > 0");
        r.r_squared = 1.0;
    } else {
        r.r_squared = std::clamp(1.0 - ss_res / ss_tot, 0.0, 1.0);
    }
    const double s2 = ss_res / static_cast<double>(n - 2);
    r.slope_stderr = std::sqrt(s2 / sxx);
    double sum_x2 = 0.0;
    for (double v : x) sum_x2 += v * v;
    r.intercept_stderr = std::sqrt(s2 * sum_x2 / (static_cast<double>(n) * sxx));
    return r;
}

std::string_view condition_name(Condition c) {
    return c == Condition::SelfDiis ? "self_diis" : "strict_diis";
}

Condition parse_condition(std::string_view text) {
    if (text == "self_diis") return Condition::SelfDiis;
    if (text == "strict_diis") return Condition::StrictDiis;
    fail(ErrorCode::ParseError, fmt::format("unknown condition '{}' (self_diis|strict_diis)", text));
}

std::string_view target_name(Target t) {
    switch (t) {
    case Target::StrictDiis: return "strict_diis";
    case Target::MaeH: return "mae_h";
    case Target::MaeD: return "mae_d";
    case Target::DEtotal: return "d_e_total";
    case Target::DGap: return "d_gap";
    }
    return "unknown";
}

Target parse_target(std::string_view text) {
    if (text == "strict_diis") return Target::StrictDiis;
    if (text == "mae" || text == "mae_h") return Target::MaeH;
    if (text == "mae_d") return Target::MaeD;
    if (text == "d_e_total") return Target::DEtotal;
    if (text == "d_gap") return Target::DGap;
    fail(ErrorCode::ParseError, fmt::format("unknown target '{}'", text));
}

std::vector<Target> parse_targets(std::string_view comma_list) {
    std::vector<Target> out;
    std::size_t pos = 0;
    while (pos <= comma_list.size()) {
        const std::size_t c = comma_list.find(',', pos);
        const std::string item = trim(comma_list.substr(pos, c == std::string_view::npos ? std::string_view::npos : c - pos));
        if (!item.empty()) out.push_back(parse_target(item));
        if (c == std::string_view::npos) break;
        pos = c + 1;
    }
    if (out.empty()) fail(ErrorCode::ParseError, "empty target list");
    return out;
}

namespace {

double target_value(const DiisReport& r, Target t, std::size_t index) {
    std::optional<double> v;
    switch (t) {
    case Target::StrictDiis: v = r.strict_diis; break;
    case Target::MaeH: v = r.mae_h; break;
    case Target::MaeD: v = r.mae_d; break;
    case Target::DEtotal: v = r.d_e_total; break;
    case Target::DGap: v = r.d_gap; break;
    }
    if (!v)
        fail(ErrorCode::InsufficientData,
             fmt::format("report {} has no '{}' value (labels required)", index, target_name(t)));
    return *v;
}

} // namespace

CorrelationReport correlation_report(const std::vector<DiisReport>& reports, Condition condition,
                                     const std::vector<Target>& targets, const BinConfig& cfg) {
    cfg.validate();
    if (reports.empty()) fail(ErrorCode::InsufficientData, "no reports");
    CorrelationReport out;
    out.condition = condition;
    out.binning = cfg;
    for (const DiisReport& r : reports)
        out.x.push_back(condition == Condition::SelfDiis ? r.self_diis : r.strict_diis);

    for (Target t : targets) {
        std::vector<double> y;
        for (std::size_t i = 0; i < reports.size(); ++i) y.push_back(target_value(reports[i], t, i));
        TargetCorrelation tc;
        tc.target = t;
        tc.series = bin_records(out.x, y, cfg);

        std::vector<double> cx, cm, cs;
        for (const Bin* b : tc.series.retained()) {
            cx.push_back(b->center);
            cm.push_back(b->mean);
            cs.push_back(b->std);
        }
        std::vector<double> distinct = cx;
        distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
        if (distinct.size() < 3)
            fail(ErrorCode::InsufficientData,
                 fmt::format("target {}: {} distinct retained bins, need 3", target_name(t),
                             distinct.size()));
        if (cfg.fit_raw_points) {
            std::vector<std::pair<double, double>> rec(out.x.size());
            for (std::size_t i = 0; i < rec.size(); ++i) rec[i] = {out.x[i], y[i]};
            std::sort(rec.begin(), rec.end());
            std::vector<double> rx, ry;
            for (const auto& [a, b] : rec) {
                rx.push_back(a);
                ry.push_back(b);
            }
            tc.mean_fit = linfit(rx, ry);
        } else {
            tc.mean_fit = linfit(cx, cm);
        }
        tc.std_fit = linfit(cx, cs);
        out.y.push_back(std::move(y));
        out.targets.push_back(std::move(tc));
    }
    return out;
}

std::string bins_csv(const BinnedSeries& s) {
    std::string out = "bin,lo,hi,center,x_mean,count,mean,std,retained\n";
    for (std::size_t b = 0; b < s.bins.size(); ++b) {
        const Bin& bin = s.bins[b];
        out += fmt::format("{},{},{},{},{},{},{},{},{}\n", b, format_double(bin.lo),
                           format_double(bin.hi), format_double(bin.center),
                           format_double(bin.x_mean), bin.count, format_double(bin.mean),
                           format_double(bin.std), bin.retained ? 1 : 0);
    }
    return out;
}

std::string summary_csv(const CorrelationReport& r) {
    std::string out =
        "condition,target,statistic,slope,intercept,r_squared,n_points,slope_stderr,intercept_stderr\n";
    for (const TargetCorrelation& t : r.targets)
        for (int k = 0; k < 2; ++k) {
            const RegressionResult& f = k == 0 ? t.mean_fit : t.std_fit;
            out += fmt::format("{},{},{},{},{},{},{},{},{}\n", condition_name(r.condition),
                               target_name(t.target), k == 0 ? "mean" : "std",
                               format_double(f.slope), format_double(f.intercept),
                               format_double(f.r_squared), f.n_points,
                               format_double(f.slope_stderr), format_double(f.intercept_stderr));
        }
    return out;
}

std::string plot_csv(const CorrelationReport& r, std::size_t target_index) {
    if (target_index >= r.targets.size())
        fail(ErrorCode::InvalidArgument, fmt::format("no target at index {}", target_index));
    const TargetCorrelation& t = r.targets[target_index];
    const std::vector<double>& y = r.y[target_index];
    std::vector<std::pair<double, double>> rec(r.x.size());
    for (std::size_t i = 0; i < rec.size(); ++i) rec[i] = {r.x[i], y[i]};
    std::sort(rec.begin(), rec.end());
    std::string out = "x,y,fit_mean,fit_std,band_lo,band_hi\n";
    for (const auto& [x, yy] : rec) {
        const double m = t.mean_fit(x), s = t.std_fit(x);
        out += fmt::format("{},{},{},{},{},{}\n", format_double(x), format_double(yy),
                           format_double(m), format_double(s), format_double(m - 3 * s),
                           format_double(m + 3 * s));
    }
    return out;
}

} // namespace scdiis
