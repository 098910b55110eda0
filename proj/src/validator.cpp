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

#include "scdiis/validator.hpp"

#include <fmt/format.h>

#include <cmath>
#include <cstdlib>

#include "scdiis/util.hpp"

namespace scdiis {

std::string_view source_name(PredictionSource s) {
    switch (s) {
    case PredictionSource::Exact: return "exact";
    case PredictionSource::OracleNoise: return "oracle-noise";
    case PredictionSource::Kernel: return "kernel";
    case PredictionSource::ExternalFile: return "external-file";
    }
    return "unknown";
}

PredictionSource parse_source(std::string_view text) {
    if (text == "exact") return PredictionSource::Exact;
    if (text == "oracle-noise") return PredictionSource::OracleNoise;
    if (text == "kernel") return PredictionSource::Kernel;
    if (text == "external-file" || text == "external") return PredictionSource::ExternalFile;
    fail(ErrorCode::ParseError, fmt::format("unknown prediction source '{}'", text));
}

void Prediction::validate() const {
    require_symmetric(h_pred, "predicted H");
    require_symmetric(d_pred, "predicted D");
    require_same_dim({&h_pred, &d_pred}, "prediction");
}

Prediction ExactPredictor::predict(const Geometry& g) const {
    try {
        ScfSolution sol = scf_solve(g, params_, cfg_);
        return {std::move(sol.hamiltonian), std::move(sol.density), PredictionSource::Exact};
    } catch (const Error& e) {
        fail(ErrorCode::PredictorFailure, fmt::format("exact predictor: {}", e.what()));
    }
}

double self_diis(const Prediction& pred, const Matrix& s, Norm norm) {
    return error_magnitude(commutator_error(pred.h_pred, pred.d_pred, s), norm);
}

double strict_diis(const Prediction& pred, const Geometry& g, const ModelParams& p, Norm norm) {
    const Matrix s = build_overlap(g, p);
    const Matrix h = effective_hamiltonian(pred.d_pred, s, build_h0(g, p), g, p);
    return error_magnitude(commutator_error(h, pred.d_pred, s), norm);
}

double matrix_mae(const Matrix& a, const Matrix& b) {
    require_same_dim({&a, &b}, "matrix_mae");
    return a.size() == 0 ? 0.0 : (a - b).cwiseAbs().sum() / static_cast<double>(a.size());
}

DiisReport unlabeled_report(const Prediction& pred, const Geometry& g, const ModelParams& p,
                            Norm norm) {
    pred.validate();
    if (pred.h_pred.rows() != g.n_atoms())
        fail(ErrorCode::DimensionMismatch,
             fmt::format("prediction is {}x{} but geometry has {} atoms", pred.h_pred.rows(),
                         pred.h_pred.cols(), g.n_atoms()));
    DiisReport r;
    r.self_diis = self_diis(pred, build_overlap(g, p), norm);
    r.strict_diis = strict_diis(pred, g, p, norm);
    return r;
}

DiisReport full_report(const Prediction& pred, const ScfSolution& label, const Geometry& g,
                       const ModelParams& p, Norm norm) {
    DiisReport r = unlabeled_report(pred, g, p, norm);
    require_same_dim({&pred.h_pred, &label.hamiltonian, &label.density}, "full_report");
    const Matrix s = build_overlap(g, p);
    r.label_diis = error_magnitude(commutator_error(label.hamiltonian, label.density, s), norm);
    r.mixed_hd = error_magnitude(commutator_error(label.hamiltonian, pred.d_pred, s), norm);
    r.mixed_dh = error_magnitude(commutator_error(pred.h_pred, label.density, s), norm);
    r.mae_h = matrix_mae(pred.h_pred, label.hamiltonian);
    r.mae_d = matrix_mae(pred.d_pred, label.density);
    r.d_e_total = std::abs(energy(pred.d_pred, g, p) - label.e_total);
    const EigSolution eig = gen_eigensolve(pred.h_pred, s);
    r.d_gap = std::abs(homo_lumo_gap(eig.energies, g.n_electrons) - label.gap);
    return r;
}

Vector self_diis_position_gradient(const Geometry& g, const ModelParams& p,
                                   const Predictor& predictor, double step, Norm norm, int jobs) {
    if (!(step > 0)) fail(ErrorCode::InvalidArgument, "gradient step must be > 0");
    const Vector x0 = g.coordinates();
    Vector grad(x0.size());
    auto value_at = [&](const Vector& x) {
        Geometry gx = g;
        gx.set_coordinates(x);
        Prediction pred;
        try {
            pred = predictor.predict(gx);
        } catch (const Error& e) {
            if (e.code() == ErrorCode::PredictorFailure) throw;
            fail(ErrorCode::PredictorFailure, e.what());
        }
        return self_diis(pred, build_overlap(gx, p), norm);
    };
    parallel_for(static_cast<std::size_t>(x0.size()), predictor.concurrent_safe() ? jobs : 1,
                 [&](std::size_t k) {
                     Vector xp = x0, xm = x0;
                     xp(k) += step;
                     xm(k) -= step;
                     grad(k) = (value_at(xp) - value_at(xm)) / (2.0 * step);
                 });
    return grad;
}

// ---------------------------------------------------------------------------

const char* const kReportCsvHeader =
    "index,entry,source,sigma,self_diis,strict_diis,label_diis,mixed_hd,mixed_dh,mae_h,"
    "mae_d,d_e_total,d_gap";

namespace {

std::string opt_cell(const std::optional<double>& v) {
    return v ? format_double(*v) : std::string();
}

std::optional<double> parse_opt(const std::string& cell, std::size_t lineno) {
    if (cell.empty()) return std::nullopt;
    char* end = nullptr;
    const double v = std::strtod(cell.c_str(), &end);
    if (end != cell.c_str() + cell.size())
        fail(ErrorCode::ParseError, fmt::format("report csv line {}: bad number '{}'", lineno, cell));
    return v;
}

std::vector<std::string> split_csv(std::string_view line) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (true) {
        const std::size_t c = line.find(',', pos);
        out.push_back(trim(line.substr(pos, c == std::string_view::npos ? line.size() - pos : c - pos)));
        if (c == std::string_view::npos) break;
        pos = c + 1;
    }
    return out;
}

} // namespace

std::string reports_to_csv(const std::vector<ReportRow>& rows) {
    std::string out = std::string(kReportCsvHeader) + "\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const ReportRow& r = rows[i];
        const DiisReport& d = r.report;
        out += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{}\n", i, r.entry,
                           source_name(r.source), format_double(r.sigma),
                           format_double(d.self_diis), format_double(d.strict_diis),
                           opt_cell(d.label_diis), opt_cell(d.mixed_hd), opt_cell(d.mixed_dh),
                           opt_cell(d.mae_h), opt_cell(d.mae_d), opt_cell(d.d_e_total),
                           opt_cell(d.d_gap));
    }
    return out;
}

std::vector<ReportRow> reports_from_csv(std::string_view text) {
    std::vector<ReportRow> rows;
    std::size_t pos = 0;
    std::size_t lineno = 0;
    bool header_seen = false;
    while (pos < text.size()) {
        const std::size_t nl = text.find('\n', pos);
        const std::string line =
            trim(text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos));
        pos = nl == std::string_view::npos ? text.size() : nl + 1;
        ++lineno;
        if (line.empty()) continue;
        if (!header_seen) {
            if (line != kReportCsvHeader)
                fail(ErrorCode::ParseError, "report csv: unexpected header (column order is fixed)");
            header_seen = true;
            continue;
        }
        const auto cells = split_csv(line);
        if (cells.size() != 13)
            fail(ErrorCode::ParseError,
                 fmt::format("report csv line {}: expected 13 columns, got {}", lineno, cells.size()));
        ReportRow r;
        r.entry = std::atoi(cells[1].c_str());
        r.source = parse_source(cells[2]);
        r.sigma = parse_opt(cells[3], lineno).value_or(0.0);
        auto req = [&](const std::string& c) {
            auto v = parse_opt(c, lineno);
            if (!v) fail(ErrorCode::ParseError, fmt::format("report csv line {}: missing value", lineno));
            return *v;
        };
        r.report.self_diis = req(cells[4]);
        r.report.strict_diis = req(cells[5]);
        r.report.label_diis = parse_opt(cells[6], lineno);
        r.report.mixed_hd = parse_opt(cells[7], lineno);
        r.report.mixed_dh = parse_opt(cells[8], lineno);
        r.report.mae_h = parse_opt(cells[9], lineno);
        r.report.mae_d = parse_opt(cells[10], lineno);
        r.report.d_e_total = parse_opt(cells[11], lineno);
        r.report.d_gap = parse_opt(cells[12], lineno);
        rows.push_back(r);
    }
    if (!header_seen) fail(ErrorCode::ParseError, "report csv: empty input");
    return rows;
}

} // namespace scdiis
