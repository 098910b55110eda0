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

// DIIS-style error measures for predicted (H, D) pairs.
//
//   self_diis   || H_p D_p S - S D_p H_p ||        label free
//   strict_diis || H(D_p) D_p S - S D_p H(D_p) ||  H rebuilt from D_p
//   label_diis  || H_l D_l S - S D_l H_l ||        quality of the label
//   mixed_hd    || H_l D_p S - S D_p H_l ||
//   mixed_dh    || H_p D_l S - S D_l H_p ||
//
// self_diis vanishes whenever D_p is obtained by diagonalizing H_p against
// S, whether or not H_p is right: a zero self-DIIS error is necessary but
// not sufficient for a good prediction.  The pair has to be predicted
// independently for the measure to carry information.

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "scdiis/scf.hpp"

namespace scdiis {

enum class PredictionSource { Exact, OracleNoise, Kernel, ExternalFile };

std::string_view source_name(PredictionSource s);
PredictionSource parse_source(std::string_view text);

struct Prediction {
    Matrix h_pred;
    Matrix d_pred;
    PredictionSource source = PredictionSource::ExternalFile;

    /// Both matrices symmetric and of the same dimension.
    void validate() const;
};

/// Maps a geometry to a predicted (H, D) pair.
class Predictor {
  public:
    virtual ~Predictor() = default;
    virtual Prediction predict(const Geometry& g) const = 0;
    /// False if predict() must not be called from several threads at once.
    virtual bool concurrent_safe() const { return true; }
};

/// Reference predictor: the converged SCF pair.  PredictorFailure on
/// non-convergence.
class ExactPredictor : public Predictor {
  public:
    ExactPredictor(ModelParams params, ScfConfig cfg)
        : params_(std::move(params)), cfg_(cfg) {}
    Prediction predict(const Geometry& g) const override;

  private:
    ModelParams params_;
    ScfConfig cfg_;
};

struct DiisReport {
    double self_diis = 0.0;
    double strict_diis = 0.0;
    // filled only when a label is supplied
    std::optional<double> label_diis;
    std::optional<double> mixed_hd;
    std::optional<double> mixed_dh;
    std::optional<double> mae_h;
    std::optional<double> mae_d;
    std::optional<double> d_e_total;
    std::optional<double> d_gap;
};

double self_diis(const Prediction& pred, const Matrix& s, Norm norm = Norm::Frobenius);

/// Commutator error with H rebuilt from the predicted density.
double strict_diis(const Prediction& pred, const Geometry& g, const ModelParams& p,
                   Norm norm = Norm::Frobenius);

/// Mean absolute elementwise difference.
double matrix_mae(const Matrix& a, const Matrix& b);

/// Label-free part of the report.
DiisReport unlabeled_report(const Prediction& pred, const Geometry& g, const ModelParams& p,
                            Norm norm = Norm::Frobenius);

/// Every field.  E_tot of the prediction is energy(D_pred); its gap comes
/// from the spectrum of H_pred against S.
DiisReport full_report(const Prediction& pred, const ScfSolution& label, const Geometry& g,
                       const ModelParams& p, Norm norm = Norm::Frobenius);

/// Central differences of self_diis(predict(g), S(g)) with respect to each
/// coordinate, flattened like Geometry::coordinates().  The vector points
/// toward larger self-DIIS error.
Vector self_diis_position_gradient(const Geometry& g, const ModelParams& p,
                                   const Predictor& predictor, double step = 1e-4,
                                   Norm norm = Norm::Frobenius, int jobs = 1);

// ---------------------------------------------------------------------------
// Report CSV.  Column order:
//   index,entry,source,sigma,self_diis,strict_diis,label_diis,mixed_hd,
//   mixed_dh,mae_h,mae_d,d_e_total,d_gap
// Label-dependent columns are empty when no label was supplied.

struct ReportRow {
    int entry = 0;
    PredictionSource source = PredictionSource::ExternalFile;
    double sigma = 0.0;
    DiisReport report;
};

extern const char* const kReportCsvHeader;

std::string reports_to_csv(const std::vector<ReportRow>& rows);
std::vector<ReportRow> reports_from_csv(std::string_view text);

} // namespace scdiis
