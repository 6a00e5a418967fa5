#pragma once
//
// File formats used by the command line tool and the harness.
//
//   scores CSV       header "label,p0,p1,...,p{K-1}", '.' decimal, no index
//                    column; probabilities printed with 12 significant digits
//   weights file     one weight per line
//   calibration JSON lambda_hat, alpha, n, k, method, loss, empirical_sum
//                    and jump diagnostics, with a schema_version field
//   report JSON      RiskReports of an alpha sweep plus the detected
//                    saturation alpha (when any)
//
// File outputs are written atomically (temp file + rename).

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ordinal_crc/calibration.hpp"
#include "ordinal_crc/eval.hpp"
#include "ordinal_crc/types.hpp"

namespace ordinal_crc::io {

std::vector<LabeledScore> read_scores_csv(const std::filesystem::path& path);
void write_scores_csv(const std::filesystem::path& path, const std::vector<LabeledScore>& rows);

/// Weight scheme from a text file, one weight per line; normalized on load.
WeightScheme read_weights_file(const std::filesystem::path& path, int num_classes);

struct CalibrationFile {
  CalibrationResult result;
  int num_classes = 0;
  JumpDiagnostics diagnostics;
};

std::string calibration_to_json(const CalibrationFile& calibration);
CalibrationFile read_calibration_json(const std::filesystem::path& path);
void write_calibration_json(const std::filesystem::path& path, const CalibrationFile& calibration);

std::string report_to_json(const std::vector<eval::RiskReport>& reports, std::optional<double> saturation_alpha);
void write_report_json(const std::filesystem::path& path, const std::vector<eval::RiskReport>& reports,
                       std::optional<double> saturation_alpha);

/// "alpha,mean_risk,mean_set_size" rows, one per report.
void write_summary_csv(const std::filesystem::path& path, const std::vector<eval::RiskReport>& reports);

/// "alpha,centroid,count" rows; zero-count buckets are skipped.
void write_centroid_csv(const std::filesystem::path& path, const std::vector<eval::RiskReport>& reports);

struct PredictionRow {
  PredictionSet set;
  ClassIndex point_prediction = 0;
};

/// "lower,upper,width,centroid,point_prediction" rows.
void write_predictions_csv(const std::filesystem::path& path, const std::vector<PredictionRow>& rows);

/// Writes content to path via a temp file in the same directory + rename.
void atomic_write(const std::filesystem::path& path, const std::string& content);

}  // namespace ordinal_crc::io
