#include "ordinal_crc/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>

#include <json.hpp>

namespace ordinal_crc::io {
namespace {

using nlohmann::json;

constexpr int kSchemaVersion = 1;

std::string format_double(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.12g", value);
  return buffer;
}

double parse_double(std::string_view text, const std::filesystem::path& path, size_t line) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw IoError(path.string() + ":" + std::to_string(line) + ": malformed number '" + std::string(text) + "'");
  }
  return value;
}

long parse_long(std::string_view text, const std::filesystem::path& path, size_t line) {
  long value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw IoError(path.string() + ":" + std::to_string(line) + ": malformed integer '" + std::string(text) + "'");
  }
  return value;
}

std::vector<std::string_view> split_csv_line(std::string_view line) {
  std::vector<std::string_view> fields;
  size_t start = 0;
  while (true) {
    const size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw IoError("read failure on " + path.string());
  return std::move(buffer).str();
}

json loss_to_json(const LossSpec& loss) {
  json j;
  j["kind"] = loss.kind == LossSpec::Kind::weighted ? "weighted" : "divergence";
  if (loss.kind == LossSpec::Kind::weighted) j["weights"] = loss.weights.weights;
  return j;
}

LossSpec loss_from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "divergence") return LossSpec::divergence();
  if (kind != "weighted") throw IoError("unknown loss kind '" + kind + "'");
  return LossSpec::weighted(WeightScheme::from_weights(j.at("weights").get<std::vector<double>>()));
}

}  // namespace

std::vector<LabeledScore> read_scores_csv(const std::filesystem::path& path) {
  const std::string content = read_file(path);
  std::vector<LabeledScore> rows;
  size_t line_no = 0;
  size_t pos = 0;
  int num_classes = -1;
  while (pos < content.size()) {
    size_t end = content.find('\n', pos);
    if (end == std::string::npos) end = content.size();
    std::string_view line(content.data() + pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    pos = end + 1;
    ++line_no;
    if (line.empty()) continue;

    const auto fields = split_csv_line(line);
    if (line_no == 1) {
      if (fields.size() < 2 || fields[0] != "label") {
        throw IoError(path.string() + ": expected header label,p0,p1,...");
      }
      num_classes = static_cast<int>(fields.size()) - 1;
      for (int i = 0; i < num_classes; ++i) {
        if (fields[static_cast<size_t>(i) + 1] != "p" + std::to_string(i)) {
          throw IoError(path.string() + ": expected header label,p0,p1,...");
        }
      }
      continue;
    }
    if (static_cast<int>(fields.size()) != num_classes + 1) {
      throw IoError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                    std::to_string(num_classes + 1) + " fields, got " + std::to_string(fields.size()));
    }
    const long label = parse_long(fields[0], path, line_no);
    if (label < 0 || label >= num_classes) {
      throw IoError(path.string() + ":" + std::to_string(line_no) + ": label out of range");
    }
    std::vector<double> probs(static_cast<size_t>(num_classes));
    for (int i = 0; i < num_classes; ++i) {
      probs[static_cast<size_t>(i)] = parse_double(fields[static_cast<size_t>(i) + 1], path, line_no);
    }
    try {
      rows.push_back({ScoreVector::normalized(std::move(probs)), static_cast<ClassIndex>(label)});
    } catch (const DataError& e) {
      throw IoError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (rows.empty()) throw IoError(path.string() + ": no data rows");
  return rows;
}

void write_scores_csv(const std::filesystem::path& path, const std::vector<LabeledScore>& rows) {
  const int k = validate_dataset(rows);
  std::string out = "label";
  for (int i = 0; i < k; ++i) out += ",p" + std::to_string(i);
  out += '\n';
  for (const auto& row : rows) {
    out += std::to_string(row.label);
    for (double p : row.scores.probs) {
      out += ',';
      out += format_double(p);
    }
    out += '\n';
  }
  atomic_write(path, out);
}

WeightScheme read_weights_file(const std::filesystem::path& path, int num_classes) {
  const std::string content = read_file(path);
  std::vector<double> raw;
  size_t pos = 0;
  size_t line_no = 0;
  while (pos < content.size()) {
    size_t end = content.find('\n', pos);
    if (end == std::string::npos) end = content.size();
    std::string_view line(content.data() + pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    pos = end + 1;
    ++line_no;
    if (line.empty()) continue;
    raw.push_back(parse_double(line, path, line_no));
  }
  if (static_cast<int>(raw.size()) != num_classes) {
    throw IoError(path.string() + ": expected " + std::to_string(num_classes) + " weights, got " +
                  std::to_string(raw.size()));
  }
  try {
    return WeightScheme::from_weights(std::move(raw));
  } catch (const DataError& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

std::string calibration_to_json(const CalibrationFile& calibration) {
  const CalibrationResult& r = calibration.result;
  json j;
  j["schema_version"] = kSchemaVersion;
  j["lambda_hat"] = r.lambda_hat;
  j["alpha"] = r.alpha;
  j["n"] = r.n;
  j["k"] = calibration.num_classes;
  j["method"] = r.method == CalibrationMethod::exact ? "exact" : "binary";
  if (r.delta) j["delta"] = *r.delta;
  j["loss"] = loss_to_json(r.loss);
  j["empirical_sum"] = r.empirical_sum;
  j["max_collision_m"] = calibration.diagnostics.max_collision_m;
  j["max_empirical_jump"] = calibration.diagnostics.max_empirical_jump;
  return j.dump(2) + "\n";
}

CalibrationFile read_calibration_json(const std::filesystem::path& path) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw IoError(path.string() + ": " + e.what());
  }
  try {
    CalibrationFile calibration;
    CalibrationResult& r = calibration.result;
    r.lambda_hat = j.at("lambda_hat").get<double>();
    r.alpha = j.at("alpha").get<double>();
    r.n = j.at("n").get<size_t>();
    calibration.num_classes = j.at("k").get<int>();
    r.method = j.at("method").get<std::string>() == "binary" ? CalibrationMethod::binary
                                                             : CalibrationMethod::exact;
    if (j.contains("delta")) r.delta = j.at("delta").get<double>();
    r.loss = loss_from_json(j.at("loss"));
    r.empirical_sum = j.at("empirical_sum").get<double>();
    calibration.diagnostics.max_collision_m = j.at("max_collision_m").get<size_t>();
    calibration.diagnostics.max_empirical_jump = j.at("max_empirical_jump").get<double>();
    return calibration;
  } catch (const json::exception& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

void write_calibration_json(const std::filesystem::path& path, const CalibrationFile& calibration) {
  atomic_write(path, calibration_to_json(calibration));
}

namespace {

json report_to_json_object(const eval::RiskReport& report) {
  json j;
  j["alpha"] = report.alpha;
  j["trials"] = report.trials;
  j["n_calibration"] = report.n_calibration;
  j["n_test"] = report.n_test;
  j["mean_risk"] = report.mean_risk;
  j["risk_per_trial"] = report.risk_per_trial;
  j["lambda_hat_per_trial"] = report.lambda_hat_per_trial;
  j["mean_set_size"] = report.mean_set_size;
  json sizes = json::array();
  for (size_t w = 1; w < report.size_histogram.size(); ++w) {
    sizes.push_back({{"width", w}, {"count", report.size_histogram[w]}});
  }
  j["size_histogram"] = std::move(sizes);
  json centroids = json::array();
  for (size_t b = 0; b < report.centroid_histogram.size(); ++b) {
    if (report.centroid_histogram[b] == 0) continue;
    centroids.push_back({{"centroid", 0.5 * static_cast<double>(b)}, {"count", report.centroid_histogram[b]}});
  }
  j["centroid_histogram"] = std::move(centroids);
  return j;
}

}  // namespace

std::string report_to_json(const std::vector<eval::RiskReport>& reports,
                           std::optional<double> saturation_alpha) {
  json j;
  j["schema_version"] = kSchemaVersion;
  json list = json::array();
  for (const auto& report : reports) list.push_back(report_to_json_object(report));
  j["reports"] = std::move(list);
  if (saturation_alpha) {
    j["saturation_alpha"] = *saturation_alpha;
  } else {
    j["saturation_alpha"] = nullptr;
  }
  return j.dump(2) + "\n";
}

void write_report_json(const std::filesystem::path& path, const std::vector<eval::RiskReport>& reports,
                       std::optional<double> saturation_alpha) {
  atomic_write(path, report_to_json(reports, saturation_alpha));
}

void write_summary_csv(const std::filesystem::path& path, const std::vector<eval::RiskReport>& reports) {
  std::string out = "alpha,mean_risk,mean_set_size\n";
  for (const auto& report : reports) {
    out += format_double(report.alpha);
    out += ',';
    out += format_double(report.mean_risk);
    out += ',';
    out += format_double(report.mean_set_size);
    out += '\n';
  }
  atomic_write(path, out);
}

void write_centroid_csv(const std::filesystem::path& path, const std::vector<eval::RiskReport>& reports) {
  std::string out = "alpha,centroid,count\n";
  for (const auto& report : reports) {
    for (size_t b = 0; b < report.centroid_histogram.size(); ++b) {
      if (report.centroid_histogram[b] == 0) continue;
      char centroid[16];
      std::snprintf(centroid, sizeof(centroid), "%.1f", 0.5 * static_cast<double>(b));
      out += format_double(report.alpha);
      out += ',';
      out += centroid;
      out += ',';
      out += std::to_string(report.centroid_histogram[b]);
      out += '\n';
    }
  }
  atomic_write(path, out);
}

void write_predictions_csv(const std::filesystem::path& path, const std::vector<PredictionRow>& rows) {
  std::string out = "lower,upper,width,centroid,point_prediction\n";
  for (const auto& row : rows) {
    char centroid[16];
    std::snprintf(centroid, sizeof(centroid), "%.1f", row.set.centroid());
    out += std::to_string(row.set.lower);
    out += ',';
    out += std::to_string(row.set.upper);
    out += ',';
    out += std::to_string(row.set.width());
    out += ',';
    out += centroid;
    out += ',';
    out += std::to_string(row.point_prediction);
    out += '\n';
  }
  atomic_write(path, out);
}

void atomic_write(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw IoError("write failure on " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw IoError("cannot move " + tmp.string() + " to " + path.string() + ": " + ec.message());
  }
}

}  // namespace ordinal_crc::io
