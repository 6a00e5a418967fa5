//
// ordinal-crc: build and calibrate ordinal prediction sets from score files.
//
// Subcommands:
//   simulate   write a synthetic scores CSV (Gaussian classes, exact posteriors)
//   calibrate  choose lambda_hat for a target risk level alpha
//   predict    emit prediction sets for a scores file at a fixed lambda
//   evaluate   run split trials / alpha sweeps and emit reports
//
// Exit codes: 0 success, 1 usage or config error, 2 infeasible calibration,
// 3 I/O error.

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ordinal_crc/calibration.hpp"
#include "ordinal_crc/eval.hpp"
#include "ordinal_crc/io.hpp"
#include "ordinal_crc/sets.hpp"
#include "ordinal_crc/simgen.hpp"

namespace {

using namespace ordinal_crc;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitIo = 3;

struct Options {
  // simulate
  int classes = 10;
  int per_class = 2000;
  double temperature = 1.0;
  std::string out;

  // shared
  std::string scores_path;
  std::string loss_kind = "weighted";
  std::string weights_source = "equal";
  double alpha = 0.1;
  uint64_t seed = 7;

  // calibrate
  std::string method = "exact";
  double delta = 1e-4;
  std::string calibration_out;

  // predict
  std::optional<double> lambda;
  std::string calibration_path;
  std::string predictions_out = "predictions.csv";

  // evaluate
  std::vector<double> alphas;
  int trials = 100;
  double split = 0.5;
  int threads = 0;
  std::string report_out = "report.json";
  std::string summary_out = "summary.csv";
  std::string centroids_out = "centroids.csv";
};

int resolve_threads(int flag) {
  if (flag > 0) return flag;
  if (const char* env = std::getenv("ORDINAL_CRC_THREADS")) {
    const int parsed = std::atoi(env);
    if (parsed > 0) return parsed;
  }
  return 1;
}

LossSpec make_loss(const Options& opt, int num_classes) {
  if (opt.loss_kind == "divergence") return LossSpec::divergence();
  if (opt.loss_kind != "weighted") throw ConfigError("unknown loss '" + opt.loss_kind + "'");
  if (opt.weights_source == "equal") return LossSpec::weighted(WeightScheme::equal(num_classes));
  if (opt.weights_source == "linear") return LossSpec::weighted(WeightScheme::linear(num_classes));
  if (opt.weights_source.rfind("file:", 0) == 0) {
    return LossSpec::weighted(io::read_weights_file(opt.weights_source.substr(5), num_classes));
  }
  throw ConfigError("unknown weights source '" + opt.weights_source + "' (equal, linear, file:<path>)");
}

int cmd_simulate(const Options& opt) {
  if (opt.classes < 2) throw ConfigError("--classes must be at least 2");
  if (opt.per_class < 1) throw ConfigError("--per-class must be at least 1");
  if (!(opt.temperature > 0.0)) throw ConfigError("--temperature must be positive");
  if (opt.out.empty()) throw ConfigError("--out is required");
  const auto specs = simgen::make_default_specs(opt.classes, opt.seed);
  const auto rows = simgen::simulate_scores(specs, opt.per_class, opt.seed, opt.temperature);
  io::write_scores_csv(opt.out, rows);
  std::cout << "wrote " << rows.size() << " rows (" << opt.classes << " classes) to " << opt.out << "\n";
  return kExitOk;
}

int cmd_calibrate(const Options& opt) {
  if (!(opt.alpha > 0.0 && opt.alpha < 1.0)) throw ConfigError("--alpha must lie in (0, 1)");
  const auto rows = io::read_scores_csv(opt.scores_path);
  const int k = validate_dataset(rows);
  const LossSpec loss = make_loss(opt, k);

  io::CalibrationFile calibration;
  if (opt.method == "exact") {
    calibration.result = calibrate_exact(rows, opt.alpha, loss);
  } else if (opt.method == "binary") {
    if (!(opt.delta > 0.0)) throw ConfigError("--delta must be positive");
    calibration.result = calibrate_binary(rows, opt.alpha, loss, opt.delta);
  } else {
    throw ConfigError("unknown method '" + opt.method + "' (exact, binary)");
  }
  calibration.num_classes = k;
  calibration.diagnostics = jump_diagnostics(rows, loss);

  if (opt.calibration_out.empty()) {
    std::cout << io::calibration_to_json(calibration);
  } else {
    io::write_calibration_json(opt.calibration_out, calibration);
    std::cout << "lambda_hat " << calibration.result.lambda_hat << " written to " << opt.calibration_out
              << "\n";
  }
  return kExitOk;
}

int cmd_predict(const Options& opt) {
  const auto rows = io::read_scores_csv(opt.scores_path);
  const int k = validate_dataset(rows);

  double lambda = 0.0;
  LossSpec loss;
  if (!opt.calibration_path.empty()) {
    const auto calibration = io::read_calibration_json(opt.calibration_path);
    if (calibration.num_classes != k) {
      throw ConfigError("calibration was computed for K=" + std::to_string(calibration.num_classes) +
                        " but the scores file has K=" + std::to_string(k));
    }
    lambda = calibration.result.lambda_hat;
    loss = calibration.result.loss;
  } else if (opt.lambda) {
    lambda = *opt.lambda;
    loss = make_loss(opt, k);
  } else {
    throw ConfigError("provide --lambda or --calibration");
  }
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw ConfigError("lambda must lie in [0, 1]");

  std::vector<io::PredictionRow> out;
  out.reserve(rows.size());
  for (const auto& row : rows) {
    out.push_back({build_set(row.scores, loss, lambda), point_prediction(row.scores, loss)});
  }
  io::write_predictions_csv(opt.predictions_out, out);
  std::cout << "wrote " << out.size() << " prediction sets to " << opt.predictions_out << "\n";
  return kExitOk;
}

int cmd_evaluate(const Options& opt) {
  if (opt.trials < 1) throw ConfigError("--trials must be at least 1");
  if (!(opt.split > 0.0 && opt.split < 1.0)) throw ConfigError("--split must lie in (0, 1)");
  std::vector<double> alphas = opt.alphas.empty() ? std::vector<double>{opt.alpha} : opt.alphas;
  for (double a : alphas) {
    if (!(a > 0.0 && a < 1.0)) throw ConfigError("alphas must lie in (0, 1)");
  }
  const auto rows = io::read_scores_csv(opt.scores_path);
  const int k = validate_dataset(rows);
  const LossSpec loss = make_loss(opt, k);
  const int threads = resolve_threads(opt.threads);

  const auto sweep = eval::sweep_alpha(rows, alphas, loss, opt.trials, opt.split, opt.seed, threads);
  const auto saturation = eval::first_saturation_index(sweep);
  std::optional<double> saturation_alpha;
  if (saturation) saturation_alpha = alphas[*saturation];

  io::write_report_json(opt.report_out, sweep, saturation_alpha);
  io::write_summary_csv(opt.summary_out, sweep);
  io::write_centroid_csv(opt.centroids_out, sweep);

  for (const auto& report : sweep) {
    std::printf("alpha %.4f  mean_risk %.4f  mean_set_size %.3f\n", report.alpha, report.mean_risk,
                report.mean_set_size);
  }
  if (saturation_alpha) std::printf("risk saturates from alpha %.4f\n", *saturation_alpha);
  std::cout << "report written to " << opt.report_out << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Conformal risk control for ordinal classification"};
  app.require_subcommand(1);
  Options opt;

  auto* simulate = app.add_subcommand("simulate", "Generate a synthetic ordinal scores CSV");
  simulate->add_option("--classes", opt.classes, "Number of ordered classes (>= 2)");
  simulate->add_option("--per-class", opt.per_class, "Samples per class");
  simulate->add_option("--seed", opt.seed, "Random seed");
  simulate->add_option("--temperature", opt.temperature,
                       "Posterior temperature; 1 = exact, > 1 = miscalibrated");
  simulate->add_option("--out", opt.out, "Output CSV path")->required();

  auto add_loss_options = [&opt](CLI::App* cmd) {
    cmd->add_option("--loss", opt.loss_kind, "Loss family: weighted or divergence");
    cmd->add_option("--weights", opt.weights_source, "Weight source: equal, linear, file:<path>");
  };

  auto* calibrate = app.add_subcommand("calibrate", "Calibrate lambda_hat for a risk level alpha");
  calibrate->add_option("--scores", opt.scores_path, "Calibration scores CSV")->required();
  calibrate->add_option("--alpha", opt.alpha, "Target risk level in (0, 1)")->required();
  add_loss_options(calibrate);
  calibrate->add_option("--method", opt.method, "exact or binary");
  calibrate->add_option("--delta", opt.delta, "Bisection precision (binary method)");
  calibrate->add_option("--out", opt.calibration_out, "Calibration JSON path (stdout if omitted)");

  auto* predict = app.add_subcommand("predict", "Emit prediction sets at a fixed lambda");
  predict->add_option("--scores", opt.scores_path, "Scores CSV")->required();
  auto* lambda_opt = predict->add_option("--lambda", opt.lambda, "Threshold in [0, 1]");
  predict->add_option("--calibration", opt.calibration_path, "Calibration JSON from 'calibrate'")
      ->excludes(lambda_opt);
  add_loss_options(predict);
  predict->add_option("--out", opt.predictions_out, "Output CSV path");

  auto* evaluate = app.add_subcommand("evaluate", "Run split trials and emit risk reports");
  evaluate->add_option("--scores", opt.scores_path, "Scores CSV")->required();
  evaluate->add_option("--alpha", opt.alpha, "Single risk level");
  evaluate->add_option("--alphas", opt.alphas, "Risk level grid")->delimiter(',');
  add_loss_options(evaluate);
  evaluate->add_option("--trials", opt.trials, "Number of random split trials");
  evaluate->add_option("--split", opt.split, "Calibration fraction in (0, 1)");
  evaluate->add_option("--seed", opt.seed, "Master seed");
  evaluate->add_option("--threads", opt.threads, "Worker cap (env ORDINAL_CRC_THREADS as fallback)");
  evaluate->add_option("--out-report", opt.report_out, "Report JSON path");
  evaluate->add_option("--out-summary", opt.summary_out, "Summary CSV path");
  evaluate->add_option("--out-centroids", opt.centroids_out, "Centroid histogram CSV path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(opt);
    if (calibrate->parsed()) return cmd_calibrate(opt);
    if (predict->parsed()) return cmd_predict(opt);
    if (evaluate->parsed()) return cmd_evaluate(opt);
    throw ConfigError("no subcommand given");
  } catch (const InfeasibleError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
}
