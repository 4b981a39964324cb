// stabidx command-line tool: dataset evaluation, synthetic data generation,
// metric response sweeps, the numerical property suites, and the consistency
// loss on dumped error collections.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "stabidx/dataset.hpp"
#include "stabidx/evaluator.hpp"
#include "stabidx/pcl.hpp"
#include "stabidx/property_lab.hpp"
#include "stabidx/synthetic.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;  // validation or property failure
constexpr int kExitUsage = 2;    // bad flags, missing inputs

std::vector<double> parse_edges(const std::string& csv, const std::string& flag) {
  std::vector<double> edges;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      edges.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw CLI::ValidationError(flag, "expected a comma-separated list of numbers");
    }
  }
  if (edges.size() < 2) throw CLI::ValidationError(flag, "need at least two bin edges");
  return edges;
}

stabidx::MotionModel parse_motion(const std::string& name) {
  if (name == "static") return stabidx::MotionModel::kStatic;
  if (name == "cv") return stabidx::MotionModel::kConstantVelocity;
  if (name == "turning") return stabidx::MotionModel::kTurning;
  throw CLI::ValidationError("--motion", "expected one of: static, cv, turning");
}

stabidx::NoiseAxis parse_axis(const std::string& name) {
  if (name == "center") return stabidx::NoiseAxis::kCenter;
  if (name == "extent") return stabidx::NoiseAxis::kExtent;
  if (name == "yaw") return stabidx::NoiseAxis::kYaw;
  if (name == "score") return stabidx::NoiseAxis::kScore;
  if (name == "dropout") return stabidx::NoiseAxis::kDropout;
  throw CLI::ValidationError("--axis", "expected one of: center, extent, yaw, score, dropout");
}

std::vector<stabidx::PredictionErrors> load_errors(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open error file: " + path);
  std::vector<stabidx::PredictionErrors> errors;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
    auto vec3 = [&](const char* key) {
      if (!j.contains(key) || !j[key].is_array() || j[key].size() != 3) {
        throw std::runtime_error(path + ":" + std::to_string(line_no) + ": '" + key +
                                 "' must be an array of 3 numbers");
      }
      return stabidx::Vec3{j[key][0].get<double>(), j[key][1].get<double>(),
                           j[key][2].get<double>()};
    };
    stabidx::PredictionErrors e;
    if (!j.contains("e_c") || !j["e_c"].is_number()) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": missing numeric 'e_c'");
    }
    e.e_c = j["e_c"].get<double>();
    e.e_l = vec3("e_l");
    e.e_e = vec3("e_e");
    if (!j.contains("e_h") || !j["e_h"].is_array() || j["e_h"].size() != 2) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": 'e_h' must be an array of 2 numbers");
    }
    e.e_h_sin = j["e_h"][0].get<double>();
    e.e_h_cos = j["e_h"][1].get<double>();
    errors.push_back(e);
  }
  return errors;
}

struct EvalFlags {
  std::string dataset;
  std::string report;
  std::string format = "json";
  std::string pair_dump;
  std::string classes_csv;
  std::string percentiles = "0.99,0.01";
  std::string bins_distance, bins_points, bins_volume, bins_lwr;
  double dt = 0.5;
  double min_iou = 1e-6;
  double frame_tolerance = 0.0;
  bool strict = false;
  int threads = 1;
};

stabidx::EvaluationConfig to_config(const EvalFlags& flags) {
  stabidx::EvaluationConfig cfg;
  cfg.delta_t = flags.dt;
  cfg.min_iou = flags.min_iou;
  cfg.frame_tolerance = flags.frame_tolerance;
  if (!flags.classes_csv.empty()) {
    std::stringstream ss(flags.classes_csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (!item.empty()) cfg.classes.push_back(item);
    }
  }
  const auto comma = flags.percentiles.find(',');
  if (comma == std::string::npos) {
    throw CLI::ValidationError("--percentiles", "expected 'hi,lo'");
  }
  try {
    cfg.percentile_hi = std::stod(flags.percentiles.substr(0, comma));
    cfg.percentile_lo = std::stod(flags.percentiles.substr(comma + 1));
  } catch (const std::exception&) {
    throw CLI::ValidationError("--percentiles", "expected 'hi,lo'");
  }
  if (!flags.bins_distance.empty()) {
    cfg.distance_bins = parse_edges(flags.bins_distance, "--bins-distance");
  }
  if (!flags.bins_points.empty()) cfg.points_bins = parse_edges(flags.bins_points, "--bins-points");
  if (!flags.bins_volume.empty()) cfg.volume_bins = parse_edges(flags.bins_volume, "--bins-volume");
  if (!flags.bins_lwr.empty()) cfg.lwr_bins = parse_edges(flags.bins_lwr, "--bins-lwr");
  return cfg;
}

void add_scenario_flags(CLI::App* cmd, stabidx::ScenarioSpec& scenario, std::string& motion,
                        std::string& classes_csv) {
  cmd->add_option("--sequences", scenario.sequences, "Number of sequences")
      ->envname("STABIDX_SEQUENCES");
  cmd->add_option("--frames", scenario.frames_per_sequence, "Frames per sequence")
      ->envname("STABIDX_FRAMES");
  cmd->add_option("--interval", scenario.capture_interval, "Capture interval in seconds")
      ->envname("STABIDX_INTERVAL");
  cmd->add_option("--objects", scenario.objects_per_frame, "Objects per frame")
      ->envname("STABIDX_OBJECTS");
  cmd->add_option("--motion", motion, "Motion model: static, cv, turning")
      ->envname("STABIDX_MOTION");
  cmd->add_option("--class-mix", classes_csv, "Comma-separated class labels")
      ->envname("STABIDX_CLASS_MIX");
}

void add_noise_flags(CLI::App* cmd, stabidx::NoiseSpec& noise) {
  cmd->add_option("--noise-center", noise.center_sigma, "Center jitter sigma in meters")
      ->envname("STABIDX_NOISE_CENTER");
  cmd->add_option("--noise-extent", noise.extent_sigma, "Relative extent jitter sigma")
      ->envname("STABIDX_NOISE_EXTENT");
  cmd->add_option("--noise-yaw", noise.yaw_sigma, "Yaw jitter sigma in radians")
      ->envname("STABIDX_NOISE_YAW");
  cmd->add_option("--noise-score", noise.score_sigma, "Score jitter sigma")
      ->envname("STABIDX_NOISE_SCORE");
  cmd->add_option("--dropout", noise.dropout, "Prediction dropout probability")
      ->envname("STABIDX_DROPOUT");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Temporal-stability evaluation for 3D object detections"};
  app.require_subcommand(1);

  std::uint64_t seed = 7;
  app.add_option("--seed", seed, "Base seed for all randomness")->envname("STABIDX_SEED");

  // --- eval ---
  EvalFlags eval_flags;
  CLI::App* eval_cmd = app.add_subcommand("eval", "Evaluate a dataset and write a report");
  eval_cmd->add_option("--dataset", eval_flags.dataset, "Line-delimited dataset file")
      ->required()
      ->envname("STABIDX_DATASET");
  eval_cmd->add_option("--report", eval_flags.report, "Report output path")
      ->required()
      ->envname("STABIDX_REPORT");
  eval_cmd->add_option("--format", eval_flags.format, "Report format: json or csv")
      ->envname("STABIDX_FORMAT");
  eval_cmd->add_option("--dt", eval_flags.dt, "Pairing time gap in seconds")
      ->envname("STABIDX_DT");
  eval_cmd->add_option("--min-iou", eval_flags.min_iou, "Minimum IoU for a match")
      ->envname("STABIDX_MIN_IOU");
  eval_cmd->add_option("--classes", eval_flags.classes_csv, "Evaluate these classes only")
      ->envname("STABIDX_CLASSES");
  eval_cmd->add_option("--percentiles", eval_flags.percentiles, "Calibration percentiles 'hi,lo'")
      ->envname("STABIDX_PERCENTILES");
  eval_cmd->add_option("--frame-tolerance", eval_flags.frame_tolerance,
                       "Pairing tolerance in seconds (0 = half the median interval)")
      ->envname("STABIDX_FRAME_TOLERANCE");
  eval_cmd->add_option("--pair-dump", eval_flags.pair_dump, "Per-pair dump output path")
      ->envname("STABIDX_PAIR_DUMP");
  eval_cmd->add_flag("--strict", eval_flags.strict, "Reject unknown dataset keys")
      ->envname("STABIDX_STRICT");
  eval_cmd->add_option("--threads", eval_flags.threads, "Worker threads (0 = hardware)")
      ->envname("STABIDX_THREADS");
  eval_cmd->add_option("--bins-distance", eval_flags.bins_distance, "Distance bin edges")
      ->envname("STABIDX_BINS_DISTANCE");
  eval_cmd->add_option("--bins-points", eval_flags.bins_points, "Point-count bin edges")
      ->envname("STABIDX_BINS_POINTS");
  eval_cmd->add_option("--bins-volume", eval_flags.bins_volume, "Volume bin edges")
      ->envname("STABIDX_BINS_VOLUME");
  eval_cmd->add_option("--bins-lwr", eval_flags.bins_lwr, "Length-to-width bin edges")
      ->envname("STABIDX_BINS_LWR");

  // --- synth ---
  stabidx::ScenarioSpec synth_scenario;
  stabidx::NoiseSpec synth_noise;
  std::string synth_out, synth_motion = "cv", synth_classes;
  CLI::App* synth_cmd = app.add_subcommand("synth", "Generate a synthetic dataset");
  synth_cmd->add_option("--out", synth_out, "Output dataset path")
      ->required()
      ->envname("STABIDX_OUT");
  add_scenario_flags(synth_cmd, synth_scenario, synth_motion, synth_classes);
  add_noise_flags(synth_cmd, synth_noise);

  // --- sweep ---
  stabidx::ScenarioSpec sweep_scenario;
  stabidx::NoiseSpec sweep_noise;
  std::string sweep_out, sweep_motion = "cv", sweep_classes, sweep_axis = "center";
  std::string sweep_grid = "0:1:5";
  int sweep_threads = 1;
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "Sweep one noise element and record mean SI");
  sweep_cmd->add_option("--out", sweep_out, "Output curve CSV path")
      ->required()
      ->envname("STABIDX_OUT");
  sweep_cmd->add_option("--axis", sweep_axis, "Noise axis: center, extent, yaw, score, dropout")
      ->envname("STABIDX_AXIS");
  sweep_cmd->add_option("--grid", sweep_grid, "Sweep grid 'start:stop:steps'")
      ->envname("STABIDX_GRID");
  sweep_cmd->add_option("--threads", sweep_threads, "Worker threads (0 = hardware)")
      ->envname("STABIDX_THREADS");
  add_scenario_flags(sweep_cmd, sweep_scenario, sweep_motion, sweep_classes);
  add_noise_flags(sweep_cmd, sweep_noise);

  // --- properties ---
  stabidx::PropertySuiteOptions prop_options;
  std::string curves_dir;
  double angle_step_deg = 0.25;
  CLI::App* prop_cmd = app.add_subcommand("properties", "Run the numerical property suites");
  prop_cmd->add_option("--trials", prop_options.trials, "Randomized trials per suite")
      ->envname("STABIDX_TRIALS");
  prop_cmd->add_option("--oracle-pairs", prop_options.oracle_pairs,
                       "Box pairs checked against the Monte-Carlo oracle")
      ->envname("STABIDX_ORACLE_PAIRS");
  prop_cmd->add_option("--oracle-samples", prop_options.oracle_samples,
                       "Samples per Monte-Carlo estimate")
      ->envname("STABIDX_ORACLE_SAMPLES");
  prop_cmd->add_option("--threads", prop_options.threads, "Worker threads (0 = hardware)")
      ->envname("STABIDX_THREADS");
  prop_cmd->add_option("--curves-dir", curves_dir, "Also emit the IoU curve CSVs here")
      ->envname("STABIDX_CURVES_DIR");
  prop_cmd->add_option("--angle-step", angle_step_deg, "Curve grid resolution in degrees")
      ->envname("STABIDX_ANGLE_STEP");

  // --- pcl-loss ---
  std::string errors_a, errors_b;
  stabidx::PclWeights weights;
  CLI::App* pcl_cmd = app.add_subcommand("pcl-loss",
                                         "Consistency loss between two error collections");
  pcl_cmd->add_option("--errors-a", errors_a, "First error collection (line-delimited)")
      ->required()
      ->envname("STABIDX_ERRORS_A");
  pcl_cmd->add_option("--errors-b", errors_b, "Second error collection (line-delimited)")
      ->required()
      ->envname("STABIDX_ERRORS_B");
  pcl_cmd->add_option("--w1", weights.w1, "Confidence term weight")->envname("STABIDX_W1");
  pcl_cmd->add_option("--w2", weights.w2, "Localization term weight")->envname("STABIDX_W2");
  pcl_cmd->add_option("--w3", weights.w3, "Extent term weight")->envname("STABIDX_W3");
  pcl_cmd->add_option("--w4", weights.w4, "Heading term weight")->envname("STABIDX_W4");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (eval_cmd->parsed()) {
      if (!std::filesystem::exists(eval_flags.dataset)) {
        std::cerr << "error: dataset file not found: " << eval_flags.dataset << "\n";
        return kExitUsage;
      }
      if (eval_flags.format != "json" && eval_flags.format != "csv") {
        std::cerr << "error: --format must be json or csv\n";
        return kExitUsage;
      }
      stabidx::LoadOptions load_opts;
      load_opts.strict = eval_flags.strict;
      load_opts.warnings = &std::cerr;
      const stabidx::Dataset ds = stabidx::load_dataset(eval_flags.dataset, load_opts);
      const stabidx::EvaluationConfig cfg = to_config(eval_flags);
      std::vector<stabidx::PairOutcome> dump;
      const auto report = stabidx::evaluate(ds, cfg, eval_flags.threads,
                                            eval_flags.pair_dump.empty() ? nullptr : &dump);
      stabidx::emit_report(report, eval_flags.report,
                           eval_flags.format == "json" ? stabidx::ReportFormat::kJson
                                                       : stabidx::ReportFormat::kCsv);
      if (!eval_flags.pair_dump.empty()) stabidx::write_pair_dump(dump, eval_flags.pair_dump);
      return kExitOk;
    }

    if (synth_cmd->parsed()) {
      synth_scenario.motion = parse_motion(synth_motion);
      if (!synth_classes.empty()) {
        synth_scenario.classes.clear();
        std::stringstream ss(synth_classes);
        std::string item;
        while (std::getline(ss, item, ',')) {
          if (!item.empty()) synth_scenario.classes.push_back(item);
        }
      }
      synth_scenario.seed = seed;
      synth_noise.seed = seed + 1;
      const stabidx::Dataset ds = stabidx::generate_dataset(synth_scenario, synth_noise);
      stabidx::save_dataset(ds, synth_out);
      return kExitOk;
    }

    if (sweep_cmd->parsed()) {
      sweep_scenario.motion = parse_motion(sweep_motion);
      if (!sweep_classes.empty()) {
        sweep_scenario.classes.clear();
        std::stringstream ss(sweep_classes);
        std::string item;
        while (std::getline(ss, item, ',')) {
          if (!item.empty()) sweep_scenario.classes.push_back(item);
        }
      }
      sweep_scenario.seed = seed;
      sweep_noise.seed = seed + 1;
      stabidx::SweepGrid grid;
      if (std::sscanf(sweep_grid.c_str(), "%lf:%lf:%d", &grid.start, &grid.stop, &grid.steps) !=
          3) {
        std::cerr << "error: --grid must be 'start:stop:steps'\n";
        return kExitUsage;
      }
      const stabidx::CurveTable curve = stabidx::response_sweep(
          sweep_scenario, sweep_noise, parse_axis(sweep_axis), grid, {}, sweep_threads);
      stabidx::write_curve_csv(curve, sweep_out);
      return kExitOk;
    }

    if (prop_cmd->parsed()) {
      prop_options.seed = seed;
      const auto checks = stabidx::run_property_suite(prop_options);
      std::cout << stabidx::format_property_summary(checks);
      if (!curves_dir.empty()) {
        std::filesystem::create_directories(curves_dir);
        const double deg = stabidx::kPi / 180.0;
        for (double dx : {0.0, 0.25, 0.5}) {
          char name[64];
          std::snprintf(name, sizeof(name), "offcenter_dx_%.2f.csv", dx);
          stabidx::write_curve_csv(stabidx::offcenter_iou_curve(dx, -10 * deg, 10 * deg, 81),
                                   std::string(curves_dir) + "/" + name);
        }
        for (double lwr : {1.0, 2.0, 5.0, 10.0}) {
          char name[64];
          std::snprintf(name, sizeof(name), "heading_lwr_%.0f.csv", lwr);
          stabidx::write_curve_csv(stabidx::heading_iou_curve(lwr, 0.0, stabidx::kPi / 2, 181),
                                   std::string(curves_dir) + "/" + name);
        }
      }
      return stabidx::all_passed(checks) ? kExitOk : kExitFailure;
    }

    if (pcl_cmd->parsed()) {
      for (const auto& path : {errors_a, errors_b}) {
        if (!std::filesystem::exists(path)) {
          std::cerr << "error: error file not found: " << path << "\n";
          return kExitUsage;
        }
      }
      const auto a = load_errors(errors_a);
      const auto b = load_errors(errors_b);
      const double loss = stabidx::pcl_loss(a, b, weights);
      std::printf("%.6f\n", loss);
      return kExitOk;
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}
