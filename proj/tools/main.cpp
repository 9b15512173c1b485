#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "streampad/evalkit.hpp"
#include "streampad/format.hpp"
#include "streampad/streaming.hpp"
#include "streampad/synthlog.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace streampad;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitIo = 1;
constexpr int kExitUsage = 2;

void write_text_file(const std::string& path, const std::string& content) {
  if (path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::ios_base::failure("cannot open for writing: " + path);
  out << content;
  out.flush();
  if (!out) throw std::ios_base::failure("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::ios_base::failure("cannot open: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

struct GenerateArgs {
  double noise = 0.0;
  int cases = 500;
  std::uint64_t seed = 1;
  std::string out;
};

int cmd_generate(const GenerateArgs& args) {
  const ProcessModel model = default_loan_model();
  GeneratorConfig config;
  config.noise = args.noise;
  config.case_count = args.cases;
  config.seed = args.seed;
  const GeneratedLog log = generate(model, config);

  write_text_file(args.out, emit_stream_text(log.events));
  json meta;
  meta["cases"] = args.cases;
  meta["noise"] = args.noise;
  meta["seed"] = args.seed;
  meta["model_checksum"] = hex64(model.checksum());
  meta["normal_events"] = log.normal_events;
  meta["injected_events"] = log.injected_events;
  meta["total_rows"] = log.events.size();
  write_text_file(args.out + ".meta.json", meta.dump(2) + "\n");

  std::cerr << "wrote " << args.out << ": " << args.cases << " cases, "
            << log.normal_events << " normal + " << log.injected_events
            << " injected events\n";
  return kExitOk;
}

struct RunArgs {
  std::string in;
  std::string detector = "pad";
  std::string predictor = "random_forest";
  std::string window = "10%";
  std::string retrain = "20%";
  double threshold = 0.05;
  std::uint64_t seed = 1;
  std::string out = "-";
  bool score_end = false;
  int max_prefix = 64;
  PredictorHyper predictor_hyper;
  UnsupervisedHyper unsupervised_hyper;
};

int cmd_run(const RunArgs& args) {
  StreamConfig config;
  config.detector = detector_kind_from_name(args.detector);
  config.predictor = predictor_kind_from_name(args.predictor);
  config.window = SizeSpec::parse(args.window);
  config.retrain = SizeSpec::parse(args.retrain);
  config.threshold = args.threshold;
  config.seed = args.seed;
  config.score_end_markers = args.score_end;
  config.max_prefix_cap = args.max_prefix;
  config.predictor_hyper = args.predictor_hyper;
  config.unsupervised_hyper = args.unsupervised_hyper;
  if (config.threshold <= 0.0 || config.threshold >= 1.0)
    throw ConfigError("threshold must lie strictly between 0 and 1");

  std::vector<Event> events;
  try {
    events = load_stream_file(args.in);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }

  const RunSummary summary = run_stream(config, events);
  const std::optional<std::string> detector_column =
      config.detector == DetectorKind::pad
          ? std::nullopt
          : std::optional<std::string>(args.detector);
  write_text_file(args.out, verdicts_csv_text(summary.verdicts, detector_column));

  std::cerr << "W=" << summary.window_size << " cases, retrain every "
            << summary.retrain_interval << " completed cases\n"
            << "verdicts=" << summary.verdicts.size() << " scored=" << summary.scored
            << " unscored=" << summary.unscored
            << " retrains=" << summary.retrain_count
            << " completed_cases=" << summary.completed_cases
            << " stale=" << summary.stale_events << "\n";
  for (const std::string& w : summary.warnings) std::cerr << "warning: " << w << "\n";
  return kExitOk;
}

struct SweepArgs {
  std::string grid;
  std::string out;
};

int cmd_sweep(const SweepArgs& args) {
  std::string grid_text;
  try {
    grid_text = read_text_file(args.grid);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
  const SweepGrid grid = parse_grid(grid_text);  // ParseError -> usage exit

  const std::string logdir = grid.logdir.empty() ? "." : grid.logdir;
  std::map<double, std::vector<Event>> streams;
  for (const double noise : grid.noise_levels) {
    if (streams.count(noise)) continue;
    const fs::path path = fs::path(logdir) / ("noise_" + fmt_double(noise) + ".csv");
    if (fs::exists(path)) {
      try {
        streams.emplace(noise, load_stream_file(path.string()));
      } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
      }
      continue;
    }
    if (!grid.autogen) {
      std::cerr << "warning: missing log " << path.string()
                << "; its cells are skipped\n";
      continue;
    }
    GeneratorConfig config;
    config.noise = noise;
    config.case_count = grid.cases;
    config.seed = grid.seed;
    const GeneratedLog log = generate(default_loan_model(), config);
    fs::create_directories(path.parent_path().empty() ? "." : path.parent_path());
    write_text_file(path.string(), emit_stream_text(log.events));
    std::cerr << "generated " << path.string() << "\n";
    streams.emplace(noise, log.events);
  }

  const std::vector<ResultRow> rows = run_sweep(grid, streams);
  std::ostringstream out;
  write_results_csv(rows, out);
  write_text_file(args.out, out.str());
  std::cerr << "wrote " << args.out << ": " << rows.size() << " rows\n";
  return kExitOk;
}

struct ReportArgs {
  std::string in;
  std::string by;
  std::string out = "-";
};

int cmd_report(const ReportArgs& args) {
  std::vector<ResultRow> rows;
  try {
    std::istringstream in(read_text_file(args.in));
    rows = read_results_csv(in);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
  write_text_file(args.out, report_by(rows, args.by));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stream event anomaly detection benchmark"};
  app.require_subcommand(1);

  GenerateArgs gen;
  CLI::App* generate_cmd =
      app.add_subcommand("generate", "generate a synthetic labeled event stream");
  generate_cmd->add_option("--noise", gen.noise, "injection probability in [0,1]")
      ->required();
  generate_cmd->add_option("--cases", gen.cases, "case count")->default_val(500);
  generate_cmd->add_option("--seed", gen.seed, "random seed")->default_val(1);
  generate_cmd->add_option("--out", gen.out, "output stream CSV path")->required();

  RunArgs run;
  CLI::App* run_cmd = app.add_subcommand("run", "run online detection over a stream");
  run_cmd->add_option("--in", run.in, "input stream CSV")->required();
  run_cmd->add_option("--detector", run.detector, "pad | iforest | lof");
  run_cmd->add_option("--predictor", run.predictor, "frequency | rf (pad only)");
  run_cmd->add_option("--window", run.window, "sliding window: '10%' or '25c'");
  run_cmd->add_option("--retrain", run.retrain, "retraining interval: '20%' or '5c'");
  run_cmd->add_option("--threshold", run.threshold, "anomaly threshold in (0,1)");
  run_cmd->add_option("--seed", run.seed, "random seed");
  run_cmd->add_option("--out", run.out, "verdict CSV path ('-' = stdout)");
  run_cmd->add_flag("--score-end", run.score_end, "also score case completions");
  run_cmd->add_option("--max-prefix", run.max_prefix, "prefix bucket cap");
  run_cmd->add_option("--rf-trees", run.predictor_hyper.rf_trees, "forest size");
  run_cmd->add_option("--rf-depth", run.predictor_hyper.rf_max_depth,
                      "tree depth cap (0 = unlimited)");
  run_cmd->add_option("--rf-min-leaf", run.predictor_hyper.rf_min_leaf,
                      "minimum leaf size");
  run_cmd->add_flag("--laplace", run.predictor_hyper.laplace,
                    "+1 smoothing in the frequency predictor");
  run_cmd->add_option("--iforest-trees", run.unsupervised_hyper.iforest_trees,
                      "isolation forest size");
  run_cmd->add_option("--iforest-subsample", run.unsupervised_hyper.iforest_subsample,
                      "isolation tree subsample");
  run_cmd->add_option("--lof-k", run.unsupervised_hyper.lof_k, "LOF neighbor count");
  run_cmd->add_flag("--scale-durations", run.unsupervised_hyper.scale_durations,
                    "min-max scale duration features (unsupervised detectors)");

  SweepArgs sweep;
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "run a parameter grid");
  sweep_cmd->add_option("--grid", sweep.grid, "grid config file")->required();
  sweep_cmd->add_option("--out", sweep.out, "results CSV path")->required();

  ReportArgs report;
  CLI::App* report_cmd =
      app.add_subcommand("report", "pivot sweep results by one dimension");
  report_cmd->add_option("--in", report.in, "results CSV")->required();
  report_cmd->add_option("--by", report.by, "threshold | window | retrain")
      ->required()
      ->check(CLI::IsMember({"threshold", "window", "retrain"}));
  report_cmd->add_option("--out", report.out, "output path ('-' = stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (generate_cmd->parsed()) return cmd_generate(gen);
    if (run_cmd->parsed()) return cmd_run(run);
    if (sweep_cmd->parsed()) return cmd_sweep(sweep);
    if (report_cmd->parsed()) return cmd_report(report);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitOk;
}
