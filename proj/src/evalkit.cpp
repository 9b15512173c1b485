#include "streampad/evalkit.hpp"

#include <algorithm>
#include <ostream>
#include <sstream>

#include "streampad/errors.hpp"
#include "streampad/format.hpp"

namespace streampad {

namespace {

void finalize(ClassMetrics& m) {
  m.precision = m.tp + m.fp > 0 ? static_cast<double>(m.tp) / (m.tp + m.fp) : 0.0;
  m.recall = m.tp + m.fn > 0 ? static_cast<double>(m.tp) / (m.tp + m.fn) : 0.0;
  m.f1 = m.precision + m.recall > 0.0
             ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
             : 0.0;
}

void tally(ClassMetrics& m, bool predicted_positive, bool actually_positive) {
  if (predicted_positive && actually_positive) ++m.tp;
  if (predicted_positive && !actually_positive) ++m.fp;
  if (!predicted_positive && actually_positive) ++m.fn;
  if (!predicted_positive && !actually_positive) ++m.tn;
}

}  // namespace

RunScore score_run(const std::vector<Verdict>& verdicts, const EventLog& truth,
                   bool exclude_end) {
  std::map<std::string, const Case*> cases;
  for (const Case& c : truth.cases) cases[c.case_id] = &c;

  RunScore score;
  for (const Verdict& v : verdicts) {
    const auto it = cases.find(v.case_id);
    if (it == cases.end())
      throw IntegrityError("verdict for unknown case " + v.case_id);
    const Case& c = *it->second;
    const int len = static_cast<int>(c.events.size());

    bool actual_anomalous;
    if (v.activity == kEndMarker && v.position == len + 1) {
      if (exclude_end) continue;
      actual_anomalous = false;
    } else if (v.position >= 1 && v.position <= len) {
      const Event& e = c.events[static_cast<std::size_t>(v.position - 1)];
      if (e.activity != v.activity)
        throw IntegrityError("verdict/event activity mismatch at case " + v.case_id +
                             " position " + std::to_string(v.position));
      if (!e.truth)
        throw IntegrityError("event without ground truth at case " + v.case_id +
                             " position " + std::to_string(v.position));
      actual_anomalous = *e.truth == TruthLabel::anomalous;
    } else {
      throw IntegrityError("verdict without matching event: case " + v.case_id +
                           " position " + std::to_string(v.position));
    }

    if (v.decision == Decision::unscored) {
      ++score.unscored;
      continue;
    }
    const bool predicted_anomalous = v.decision == Decision::anomalous;
    tally(score.anomalous, predicted_anomalous, actual_anomalous);
    tally(score.normal, !predicted_anomalous, !actual_anomalous);
    ++score.evaluated;
  }
  finalize(score.normal);
  finalize(score.anomalous);
  return score;
}

// ---------------------------------------------------------------------------
// Grid parsing
// ---------------------------------------------------------------------------

SweepGrid parse_grid(const std::string& text) {
  SweepGrid grid;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  bool saw_predictor = false;
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    const std::string_view stripped = trim(line);
    if (stripped.empty()) continue;
    const std::size_t eq = stripped.find('=');
    if (eq == std::string_view::npos)
      throw ParseError("grid line " + std::to_string(line_no) +
                       ": expected key = values");
    const std::string key{trim(stripped.substr(0, eq))};
    std::vector<std::string> values;
    for (const std::string& raw : split_csv_line(stripped.substr(eq + 1)))
      if (const auto v = trim(raw); !v.empty()) values.emplace_back(v);

    try {
      if (key == "noise") {
        for (const auto& v : values) grid.noise_levels.push_back(parse_double(v, key));
      } else if (key == "window") {
        for (const auto& v : values) grid.windows.push_back(SizeSpec::parse(v));
      } else if (key == "retrain") {
        for (const auto& v : values) grid.retrains.push_back(SizeSpec::parse(v));
      } else if (key == "threshold") {
        for (const auto& v : values) grid.thresholds.push_back(parse_double(v, key));
      } else if (key == "detector") {
        for (const auto& v : values)
          grid.detectors.push_back(detector_kind_from_name(v));
      } else if (key == "predictor") {
        saw_predictor = true;
        for (const auto& v : values)
          grid.predictors.push_back(predictor_kind_from_name(v));
      } else if (key == "cases") {
        grid.cases = static_cast<int>(parse_int64(values.at(0), key));
      } else if (key == "seed") {
        grid.seed = static_cast<std::uint64_t>(parse_int64(values.at(0), key));
      } else if (key == "logdir") {
        grid.logdir = values.at(0);
      } else if (key == "autogen") {
        grid.autogen = values.at(0) == "true" || values.at(0) == "1";
      } else {
        throw ParseError("grid: unknown key '" + key + "'");
      }
    } catch (const ConfigError& e) {
      throw ParseError("grid key '" + key + "': " + e.what());
    }
  }
  for (const double t : grid.thresholds)
    if (!(t > 0.0 && t < 1.0))
      throw ParseError("grid key 'threshold': value out of (0,1): " + fmt_double(t));
  if (!saw_predictor) grid.predictors = {PredictorKind::random_forest};
  return grid;
}

// ---------------------------------------------------------------------------
// Sweep
// ---------------------------------------------------------------------------

namespace {

std::pair<int, double> size_sort_key(const SizeSpec& s) {
  return s.mode == SizeSpec::Mode::ratio ? std::pair{0, s.ratio}
                                         : std::pair{1, static_cast<double>(s.count)};
}

bool row_less(const ResultRow& a, const ResultRow& b) {
  const auto key = [](const ResultRow& r) {
    return std::tuple(r.detector, r.predictor, r.noise, size_sort_key(r.window),
                      size_sort_key(r.retrain), r.threshold, r.klass);
  };
  return key(a) < key(b);
}

ResultRow base_row(const std::string& detector, const std::string& predictor,
                   double noise, const SizeSpec& window, const SizeSpec& retrain,
                   double threshold) {
  ResultRow row;
  row.detector = detector;
  row.predictor = predictor;
  row.noise = noise;
  row.window = window;
  row.retrain = retrain;
  row.threshold = threshold;
  return row;
}

void push_class_rows(std::vector<ResultRow>& rows, const ResultRow& base,
                     const RunScore& score) {
  ResultRow anomalous = base;
  anomalous.klass = "anomalous";
  anomalous.precision = score.anomalous.precision;
  anomalous.recall = score.anomalous.recall;
  anomalous.f1 = score.anomalous.f1;
  anomalous.unscored = score.unscored;
  rows.push_back(std::move(anomalous));
  ResultRow normal = base;
  normal.klass = "normal";
  normal.precision = score.normal.precision;
  normal.recall = score.normal.recall;
  normal.f1 = score.normal.f1;
  normal.unscored = score.unscored;
  rows.push_back(std::move(normal));
}

/// Re-derives the pad decisions of a captured run at a different threshold:
/// scores do not depend on the threshold, only the cut does.
std::vector<Verdict> rethreshold(std::vector<Verdict> verdicts, double threshold) {
  for (Verdict& v : verdicts) {
    v.threshold = threshold;
    if (v.decision == Decision::unscored) continue;
    v.decision = v.score < threshold ? Decision::anomalous : Decision::normal;
  }
  return verdicts;
}

}  // namespace

std::vector<ResultRow> run_sweep(const SweepGrid& grid,
                                 const std::map<double, std::vector<Event>>& streams) {
  std::vector<ResultRow> rows;
  std::map<double, EventLog> truths;
  for (const auto& [noise, events] : streams)
    truths.emplace(noise, build_log(assemble_cases(events).completed));

  for (const DetectorKind detector : grid.detectors) {
    const std::string detector_name = detector_kind_name(detector);
    const bool is_pad = detector == DetectorKind::pad;
    const std::vector<PredictorKind> predictors =
        is_pad ? grid.predictors : std::vector<PredictorKind>{PredictorKind::frequency};
    for (const PredictorKind predictor : predictors) {
      const std::string predictor_name =
          is_pad ? predictor_kind_name(predictor) : std::string("-");
      for (const double noise : grid.noise_levels) {
        const auto stream = streams.find(noise);
        for (const SizeSpec& window : grid.windows) {
          for (const SizeSpec& retrain : grid.retrains) {
            if (stream == streams.end()) {
              for (const double threshold : grid.thresholds) {
                ResultRow row = base_row(detector_name, predictor_name, noise, window,
                                         retrain, threshold);
                row.klass = "warning";
                row.warning = true;
                rows.push_back(std::move(row));
              }
              continue;
            }
            const EventLog& truth = truths.at(noise);

            StreamConfig config;
            config.window = window;
            config.retrain = retrain;
            config.detector = detector;
            config.predictor = predictor;
            config.seed = grid.seed;

            if (is_pad) {
              // One run per cell group; pad scores are threshold-invariant,
              // so each grid threshold is a re-cut of the same verdicts.
              config.threshold = 0.5;
              const RunSummary run = run_stream(config, stream->second);
              for (const double threshold : grid.thresholds) {
                const RunScore score =
                    score_run(rethreshold(run.verdicts, threshold), truth);
                push_class_rows(rows,
                                base_row(detector_name, predictor_name, noise, window,
                                         retrain, threshold),
                                score);
              }
            } else {
              for (const double threshold : grid.thresholds) {
                config.threshold = threshold;
                const RunSummary run = run_stream(config, stream->second);
                const RunScore score = score_run(run.verdicts, truth);
                push_class_rows(rows,
                                base_row(detector_name, predictor_name, noise, window,
                                         retrain, threshold),
                                score);
              }
            }
          }
        }
      }
    }
  }
  std::sort(rows.begin(), rows.end(), row_less);
  return rows;
}

// ---------------------------------------------------------------------------
// Results CSV and report pivots
// ---------------------------------------------------------------------------

namespace {
constexpr const char* kResultsHeader =
    "detector,predictor,noise,W,R,threshold,class,precision,recall,f1,unscored";
}

void write_results_csv(const std::vector<ResultRow>& rows, std::ostream& out) {
  out << kResultsHeader << "\n";
  for (const ResultRow& r : rows) {
    out << r.detector << "," << r.predictor << "," << fmt_double(r.noise) << ","
        << r.window.str() << "," << r.retrain.str() << "," << fmt_double(r.threshold)
        << "," << r.klass << ",";
    if (!r.warning)
      out << fmt_double(r.precision) << "," << fmt_double(r.recall) << ","
          << fmt_double(r.f1) << "," << r.unscored;
    else
      out << ",,,";
    out << "\n";
  }
}

std::string results_csv_text(const std::vector<ResultRow>& rows) {
  std::ostringstream out;
  write_results_csv(rows, out);
  return out.str();
}

std::vector<ResultRow> read_results_csv(std::istream& in) {
  std::vector<ResultRow> rows;
  std::string line;
  std::size_t line_no = 0;
  bool saw_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view stripped = trim(line);
    if (stripped.empty()) continue;
    if (!saw_header) {
      if (stripped != kResultsHeader)
        throw ParseError("results line 1: unexpected header");
      saw_header = true;
      continue;
    }
    const auto fields = split_csv_line(stripped);
    if (fields.size() != 11)
      throw ParseError("results line " + std::to_string(line_no) +
                       ": expected 11 fields");
    ResultRow r;
    r.detector = fields[0];
    r.predictor = fields[1];
    r.noise = parse_double(fields[2], "noise");
    r.window = SizeSpec::parse(fields[3]);
    r.retrain = SizeSpec::parse(fields[4]);
    r.threshold = parse_double(fields[5], "threshold");
    r.klass = fields[6];
    r.warning = r.klass == "warning";
    if (!r.warning) {
      r.precision = parse_double(fields[7], "precision");
      r.recall = parse_double(fields[8], "recall");
      r.f1 = parse_double(fields[9], "f1");
      r.unscored = parse_int64(fields[10], "unscored");
    }
    rows.push_back(std::move(r));
  }
  if (!saw_header) throw ParseError("empty results file");
  return rows;
}

std::string report_by(const std::vector<ResultRow>& rows,
                      const std::string& dimension) {
  if (dimension != "threshold" && dimension != "window" && dimension != "retrain")
    throw ConfigError("report dimension must be threshold, window, or retrain");

  struct Aggregate {
    double precision = 0.0, recall = 0.0, f1 = 0.0;
    long cells = 0;
  };
  // dimension values sort numerically (5% before 10%), not lexically
  std::map<std::tuple<std::string, std::string, std::string, std::pair<int, double>,
                      std::string>,
           Aggregate>
      groups;
  for (const ResultRow& r : rows) {
    if (r.warning) continue;
    std::string value;
    std::pair<int, double> order;
    if (dimension == "threshold") {
      value = fmt_double(r.threshold);
      order = {0, r.threshold};
    } else {
      const SizeSpec& s = dimension == "window" ? r.window : r.retrain;
      value = s.str();
      order = s.mode == SizeSpec::Mode::ratio
                  ? std::pair{0, s.ratio}
                  : std::pair{1, static_cast<double>(s.count)};
    }
    auto& agg = groups[{r.detector, r.predictor, r.klass, order, std::move(value)}];
    agg.precision += r.precision;
    agg.recall += r.recall;
    agg.f1 += r.f1;
    ++agg.cells;
  }

  std::ostringstream out;
  out << "detector,predictor,class," << dimension
      << ",mean_precision,mean_recall,mean_f1,cells\n";
  for (const auto& [key, agg] : groups) {
    const auto& [detector, predictor, klass, order, value] = key;
    out << detector << "," << predictor << "," << klass << "," << value << ","
        << fmt_double(agg.precision / agg.cells) << ","
        << fmt_double(agg.recall / agg.cells) << "," << fmt_double(agg.f1 / agg.cells)
        << "," << agg.cells << "\n";
  }
  return out.str();
}

}  // namespace streampad
