#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "streampad/event.hpp"
#include "streampad/streaming.hpp"
#include "streampad/verdict.hpp"

namespace streampad {

struct ClassMetrics {
  long tp = 0, fp = 0, fn = 0, tn = 0;
  double precision = 0.0, recall = 0.0, f1 = 0.0;
};

struct RunScore {
  ClassMetrics normal;
  ClassMetrics anomalous;
  long unscored = 0;
  long evaluated = 0;  // scored verdicts entering the confusion counts
};

/// Joins verdicts with the ground-truth log on (case_id, position) and
/// tallies per-class precision/recall/F1. Cold-start verdicts are excluded
/// from the counts and reported via `unscored`. End-of-case verdicts are
/// dropped by default; when included their ground truth is normal (the
/// injector never forges completions). A verdict that fails to join raises
/// IntegrityError.
RunScore score_run(const std::vector<Verdict>& verdicts, const EventLog& truth,
                   bool exclude_end = true);

struct SweepGrid {
  std::vector<double> noise_levels;
  std::vector<SizeSpec> windows;
  std::vector<SizeSpec> retrains;
  std::vector<double> thresholds;
  std::vector<DetectorKind> detectors;
  std::vector<PredictorKind> predictors;  // applies to the pad detector
  int cases = 500;
  std::uint64_t seed = 1;
  std::string logdir;
  bool autogen = true;  // generate missing per-noise logs on the fly
};

/// Parses the flat key/value-list grid format:
///   noise = 0.025, 0.05
///   window = 5%, 10%, 20%
///   threshold = 0.01, 0.05
///   detector = pad, iforest, lof
/// '#' starts a comment. Unknown or malformed keys raise ParseError naming
/// the key. Absent `predictor` defaults to random_forest.
SweepGrid parse_grid(const std::string& text);

struct ResultRow {
  std::string detector;
  std::string predictor;  // "-" for unsupervised detectors
  double noise = 0.0;
  SizeSpec window;
  SizeSpec retrain;
  double threshold = 0.0;
  std::string klass;  // normal | anomalous | warning
  double precision = 0.0, recall = 0.0, f1 = 0.0;
  long unscored = 0;
  bool warning = false;
};

/// Runs every grid cell against the per-noise streams and returns rows in
/// canonical (detector, predictor, noise, W, R, threshold, class) order.
/// A noise level without a stream yields one warning row per cell.
std::vector<ResultRow> run_sweep(const SweepGrid& grid,
                                 const std::map<double, std::vector<Event>>& streams);

void write_results_csv(const std::vector<ResultRow>& rows, std::ostream& out);
std::string results_csv_text(const std::vector<ResultRow>& rows);
std::vector<ResultRow> read_results_csv(std::istream& in);

/// Pivots result rows into per-figure summaries: mean metrics grouped by
/// (detector, predictor, class, <dimension>), dimension one of
/// "threshold" | "window" | "retrain".
std::string report_by(const std::vector<ResultRow>& rows, const std::string& dimension);

}  // namespace streampad
