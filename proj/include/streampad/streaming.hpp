#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "streampad/event.hpp"
#include "streampad/pad.hpp"
#include "streampad/unsupervised.hpp"

namespace streampad {

enum class DetectorKind { pad, iforest, lof };

DetectorKind detector_kind_from_name(const std::string& name);
std::string detector_kind_name(DetectorKind kind);

/// A case count given either as a ratio (window: of the total case count;
/// retrain interval: of the window) or as an absolute count.
struct SizeSpec {
  enum class Mode { ratio, absolute };
  Mode mode = Mode::ratio;
  double ratio = 0.0;  // 0.10 == 10%
  int count = 0;

  static SizeSpec percent(double pct) { return {Mode::ratio, pct / 100.0, 0}; }
  static SizeSpec absolute(int n) { return {Mode::absolute, 0.0, n}; }
  /// Accepts "10%" or "25c".
  static SizeSpec parse(const std::string& text);
  std::string str() const;
};

/// W resolved from the total case count; ratios round half up, floor 1.
int resolve_window(int total_cases, const SizeSpec& window);
/// Retrain interval resolved against W; a 0% ratio means retrain per case.
int resolve_interval(int window_size, const SizeSpec& retrain);

struct RetrainInfo {
  int model_version = 0;
  int completed_cases = 0;  // completions seen when this model was fitted
  std::vector<std::string> window_case_ids;  // oldest first
};

struct StreamConfig {
  SizeSpec window = SizeSpec::percent(10.0);
  SizeSpec retrain = SizeSpec::percent(20.0);
  double threshold = 0.05;
  DetectorKind detector = DetectorKind::pad;
  PredictorKind predictor = PredictorKind::random_forest;
  PredictorHyper predictor_hyper;
  UnsupervisedHyper unsupervised_hyper;
  int max_prefix_cap = 64;
  bool score_end_markers = false;  // emit verdicts for END rows (pad only)
  std::uint64_t seed = 1;
  std::function<void(const RetrainInfo&)> on_retrain;  // test/diagnostic hook
};

struct RunSummary {
  std::vector<Verdict> verdicts;
  int window_size = 0;       // resolved W
  int retrain_interval = 0;  // resolved absolute R
  int retrain_count = 0;
  int completed_cases = 0;
  std::size_t scored = 0;
  std::size_t unscored = 0;
  std::size_t stale_events = 0;
  std::vector<std::string> warnings;
};

/// Runs the online loop over a finite stream: every arriving non-marker
/// event is scored by the current model (unscored before the first model
/// exists), completed cases enter the FIFO window of W cases, the first
/// model is fitted when the window first fills, and the model is refitted
/// on the window every time R newly completed cases accumulate.
RunSummary run_stream(const StreamConfig& config, const std::vector<Event>& events);

}  // namespace streampad
