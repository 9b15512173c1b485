#include "streampad/streaming.hpp"

#include <cmath>
#include <deque>
#include <optional>

#include "streampad/errors.hpp"
#include "streampad/format.hpp"
#include "streampad/rng.hpp"

namespace streampad {

DetectorKind detector_kind_from_name(const std::string& name) {
  if (name == "pad") return DetectorKind::pad;
  if (name == "iforest") return DetectorKind::iforest;
  if (name == "lof") return DetectorKind::lof;
  throw ConfigError("unknown detector: " + name);
}

std::string detector_kind_name(DetectorKind kind) {
  switch (kind) {
    case DetectorKind::pad: return "pad";
    case DetectorKind::iforest: return "iforest";
    case DetectorKind::lof: return "lof";
  }
  return "pad";
}

SizeSpec SizeSpec::parse(const std::string& text) {
  if (text.empty()) throw ConfigError("empty size value");
  const char suffix = text.back();
  const std::string body = text.substr(0, text.size() - 1);
  if (suffix == '%') {
    const double pct = parse_double(body, "size '" + text + "'");
    if (pct < 0.0 || pct > 100.0)
      throw ConfigError("percentage out of range [0,100]: " + text);
    return percent(pct);
  }
  if (suffix == 'c') {
    const std::int64_t n = parse_int64(body, "size '" + text + "'");
    if (n < 1) throw ConfigError("absolute count must be >= 1: " + text);
    return absolute(static_cast<int>(n));
  }
  throw ConfigError("size needs a '%' or 'c' suffix: " + text);
}

std::string SizeSpec::str() const {
  if (mode == Mode::absolute) return std::to_string(count) + "c";
  return fmt_double(ratio * 100.0) + "%";
}

namespace {
int round_half_up(double x) { return static_cast<int>(std::floor(x + 0.5)); }
}  // namespace

int resolve_window(int total_cases, const SizeSpec& window) {
  if (window.mode == SizeSpec::Mode::absolute) return window.count;
  if (total_cases < 0) throw ConfigError("resolve_window: unknown total case count");
  return std::max(1, round_half_up(window.ratio * total_cases));
}

int resolve_interval(int window_size, const SizeSpec& retrain) {
  if (retrain.mode == SizeSpec::Mode::absolute) return std::max(1, retrain.count);
  return std::max(1, round_half_up(retrain.ratio * window_size));
}

namespace {

struct FittedDetector {
  std::optional<BucketedModel> model;
  std::optional<AnomalyScorer> scorer;
};

int longest_case(const std::deque<Case>& window) {
  int longest = 1;
  for (const Case& c : window) longest = std::max(longest, static_cast<int>(c.length()));
  return longest;
}

FittedDetector fit_window(const StreamConfig& config, const std::deque<Case>& window,
                          int version) {
  EventLog log = build_log(std::vector<Case>(window.begin(), window.end()));
  const Alphabet alphabet = Alphabet::from_log(log);
  const int max_prefix = std::min(longest_case(window), config.max_prefix_cap);
  const auto buckets = bucketize(log, max_prefix);
  const std::uint64_t seed =
      derive_seed(config.seed, "retrain", static_cast<std::uint64_t>(version));
  FittedDetector fitted;
  if (config.detector == DetectorKind::pad) {
    fitted.model = train(buckets, config.predictor, config.predictor_hyper, alphabet,
                         seed, version);
  } else {
    const ScorerKind kind = config.detector == DetectorKind::iforest
                                ? ScorerKind::iforest
                                : ScorerKind::lof;
    fitted.scorer = fit_scorer(buckets, kind, config.unsupervised_hyper, alphabet,
                               seed, config.threshold, version);
  }
  return fitted;
}

}  // namespace

RunSummary run_stream(const StreamConfig& config, const std::vector<Event>& events) {
  if (!(config.threshold > 0.0 && config.threshold < 1.0))
    throw ConfigError("threshold must lie strictly between 0 and 1");

  int window_size;
  if (config.window.mode == SizeSpec::Mode::absolute) {
    window_size = resolve_window(0, config.window);
  } else {
    int total = 0;
    for (const Event& e : events) total += e.is_case_end ? 1 : 0;
    window_size = resolve_window(total, config.window);
  }
  const int retrain_interval = resolve_interval(window_size, config.retrain);

  RunSummary summary;
  summary.window_size = window_size;
  summary.retrain_interval = retrain_interval;

  CaseAssembler assembler;
  std::deque<Case> window;
  FittedDetector fitted;
  int version = 0;
  int pending = 0;

  const Case empty_case;
  for (const Event& e : events) {
    if (assembler.case_completed(e.case_id)) {
      assembler.feed(e);  // records the stale diagnostic
      continue;
    }

    if (!e.is_case_end) {
      const Case* open = assembler.open_case(e.case_id);
      const Case& prefix = open != nullptr ? *open : empty_case;
      if (fitted.model) {
        summary.verdicts.push_back(detect(*fitted.model, prefix, e, config.threshold));
        ++summary.scored;
      } else if (fitted.scorer) {
        summary.verdicts.push_back(fitted.scorer->score_event(prefix, e));
        ++summary.scored;
      } else {
        summary.verdicts.push_back(unscored_verdict(
            e, static_cast<int>(prefix.events.size()) + 1, config.threshold));
        ++summary.unscored;
      }
      assembler.feed(e);
      continue;
    }

    // end marker: optionally score the completion, then slide the window
    if (config.score_end_markers && config.detector == DetectorKind::pad) {
      if (const Case* open = assembler.open_case(e.case_id)) {
        if (fitted.model) {
          summary.verdicts.push_back(score_end(*fitted.model, *open, config.threshold));
          ++summary.scored;
        } else {
          summary.verdicts.push_back(unscored_verdict(
              e, static_cast<int>(open->events.size()) + 1, config.threshold));
          summary.verdicts.back().activity = kEndMarker;
          ++summary.unscored;
        }
      }
    }

    std::optional<Case> completed = assembler.feed(e);
    if (!completed) continue;
    ++summary.completed_cases;
    window.push_back(std::move(*completed));
    if (static_cast<int>(window.size()) > window_size) window.pop_front();

    bool retrain_now = false;
    if (version == 0) {
      retrain_now = static_cast<int>(window.size()) == window_size;
    } else {
      ++pending;
      retrain_now = pending == retrain_interval;
    }
    if (retrain_now) {
      ++version;
      pending = 0;
      fitted = fit_window(config, window, version);
      ++summary.retrain_count;
      if (fitted.scorer)
        for (const std::string& d : fitted.scorer->diagnostics())
          summary.warnings.push_back("model v" + std::to_string(version) + ": " + d);
      if (config.on_retrain) {
        RetrainInfo info;
        info.model_version = version;
        info.completed_cases = summary.completed_cases;
        for (const Case& c : window) info.window_case_ids.push_back(c.case_id);
        config.on_retrain(info);
      }
    }
  }

  summary.stale_events = assembler.stale_count();
  for (const std::string& report : assembler.stale_reports())
    summary.warnings.push_back(report);
  if (version == 0)
    summary.warnings.push_back(
        "stream ended before " + std::to_string(window_size) +
        " cases completed; no model was trained and every event is unscored");
  return summary;
}

}  // namespace streampad
