// Acceptance suite: re-derives the benchmark's headline comparisons on
// regenerated logs and checks the engine's hard invariants. One pass/fail
// line per criterion; exit status 0 only when every criterion holds.

#include <chrono>
#include <cmath>
#include <deque>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "streampad/evalkit.hpp"
#include "streampad/format.hpp"
#include "streampad/pad.hpp"
#include "streampad/rng.hpp"
#include "streampad/streaming.hpp"
#include "streampad/synthlog.hpp"

using namespace streampad;
using Clock = std::chrono::steady_clock;

namespace {

constexpr std::uint64_t kSeed = 7;
const std::vector<double> kNoiseLevels = {0.025, 0.05, 0.075, 0.10, 0.125, 0.15};
const std::vector<double> kThresholds = {0.01, 0.05, 0.10, 0.15, 0.20, 0.25};

int g_failures = 0;

void report(int id, const std::string& name, bool pass, const std::string& detail) {
  std::cout << (pass ? "[PASS]" : "[FAIL]") << " criterion " << id << ": " << name;
  if (!detail.empty()) std::cout << " — " << detail;
  std::cout << std::endl;
  if (!pass) ++g_failures;
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::map<double, std::vector<Event>> benchmark_streams() {
  std::map<double, std::vector<Event>> streams;
  for (const double noise : kNoiseLevels) {
    GeneratorConfig config;
    config.noise = noise;
    config.case_count = 500;
    config.seed = kSeed;
    streams.emplace(noise, generate(default_loan_model(), config).events);
  }
  return streams;
}

double anomalous_f1(const std::vector<ResultRow>& rows, const std::string& detector,
                    const std::string& predictor, double noise,
                    const std::string& window, const std::string& retrain,
                    double threshold) {
  for (const ResultRow& r : rows) {
    if (r.warning || r.klass != "anomalous") continue;
    if (r.detector == detector && r.predictor == predictor && r.noise == noise &&
        r.window.str() == window && r.retrain.str() == retrain &&
        r.threshold == threshold)
      return r.f1;
  }
  throw std::runtime_error("missing sweep row: " + detector + "/" + predictor + "/" +
                           fmt_double(noise) + "/" + window + "/" + retrain + "/" +
                           fmt_double(threshold));
}

double best_tau_f1(const std::vector<ResultRow>& rows, const std::string& detector,
                   const std::string& predictor, double noise,
                   const std::string& window, const std::string& retrain) {
  double best = -1.0;
  for (const double tau : kThresholds)
    best = std::max(best,
                    anomalous_f1(rows, detector, predictor, noise, window, retrain, tau));
  return best;
}

// -------------------------------------------------------------------------
// Criteria 1 and 2 share one sweep: six noise levels, W=10%, R=20%, the six
// benchmark thresholds, pad (both predictors) against iforest and lof.
// -------------------------------------------------------------------------

void criteria_1_and_2(const std::map<double, std::vector<Event>>& streams) {
  SweepGrid grid;
  grid.noise_levels = kNoiseLevels;
  grid.windows = {SizeSpec::percent(10)};
  grid.retrains = {SizeSpec::percent(20)};
  grid.thresholds = kThresholds;
  grid.detectors = {DetectorKind::pad, DetectorKind::iforest, DetectorKind::lof};
  grid.predictors = {PredictorKind::frequency, PredictorKind::random_forest};
  grid.cases = 500;
  grid.seed = kSeed;

  // desk-scale runtime: one full grid cell (the heaviest kind: pad with the
  // random forest over a 500-case stream)
  const auto cell_start = Clock::now();
  {
    StreamConfig config;
    config.window = SizeSpec::percent(10);
    config.retrain = SizeSpec::percent(20);
    config.threshold = 0.05;
    config.detector = DetectorKind::pad;
    config.predictor = PredictorKind::random_forest;
    config.seed = kSeed;
    run_stream(config, streams.at(0.15));
  }
  const double cell_seconds = seconds_since(cell_start);

  const auto sweep_start = Clock::now();
  const auto rows = run_sweep(grid, streams);
  const double sweep_seconds = seconds_since(sweep_start);

  bool directional = true;
  std::ostringstream detail;
  detail.setf(std::ios::fixed);
  detail.precision(3);
  for (const double noise : kNoiseLevels) {
    const double pad_rf = best_tau_f1(rows, "pad", "random_forest", noise, "10%", "20%");
    const double iforest = best_tau_f1(rows, "iforest", "-", noise, "10%", "20%");
    const double lof = best_tau_f1(rows, "lof", "-", noise, "10%", "20%");
    const bool wins = pad_rf > iforest && pad_rf > lof;
    directional = directional && wins;
    detail << "p=" << noise << " pad_rf=" << pad_rf << " iforest=" << iforest
           << " lof=" << lof << (wins ? "; " : " (NOT AHEAD); ");
  }
  const bool timing = cell_seconds < 60.0 && sweep_seconds < 1800.0;
  detail << "cell=" << cell_seconds << "s sweep=" << sweep_seconds << "s";
  report(1, "predictive detection beats both unsupervised baselines at best threshold",
         directional && timing, detail.str());

  bool low_tau_wins = true;
  std::ostringstream detail2;
  detail2.setf(std::ios::fixed);
  detail2.precision(3);
  for (const std::string& predictor : {"frequency", "random_forest"}) {
    for (const double noise : {0.025, 0.05, 0.075}) {
      const double at_001 = anomalous_f1(rows, "pad", predictor, noise, "10%", "20%", 0.01);
      const double at_025 = anomalous_f1(rows, "pad", predictor, noise, "10%", "20%", 0.25);
      const bool holds = at_001 + 1e-12 >= at_025;
      low_tau_wins = low_tau_wins && holds;
      detail2 << predictor << "@p=" << noise << ": f1(0.01)=" << at_001
              << " f1(0.25)=" << at_025 << (holds ? "; " : " (VIOLATED); ");
    }
  }
  report(2, "a 0.01 threshold does at least as well as 0.25 at low noise",
         low_tau_wins, detail2.str());

  // criterion 3 reuses the W=10% column from this sweep
  SweepGrid wide;
  wide.noise_levels = kNoiseLevels;
  wide.windows = {SizeSpec::percent(5), SizeSpec::percent(20)};
  wide.retrains = {SizeSpec::percent(20)};
  wide.thresholds = {0.05};
  wide.detectors = {DetectorKind::pad};
  wide.predictors = {PredictorKind::random_forest};
  wide.cases = 500;
  wide.seed = kSeed;
  const auto wide_rows = run_sweep(wide, streams);

  const auto mean_f1_at = [&](const std::string& window,
                              const std::vector<ResultRow>& source) {
    double sum = 0.0;
    for (const double noise : kNoiseLevels)
      sum += anomalous_f1(source, "pad", "random_forest", noise, window, "20%", 0.05);
    return sum / static_cast<double>(kNoiseLevels.size());
  };
  const double mean_5 = mean_f1_at("5%", wide_rows);
  const double mean_10 = mean_f1_at("10%", rows);
  const double mean_20 = mean_f1_at("20%", wide_rows);
  const bool monotone = mean_10 >= mean_5 - 0.02 && mean_20 >= mean_10 - 0.02;
  std::ostringstream detail3;
  detail3.setf(std::ios::fixed);
  detail3.precision(3);
  detail3 << "mean anomalous F1: W5%=" << mean_5 << " W10%=" << mean_10
          << " W20%=" << mean_20 << " (tolerance 0.02)";
  report(3, "larger sliding windows do not hurt detection", monotone, detail3.str());
}

// -------------------------------------------------------------------------
// Criterion 4: retraining-interval insensitivity.
// -------------------------------------------------------------------------

void criterion_4(const std::map<double, std::vector<Event>>& streams) {
  SweepGrid grid;
  grid.noise_levels = kNoiseLevels;
  grid.windows = {SizeSpec::percent(10)};
  grid.retrains = {SizeSpec::percent(0),  SizeSpec::percent(10), SizeSpec::percent(20),
                   SizeSpec::percent(30), SizeSpec::percent(40), SizeSpec::percent(50)};
  grid.thresholds = {0.05};
  grid.detectors = {DetectorKind::pad};
  grid.predictors = {PredictorKind::frequency};
  grid.cases = 500;
  grid.seed = kSeed;
  const auto rows = run_sweep(grid, streams);

  double max_spread = 0.0;
  std::ostringstream detail;
  detail.setf(std::ios::fixed);
  detail.precision(3);
  for (const double noise : kNoiseLevels) {
    double lo = 2.0, hi = -1.0;
    for (const SizeSpec& retrain : grid.retrains) {
      const double f1 =
          anomalous_f1(rows, "pad", "frequency", noise, "10%", retrain.str(), 0.05);
      lo = std::min(lo, f1);
      hi = std::max(hi, f1);
    }
    max_spread = std::max(max_spread, hi - lo);
    detail << "p=" << noise << " spread=" << (hi - lo) << "; ";
  }
  detail << "max=" << max_spread << " (< 0.05 required)";
  report(4, "the retraining interval barely moves detection quality",
         max_spread < 0.05, detail.str());
}

// -------------------------------------------------------------------------
// Criterion 5: the worked 30-case windowing example, exactly.
// -------------------------------------------------------------------------

void criterion_5() {
  std::vector<Event> events;
  std::int64_t ts = 0;
  for (int k = 1; k <= 30; ++k) {
    const std::string id = "case" + std::to_string(k);
    for (const std::string& activity : {"A", "B"}) {
      Event e;
      e.case_id = id;
      e.activity = activity;
      e.timestamp = ts;
      events.push_back(std::move(e));
      ts += 10;
    }
    Event end;
    end.case_id = id;
    end.activity = kEndMarker;
    end.timestamp = ts;
    end.is_case_end = true;
    events.push_back(std::move(end));
    ts += 10;
  }

  StreamConfig config;
  config.window = SizeSpec::percent(10);
  config.retrain = SizeSpec::percent(66.7);
  config.threshold = 0.05;
  config.detector = DetectorKind::pad;
  config.predictor = PredictorKind::frequency;
  config.seed = kSeed;
  std::vector<RetrainInfo> retrains;
  config.on_retrain = [&](const RetrainInfo& info) { retrains.push_back(info); };
  const RunSummary summary = run_stream(config, events);

  const bool sizes = summary.window_size == 3 && summary.retrain_interval == 2;
  const bool count = summary.retrain_count == 14;
  const bool first = retrains.size() >= 2 && retrains[0].model_version == 1 &&
                     retrains[0].completed_cases == 3 &&
                     retrains[0].window_case_ids ==
                         std::vector<std::string>{"case1", "case2", "case3"};
  const bool second = retrains.size() >= 2 && retrains[1].model_version == 2 &&
                      retrains[1].completed_cases == 5;
  bool versions = true;
  for (const Verdict& v : summary.verdicts) {
    if (v.case_id == "case4" || v.case_id == "case5") versions &= v.model_version == 1;
    if (v.case_id == "case6" || v.case_id == "case7") versions &= v.model_version == 2;
  }
  std::ostringstream detail;
  detail << "W=" << summary.window_size << " R_abs=" << summary.retrain_interval
         << " retrains=" << summary.retrain_count
         << " (first after case 3, second after case 5: "
         << (first && second ? "yes" : "no") << ")";
  report(5, "30 cases at W=10%, R=66.7% replay the documented schedule",
         sizes && count && first && second && versions, detail.str());
}

// -------------------------------------------------------------------------
// Criterion 6: oracle equivalences.
// -------------------------------------------------------------------------

bool frequency_oracle_check() {
  Rng rng(1001);
  const std::vector<std::string> labels = {"A", "B", "C", "D"};
  for (int round = 0; round < 10; ++round) {
    std::vector<Case> cases;
    const int case_count = 5 + static_cast<int>(rng.next_below(45));
    for (int i = 0; i < case_count; ++i) {
      Case c;
      c.case_id = "c" + std::to_string(i);
      c.completed = true;
      std::int64_t ts = 0;
      const int len = 1 + static_cast<int>(rng.next_below(5));
      for (int j = 0; j < len; ++j) {
        Event e;
        e.case_id = c.case_id;
        e.activity = labels[rng.next_below(labels.size())];
        e.timestamp = ts;
        ts += 10;
        c.events.push_back(std::move(e));
      }
      cases.push_back(std::move(c));
    }
    const EventLog log = build_log(cases);
    const Alphabet alphabet = Alphabet::from_log(log);
    int longest = 1;
    for (const Case& c : log.cases)
      longest = std::max(longest, static_cast<int>(c.events.size()));
    const auto model = train(bucketize(log, longest), PredictorKind::frequency, {},
                             alphabet, 1);

    for (int q = 0; q < 40; ++q) {
      const int len =
          1 + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(longest)));
      std::vector<std::string> query;
      for (int j = 0; j < len; ++j) query.push_back(labels[rng.next_below(4)]);

      // independent counting oracle over the raw cases
      std::map<std::vector<std::string>, std::vector<double>> exact;
      std::map<std::string, std::vector<double>> by_last;
      std::vector<double> marginal(alphabet.label_count(), 0.0);
      for (const Case& c : log.cases) {
        if (static_cast<int>(c.events.size()) < len) continue;
        std::vector<std::string> prefix;
        for (int j = 0; j < len; ++j) prefix.push_back(c.events[j].activity);
        const int label = static_cast<int>(c.events.size()) == len
                              ? alphabet.end_label()
                              : *alphabet.index_of(c.events[len].activity);
        exact.try_emplace(prefix, alphabet.label_count(), 0.0).first->second[label] +=
            1.0;
        by_last.try_emplace(prefix.back(), alphabet.label_count(), 0.0)
            .first->second[label] += 1.0;
        marginal[label] += 1.0;
      }
      std::vector<double> counts;
      if (const auto it = exact.find(query); it != exact.end()) counts = it->second;
      else if (const auto it2 = by_last.find(query.back()); it2 != by_last.end())
        counts = it2->second;
      else counts = marginal;
      double total = 0.0;
      for (const double c : counts) total += c;
      std::vector<double> expected(counts.size());
      if (total > 0)
        for (std::size_t i = 0; i < counts.size(); ++i) expected[i] = counts[i] / total;
      else
        expected.assign(counts.size(), 1.0 / static_cast<double>(counts.size()));

      std::vector<Event> prefix_events;
      std::int64_t ts = 0;
      for (const std::string& a : query) {
        Event e;
        e.case_id = "q";
        e.activity = a;
        e.timestamp = ts;
        ts += 10;
        prefix_events.push_back(std::move(e));
      }
      const auto dist = model.predict_for_prefix(
          std::span(prefix_events.data(), prefix_events.size()));
      for (std::size_t i = 0; i < expected.size(); ++i)
        if (dist.probs[i] != expected[i]) return false;
    }
  }
  return true;
}

bool lof_oracle_check() {
  Rng rng(1002);
  for (const long n : {40L, 200L}) {
    FeatureMatrix data(n, 7);
    for (long r = 0; r < n; ++r)
      for (long c = 0; c < 7; ++c) data(r, c) = rng.next_real() * 5.0;
    TrainingBucket bucket;
    bucket.prefix_len = 1;
    bucket.features = data;
    bucket.labels.assign(static_cast<std::size_t>(n), 0);
    std::map<int, TrainingBucket> buckets;
    buckets.emplace(1, std::move(bucket));
    const Alphabet alphabet({"x1", "x2", "x3", "x4"});  // width 1*(4+3) = 7
    UnsupervisedHyper hyper;
    const auto scorer =
        fit_scorer(buckets, ScorerKind::lof, hyper, alphabet, 4, 0.1);

    // naive reference from the definitions
    const int k = hyper.lof_k;
    std::vector<double> kdist(n);
    std::vector<std::vector<int>> nbrs(n);
    for (long i = 0; i < n; ++i) {
      std::vector<std::pair<double, int>> d;
      for (long j = 0; j < n; ++j)
        if (j != i) d.emplace_back((data.row(i) - data.row(j)).norm(), (int)j);
      std::sort(d.begin(), d.end());
      for (int m = 0; m < k; ++m) nbrs[i].push_back(d[m].second);
      kdist[i] = d[k - 1].first;
    }
    std::vector<double> lrd(n);
    for (long i = 0; i < n; ++i) {
      double reach = 0.0;
      for (const int j : nbrs[i])
        reach += std::max(kdist[j], (data.row(i) - data.row(j)).norm());
      lrd[i] = 1.0 / (reach / k + 1e-10);
    }
    std::vector<double> expected(n);
    for (long i = 0; i < n; ++i) {
      double sum = 0.0;
      for (const int j : nbrs[i]) sum += lrd[j];
      expected[i] = (sum / k) / lrd[i];
    }
    std::sort(expected.begin(), expected.end());
    const auto scores = scorer.training_scores(1);
    for (long i = 0; i < n; ++i)
      if (std::abs(scores[i] - expected[i]) >= 1e-9) return false;
  }
  return true;
}

bool score_run_oracle_check() {
  Rng rng(1003);
  for (int round = 0; round < 10; ++round) {
    const int n = 50 + static_cast<int>(rng.next_below(950));
    Case c;
    c.case_id = "c";
    c.completed = true;
    std::vector<Verdict> verdicts;
    long tp = 0, fp = 0, fn = 0, tn = 0, unscored = 0;
    for (int i = 0; i < n; ++i) {
      Event e;
      e.case_id = "c";
      e.activity = "A" + std::to_string(i);
      e.timestamp = i;
      const bool actual = rng.next_below(12) == 0;
      e.truth = actual ? TruthLabel::anomalous : TruthLabel::normal;
      c.events.push_back(std::move(e));

      Verdict v;
      v.case_id = "c";
      v.position = i + 1;
      v.activity = "A" + std::to_string(i);
      const int roll = static_cast<int>(rng.next_below(10));
      v.decision = roll == 0  ? Decision::unscored
                   : roll < 6 ? Decision::normal
                              : Decision::anomalous;
      verdicts.push_back(std::move(v));
      if (verdicts.back().decision == Decision::unscored) ++unscored;
      else {
        const bool predicted = verdicts.back().decision == Decision::anomalous;
        tp += predicted && actual;
        fp += predicted && !actual;
        fn += !predicted && actual;
        tn += !predicted && !actual;
      }
    }
    const RunScore score = score_run(verdicts, build_log({c}));
    if (score.anomalous.tp != tp || score.anomalous.fp != fp ||
        score.anomalous.fn != fn || score.anomalous.tn != tn ||
        score.unscored != unscored)
      return false;
    const double precision = tp + fp > 0 ? double(tp) / double(tp + fp) : 0.0;
    const double recall = tp + fn > 0 ? double(tp) / double(tp + fn) : 0.0;
    const double f1 = precision + recall > 0
                          ? 2 * precision * recall / (precision + recall)
                          : 0.0;
    if (score.anomalous.precision != precision || score.anomalous.recall != recall ||
        score.anomalous.f1 != f1)
      return false;
  }
  return true;
}

void criterion_6() {
  const bool freq = frequency_oracle_check();
  const bool lof = lof_oracle_check();
  const bool tally = score_run_oracle_check();
  report(6, "oracle equivalences (frequency counts, naive lof, confusion tally)",
         freq && lof && tally,
         std::string("frequency=") + (freq ? "exact" : "MISMATCH") +
             " lof=" + (lof ? "<=1e-9" : "MISMATCH") +
             " score_run=" + (tally ? "exact" : "MISMATCH"));
}

// -------------------------------------------------------------------------
// Criterion 7: invariant suites.
// -------------------------------------------------------------------------

void criterion_7(const std::map<double, std::vector<Event>>& streams) {
  Rng rng(1007);
  bool onehot = true, cumdur = true;
  {
    const std::vector<std::string> labels = {"A", "B", "C"};
    const Alphabet alphabet({"A", "B"});
    for (int it = 0; it < 300; ++it) {
      const int len = 1 + static_cast<int>(rng.next_below(7));
      std::vector<Event> prefix;
      std::int64_t ts = rng.next_below(100);
      for (int i = 0; i < len; ++i) {
        Event e;
        e.case_id = "c";
        e.activity = labels[rng.next_below(labels.size())];
        e.timestamp = ts;
        ts += static_cast<std::int64_t>(rng.next_below(100));
        prefix.push_back(std::move(e));
      }
      const FeatureRow row =
          encode_prefix(std::span(prefix.data(), prefix.size()), alphabet);
      for (int i = 0; i < len; ++i) {
        const auto block = row.segment(i * alphabet.block_width(), alphabet.block_width());
        onehot = onehot && block.sum() == 1.0 && block.maxCoeff() == 1.0 &&
                 block.minCoeff() == 0.0 &&
                 block(alphabet.slot_of(prefix[i].activity)) == 1.0;
      }
      const int base = len * alphabet.block_width();
      double cum = 0.0;
      for (int i = 0; i < len; ++i) {
        cum += row(base + i);
        cumdur = cumdur && row(base + len + i) == cum;
      }
      cumdur = cumdur && row(base + 2 * len - 1) ==
                             double(prefix.back().timestamp - prefix[0].timestamp);
    }
  }

  bool normalized = true;
  {
    StreamConfig config;
    config.window = SizeSpec::percent(20);
    config.retrain = SizeSpec::percent(50);
    config.predictor = PredictorKind::random_forest;
    config.predictor_hyper.rf_trees = 25;
    config.threshold = 0.05;
    config.seed = 3;
    // normalization is asserted on live distributions via detect scores
    const auto events = streams.at(0.05);
    const std::vector<Event> slice(events.begin(),
                                   events.begin() + events.size() / 4);
    const EventLog window_log = build_log(assemble_cases(slice).completed);
    int longest = 1;
    for (const Case& c : window_log.cases)
      longest = std::max(longest, static_cast<int>(c.events.size()));
    const auto model =
        train(bucketize(window_log, longest), PredictorKind::random_forest,
              config.predictor_hyper, Alphabet::from_log(window_log), 3);
    for (const Case& c : window_log.cases) {
      for (std::size_t n = 0; n <= c.events.size() && n <= 20; ++n) {
        const auto dist = model.predict_for_prefix(std::span(c.events.data(), n));
        double total = 0.0;
        for (const double p : dist.probs) total += p;
        normalized = normalized && std::abs(total - 1.0) < 1e-9;
      }
    }
  }

  bool pad_monotone = true, unsup_monotone = true;
  {
    // pad: a verdict anomalous at tau stays anomalous at every larger tau
    std::vector<Case> cases;
    for (int i = 0; i < 10; ++i) {
      Case c;
      c.case_id = "c" + std::to_string(i);
      c.completed = true;
      for (int j = 0; j < 3; ++j) {
        Event e;
        e.case_id = c.case_id;
        e.activity = std::string(1, static_cast<char>('A' + ((i + j) % 4)));
        e.timestamp = 10 * j;
        c.events.push_back(std::move(e));
      }
      cases.push_back(std::move(c));
    }
    const EventLog log = build_log(cases);
    const auto model = train(bucketize(log, 3), PredictorKind::frequency, {},
                             Alphabet::from_log(log), 1);
    for (int it = 0; it < 100; ++it) {
      Case open;
      open.case_id = "q";
      Event e1;
      e1.case_id = "q";
      e1.activity = std::string(1, static_cast<char>('A' + rng.next_below(4)));
      e1.timestamp = 0;
      open.events.push_back(e1);
      Event e2;
      e2.case_id = "q";
      e2.activity = std::string(1, static_cast<char>('A' + rng.next_below(4)));
      e2.timestamp = 10;
      double lo = 0.01 + rng.next_real() * 0.5;
      double hi = lo + rng.next_real() * (0.98 - lo);
      const Verdict at_lo = detect(model, open, e2, lo);
      const Verdict at_hi = detect(model, open, e2, hi);
      if (at_lo.decision == Decision::anomalous)
        pad_monotone = pad_monotone && at_hi.decision == Decision::anomalous;
      pad_monotone = pad_monotone && at_lo.score == at_hi.score;
    }

    FeatureMatrix data(60, 7);
    for (long r = 0; r < 60; ++r)
      for (long c = 0; c < 7; ++c) data(r, c) = rng.next_real() * 4.0;
    TrainingBucket bucket;
    bucket.prefix_len = 1;
    bucket.features = data;
    bucket.labels.assign(60, 0);
    std::map<int, TrainingBucket> buckets;
    buckets.emplace(1, std::move(bucket));
    const Alphabet alphabet({"x1", "x2", "x3", "x4"});
    for (const ScorerKind kind : {ScorerKind::iforest, ScorerKind::lof}) {
      const auto tight = fit_scorer(buckets, kind, {}, alphabet, 9, 0.05);
      const auto loose = fit_scorer(buckets, kind, {}, alphabet, 9, 0.25);
      unsup_monotone = unsup_monotone && loose.cutoff(1) <= tight.cutoff(1);
      for (int q = 0; q < 40; ++q) {
        FeatureRow probe(7);
        for (long c = 0; c < 7; ++c) probe(c) = rng.next_real() * 4.0;
        if (tight.raw_score(1, probe) > tight.cutoff(1))
          unsup_monotone =
              unsup_monotone && loose.raw_score(1, probe) > loose.cutoff(1);
      }
    }
  }

  bool window_replay = true;
  {
    const auto& events = streams.at(0.10);
    StreamConfig config;
    config.window = SizeSpec::percent(10);
    config.retrain = SizeSpec::percent(30);
    config.threshold = 0.05;
    config.predictor = PredictorKind::frequency;
    config.seed = kSeed;
    std::vector<RetrainInfo> retrains;
    config.on_retrain = [&](const RetrainInfo& info) { retrains.push_back(info); };
    run_stream(config, events);

    // reference FIFO over the completion order
    const auto assembled = assemble_cases(events);
    const int w = resolve_window(static_cast<int>(assembled.completed.size()),
                                 config.window);
    const int r_abs = resolve_interval(w, config.retrain);
    std::deque<std::string> window;
    int pending = 0, version = 0;
    std::size_t cursor = 0;
    for (std::size_t i = 0; i < assembled.completed.size(); ++i) {
      window.push_back(assembled.completed[i].case_id);
      if (static_cast<int>(window.size()) > w) window.pop_front();
      const bool fires = version == 0 ? static_cast<int>(window.size()) == w
                                      : ++pending == r_abs;
      if (!fires) continue;
      ++version;
      pending = 0;
      if (cursor >= retrains.size() ||
          retrains[cursor].model_version != version ||
          retrains[cursor].window_case_ids !=
              std::vector<std::string>(window.begin(), window.end())) {
        window_replay = false;
        break;
      }
      ++cursor;
    }
    window_replay = window_replay && cursor == retrains.size();
  }

  bool deterministic = true;
  {
    GeneratorConfig generator_config;
    generator_config.noise = 0.075;
    generator_config.case_count = 120;
    generator_config.seed = 42;
    const auto log_a = generate(default_loan_model(), generator_config);
    const auto log_b = generate(default_loan_model(), generator_config);
    deterministic = emit_stream_text(log_a.events) == emit_stream_text(log_b.events);

    StreamConfig config;
    config.window = SizeSpec::percent(20);
    config.retrain = SizeSpec::percent(40);
    config.threshold = 0.1;
    config.detector = DetectorKind::iforest;
    config.seed = 5;
    const auto run_a = run_stream(config, log_a.events);
    const auto run_b = run_stream(config, log_b.events);
    deterministic = deterministic && verdicts_csv_text(run_a.verdicts) ==
                                         verdicts_csv_text(run_b.verdicts);

    SweepGrid grid;
    grid.noise_levels = {0.075};
    grid.windows = {SizeSpec::percent(20)};
    grid.retrains = {SizeSpec::percent(40)};
    grid.thresholds = {0.05, 0.2};
    grid.detectors = {DetectorKind::pad, DetectorKind::lof};
    grid.predictors = {PredictorKind::frequency};
    grid.cases = 120;
    grid.seed = 42;
    std::map<double, std::vector<Event>> sweep_streams{{0.075, log_a.events}};
    deterministic = deterministic &&
                    results_csv_text(run_sweep(grid, sweep_streams)) ==
                        results_csv_text(run_sweep(grid, sweep_streams));
  }

  const bool all = onehot && cumdur && normalized && pad_monotone &&
                   unsup_monotone && window_replay && deterministic;
  std::ostringstream detail;
  detail << "onehot=" << onehot << " cumdur=" << cumdur << " norm=" << normalized
         << " pad_monotone=" << pad_monotone << " unsup_monotone=" << unsup_monotone
         << " window_replay=" << window_replay << " determinism=" << deterministic;
  report(7, "invariant suites", all, detail.str());
}

// -------------------------------------------------------------------------
// Criterion 8: generator statistics.
// -------------------------------------------------------------------------

std::pair<long, long> binomial_ci99(long n, double p) {
  const double log_p = std::log(p);
  const double log_q = std::log1p(-p);
  double cdf = 0.0;
  long lo = -1, hi = -1;
  for (long k = 0; k <= n; ++k) {
    const double log_pmf =
        std::lgamma(double(n) + 1.0) - std::lgamma(double(k) + 1.0) -
        std::lgamma(double(n - k) + 1.0) + double(k) * log_p + double(n - k) * log_q;
    cdf += std::exp(log_pmf);
    if (lo < 0 && cdf >= 0.005) lo = k;
    if (hi < 0 && cdf >= 0.995) {
      hi = k;
      break;
    }
  }
  if (hi < 0) hi = n;
  return {lo, hi};
}

void criterion_8() {
  bool all = true;
  std::ostringstream detail;
  for (const double noise : kNoiseLevels) {
    GeneratorConfig config;
    config.noise = noise;
    config.case_count = 500;
    config.seed = kSeed;
    const GeneratedLog log = generate(default_loan_model(), config);
    const auto [lo, hi] = binomial_ci99(log.normal_events, noise);
    const long total = log.normal_events + log.injected_events;
    const bool in_ci = log.injected_events >= lo && log.injected_events <= hi;
    const bool in_scale = total >= 5000 && total <= 12000;
    all = all && in_ci && in_scale;
    detail << "p=" << fmt_double(noise) << " injected=" << log.injected_events
           << " ci=[" << lo << "," << hi << "] events=" << total
           << (in_ci && in_scale ? "; " : " (OUT OF RANGE); ");
  }
  report(8, "injection volume in the exact binomial 99% interval, desk-scale logs",
         all, detail.str());
}

}  // namespace

int main() {
  const auto start = Clock::now();
  std::cout << "acceptance: regenerating the six benchmark streams (500 cases, seed "
            << kSeed << ")" << std::endl;
  const auto streams = benchmark_streams();

  criteria_1_and_2(streams);
  criterion_4(streams);
  criterion_5();
  criterion_6();
  criterion_7(streams);
  criterion_8();

  std::cout << "acceptance finished in " << fmt_double(seconds_since(start))
            << "s; " << (g_failures == 0 ? "ALL CRITERIA PASSED" : "FAILURES PRESENT")
            << std::endl;
  return g_failures == 0 ? 0 : 1;
}
