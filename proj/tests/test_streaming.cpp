#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <deque>

#include "streampad/errors.hpp"
#include "streampad/rng.hpp"
#include "streampad/streaming.hpp"

using namespace streampad;

namespace {

// sequential stream: case k's events all arrive before case k+1's
std::vector<Event> sequential_stream(int case_count,
                                     const std::vector<std::string>& activities) {
  std::vector<Event> events;
  std::int64_t ts = 0;
  for (int k = 0; k < case_count; ++k) {
    const std::string id = "case" + std::to_string(k + 1);
    for (const auto& a : activities) {
      Event e;
      e.case_id = id;
      e.activity = a;
      e.timestamp = ts;
      e.truth = TruthLabel::normal;
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
  return events;
}

StreamConfig frequency_config(const std::string& window, const std::string& retrain,
                              double threshold = 0.05) {
  StreamConfig config;
  config.window = SizeSpec::parse(window);
  config.retrain = SizeSpec::parse(retrain);
  config.threshold = threshold;
  config.predictor = PredictorKind::frequency;
  config.seed = 17;
  return config;
}

}  // namespace

TEST_CASE("resolve_window rounds half up with a floor of one case") {
  CHECK(resolve_window(500, SizeSpec::percent(5)) == 25);
  CHECK(resolve_window(30, SizeSpec::percent(10)) == 3);
  CHECK(resolve_window(9999, SizeSpec::absolute(40)) == 40);
  CHECK(resolve_window(10, SizeSpec::percent(1)) == 1);  // floor
  CHECK(resolve_window(30, SizeSpec::percent(25)) == 8);  // 7.5 rounds up
}

TEST_CASE("resolve_interval: two thirds of a 3-case window is 2; 0% is 1") {
  CHECK(resolve_interval(3, SizeSpec::percent(66.7)) == 2);
  CHECK(resolve_interval(3, SizeSpec::percent(0)) == 1);
  CHECK(resolve_interval(50, SizeSpec::percent(20)) == 10);
  CHECK(resolve_interval(50, SizeSpec::absolute(7)) == 7);
}

TEST_CASE("size specs parse percentages and absolute counts") {
  CHECK(SizeSpec::parse("10%").ratio == doctest::Approx(0.10));
  CHECK(SizeSpec::parse("25c").count == 25);
  CHECK_THROWS_AS(SizeSpec::parse("200%"), ConfigError);
  CHECK_THROWS_AS(SizeSpec::parse("0c"), ConfigError);
  CHECK_THROWS_AS(SizeSpec::parse("10"), ConfigError);
  CHECK(SizeSpec::parse("10%").str() == "10%");
  CHECK(SizeSpec::parse("25c").str() == "25c");
}

TEST_CASE("the worked 30-case example: W=3, retrain every 2 completions") {
  const auto events = sequential_stream(30, {"A", "B"});
  StreamConfig config = frequency_config("10%", "66.7%");
  std::vector<RetrainInfo> retrains;
  config.on_retrain = [&](const RetrainInfo& info) { retrains.push_back(info); };

  const RunSummary summary = run_stream(config, events);
  CHECK(summary.window_size == 3);
  CHECK(summary.retrain_interval == 2);
  CHECK(summary.completed_cases == 30);
  // one warm-up fit plus one per two later completions: 1 + (30-3)/2 = 14
  CHECK(summary.retrain_count == 14);
  REQUIRE(retrains.size() == 14);

  // first model exists once case3 completes and trains on cases 1..3
  CHECK(retrains[0].model_version == 1);
  CHECK(retrains[0].completed_cases == 3);
  CHECK(retrains[0].window_case_ids ==
        std::vector<std::string>{"case1", "case2", "case3"});
  // second model after cases 4 and 5 joined the window
  CHECK(retrains[1].model_version == 2);
  CHECK(retrains[1].completed_cases == 5);
  CHECK(retrains[1].window_case_ids ==
        std::vector<std::string>{"case3", "case4", "case5"});

  // events of cases 6 and 7 are scored by model version 2
  for (const Verdict& v : summary.verdicts) {
    if (v.case_id == "case6" || v.case_id == "case7")
      CHECK(v.model_version == 2);
    if (v.case_id == "case4" || v.case_id == "case5")
      CHECK(v.model_version == 1);
  }
}

TEST_CASE("a 0% retrain interval refits after every completed case") {
  const auto events = sequential_stream(12, {"A", "B"});
  StreamConfig config = frequency_config("25%", "0%");
  const RunSummary summary = run_stream(config, events);
  CHECK(summary.window_size == 3);
  CHECK(summary.retrain_interval == 1);
  CHECK(summary.retrain_count == 12 - 3 + 1);
}

TEST_CASE("a window larger than the stream leaves everything unscored") {
  const auto events = sequential_stream(4, {"A", "B"});
  StreamConfig config = frequency_config("50c", "20%");
  const RunSummary summary = run_stream(config, events);
  CHECK(summary.scored == 0);
  CHECK(summary.unscored == 8);
  CHECK(summary.retrain_count == 0);
  REQUIRE(!summary.warnings.empty());
  CHECK(summary.warnings.back().find("no model") != std::string::npos);
  for (const Verdict& v : summary.verdicts) CHECK(v.decision == Decision::unscored);
}

TEST_CASE("verdicts follow arrival order with nondecreasing model versions") {
  const auto events = sequential_stream(20, {"A", "B", "C"});
  const RunSummary summary = run_stream(frequency_config("10%", "20%"), events);
  std::size_t verdict_index = 0;
  int last_version = 0;
  for (const Event& e : events) {
    if (e.is_case_end) continue;
    REQUIRE(verdict_index < summary.verdicts.size());
    const Verdict& v = summary.verdicts[verdict_index++];
    CHECK(v.case_id == e.case_id);
    CHECK(v.activity == e.activity);
    CHECK(v.model_version >= last_version);
    last_version = v.model_version;
  }
  CHECK(verdict_index == summary.verdicts.size());
}

TEST_CASE("once a model exists every later event is scored") {
  const auto events = sequential_stream(15, {"A", "B"});
  const RunSummary summary = run_stream(frequency_config("20%", "30%"), events);
  bool saw_scored = false;
  for (const Verdict& v : summary.verdicts) {
    if (v.decision != Decision::unscored) saw_scored = true;
    if (saw_scored) CHECK(v.decision != Decision::unscored);
  }
  CHECK(saw_scored);
  CHECK(summary.scored + summary.unscored == summary.verdicts.size());
}

TEST_CASE("property: window contents replay a reference FIFO simulator") {
  Rng rng(71);
  for (int round = 0; round < 10; ++round) {
    const int case_count = 8 + static_cast<int>(rng.next_below(25));
    const auto events = sequential_stream(case_count, {"A", "B"});
    const int w_pct = 10 + static_cast<int>(rng.next_below(40));
    const int r_pct = static_cast<int>(rng.next_below(60));
    StreamConfig config = frequency_config(std::to_string(w_pct) + "%",
                                           std::to_string(r_pct) + "%");

    std::vector<RetrainInfo> retrains;
    config.on_retrain = [&](const RetrainInfo& info) { retrains.push_back(info); };
    const RunSummary summary = run_stream(config, events);

    // reference: FIFO of the last W completed cases, refit counting
    const int w = resolve_window(case_count, config.window);
    const int r_abs = resolve_interval(w, config.retrain);
    std::deque<std::string> window;
    int pending = 0, version = 0;
    std::size_t next_retrain = 0;
    for (int completed = 1; completed <= case_count; ++completed) {
      window.push_back("case" + std::to_string(completed));
      if (static_cast<int>(window.size()) > w) window.pop_front();
      bool fires = version == 0 ? static_cast<int>(window.size()) == w
                                : ++pending == r_abs;
      if (fires) {
        ++version;
        pending = 0;
        REQUIRE(next_retrain < retrains.size());
        const RetrainInfo& info = retrains[next_retrain++];
        CHECK(info.model_version == version);
        CHECK(info.completed_cases == completed);
        CHECK(info.window_case_ids ==
              std::vector<std::string>(window.begin(), window.end()));
      }
    }
    CHECK(next_retrain == retrains.size());
    if (case_count >= w)
      CHECK(summary.retrain_count == 1 + (case_count - w) / r_abs);
  }
}

TEST_CASE("replaying a stream reproduces identical verdicts") {
  const auto events = sequential_stream(25, {"A", "B", "C"});
  StreamConfig config = frequency_config("20%", "40%");
  config.detector = DetectorKind::iforest;
  const RunSummary a = run_stream(config, events);
  const RunSummary b = run_stream(config, events);
  REQUIRE(a.verdicts.size() == b.verdicts.size());
  CHECK(verdicts_csv_text(a.verdicts) == verdicts_csv_text(b.verdicts));
}

TEST_CASE("pad scores are invariant to the configured threshold") {
  const auto events = sequential_stream(25, {"A", "B", "C"});
  const RunSummary lo = run_stream(frequency_config("20%", "40%", 0.02), events);
  const RunSummary hi = run_stream(frequency_config("20%", "40%", 0.30), events);
  REQUIRE(lo.verdicts.size() == hi.verdicts.size());
  for (std::size_t i = 0; i < lo.verdicts.size(); ++i) {
    if (lo.verdicts[i].decision == Decision::unscored) {
      CHECK(hi.verdicts[i].decision == Decision::unscored);
      continue;
    }
    CHECK(lo.verdicts[i].score == hi.verdicts[i].score);
    CHECK(lo.verdicts[i].model_version == hi.verdicts[i].model_version);
  }
}

TEST_CASE("stale events are dropped with a diagnostic, not scored") {
  auto events = sequential_stream(10, {"A", "B"});
  Event stale;
  stale.case_id = "case1";  // completed long ago
  stale.activity = "A";
  stale.timestamp = events.back().timestamp + 5;
  events.push_back(stale);
  const RunSummary summary = run_stream(frequency_config("30%", "50%"), events);
  CHECK(summary.stale_events == 1);
  CHECK(summary.verdicts.size() == 20);  // 10 cases x 2 real events
}

TEST_CASE("end markers are scored only when requested") {
  const auto events = sequential_stream(10, {"A", "B"});
  StreamConfig config = frequency_config("30%", "50%");
  const RunSummary without = run_stream(config, events);
  CHECK(without.verdicts.size() == 20);

  config.score_end_markers = true;
  const RunSummary with = run_stream(config, events);
  CHECK(with.verdicts.size() == 30);
  int end_verdicts = 0;
  for (const Verdict& v : with.verdicts)
    if (v.activity == kEndMarker) {
      ++end_verdicts;
      CHECK(v.position == 3);
    }
  CHECK(end_verdicts == 10);
}

TEST_CASE("unsupervised detectors run the same loop") {
  const auto events = sequential_stream(20, {"A", "B"});
  for (const DetectorKind kind : {DetectorKind::iforest, DetectorKind::lof}) {
    StreamConfig config = frequency_config("20%", "50%");
    config.detector = kind;
    const RunSummary summary = run_stream(config, events);
    CHECK(summary.retrain_count > 0);
    CHECK(summary.scored > 0);
    for (const Verdict& v : summary.verdicts) CHECK(v.activity != kEndMarker);
  }
}

TEST_CASE("invalid stream configurations are rejected") {
  const auto events = sequential_stream(5, {"A"});
  StreamConfig config = frequency_config("10%", "20%");
  config.threshold = 0.0;
  CHECK_THROWS_AS(run_stream(config, events), ConfigError);
  CHECK_THROWS_AS(detector_kind_from_name("autoencoder"), ConfigError);
}
