#include "streampad/synthlog.hpp"

#include <algorithm>
#include <cstdio>

#include "streampad/errors.hpp"
#include "streampad/format.hpp"
#include "streampad/rng.hpp"

namespace streampad {

std::uint64_t ProcessModel::checksum() const {
  std::string repr;
  for (std::size_t n = 0; n < activities.size(); ++n) {
    repr += activities[n];
    repr += "|v" + std::to_string(max_visits[n]);
    for (const Transition& t : outgoing[n]) {
      repr += ";" + std::to_string(t.target) + ":" + fmt_double(t.weight) + ":" +
              std::to_string(t.delay.min_s) + "-" + std::to_string(t.delay.max_s);
    }
    repr += "\n";
  }
  repr += "start=" + std::to_string(start_node);
  repr += ",decay=" + fmt_double(revisit_decay);
  repr += ",arrival=" + std::to_string(case_arrival.min_s) + "-" +
          std::to_string(case_arrival.max_s);
  repr += ",base=" + std::to_string(base_timestamp);
  return fnv1a(repr);
}

namespace {

std::int64_t sample_duration(const DurationRange& range, Rng& rng) {
  return rng.next_int(range.min_s, range.max_s);
}

/// Adjusted outgoing weights at `node` given per-node visit counts.
std::vector<double> adjusted_weights(const ProcessModel& model, int node,
                                     const std::vector<int>& visits) {
  const auto& out = model.outgoing[node];
  std::vector<double> weights(out.size(), 0.0);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const int target = out[i].target;
    if (visits[target] >= model.max_visits[target]) continue;
    double w = out[i].weight;
    for (int v = 0; v < visits[target]; ++v) w *= model.revisit_decay;
    weights[i] = w;
  }
  return weights;
}

struct CleanEvent {
  std::string activity;
  std::int64_t timestamp;
};

std::vector<CleanEvent> walk_case(const ProcessModel& model, std::int64_t start_ts,
                                  Rng& rng) {
  std::vector<CleanEvent> events;
  std::vector<int> visits(model.activities.size(), 0);
  int node = model.start_node;
  std::int64_t ts = start_ts;
  for (;;) {
    events.push_back({model.activities[node], ts});
    ++visits[node];
    if (model.outgoing[node].empty()) break;
    const std::vector<double> weights = adjusted_weights(model, node, visits);
    double total = 0.0;
    for (const double w : weights) total += w;
    if (total <= 0.0) break;  // all successors capped; treat as terminal
    const double draw = rng.next_real() * total;
    double cum = 0.0;
    std::size_t pick = weights.size() - 1;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      cum += weights[i];
      if (draw < cum) {
        pick = i;
        break;
      }
    }
    ts += sample_duration(model.outgoing[node][pick].delay, rng);
    node = model.outgoing[node][pick].target;
  }
  return events;
}

std::string case_name(int index) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "c%05d", index + 1);
  return buf;
}

}  // namespace

GeneratedLog generate(const ProcessModel& model, const GeneratorConfig& config) {
  if (config.noise < 0.0 || config.noise > 1.0)
    throw ConfigError("noise must lie in [0,1]");
  if (config.case_count < 1) throw ConfigError("case_count must be >= 1");

  Rng walk_rng(derive_seed(config.seed, "walk"));
  Rng noise_rng(derive_seed(config.seed, "noise"));

  GeneratedLog out;
  struct Keyed {
    Event event;
    int case_index;
    int seq;
  };
  std::vector<Keyed> keyed;

  std::int64_t case_start = model.base_timestamp;
  for (int k = 0; k < config.case_count; ++k) {
    case_start += sample_duration(model.case_arrival, walk_rng);
    const std::vector<CleanEvent> clean = walk_case(model, case_start, walk_rng);
    const std::string case_id = case_name(k);

    std::vector<Event> events;
    events.reserve(clean.size() + 2);
    for (std::size_t i = 0; i < clean.size(); ++i) {
      if (noise_rng.next_real() < config.noise) {
        Event injected;
        injected.case_id = case_id;
        injected.activity = model.activities[noise_rng.next_below(
            static_cast<std::uint64_t>(model.activities.size()))];
        injected.timestamp =
            i == 0 ? clean[0].timestamp
                   : (clean[i - 1].timestamp + clean[i].timestamp) / 2;
        injected.truth = TruthLabel::anomalous;
        events.push_back(std::move(injected));
        ++out.injected_events;
      }
      Event e;
      e.case_id = case_id;
      e.activity = clean[i].activity;
      e.timestamp = clean[i].timestamp;
      e.truth = TruthLabel::normal;
      events.push_back(std::move(e));
      ++out.normal_events;
    }
    Event end;
    end.case_id = case_id;
    end.activity = kEndMarker;
    end.timestamp = events.back().timestamp;
    end.is_case_end = true;
    events.push_back(std::move(end));

    for (std::size_t seq = 0; seq < events.size(); ++seq)
      keyed.push_back({std::move(events[seq]), k, static_cast<int>(seq)});
  }

  std::sort(keyed.begin(), keyed.end(), [](const Keyed& a, const Keyed& b) {
    if (a.event.timestamp != b.event.timestamp)
      return a.event.timestamp < b.event.timestamp;
    if (a.case_index != b.case_index) return a.case_index < b.case_index;
    return a.seq < b.seq;
  });
  out.events.reserve(keyed.size());
  for (Keyed& k : keyed) out.events.push_back(std::move(k.event));
  return out;
}

ProcessModel default_loan_model() {
  ProcessModel m;
  m.activities = {
      "submit_application",      // 0
      "check_completeness",      // 1
      "request_missing_docs",    // 2
      "register_application",    // 3
      "credit_check",            // 4
      "automatic_assessment",    // 5
      "manual_assessment",       // 6
      "request_collateral_info", // 7
      "appraise_collateral",     // 8
      "calculate_offer",         // 9
      "send_offer",              // 10
      "send_reminder",           // 11
      "receive_acceptance",      // 12
      "receive_rejection",       // 13
      "approve_loan",            // 14
      "decline_loan",            // 15
      "sign_contract",           // 16
      "archive_case",            // 17
  };
  m.outgoing.resize(m.activities.size());
  m.max_visits.assign(m.activities.size(), 8);
  m.revisit_decay = 0.6;
  // mean case span is a few working days; arrivals of 4-12h keep a couple
  // dozen cases in flight at a time
  m.case_arrival = {14400, 43200};

  auto edge = [&](int from, int to, double weight, std::int64_t lo, std::int64_t hi) {
    m.outgoing[from].push_back({to, weight, {lo, hi}});
  };

  edge(0, 1, 1.00, 900, 7200);
  edge(1, 2, 0.60, 1800, 14400);
  edge(1, 3, 0.40, 600, 3600);
  edge(2, 1, 1.00, 43200, 259200);
  edge(3, 4, 1.00, 1800, 10800);
  edge(4, 5, 0.55, 600, 7200);
  edge(4, 6, 0.45, 3600, 28800);
  edge(5, 9, 1.00, 600, 7200);
  edge(6, 7, 0.75, 1800, 14400);
  edge(6, 9, 0.25, 3600, 21600);
  edge(7, 8, 1.00, 86400, 345600);
  edge(8, 9, 1.00, 3600, 28800);
  edge(9, 10, 1.00, 1800, 14400);
  edge(10, 12, 0.44, 21600, 172800);
  edge(10, 13, 0.18, 21600, 172800);
  edge(10, 11, 0.38, 172800, 432000);
  edge(11, 12, 0.40, 10800, 86400);
  edge(11, 13, 0.25, 10800, 86400);
  edge(11, 11, 0.35, 172800, 432000);
  edge(12, 14, 0.85, 3600, 43200);
  edge(12, 15, 0.15, 3600, 43200);
  edge(13, 9, 0.32, 43200, 259200);
  edge(13, 17, 0.68, 3600, 28800);
  edge(14, 16, 1.00, 86400, 259200);
  edge(15, 17, 1.00, 1800, 14400);
  edge(16, 17, 1.00, 1800, 14400);

  // loop bounds: the document-completeness loop, repeated reminders, and
  // renegotiated offers are each tried a limited number of times
  m.max_visits[2] = 3;
  m.max_visits[11] = 2;
  m.max_visits[9] = 3;
  return m;
}

namespace {

void enumerate_rec(const ProcessModel& model, int node, std::vector<int>& visits,
                   std::vector<std::string>& trace, double probability,
                   std::vector<Variant>& out, std::size_t limit) {
  trace.push_back(model.activities[node]);
  ++visits[node];
  const auto& transitions = model.outgoing[node];

  bool terminal = transitions.empty();
  std::vector<double> weights;
  double total = 0.0;
  if (!terminal) {
    weights = adjusted_weights(model, node, visits);
    for (const double w : weights) total += w;
    terminal = total <= 0.0;
  }

  if (terminal) {
    if (out.size() >= limit)
      throw ValidationError("enumerate_variants: more than " +
                            std::to_string(limit) + " variants");
    out.push_back({trace, probability});
  } else {
    for (std::size_t i = 0; i < transitions.size(); ++i) {
      if (weights[i] <= 0.0) continue;
      enumerate_rec(model, transitions[i].target, visits, trace,
                    probability * weights[i] / total, out, limit);
    }
  }

  --visits[node];
  trace.pop_back();
}

}  // namespace

std::vector<Variant> enumerate_variants(const ProcessModel& model, std::size_t limit) {
  std::vector<Variant> out;
  std::vector<int> visits(model.activities.size(), 0);
  std::vector<std::string> trace;
  enumerate_rec(model, model.start_node, visits, trace, 1.0, out, limit);
  return out;
}

}  // namespace streampad
