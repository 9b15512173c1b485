#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "streampad/event.hpp"

namespace streampad {

struct DurationRange {
  std::int64_t min_s = 0;
  std::int64_t max_s = 0;
};

struct Transition {
  int target = -1;
  double weight = 0.0;  // relative branch weight
  DurationRange delay;
};

/// Branching process graph driving the generator. Random walks start at
/// `start_node` and stop at a node with no outgoing transitions. Cycles are
/// bounded: every revisit of a node multiplies the weights of transitions
/// into it by `revisit_decay`, and a node at its `max_visits` cap cannot be
/// entered again.
struct ProcessModel {
  std::vector<std::string> activities;            // node id -> label
  std::vector<std::vector<Transition>> outgoing;  // node id -> transitions
  int start_node = 0;
  std::vector<int> max_visits;
  double revisit_decay = 0.5;
  DurationRange case_arrival;  // gap between consecutive case starts
  std::int64_t base_timestamp = 1600000000;

  std::uint64_t checksum() const;
};

struct GeneratorConfig {
  int case_count = 500;
  double noise = 0.0;  // per-position injection probability
  std::uint64_t seed = 1;
};

struct GeneratedLog {
  std::vector<Event> events;  // stream order, end markers included
  long normal_events = 0;
  long injected_events = 0;
};

/// Simulates `case_count` cases of the model and injects labeled anomalous
/// events: before each normal event position, independently with probability
/// `noise`, one event with a uniformly drawn activity and a timestamp
/// interpolating its neighbors. Byte-deterministic per (model, config).
GeneratedLog generate(const ProcessModel& model, const GeneratorConfig& config);

/// The built-in 18-activity loan application process.
ProcessModel default_loan_model();

struct Variant {
  std::vector<std::string> activities;
  double probability;
};

/// All distinct traces the model can produce, with their probabilities
/// (visit caps make the set finite). Throws if more than `limit` exist.
std::vector<Variant> enumerate_variants(const ProcessModel& model,
                                        std::size_t limit = 100000);

}  // namespace streampad
