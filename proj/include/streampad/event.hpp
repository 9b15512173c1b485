#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace streampad {

/// Ground-truth label carried by benchmark streams; absent on live data.
enum class TruthLabel { normal, anomalous };

/// Reserved activity label marking case completion in the stream format.
/// It never appears in the activity alphabet.
inline constexpr const char* kEndMarker = "END";

/// One record of an event stream.
struct Event {
  std::string case_id;
  std::string activity;
  std::int64_t timestamp = 0;  // epoch seconds
  std::optional<TruthLabel> truth;
  bool is_case_end = false;
};

/// Ordered events of one case. End markers are not stored as events;
/// completion is the `completed` flag.
struct Case {
  std::string case_id;
  std::vector<Event> events;
  bool completed = false;

  std::size_t length() const { return events.size(); }
};

/// A batch of completed cases plus the activity alphabet they span
/// (sorted distinct labels, end markers excluded).
struct EventLog {
  std::vector<Case> cases;
  std::vector<std::string> activity_alphabet;
};

// ---------------------------------------------------------------------------
// Stream file format: UTF-8 CSV with header
//   case_id,activity,timestamp,truth,end
// truth in {normal, anomalous, <empty>}; end in {0,1}. A row with end=1 must
// carry the reserved END activity and vice versa.
// ---------------------------------------------------------------------------

std::vector<Event> parse_stream(std::istream& in);
std::vector<Event> parse_stream_text(const std::string& text);
std::vector<Event> load_stream_file(const std::string& path);

void emit_stream(const std::vector<Event>& events, std::ostream& out);
std::string emit_stream_text(const std::vector<Event>& events);
std::string format_event_line(const Event& e);

// ---------------------------------------------------------------------------
// Case assembly
// ---------------------------------------------------------------------------

/// Incrementally groups a stream into cases. An end marker completes its
/// case; events for an already-completed case are stale: dropped, counted,
/// and reported as diagnostics.
class CaseAssembler {
 public:
  /// Feeds one event. Returns the finished case when `e` is an end marker
  /// that completes a case; std::nullopt otherwise.
  std::optional<Case> feed(const Event& e);

  bool case_completed(const std::string& case_id) const {
    return completed_ids_.count(case_id) > 0;
  }
  /// Open (running) case for the id, or nullptr.
  const Case* open_case(const std::string& case_id) const;

  const std::map<std::string, Case>& open_cases() const { return open_; }
  std::size_t stale_count() const { return stale_.size(); }
  const std::vector<std::string>& stale_reports() const { return stale_; }

 private:
  std::map<std::string, Case> open_;
  std::set<std::string> completed_ids_;
  std::vector<std::string> stale_;
};

struct AssembledCases {
  std::vector<Case> completed;  // in completion order
  std::map<std::string, Case> open;
  std::vector<std::string> stale_reports;
};

AssembledCases assemble_cases(const std::vector<Event>& events);

/// Builds a log from completed cases, deriving the sorted activity alphabet.
EventLog build_log(std::vector<Case> completed_cases);

/// Convenience: parse + assemble + build, ignoring open cases.
EventLog load_log_file(const std::string& path);

}  // namespace streampad
