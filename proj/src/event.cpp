#include "streampad/event.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "streampad/errors.hpp"
#include "streampad/format.hpp"

namespace streampad {

namespace {

constexpr const char* kHeader = "case_id,activity,timestamp,truth,end";

Event parse_line(std::string_view line, std::size_t line_no) {
  const auto fields = split_csv_line(line);
  if (fields.size() != 5)
    throw ParseError("line " + std::to_string(line_no) + ": expected 5 fields, got " +
                     std::to_string(fields.size()));
  Event e;
  e.case_id = fields[0];
  e.activity = fields[1];
  if (e.case_id.empty())
    throw ParseError("line " + std::to_string(line_no) + ": empty case_id");
  if (e.activity.empty())
    throw ParseError("line " + std::to_string(line_no) + ": empty activity");
  e.timestamp = parse_int64(fields[2], "line " + std::to_string(line_no));
  if (e.timestamp < 0)
    throw ParseError("line " + std::to_string(line_no) + ": negative timestamp");
  if (fields[3] == "normal") {
    e.truth = TruthLabel::normal;
  } else if (fields[3] == "anomalous") {
    e.truth = TruthLabel::anomalous;
  } else if (fields[3].empty()) {
    e.truth = std::nullopt;
  } else {
    throw ParseError("line " + std::to_string(line_no) + ": bad truth value '" +
                     fields[3] + "'");
  }
  if (fields[4] == "0") {
    e.is_case_end = false;
  } else if (fields[4] == "1") {
    e.is_case_end = true;
  } else {
    throw ParseError("line " + std::to_string(line_no) + ": bad end flag '" +
                     fields[4] + "'");
  }
  if (e.is_case_end != (e.activity == kEndMarker))
    throw ParseError("line " + std::to_string(line_no) +
                     ": the END activity label and the end flag must agree");
  return e;
}

}  // namespace

std::vector<Event> parse_stream(std::istream& in) {
  std::vector<Event> events;
  std::map<std::string, std::int64_t> last_ts;
  std::string line;
  std::size_t line_no = 0;
  bool saw_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view stripped = trim(line);
    if (stripped.empty()) continue;
    if (!saw_header) {
      if (stripped != kHeader)
        throw ParseError("line " + std::to_string(line_no) + ": expected header '" +
                         std::string(kHeader) + "'");
      saw_header = true;
      continue;
    }
    Event e = parse_line(stripped, line_no);
    const auto it = last_ts.find(e.case_id);
    if (it != last_ts.end() && e.timestamp < it->second)
      throw ValidationError("case " + e.case_id + ": timestamp regression at line " +
                            std::to_string(line_no));
    last_ts[e.case_id] = e.timestamp;
    events.push_back(std::move(e));
  }
  if (!saw_header) throw ParseError("empty stream: missing header");
  return events;
}

std::vector<Event> parse_stream_text(const std::string& text) {
  std::istringstream in(text);
  return parse_stream(in);
}

std::vector<Event> load_stream_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot open stream file: " + path);
  return parse_stream(in);
}

std::string format_event_line(const Event& e) {
  std::string truth;
  if (e.truth == TruthLabel::normal) truth = "normal";
  if (e.truth == TruthLabel::anomalous) truth = "anomalous";
  return e.case_id + "," + e.activity + "," + std::to_string(e.timestamp) + "," +
         truth + "," + (e.is_case_end ? "1" : "0");
}

void emit_stream(const std::vector<Event>& events, std::ostream& out) {
  out << kHeader << "\n";
  for (const Event& e : events) out << format_event_line(e) << "\n";
}

std::string emit_stream_text(const std::vector<Event>& events) {
  std::ostringstream out;
  emit_stream(events, out);
  return out.str();
}

std::optional<Case> CaseAssembler::feed(const Event& e) {
  if (completed_ids_.count(e.case_id)) {
    stale_.push_back("stale event for completed case " + e.case_id + " (activity " +
                     e.activity + ")");
    return std::nullopt;
  }
  if (e.is_case_end) {
    const auto it = open_.find(e.case_id);
    if (it == open_.end()) {
      stale_.push_back("end marker for case " + e.case_id + " with no events");
      return std::nullopt;
    }
    Case done = std::move(it->second);
    open_.erase(it);
    done.completed = true;
    completed_ids_.insert(e.case_id);
    return done;
  }
  auto [it, inserted] = open_.try_emplace(e.case_id);
  if (inserted) it->second.case_id = e.case_id;
  it->second.events.push_back(e);
  return std::nullopt;
}

const Case* CaseAssembler::open_case(const std::string& case_id) const {
  const auto it = open_.find(case_id);
  return it == open_.end() ? nullptr : &it->second;
}

AssembledCases assemble_cases(const std::vector<Event>& events) {
  CaseAssembler assembler;
  AssembledCases out;
  for (const Event& e : events) {
    if (auto done = assembler.feed(e)) out.completed.push_back(std::move(*done));
  }
  out.open = assembler.open_cases();
  out.stale_reports = assembler.stale_reports();
  return out;
}

EventLog build_log(std::vector<Case> completed_cases) {
  EventLog log;
  std::set<std::string> labels;
  for (const Case& c : completed_cases)
    for (const Event& e : c.events) labels.insert(e.activity);
  log.cases = std::move(completed_cases);
  log.activity_alphabet.assign(labels.begin(), labels.end());
  return log;
}

EventLog load_log_file(const std::string& path) {
  auto assembled = assemble_cases(load_stream_file(path));
  return build_log(std::move(assembled.completed));
}

}  // namespace streampad
