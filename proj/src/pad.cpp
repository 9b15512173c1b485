#include "streampad/pad.hpp"

#include <ostream>
#include <sstream>

#include "streampad/errors.hpp"
#include "streampad/format.hpp"

namespace streampad {

std::string decision_name(Decision d) {
  switch (d) {
    case Decision::normal: return "normal";
    case Decision::anomalous: return "anomalous";
    case Decision::unscored: return "unscored";
  }
  return "unscored";
}

Decision decision_from_name(const std::string& name) {
  if (name == "normal") return Decision::normal;
  if (name == "anomalous") return Decision::anomalous;
  if (name == "unscored") return Decision::unscored;
  throw ParseError("bad decision value: " + name);
}

namespace {

void check_threshold(double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0))
    throw ConfigError("threshold must lie strictly between 0 and 1");
}

}  // namespace

Verdict detect(const BucketedModel& model, const Case& open_case,
               const Event& new_event, double threshold) {
  check_threshold(threshold);
  if (!open_case.events.empty() && open_case.case_id != new_event.case_id)
    throw ConfigError("detect: event does not extend the given case");
  const PredictionDistribution dist = model.predict_for_prefix(
      std::span(open_case.events.data(), open_case.events.size()));
  Verdict v;
  v.case_id = new_event.case_id;
  v.position = static_cast<int>(open_case.events.size()) + 1;
  v.activity = new_event.activity;
  v.score = dist.prob_of(new_event.activity, model.alphabet());
  v.threshold = threshold;
  v.model_version = dist.model_version;
  v.decision = v.score < threshold ? Decision::anomalous : Decision::normal;
  return v;
}

Verdict score_end(const BucketedModel& model, const Case& completed_case,
                  double threshold) {
  check_threshold(threshold);
  const PredictionDistribution dist = model.predict_for_prefix(
      std::span(completed_case.events.data(), completed_case.events.size()));
  Verdict v;
  v.case_id = completed_case.case_id;
  v.position = static_cast<int>(completed_case.events.size()) + 1;
  v.activity = kEndMarker;
  v.score = dist.prob_of_label(model.alphabet().end_label());
  v.threshold = threshold;
  v.model_version = dist.model_version;
  v.decision = v.score < threshold ? Decision::anomalous : Decision::normal;
  return v;
}

Verdict unscored_verdict(const Event& e, int position, double threshold) {
  Verdict v;
  v.case_id = e.case_id;
  v.position = position;
  v.activity = e.activity;
  v.decision = Decision::unscored;
  v.threshold = threshold;
  return v;
}

void write_verdicts_csv(const std::vector<Verdict>& verdicts, std::ostream& out,
                        const std::optional<std::string>& detector) {
  out << "case_id,position,activity,score,threshold,decision,model_version";
  if (detector) out << ",detector";
  out << "\n";
  for (const Verdict& v : verdicts) {
    out << v.case_id << "," << v.position << "," << v.activity << ",";
    if (v.decision != Decision::unscored) out << fmt_double(v.score);
    out << "," << fmt_double(v.threshold) << "," << decision_name(v.decision) << ","
        << v.model_version;
    if (detector) out << "," << *detector;
    out << "\n";
  }
}

std::string verdicts_csv_text(const std::vector<Verdict>& verdicts,
                              const std::optional<std::string>& detector) {
  std::ostringstream out;
  write_verdicts_csv(verdicts, out, detector);
  return out.str();
}

}  // namespace streampad
