#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace streampad {

enum class Decision { normal, anomalous, unscored };

std::string decision_name(Decision d);
Decision decision_from_name(const std::string& name);

/// Per-event detection outcome.
struct Verdict {
  std::string case_id;
  int position = 0;  // 1-based ordinal within the case; end verdicts sit at length+1
  std::string activity;
  Decision decision = Decision::unscored;
  double score = 0.0;  // meaningless when unscored
  double threshold = 0.0;
  int model_version = 0;  // 0 when unscored
};

/// Verdict CSV: case_id,position,activity,score,threshold,decision,model_version
/// with an extra trailing `detector` column when `detector` is given.
/// Unscored rows leave the score field empty.
void write_verdicts_csv(const std::vector<Verdict>& verdicts, std::ostream& out,
                        const std::optional<std::string>& detector = std::nullopt);
std::string verdicts_csv_text(const std::vector<Verdict>& verdicts,
                              const std::optional<std::string>& detector = std::nullopt);

}  // namespace streampad
