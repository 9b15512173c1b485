#pragma once

#include "streampad/event.hpp"
#include "streampad/predictors.hpp"
#include "streampad/verdict.hpp"

namespace streampad {

// Predictive anomaly detection: an event is anomalous when the model's
// predicted probability of its activity falls below the threshold. The
// boundary counts as normal (score >= threshold => normal).

/// Scores `new_event` against the distribution predicted from the events of
/// `open_case` so far. The opening event of a case is scored against the
/// first-activity marginal. Requires 0 < threshold < 1.
Verdict detect(const BucketedModel& model, const Case& open_case,
               const Event& new_event, double threshold);

/// Scores a case's completion: the observed label is END.
Verdict score_end(const BucketedModel& model, const Case& completed_case,
                  double threshold);

/// Cold-start verdict for an event that arrived before any model existed.
Verdict unscored_verdict(const Event& e, int position, double threshold);

}  // namespace streampad
