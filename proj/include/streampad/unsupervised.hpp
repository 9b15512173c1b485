#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "streampad/encoding.hpp"
#include "streampad/verdict.hpp"

namespace streampad {

enum class ScorerKind { iforest, lof };

ScorerKind scorer_kind_from_name(const std::string& name);
std::string scorer_kind_name(ScorerKind kind);

struct UnsupervisedHyper {
  int iforest_trees = 100;
  int iforest_subsample = 256;  // capped at the bucket size
  int lof_k = 10;
  bool scale_durations = false;  // min-max scale duration columns per bucket
};

struct IsolationTree {
  struct Node {
    int feature = -1;  // -1 = external node
    double split = 0.0;
    int left = -1;
    int right = -1;
    int size = 0;  // training rows that reached this node
  };
  std::vector<Node> nodes;
};

/// Expected path length of an unsuccessful BST search over m points, the
/// standard isolation-forest normalizer c(m).
double average_path_normalizer(long m);

/// Distance-based event scorer over the same per-bucket encoded vectors the
/// predictive detector trains on. The anomaly threshold is realized as a
/// contamination fraction: each bucket's cutoff sits at the (1 - threshold)
/// quantile of its training scores, and an event is anomalous when its score
/// strictly exceeds the cutoff.
class AnomalyScorer {
 public:
  ScorerKind kind() const { return kind_; }
  int model_version() const { return version_; }
  double threshold() const { return threshold_; }
  const Alphabet& alphabet() const { return alphabet_; }

  /// Verdict for a new event; the scored vector encodes the case's events
  /// including the new one. Prefixes longer than the largest fitted bucket
  /// are truncated to their most recent events.
  Verdict score_event(const Case& open_case, const Event& new_event) const;

  /// Score of an (unscaled) encoded vector in bucket n.
  double raw_score(int bucket, const FeatureRow& vector) const;
  double cutoff(int bucket) const;

  std::vector<int> fitted_buckets() const;
  std::span<const double> training_scores(int bucket) const;  // sorted ascending
  /// Fitted isolation forest of a bucket; nullptr when the bucket runs LOF.
  const std::vector<IsolationTree>* forest(int bucket) const;
  long subsample_size(int bucket) const;

  const std::vector<std::string>& diagnostics() const { return diagnostics_; }

  struct BucketScorer;  // opaque per-bucket state

  AnomalyScorer(AnomalyScorer&&) noexcept;
  AnomalyScorer& operator=(AnomalyScorer&&) noexcept;
  ~AnomalyScorer();

 private:
  friend AnomalyScorer fit_scorer(const std::map<int, TrainingBucket>&, ScorerKind,
                                  const UnsupervisedHyper&, const Alphabet&,
                                  std::uint64_t, double, int);
  AnomalyScorer();

  const BucketScorer* bucket_for_length(int prefix_len) const;

  Alphabet alphabet_;
  ScorerKind kind_ = ScorerKind::iforest;
  int version_ = 0;
  double threshold_ = 0.0;
  std::map<int, std::unique_ptr<BucketScorer>> buckets_;
  std::vector<std::string> diagnostics_;
};

/// Fits one scorer per non-empty bucket. Deterministic given the seed.
/// LOF buckets with too few rows (<= lof_k) fall back to an isolation
/// forest with a diagnostic.
AnomalyScorer fit_scorer(const std::map<int, TrainingBucket>& buckets,
                         ScorerKind kind, const UnsupervisedHyper& hyper,
                         const Alphabet& alphabet, std::uint64_t seed,
                         double threshold, int model_version = 1);

}  // namespace streampad
