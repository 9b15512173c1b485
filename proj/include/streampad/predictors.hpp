#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "streampad/decision_tree.hpp"
#include "streampad/encoding.hpp"

namespace streampad {

enum class PredictorKind { frequency, random_forest };

PredictorKind predictor_kind_from_name(const std::string& name);
std::string predictor_kind_name(PredictorKind kind);

struct PredictorHyper {
  int rf_trees = 100;
  int rf_max_depth = 20;  // 0 = unlimited
  int rf_min_leaf = 1;
  bool rf_bootstrap = true;
  int rf_mtry = 0;  // 0 = round(sqrt(width)); >= width means all features
  bool laplace = false;  // +1 smoothing in the frequency predictor
};

/// Probabilities over the training-label space (alphabet order, END last).
struct PredictionDistribution {
  std::vector<double> probs;
  int model_version = 0;

  double prob_of_label(int label_index) const { return probs[label_index]; }
  /// Probability of an activity by name; 0 for labels outside the space.
  double prob_of(const std::string& activity, const Alphabet& a) const;
  /// Highest-probability label; the lowest index wins ties.
  int argmax() const;
  std::map<std::string, double> as_map(const Alphabet& a) const;
};

/// One fitted next-activity predictor per prefix bucket, plus the
/// first-activity marginal used to score the opening event of a case.
class BucketedModel {
 public:
  const Alphabet& alphabet() const { return alphabet_; }
  PredictorKind kind() const { return kind_; }
  int model_version() const { return version_; }
  int max_prefix() const { return max_prefix_; }

  /// Distribution for an encoded prefix whose width matches one of the
  /// trained buckets. Empty buckets answer with the uniform distribution.
  PredictionDistribution predict(const FeatureRow& prefix_vector) const;

  /// Bucket selection for a raw prefix: empty prefixes use the
  /// first-activity marginal; prefixes longer than the largest trained
  /// bucket use that bucket on their most recent events.
  PredictionDistribution predict_for_prefix(std::span<const Event> prefix) const;

  /// Relative frequency of opening activities in the training window.
  PredictionDistribution first_activity_distribution() const;

  /// Per-bucket diagnostics: bucket,rows,label_histogram.
  std::string summary_csv() const;

  struct BucketPredictor;  // opaque per-bucket state

  BucketedModel(BucketedModel&&) noexcept;
  BucketedModel& operator=(BucketedModel&&) noexcept;
  ~BucketedModel();

 private:
  friend BucketedModel train(const std::map<int, TrainingBucket>&, PredictorKind,
                             const PredictorHyper&, const Alphabet&, std::uint64_t,
                             int);
  BucketedModel();

  Alphabet alphabet_;
  PredictorKind kind_ = PredictorKind::frequency;
  int version_ = 0;
  int max_prefix_ = 0;
  bool laplace_ = false;
  std::vector<double> first_activity_probs_;
  std::map<int, std::unique_ptr<BucketPredictor>> buckets_;
};

/// Fits one predictor per bucket. Deterministic given (buckets, kind, hyper,
/// seed). Empty buckets get a uniform fallback.
BucketedModel train(const std::map<int, TrainingBucket>& buckets, PredictorKind kind,
                    const PredictorHyper& hyper, const Alphabet& alphabet,
                    std::uint64_t seed, int model_version = 1);

}  // namespace streampad
