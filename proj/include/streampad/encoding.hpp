#pragma once

#include <Eigen/Dense>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "streampad/event.hpp"

namespace streampad {

using FeatureRow = Eigen::RowVectorXd;
using FeatureMatrix = Eigen::MatrixXd;

/// Ordered activity labels of a training window, plus the two derived index
/// spaces used throughout:
///  - feature slots: one one-hot block per prefix position, block width
///    size()+1, the extra slot standing in for labels outside the alphabet;
///  - training labels: alphabet indices plus end_label() for case completion.
class Alphabet {
 public:
  Alphabet() = default;
  explicit Alphabet(std::vector<std::string> sorted_labels);

  static Alphabet from_log(const EventLog& log) { return Alphabet(log.activity_alphabet); }

  int size() const { return static_cast<int>(labels_.size()); }
  const std::vector<std::string>& labels() const { return labels_; }

  int unknown_slot() const { return size(); }
  int block_width() const { return size() + 1; }
  /// Feature slot of a label: alphabet index, or unknown_slot().
  int slot_of(const std::string& label) const;

  int end_label() const { return size(); }
  int label_count() const { return size() + 1; }
  std::optional<int> index_of(const std::string& label) const;
  /// Name of a training label ("END" for end_label()).
  const std::string& label_name(int label_index) const;

 private:
  std::vector<std::string> labels_;
  std::map<std::string, int> index_;
};

/// Width of an encoded prefix of length n: n one-hot blocks plus the n
/// event durations plus the n cumulative durations.
inline int feature_width(const Alphabet& a, int prefix_len) {
  return prefix_len * a.block_width() + 2 * prefix_len;
}

/// Index-preserving encoding of a non-empty prefix. Layout: the n one-hot
/// blocks in event order, then durations dur.1..dur.n, then cumulative
/// durations cum.1..cum.n. dur.1 is 0 (the first event has no predecessor);
/// dur.i = ts_i - ts_{i-1}; cum.i = sum of dur.1..dur.i.
FeatureRow encode_prefix(std::span<const Event> prefix, const Alphabet& a);

/// Recovers the feature-slot sequence from the one-hot blocks of a row.
std::vector<int> decode_activity_slots(const FeatureRow& row, const Alphabet& a,
                                       int prefix_len);

/// Fixed-width training rows for one prefix length, with next-activity labels.
struct TrainingBucket {
  int prefix_len = 0;
  FeatureMatrix features;   // rows() x feature_width(alphabet, prefix_len)
  std::vector<int> labels;  // training-label indices; end_label() = case ended

  long rows() const { return features.rows(); }
  bool empty() const { return features.rows() == 0; }
};

/// Groups every case of length >= n into bucket n for n in 1..max_prefix
/// (all keys present, possibly with zero rows). A row's label is the
/// (n+1)-th activity of its case, or end_label() when the case has exactly
/// n events.
std::map<int, TrainingBucket> bucketize(const EventLog& log, int max_prefix);

/// Debug CSV dump of one bucket, label last column. Golden-file friendly.
std::string bucket_to_csv(const TrainingBucket& bucket, const Alphabet& a);

}  // namespace streampad
