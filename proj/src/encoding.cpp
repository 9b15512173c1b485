#include "streampad/encoding.hpp"

#include <sstream>

#include "streampad/errors.hpp"
#include "streampad/format.hpp"

namespace streampad {

Alphabet::Alphabet(std::vector<std::string> sorted_labels)
    : labels_(std::move(sorted_labels)) {
  for (int i = 0; i < static_cast<int>(labels_.size()); ++i) {
    if (labels_[i] == kEndMarker)
      throw ValidationError("alphabet must not contain the reserved END label");
    if (!index_.emplace(labels_[i], i).second)
      throw ValidationError("alphabet has duplicate label: " + labels_[i]);
    if (i > 0 && labels_[i] < labels_[i - 1])
      throw ValidationError("alphabet labels must be sorted");
  }
}

int Alphabet::slot_of(const std::string& label) const {
  const auto it = index_.find(label);
  return it == index_.end() ? unknown_slot() : it->second;
}

std::optional<int> Alphabet::index_of(const std::string& label) const {
  const auto it = index_.find(label);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

const std::string& Alphabet::label_name(int label_index) const {
  static const std::string end_name = kEndMarker;
  if (label_index == end_label()) return end_name;
  return labels_.at(label_index);
}

FeatureRow encode_prefix(std::span<const Event> prefix, const Alphabet& a) {
  const int n = static_cast<int>(prefix.size());
  if (n == 0) throw ValidationError("encode_prefix: empty prefix");
  const int bw = a.block_width();
  FeatureRow row = FeatureRow::Zero(feature_width(a, n));
  double cum = 0.0;
  for (int i = 0; i < n; ++i) {
    row(i * bw + a.slot_of(prefix[i].activity)) = 1.0;
    const double dur =
        i == 0 ? 0.0
               : static_cast<double>(prefix[i].timestamp - prefix[i - 1].timestamp);
    if (dur < 0) throw ValidationError("encode_prefix: timestamp regression");
    cum += dur;
    row(n * bw + i) = dur;
    row(n * bw + n + i) = cum;
  }
  return row;
}

std::vector<int> decode_activity_slots(const FeatureRow& row, const Alphabet& a,
                                       int prefix_len) {
  const int bw = a.block_width();
  std::vector<int> slots(prefix_len);
  for (int i = 0; i < prefix_len; ++i) {
    Eigen::Index hot = 0;
    row.segment(i * bw, bw).maxCoeff(&hot);
    slots[i] = static_cast<int>(hot);
  }
  return slots;
}

std::map<int, TrainingBucket> bucketize(const EventLog& log, int max_prefix) {
  if (log.cases.empty()) throw ConfigError("bucketize: empty log");
  if (max_prefix < 1) throw ConfigError("bucketize: max_prefix must be >= 1");
  const Alphabet alphabet = Alphabet::from_log(log);

  std::map<int, TrainingBucket> buckets;
  std::map<int, std::vector<std::pair<FeatureRow, int>>> staged;
  for (int n = 1; n <= max_prefix; ++n) staged[n] = {};

  for (const Case& c : log.cases) {
    const int len = static_cast<int>(c.events.size());
    for (int n = 1; n <= std::min(len, max_prefix); ++n) {
      int label;
      if (n < len) {
        const auto idx = alphabet.index_of(c.events[n].activity);
        if (!idx)
          throw ValidationError("bucketize: activity not in log alphabet: " +
                                c.events[n].activity);
        label = *idx;
      } else {
        label = alphabet.end_label();
      }
      staged[n].emplace_back(
          encode_prefix(std::span(c.events.data(), n), alphabet), label);
    }
  }

  for (auto& [n, rows] : staged) {
    TrainingBucket b;
    b.prefix_len = n;
    b.features.resize(static_cast<long>(rows.size()), feature_width(alphabet, n));
    b.labels.reserve(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
      b.features.row(static_cast<long>(r)) = rows[r].first;
      b.labels.push_back(rows[r].second);
    }
    buckets.emplace(n, std::move(b));
  }
  return buckets;
}

std::string bucket_to_csv(const TrainingBucket& bucket, const Alphabet& a) {
  std::ostringstream out;
  const int n = bucket.prefix_len;
  for (int i = 1; i <= n; ++i) {
    for (const std::string& label : a.labels()) out << "a" << i << "_" << label << ",";
    out << "a" << i << "_UNK,";
  }
  for (int i = 1; i <= n; ++i) out << "dur" << i << ",";
  for (int i = 1; i <= n; ++i) out << "cumdur" << i << ",";
  out << "label\n";
  for (long r = 0; r < bucket.rows(); ++r) {
    for (long c = 0; c < bucket.features.cols(); ++c)
      out << fmt_double(bucket.features(r, c)) << ",";
    out << a.label_name(bucket.labels[static_cast<std::size_t>(r)]) << "\n";
  }
  return out.str();
}

}  // namespace streampad
