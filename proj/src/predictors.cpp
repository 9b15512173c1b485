#include "streampad/predictors.hpp"

#include <cmath>
#include <sstream>

#include "streampad/errors.hpp"

namespace streampad {

PredictorKind predictor_kind_from_name(const std::string& name) {
  if (name == "frequency") return PredictorKind::frequency;
  if (name == "random_forest" || name == "rf") return PredictorKind::random_forest;
  throw ConfigError("unknown predictor kind: " + name);
}

std::string predictor_kind_name(PredictorKind kind) {
  return kind == PredictorKind::frequency ? "frequency" : "random_forest";
}

double PredictionDistribution::prob_of(const std::string& activity,
                                       const Alphabet& a) const {
  if (activity == kEndMarker) return probs[a.end_label()];
  const auto idx = a.index_of(activity);
  return idx ? probs[*idx] : 0.0;
}

int PredictionDistribution::argmax() const {
  int best = 0;
  for (int i = 1; i < static_cast<int>(probs.size()); ++i)
    if (probs[i] > probs[best]) best = i;
  return best;
}

std::map<std::string, double> PredictionDistribution::as_map(const Alphabet& a) const {
  std::map<std::string, double> out;
  for (int i = 0; i < static_cast<int>(probs.size()); ++i)
    out[a.label_name(i)] = probs[i];
  return out;
}

namespace {

std::vector<double> uniform_probs(int label_count) {
  return std::vector<double>(label_count, 1.0 / label_count);
}

std::vector<double> normalize_counts(const std::vector<double>& counts,
                                     bool laplace) {
  std::vector<double> probs(counts.size());
  double total = 0.0;
  for (const double c : counts) total += c;
  const double alpha = laplace ? 1.0 : 0.0;
  const double denom = total + alpha * static_cast<double>(counts.size());
  if (denom == 0.0) return uniform_probs(static_cast<int>(counts.size()));
  for (std::size_t i = 0; i < counts.size(); ++i) probs[i] = (counts[i] + alpha) / denom;
  return probs;
}

struct FrequencyModel {
  std::map<std::vector<int>, std::vector<double>> exact;  // slot seq -> counts
  std::map<int, std::vector<double>> by_last;             // last slot -> counts
  std::vector<double> marginal;
};

struct ForestModel {
  std::vector<DecisionTree> trees;
};

}  // namespace

struct BucketedModel::BucketPredictor {
  int prefix_len = 0;
  bool is_empty = false;  // uniform fallback
  long rows = 0;
  std::vector<long> label_histogram;
  FrequencyModel freq;
  ForestModel forest;
};

BucketedModel::BucketedModel() = default;
BucketedModel::BucketedModel(BucketedModel&&) noexcept = default;
BucketedModel& BucketedModel::operator=(BucketedModel&&) noexcept = default;
BucketedModel::~BucketedModel() = default;

namespace {

void fit_frequency(const TrainingBucket& bucket, const Alphabet& alphabet,
                   BucketedModel::BucketPredictor& out) {
  const int k = alphabet.label_count();
  out.freq.marginal.assign(k, 0.0);
  for (long r = 0; r < bucket.rows(); ++r) {
    const std::vector<int> seq =
        decode_activity_slots(bucket.features.row(r), alphabet, bucket.prefix_len);
    const int label = bucket.labels[static_cast<std::size_t>(r)];
    auto& exact = out.freq.exact.try_emplace(seq, k, 0.0).first->second;
    exact[label] += 1.0;
    auto& last = out.freq.by_last.try_emplace(seq.back(), k, 0.0).first->second;
    last[label] += 1.0;
    out.freq.marginal[label] += 1.0;
  }
}

void fit_forest(const TrainingBucket& bucket, const Alphabet& alphabet,
                const PredictorHyper& hyper, std::uint64_t seed,
                BucketedModel::BucketPredictor& out) {
  const int width = static_cast<int>(bucket.features.cols());
  TreeHyper tree_hyper;
  tree_hyper.max_depth = hyper.rf_max_depth;
  tree_hyper.min_leaf = hyper.rf_min_leaf;
  tree_hyper.mtry = hyper.rf_mtry != 0
                        ? hyper.rf_mtry
                        : std::max(1, static_cast<int>(std::lround(std::sqrt(width))));
  const long rows = bucket.rows();
  out.forest.trees.resize(hyper.rf_trees);
  for (int t = 0; t < hyper.rf_trees; ++t) {
    Rng rng(derive_seed(seed, "tree", static_cast<std::uint64_t>(t)));
    if (hyper.rf_bootstrap) {
      FeatureMatrix sample(rows, width);
      std::vector<int> sample_labels(static_cast<std::size_t>(rows));
      for (long r = 0; r < rows; ++r) {
        const long pick =
            static_cast<long>(rng.next_below(static_cast<std::uint64_t>(rows)));
        sample.row(r) = bucket.features.row(pick);
        sample_labels[static_cast<std::size_t>(r)] =
            bucket.labels[static_cast<std::size_t>(pick)];
      }
      out.forest.trees[t].fit(sample, sample_labels, alphabet.label_count(),
                              tree_hyper, rng);
    } else {
      out.forest.trees[t].fit(bucket.features, bucket.labels,
                              alphabet.label_count(), tree_hyper, rng);
    }
  }
}

std::vector<double> predict_frequency(const FrequencyModel& model,
                                      const std::vector<int>& slots, int label_count,
                                      bool laplace) {
  const auto exact = model.exact.find(slots);
  if (exact != model.exact.end()) return normalize_counts(exact->second, laplace);
  const auto last = model.by_last.find(slots.back());
  if (last != model.by_last.end()) return normalize_counts(last->second, laplace);
  if (!model.marginal.empty()) return normalize_counts(model.marginal, laplace);
  return uniform_probs(label_count);
}

std::vector<double> predict_forest(const ForestModel& model, const FeatureRow& v,
                                   int label_count) {
  std::vector<double> probs(label_count, 0.0);
  for (const DecisionTree& tree : model.trees) {
    const std::vector<double>& leaf = tree.predict_probs(v);
    for (int i = 0; i < label_count; ++i) probs[i] += leaf[i];
  }
  const double trees = static_cast<double>(model.trees.size());
  for (double& p : probs) p /= trees;
  return probs;
}

}  // namespace

BucketedModel train(const std::map<int, TrainingBucket>& buckets, PredictorKind kind,
                    const PredictorHyper& hyper, const Alphabet& alphabet,
                    std::uint64_t seed, int model_version) {
  bool any_rows = false;
  for (const auto& [n, bucket] : buckets) any_rows = any_rows || !bucket.empty();
  if (buckets.empty() || !any_rows)
    throw ConfigError("train: need at least one non-empty bucket");

  BucketedModel model;
  model.alphabet_ = alphabet;
  model.kind_ = kind;
  model.version_ = model_version;
  model.max_prefix_ = buckets.rbegin()->first;
  model.laplace_ = hyper.laplace;
  model.first_activity_probs_ = uniform_probs(alphabet.label_count());

  // hyper knobs are shared across buckets
  for (const auto& [n, bucket] : buckets) {
    auto predictor = std::make_unique<BucketedModel::BucketPredictor>();
    predictor->prefix_len = n;
    predictor->rows = bucket.rows();
    predictor->label_histogram.assign(alphabet.label_count(), 0);
    for (const int label : bucket.labels) ++predictor->label_histogram[label];
    if (bucket.empty()) {
      predictor->is_empty = true;
    } else if (kind == PredictorKind::frequency) {
      fit_frequency(bucket, alphabet, *predictor);
    } else {
      fit_forest(bucket, alphabet, hyper, derive_seed(seed, "bucket", n), *predictor);
    }
    model.buckets_.emplace(n, std::move(predictor));
  }

  // First-activity marginal from bucket 1's leading one-hot block. Every
  // completed case contributes a bucket-1 row, so this is the window's
  // distribution of case-opening activities.
  const auto b1 = buckets.find(1);
  if (b1 != buckets.end() && !b1->second.empty()) {
    std::vector<double> counts(alphabet.label_count(), 0.0);
    for (long r = 0; r < b1->second.rows(); ++r) {
      const int slot = decode_activity_slots(b1->second.features.row(r), alphabet, 1)[0];
      if (slot < alphabet.size()) counts[slot] += 1.0;
    }
    model.first_activity_probs_ = normalize_counts(counts, hyper.laplace);
  }
  return model;
}

PredictionDistribution BucketedModel::predict(const FeatureRow& prefix_vector) const {
  const int per_position = alphabet_.block_width() + 2;
  if (prefix_vector.size() % per_position != 0)
    throw ConfigError("predict: vector width does not match the alphabet");
  const int n = static_cast<int>(prefix_vector.size()) / per_position;
  const auto it = buckets_.find(n);
  if (it == buckets_.end())
    throw ConfigError("predict: no bucket of prefix length " + std::to_string(n));

  const BucketPredictor& bp = *it->second;
  PredictionDistribution dist;
  dist.model_version = version_;
  if (bp.is_empty) {
    dist.probs = uniform_probs(alphabet_.label_count());
  } else if (kind_ == PredictorKind::frequency) {
    dist.probs = predict_frequency(
        bp.freq, decode_activity_slots(prefix_vector, alphabet_, n),
        alphabet_.label_count(), laplace_);
  } else {
    dist.probs = predict_forest(bp.forest, prefix_vector, alphabet_.label_count());
  }
  return dist;
}

PredictionDistribution BucketedModel::predict_for_prefix(
    std::span<const Event> prefix) const {
  if (prefix.empty()) return first_activity_distribution();
  if (static_cast<int>(prefix.size()) > max_prefix_)
    prefix = prefix.subspan(prefix.size() - static_cast<std::size_t>(max_prefix_));
  return predict(encode_prefix(prefix, alphabet_));
}

PredictionDistribution BucketedModel::first_activity_distribution() const {
  PredictionDistribution dist;
  dist.model_version = version_;
  dist.probs = first_activity_probs_;
  return dist;
}

std::string BucketedModel::summary_csv() const {
  std::ostringstream out;
  out << "bucket,rows,label_histogram\n";
  for (const auto& [n, bp] : buckets_) {
    out << n << "," << bp->rows << ",";
    bool first = true;
    for (int label = 0; label < static_cast<int>(bp->label_histogram.size()); ++label) {
      if (bp->label_histogram[label] == 0) continue;
      if (!first) out << ";";
      out << alphabet_.label_name(label) << "=" << bp->label_histogram[label];
      first = false;
    }
    out << "\n";
  }
  return out.str();
}

}  // namespace streampad
