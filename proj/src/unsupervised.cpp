#include "streampad/unsupervised.hpp"

#include <algorithm>
#include <cmath>

#include "streampad/errors.hpp"
#include "streampad/rng.hpp"

namespace streampad {

namespace {
constexpr double kEulerGamma = 0.5772156649015328606;
constexpr double kLrdEpsilon = 1e-10;  // guards the all-duplicates case
}  // namespace

ScorerKind scorer_kind_from_name(const std::string& name) {
  if (name == "iforest") return ScorerKind::iforest;
  if (name == "lof") return ScorerKind::lof;
  throw ConfigError("unknown detector kind: " + name);
}

std::string scorer_kind_name(ScorerKind kind) {
  return kind == ScorerKind::iforest ? "iforest" : "lof";
}

double average_path_normalizer(long m) {
  if (m <= 1) return 0.0;
  if (m == 2) return 1.0;
  const double n = static_cast<double>(m);
  return 2.0 * (std::log(n - 1.0) + kEulerGamma) - 2.0 * (n - 1.0) / n;
}

struct AnomalyScorer::BucketScorer {
  int prefix_len = 0;
  bool lof_mode = false;

  // min-max scaling of duration columns (identity when disabled)
  int dur_begin = 0, dur_count = 0;
  std::vector<double> dur_min, dur_max;

  // isolation forest state
  std::vector<IsolationTree> forest;
  long subsample = 0;

  // lof state
  FeatureMatrix rows;          // scaled training rows
  std::vector<double> kdist;   // k-distance per training row
  std::vector<double> lrd;     // local reachability density per training row
  int k = 0;

  std::vector<double> training_scores;  // sorted ascending
  double cutoff = 0.0;

  FeatureRow scaled(const FeatureRow& v) const {
    if (dur_min.empty()) return v;
    FeatureRow out = v;
    for (int i = 0; i < dur_count; ++i) {
      const double span = dur_max[i] - dur_min[i];
      out(dur_begin + i) = span > 0.0 ? (v(dur_begin + i) - dur_min[i]) / span : 0.0;
    }
    return out;
  }
};

AnomalyScorer::AnomalyScorer() = default;
AnomalyScorer::AnomalyScorer(AnomalyScorer&&) noexcept = default;
AnomalyScorer& AnomalyScorer::operator=(AnomalyScorer&&) noexcept = default;
AnomalyScorer::~AnomalyScorer() = default;

namespace {

using BucketScorer = AnomalyScorer::BucketScorer;

int grow_isolation_tree(IsolationTree& tree, const FeatureMatrix& data,
                        std::vector<int>& indices, int begin, int end, int depth,
                        int depth_limit, Rng& rng) {
  const int node_id = static_cast<int>(tree.nodes.size());
  tree.nodes.emplace_back();
  tree.nodes[node_id].size = end - begin;
  if (end - begin <= 1 || depth >= depth_limit) return node_id;

  // candidate features: non-constant over the node's rows
  const int width = static_cast<int>(data.cols());
  std::vector<int> candidates;
  candidates.reserve(width);
  for (int f = 0; f < width; ++f) {
    double lo = data(indices[begin], f), hi = lo;
    for (int i = begin + 1; i < end; ++i) {
      lo = std::min(lo, data(indices[i], f));
      hi = std::max(hi, data(indices[i], f));
    }
    if (hi > lo) candidates.push_back(f);
  }
  if (candidates.empty()) return node_id;

  const int feature =
      candidates[rng.next_below(static_cast<std::uint64_t>(candidates.size()))];
  double lo = data(indices[begin], feature), hi = lo;
  for (int i = begin + 1; i < end; ++i) {
    lo = std::min(lo, data(indices[i], feature));
    hi = std::max(hi, data(indices[i], feature));
  }
  const double split = lo + rng.next_real() * (hi - lo);

  const auto mid_it =
      std::stable_partition(indices.begin() + begin, indices.begin() + end,
                            [&](int row) { return data(row, feature) < split; });
  const int mid = static_cast<int>(mid_it - indices.begin());

  tree.nodes[node_id].feature = feature;
  tree.nodes[node_id].split = split;
  const int left =
      grow_isolation_tree(tree, data, indices, begin, mid, depth + 1, depth_limit, rng);
  const int right =
      grow_isolation_tree(tree, data, indices, mid, end, depth + 1, depth_limit, rng);
  tree.nodes[node_id].left = left;
  tree.nodes[node_id].right = right;
  return node_id;
}

double tree_path_length(const IsolationTree& tree, const FeatureRow& v) {
  int node = 0;
  double depth = 0.0;
  while (tree.nodes[node].feature >= 0) {
    node = v(tree.nodes[node].feature) < tree.nodes[node].split
               ? tree.nodes[node].left
               : tree.nodes[node].right;
    depth += 1.0;
  }
  return depth + average_path_normalizer(tree.nodes[node].size);
}

double iforest_score(const BucketScorer& b, const FeatureRow& scaled_row) {
  double total = 0.0;
  for (const IsolationTree& tree : b.forest) total += tree_path_length(tree, scaled_row);
  const double mean_path = total / static_cast<double>(b.forest.size());
  const double denom = std::max(average_path_normalizer(b.subsample), 1e-12);
  return std::pow(2.0, -mean_path / denom);
}

void fit_iforest(BucketScorer& b, const UnsupervisedHyper& hyper, Rng& rng) {
  const long rows = b.rows.rows();
  b.subsample = std::min<long>(hyper.iforest_subsample, rows);
  const int depth_limit = static_cast<int>(
      std::ceil(std::log2(std::max<double>(2.0, static_cast<double>(b.subsample)))));
  b.forest.resize(hyper.iforest_trees);
  for (IsolationTree& tree : b.forest) {
    std::vector<int> indices;
    if (b.subsample < rows) {
      indices = rng.sample_indices(static_cast<int>(rows), static_cast<int>(b.subsample));
    } else {
      indices.resize(rows);
      for (long i = 0; i < rows; ++i) indices[i] = static_cast<int>(i);
    }
    grow_isolation_tree(tree, b.rows, indices, 0, static_cast<int>(indices.size()), 0,
                        depth_limit, rng);
  }
}

/// k nearest training rows to `v` by (distance, index); rows equal to `v`
/// count as neighbors. `skip` excludes one training row (self), -1 for none.
std::vector<std::pair<double, int>> nearest_neighbors(const FeatureMatrix& rows,
                                                      const FeatureRow& v, int k,
                                                      int skip) {
  std::vector<std::pair<double, int>> dists;
  dists.reserve(rows.rows());
  for (long i = 0; i < rows.rows(); ++i) {
    if (i == skip) continue;
    dists.emplace_back((rows.row(i) - v).norm(), static_cast<int>(i));
  }
  std::sort(dists.begin(), dists.end());
  if (static_cast<int>(dists.size()) > k) dists.resize(k);
  return dists;
}

/// Classic LOF over the training rows (neighborhoods exclude the point
/// itself). Returns the per-row training scores in row order.
std::vector<double> fit_lof(BucketScorer& b, int k) {
  const long n = b.rows.rows();
  b.k = k;
  b.kdist.resize(n);
  b.lrd.resize(n);
  std::vector<std::vector<std::pair<double, int>>> nbrs(n);
  for (long i = 0; i < n; ++i) {
    nbrs[i] = nearest_neighbors(b.rows, b.rows.row(i), k, static_cast<int>(i));
    b.kdist[i] = nbrs[i].back().first;
  }
  for (long i = 0; i < n; ++i) {
    double reach_sum = 0.0;
    for (const auto& [dist, j] : nbrs[i]) reach_sum += std::max(b.kdist[j], dist);
    b.lrd[i] = 1.0 / (reach_sum / static_cast<double>(nbrs[i].size()) + kLrdEpsilon);
  }
  std::vector<double> scores(n);
  for (long i = 0; i < n; ++i) {
    double lrd_sum = 0.0;
    for (const auto& [dist, j] : nbrs[i]) lrd_sum += b.lrd[j];
    scores[i] = (lrd_sum / static_cast<double>(nbrs[i].size())) / b.lrd[i];
  }
  return scores;
}

double lof_query_score(const BucketScorer& b, const FeatureRow& scaled_row) {
  const auto nbrs = nearest_neighbors(b.rows, scaled_row, b.k, -1);
  double reach_sum = 0.0;
  double lrd_sum = 0.0;
  for (const auto& [dist, j] : nbrs) {
    reach_sum += std::max(b.kdist[j], dist);
    lrd_sum += b.lrd[j];
  }
  const double count = static_cast<double>(nbrs.size());
  const double lrd_query = 1.0 / (reach_sum / count + kLrdEpsilon);
  return (lrd_sum / count) / lrd_query;
}

double score_scaled(const BucketScorer& b, const FeatureRow& scaled_row) {
  return b.lof_mode ? lof_query_score(b, scaled_row) : iforest_score(b, scaled_row);
}

double quantile_cutoff(std::vector<double>& sorted_scores, double tau) {
  const long m = static_cast<long>(sorted_scores.size());
  const double target = (1.0 - tau) * static_cast<double>(m);
  long idx = static_cast<long>(std::ceil(target - 1e-9)) - 1;
  idx = std::clamp(idx, 0L, m - 1);
  return sorted_scores[idx];
}

}  // namespace

AnomalyScorer fit_scorer(const std::map<int, TrainingBucket>& buckets,
                         ScorerKind kind, const UnsupervisedHyper& hyper,
                         const Alphabet& alphabet, std::uint64_t seed,
                         double threshold, int model_version) {
  if (!(threshold > 0.0 && threshold < 1.0))
    throw ConfigError("threshold must lie strictly between 0 and 1");
  bool any_rows = false;
  for (const auto& [n, bucket] : buckets) any_rows = any_rows || !bucket.empty();
  if (buckets.empty() || !any_rows)
    throw ConfigError("fit_scorer: need at least one non-empty bucket");

  AnomalyScorer scorer;
  scorer.alphabet_ = alphabet;
  scorer.kind_ = kind;
  scorer.version_ = model_version;
  scorer.threshold_ = threshold;

  for (const auto& [n, bucket] : buckets) {
    if (bucket.empty()) continue;
    auto b = std::make_unique<AnomalyScorer::BucketScorer>();
    b->prefix_len = n;
    b->rows = bucket.features;

    if (hyper.scale_durations) {
      b->dur_begin = n * alphabet.block_width();
      b->dur_count = 2 * n;
      b->dur_min.resize(b->dur_count);
      b->dur_max.resize(b->dur_count);
      for (int i = 0; i < b->dur_count; ++i) {
        b->dur_min[i] = bucket.features.col(b->dur_begin + i).minCoeff();
        b->dur_max[i] = bucket.features.col(b->dur_begin + i).maxCoeff();
      }
      for (long r = 0; r < b->rows.rows(); ++r)
        b->rows.row(r) = b->scaled(bucket.features.row(r));
    }

    Rng rng(derive_seed(seed, "bucket", static_cast<std::uint64_t>(n)));
    if (kind == ScorerKind::lof && bucket.rows() > hyper.lof_k) {
      b->lof_mode = true;
      b->training_scores = fit_lof(*b, hyper.lof_k);
    } else {
      if (kind == ScorerKind::lof)
        scorer.diagnostics_.push_back(
            "bucket " + std::to_string(n) + ": only " + std::to_string(bucket.rows()) +
            " rows for lof with k=" + std::to_string(hyper.lof_k) +
            ", falling back to isolation forest");
      fit_iforest(*b, hyper, rng);
      b->training_scores.reserve(b->rows.rows());
      for (long r = 0; r < b->rows.rows(); ++r)
        b->training_scores.push_back(iforest_score(*b, b->rows.row(r)));
    }
    std::sort(b->training_scores.begin(), b->training_scores.end());
    b->cutoff = quantile_cutoff(b->training_scores, threshold);

    scorer.buckets_.emplace(n, std::move(b));
  }
  return scorer;
}

const AnomalyScorer::BucketScorer* AnomalyScorer::bucket_for_length(
    int prefix_len) const {
  // largest fitted bucket not exceeding the prefix length
  const BucketScorer* best = nullptr;
  for (const auto& [n, b] : buckets_) {
    if (n > prefix_len) break;
    best = b.get();
  }
  return best;
}

Verdict AnomalyScorer::score_event(const Case& open_case, const Event& new_event) const {
  if (!open_case.events.empty() && open_case.case_id != new_event.case_id)
    throw ConfigError("score_event: event does not extend the given case");
  std::vector<Event> prefix = open_case.events;
  prefix.push_back(new_event);

  Verdict v;
  v.case_id = new_event.case_id;
  v.position = static_cast<int>(prefix.size());
  v.activity = new_event.activity;
  v.threshold = threshold_;

  const BucketScorer* b = bucket_for_length(static_cast<int>(prefix.size()));
  if (b == nullptr) {
    v.decision = Decision::unscored;
    return v;
  }
  std::span<const Event> window(prefix.data(), prefix.size());
  if (static_cast<int>(window.size()) > b->prefix_len)
    window = window.subspan(window.size() - static_cast<std::size_t>(b->prefix_len));
  const FeatureRow encoded = b->scaled(encode_prefix(window, alphabet_));
  v.score = score_scaled(*b, encoded);
  v.model_version = version_;
  v.decision = v.score > b->cutoff ? Decision::anomalous : Decision::normal;
  return v;
}

double AnomalyScorer::raw_score(int bucket, const FeatureRow& vector) const {
  const auto it = buckets_.find(bucket);
  if (it == buckets_.end())
    throw ConfigError("raw_score: no fitted bucket " + std::to_string(bucket));
  return score_scaled(*it->second, it->second->scaled(vector));
}

double AnomalyScorer::cutoff(int bucket) const {
  const auto it = buckets_.find(bucket);
  if (it == buckets_.end())
    throw ConfigError("cutoff: no fitted bucket " + std::to_string(bucket));
  return it->second->cutoff;
}

std::vector<int> AnomalyScorer::fitted_buckets() const {
  std::vector<int> out;
  out.reserve(buckets_.size());
  for (const auto& [n, b] : buckets_) out.push_back(n);
  return out;
}

std::span<const double> AnomalyScorer::training_scores(int bucket) const {
  const auto it = buckets_.find(bucket);
  if (it == buckets_.end())
    throw ConfigError("training_scores: no fitted bucket " + std::to_string(bucket));
  return it->second->training_scores;
}

const std::vector<IsolationTree>* AnomalyScorer::forest(int bucket) const {
  const auto it = buckets_.find(bucket);
  if (it == buckets_.end()) return nullptr;
  return it->second->lof_mode ? nullptr : &it->second->forest;
}

long AnomalyScorer::subsample_size(int bucket) const {
  const auto it = buckets_.find(bucket);
  if (it == buckets_.end())
    throw ConfigError("subsample_size: no fitted bucket " + std::to_string(bucket));
  return it->second->subsample;
}

}  // namespace streampad
