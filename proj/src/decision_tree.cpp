#include "streampad/decision_tree.hpp"

#include <algorithm>
#include <limits>

#include "streampad/errors.hpp"

namespace streampad {

namespace {

double gini(const std::vector<long>& counts, long total) {
  if (total == 0) return 0.0;
  double g = 1.0;
  for (const long c : counts) {
    const double p = static_cast<double>(c) / static_cast<double>(total);
    g -= p * p;
  }
  return g;
}

std::vector<double> leaf_probs(const std::vector<int>& y,
                               const std::vector<int>& indices, int begin, int end,
                               int class_count) {
  std::vector<double> probs(class_count, 0.0);
  for (int i = begin; i < end; ++i) probs[y[indices[i]]] += 1.0;
  const double total = static_cast<double>(end - begin);
  for (double& p : probs) p /= total;
  return probs;
}

}  // namespace

void DecisionTree::fit(const FeatureMatrix& x, const std::vector<int>& y,
                       int class_count, const TreeHyper& hyper, Rng& rng) {
  if (x.rows() == 0) throw ConfigError("DecisionTree: no training rows");
  if (x.rows() != static_cast<long>(y.size()))
    throw ConfigError("DecisionTree: feature/label row mismatch");
  nodes_.clear();
  class_count_ = class_count;
  hyper_ = hyper;
  std::vector<int> indices(x.rows());
  for (long i = 0; i < x.rows(); ++i) indices[i] = static_cast<int>(i);
  build(x, y, indices, 0, static_cast<int>(indices.size()), 0, rng);
}

int DecisionTree::build(const FeatureMatrix& x, const std::vector<int>& y,
                        std::vector<int>& indices, int begin, int end, int depth,
                        Rng& rng) {
  const int node_id = static_cast<int>(nodes_.size());
  nodes_.emplace_back();
  const int size = end - begin;

  bool pure = true;
  for (int i = begin + 1; i < end && pure; ++i)
    pure = y[indices[i]] == y[indices[begin]];

  const bool depth_capped = hyper_.max_depth > 0 && depth >= hyper_.max_depth;
  if (pure || depth_capped || size < 2 * hyper_.min_leaf) {
    nodes_[node_id].probs = leaf_probs(y, indices, begin, end, class_count_);
    return node_id;
  }

  const int width = static_cast<int>(x.cols());
  std::vector<int> features;
  if (hyper_.mtry <= 0 || hyper_.mtry >= width) {
    features.resize(width);
    for (int f = 0; f < width; ++f) features[f] = f;
  } else {
    features = rng.sample_indices(width, hyper_.mtry);
  }

  // Best split over the tried features: minimize weighted child Gini.
  // Strict improvement only, so the first best found is kept and the
  // result does not depend on floating-point tie noise ordering.
  double best_impurity = std::numeric_limits<double>::infinity();
  int best_feature = -1;
  double best_threshold = 0.0;

  std::vector<std::pair<double, int>> column(size);  // (value, class)
  std::vector<long> left_counts(class_count_), right_counts(class_count_);
  for (const int f : features) {
    for (int i = 0; i < size; ++i) {
      const int row = indices[begin + i];
      column[i] = {x(row, f), y[row]};
    }
    std::sort(column.begin(), column.end());
    if (column.front().first == column.back().first) continue;

    std::fill(left_counts.begin(), left_counts.end(), 0L);
    std::fill(right_counts.begin(), right_counts.end(), 0L);
    for (int i = 0; i < size; ++i) ++right_counts[column[i].second];

    for (int i = 0; i < size - 1; ++i) {
      ++left_counts[column[i].second];
      --right_counts[column[i].second];
      if (column[i].first == column[i + 1].first) continue;
      const int nl = i + 1;
      const int nr = size - nl;
      if (nl < hyper_.min_leaf || nr < hyper_.min_leaf) continue;
      const double impurity =
          (nl * gini(left_counts, nl) + nr * gini(right_counts, nr)) / size;
      if (impurity < best_impurity) {
        best_impurity = impurity;
        best_feature = f;
        best_threshold = (column[i].first + column[i + 1].first) / 2.0;
      }
    }
  }

  if (best_feature < 0) {
    nodes_[node_id].probs = leaf_probs(y, indices, begin, end, class_count_);
    return node_id;
  }

  const auto mid_it = std::stable_partition(
      indices.begin() + begin, indices.begin() + end,
      [&](int row) { return x(row, best_feature) <= best_threshold; });
  const int mid = static_cast<int>(mid_it - indices.begin());

  nodes_[node_id].feature = best_feature;
  nodes_[node_id].threshold = best_threshold;
  const int left = build(x, y, indices, begin, mid, depth + 1, rng);
  const int right = build(x, y, indices, mid, end, depth + 1, rng);
  nodes_[node_id].left = left;
  nodes_[node_id].right = right;
  return node_id;
}

const std::vector<double>& DecisionTree::predict_probs(const FeatureRow& x) const {
  int node = 0;
  while (nodes_[node].feature >= 0)
    node = x(nodes_[node].feature) <= nodes_[node].threshold ? nodes_[node].left
                                                             : nodes_[node].right;
  return nodes_[node].probs;
}

}  // namespace streampad
