#pragma once

#include <vector>

#include "streampad/encoding.hpp"
#include "streampad/rng.hpp"

namespace streampad {

struct TreeHyper {
  int max_depth = 0;  // 0 = unlimited
  int min_leaf = 1;
  int mtry = 0;  // features tried per split; 0 or >= width means all
};

/// CART classification tree: axis-aligned thresholds, Gini impurity,
/// class-frequency leaves. Fully deterministic given the Rng state.
class DecisionTree {
 public:
  struct Node {
    int feature = -1;  // -1 = leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    std::vector<double> probs;  // leaf class frequencies, sum 1
  };

  void fit(const FeatureMatrix& x, const std::vector<int>& y, int class_count,
           const TreeHyper& hyper, Rng& rng);

  /// Class frequencies of the leaf the sample routes to.
  const std::vector<double>& predict_probs(const FeatureRow& x) const;

  bool empty() const { return nodes_.empty(); }
  const std::vector<Node>& nodes() const { return nodes_; }

 private:
  int build(const FeatureMatrix& x, const std::vector<int>& y,
            std::vector<int>& indices, int begin, int end, int depth, Rng& rng);
  std::vector<Node> nodes_;
  int class_count_ = 0;
  TreeHyper hyper_;
};

}  // namespace streampad
