#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "pars/dataset.hpp"

namespace pars {

// Bundled anomaly detector so the detect -> explain pipeline runs without
// external models. Categorical features are mapped to integer codes for
// splitting; explanation quality never depends on this model.
struct IsolationForest {
  struct Node {
    std::size_t feature = 0;
    double threshold = 0.0;
    std::uint32_t size = 0;  // external node only
    std::unique_ptr<Node> left, right;
    bool is_external() const { return left == nullptr; }
  };

  Schema schema;
  std::vector<std::vector<std::string>> category_codes;  // sorted tokens per feature
  std::vector<std::unique_ptr<Node>> trees;
  std::size_t subsample_size = 0;
  std::uint64_t seed = 0;
};

IsolationForest fit_isolation_forest(const Dataset& train, std::size_t n_trees = 100,
                                     std::size_t subsample = 256, std::uint64_t seed = 0);

// Path-length anomaly score in (0,1); higher is more anomalous.
double score(const IsolationForest& model, const Instance& x);
std::vector<double> score_all(const IsolationForest& model, const Dataset& d);

// Threshold among midpoints of sorted unique scores maximizing F1 for
// prediction `score >= threshold`; ties resolve to the lower threshold.
// Throws unless at least one positive label is present.
double tune_threshold(const std::vector<double>& scores, const std::vector<int>& labels);

}  // namespace pars
