#include "pars/dtree.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>

#include "pars/common.hpp"

namespace pars {

double impurity_decrease(std::size_t n, std::size_t n_left, double h_left, std::size_t n_right,
                         double h_right, double h_parent, std::size_t dataset_size) {
  if (n_left == 0 || n_right == 0) throw Error("impurity_decrease: empty child");
  if (n_left + n_right != n)
    throw std::logic_error("impurity_decrease: child counts do not sum to node count");
  const double dn = static_cast<double>(n);
  const double weighted = (static_cast<double>(n_left) / dn) * h_left +
                          (static_cast<double>(n_right) / dn) * h_right;
  return dn / static_cast<double>(dataset_size) * (h_parent - weighted);
}

double entropy_bits(const std::vector<std::size_t>& class_counts, std::size_t n) {
  double h = 0.0;
  for (std::size_t c : class_counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / static_cast<double>(n);
    h -= p * std::log2(p);
  }
  return h;
}

double variance(const std::vector<double>& values, const std::vector<std::uint32_t>& idx) {
  if (idx.empty()) return 0.0;
  double mean = 0.0;
  for (auto i : idx) mean += values[i];
  mean /= static_cast<double>(idx.size());
  double ss = 0.0;
  for (auto i : idx) {
    const double d = values[i] - mean;
    ss += d * d;
  }
  return ss / static_cast<double>(idx.size());
}

namespace {

struct SplitChoice {
  bool found = false;
  std::size_t feature = 0;
  double tau = 0.0;
  double gain = 0.0;
};

// Midpoint candidates between consecutive distinct sorted values; feature
// order then threshold order break gain ties.
SplitChoice best_split_classification(const std::vector<std::vector<double>>& columns,
                                      const std::vector<int>& target, int n_classes,
                                      const std::vector<std::uint32_t>& idx, std::size_t min_leaf,
                                      double h_parent) {
  SplitChoice best;
  const std::size_t n = idx.size();
  std::vector<std::size_t> total(n_classes, 0);
  for (auto i : idx) ++total[static_cast<std::size_t>(target[i])];

  std::vector<std::pair<double, std::uint32_t>> sorted(n);
  std::vector<std::size_t> left(n_classes);
  for (std::size_t j = 0; j < columns.size(); ++j) {
    const auto& col = columns[j];
    for (std::size_t k = 0; k < n; ++k) sorted[k] = {col[idx[k]], idx[k]};
    std::sort(sorted.begin(), sorted.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    std::fill(left.begin(), left.end(), 0);
    for (std::size_t k = 0; k + 1 < n; ++k) {
      ++left[static_cast<std::size_t>(target[sorted[k].second])];
      if (!(sorted[k].first < sorted[k + 1].first)) continue;
      const std::size_t n_left = k + 1, n_right = n - n_left;
      if (n_left < min_leaf || n_right < min_leaf) continue;
      double h_left = 0.0, h_right = 0.0;
      for (int c = 0; c < n_classes; ++c) {
        const std::size_t cl = left[static_cast<std::size_t>(c)];
        const std::size_t cr = total[static_cast<std::size_t>(c)] - cl;
        if (cl) {
          const double p = static_cast<double>(cl) / static_cast<double>(n_left);
          h_left -= p * std::log2(p);
        }
        if (cr) {
          const double p = static_cast<double>(cr) / static_cast<double>(n_right);
          h_right -= p * std::log2(p);
        }
      }
      const double gain = h_parent -
                          (static_cast<double>(n_left) / static_cast<double>(n)) * h_left -
                          (static_cast<double>(n_right) / static_cast<double>(n)) * h_right;
      if (gain > best.gain) {
        best = {true, j, std::midpoint(sorted[k].first, sorted[k + 1].first), gain};
      }
    }
  }
  return best;
}

SplitChoice best_split_regression(const std::vector<std::vector<double>>& columns,
                                  const std::vector<double>& target,
                                  const std::vector<std::uint32_t>& idx, std::size_t min_leaf,
                                  double h_parent) {
  SplitChoice best;
  const std::size_t n = idx.size();
  double total_sum = 0.0, total_ss = 0.0;
  for (auto i : idx) {
    total_sum += target[i];
    total_ss += target[i] * target[i];
  }

  std::vector<std::pair<double, std::uint32_t>> sorted(n);
  for (std::size_t j = 0; j < columns.size(); ++j) {
    const auto& col = columns[j];
    for (std::size_t k = 0; k < n; ++k) sorted[k] = {col[idx[k]], idx[k]};
    std::sort(sorted.begin(), sorted.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    double sum = 0.0, ss = 0.0;
    for (std::size_t k = 0; k + 1 < n; ++k) {
      const double t = target[sorted[k].second];
      sum += t;
      ss += t * t;
      if (!(sorted[k].first < sorted[k + 1].first)) continue;
      const std::size_t n_left = k + 1, n_right = n - n_left;
      if (n_left < min_leaf || n_right < min_leaf) continue;
      const double dl = static_cast<double>(n_left), dr = static_cast<double>(n_right);
      const double mean_l = sum / dl, mean_r = (total_sum - sum) / dr;
      const double var_l = std::max(0.0, ss / dl - mean_l * mean_l);
      const double var_r = std::max(0.0, (total_ss - ss) / dr - mean_r * mean_r);
      const double gain =
          h_parent - (dl / static_cast<double>(n)) * var_l - (dr / static_cast<double>(n)) * var_r;
      if (gain > best.gain) {
        best = {true, j, std::midpoint(sorted[k].first, sorted[k + 1].first), gain};
      }
    }
  }
  return best;
}

template <class ImpurityFn, class BestSplitFn>
std::unique_ptr<TreeNode> build_node(const std::vector<std::vector<double>>& columns,
                                     std::vector<std::uint32_t> idx, std::size_t min_leaf,
                                     std::size_t dataset_size, const ImpurityFn& impurity,
                                     const BestSplitFn& best_split) {
  auto node = std::make_unique<TreeNode>();
  const double h = impurity(idx);
  SplitChoice choice;
  if (h > 0.0 && idx.size() >= 2 * min_leaf) choice = best_split(idx, h);
  if (!choice.found || !(choice.gain > 0.0)) {
    node->count = idx.size();
    return node;
  }

  std::vector<std::uint32_t> left_idx, right_idx;
  for (auto i : idx)
    (columns[choice.feature][i] <= choice.tau ? left_idx : right_idx).push_back(i);

  // Recompute children impurity from the realized partition so the stored
  // q matches an independent recomputation bit-for-bit up to the formula.
  const double h_left = impurity(left_idx);
  const double h_right = impurity(right_idx);
  node->feature = choice.feature;
  node->tau = choice.tau;
  node->q_tau = std::max(
      0.0, impurity_decrease(idx.size(), left_idx.size(), h_left, right_idx.size(), h_right, h,
                             dataset_size));
  idx.clear();
  idx.shrink_to_fit();
  node->left = build_node(columns, std::move(left_idx), min_leaf, dataset_size, impurity,
                          best_split);
  node->right = build_node(columns, std::move(right_idx), min_leaf, dataset_size, impurity,
                           best_split);
  return node;
}

void check_inputs(const std::vector<std::vector<double>>& columns, std::size_t n_rows,
                  std::size_t min_leaf) {
  if (min_leaf < 1) throw Error("min_leaf must be >= 1");
  if (columns.empty()) throw Error("decision tree: no numeric input features");
  if (n_rows == 0) throw Error("decision tree: empty training data");
  for (const auto& col : columns)
    if (col.size() != n_rows) throw std::logic_error("decision tree: ragged input columns");
}

}  // namespace

TreeNode fit_classification_tree(const std::vector<std::vector<double>>& columns,
                                 const std::vector<int>& target, std::size_t min_leaf,
                                 std::size_t dataset_size) {
  check_inputs(columns, target.size(), min_leaf);
  int n_classes = 0;
  for (int code : target) {
    if (code < 0) throw std::logic_error("decision tree: negative class code");
    n_classes = std::max(n_classes, code + 1);
  }

  std::vector<std::uint32_t> idx(target.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<std::uint32_t>(i);

  auto impurity = [&](const std::vector<std::uint32_t>& at) {
    std::vector<std::size_t> counts(static_cast<std::size_t>(n_classes), 0);
    for (auto i : at) ++counts[static_cast<std::size_t>(target[i])];
    return entropy_bits(counts, at.size());
  };
  auto best = [&](const std::vector<std::uint32_t>& at, double h) {
    return best_split_classification(columns, target, n_classes, at, min_leaf, h);
  };
  return std::move(*build_node(columns, std::move(idx), min_leaf, dataset_size, impurity, best));
}

TreeNode fit_regression_tree(const std::vector<std::vector<double>>& columns,
                             const std::vector<double>& target_raw, std::size_t min_leaf,
                             std::size_t dataset_size) {
  check_inputs(columns, target_raw.size(), min_leaf);
  const std::size_t n = target_raw.size();

  double mean = 0.0;
  for (double v : target_raw) mean += v;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double v : target_raw) ss += (v - mean) * (v - mean);
  const double sigma = std::sqrt(ss / static_cast<double>(n));
  if (sigma == 0.0) {
    TreeNode leaf;
    leaf.count = n;
    return leaf;
  }
  std::vector<double> target(n);
  for (std::size_t i = 0; i < n; ++i) target[i] = (target_raw[i] - mean) / sigma;

  std::vector<std::uint32_t> idx(n);
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<std::uint32_t>(i);

  auto impurity = [&](const std::vector<std::uint32_t>& at) { return variance(target, at); };
  auto best = [&](const std::vector<std::uint32_t>& at, double h) {
    return best_split_regression(columns, target, at, min_leaf, h);
  };
  return std::move(*build_node(columns, std::move(idx), min_leaf, dataset_size, impurity, best));
}

namespace {
void collect_cutoffs(const TreeNode& node, std::vector<CutoffCandidate>& out) {
  if (node.is_leaf()) return;
  out.push_back({node.feature, node.tau, node.q_tau});
  collect_cutoffs(*node.left, out);
  collect_cutoffs(*node.right, out);
}
}  // namespace

std::vector<CutoffCandidate> extract_cutoffs(const TreeNode& tree) {
  std::vector<CutoffCandidate> out;
  collect_cutoffs(tree, out);
  return out;
}

}  // namespace pars
