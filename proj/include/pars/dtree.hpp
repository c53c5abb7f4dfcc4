#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <vector>

namespace pars {

// Binary tree over numeric inputs. An instance goes right iff value > tau.
// Leaves keep the sample count that reached them; internal nodes keep the
// split and its impurity decrease scaled by the node's share of the dataset.
struct TreeNode {
  std::size_t feature = 0;
  double tau = 0.0;
  double q_tau = 0.0;
  std::size_t count = 0;  // leaf only
  std::unique_ptr<TreeNode> left, right;

  bool is_leaf() const { return left == nullptr; }
};

struct CutoffCandidate {
  std::size_t feature = 0;
  double tau = 0.0;
  double q_tau = 0.0;
};

// q = (N/|D|) * (H - (N_left/N) H_left - (N_right/N) H_right).
// Throws on an empty child.
double impurity_decrease(std::size_t n, std::size_t n_left, double h_left, std::size_t n_right,
                         double h_right, double h_parent, std::size_t dataset_size);

// Base-2 entropy of a class-count histogram over n samples.
double entropy_bits(const std::vector<std::size_t>& class_counts, std::size_t n);

// Population variance.
double variance(const std::vector<double>& values, const std::vector<std::uint32_t>& idx);

// Greedy induction, information gain, candidate thresholds at midpoints of
// consecutive distinct sorted values, both children >= min_leaf. Ties broken
// by lowest feature index then lowest threshold. `columns` is column-major:
// columns[j][i] is input feature j of sample i.
TreeNode fit_classification_tree(const std::vector<std::vector<double>>& columns,
                                 const std::vector<int>& target, std::size_t min_leaf,
                                 std::size_t dataset_size);

// As above with variance reduction; the raw target is standardized to zero
// mean and unit variance internally. A zero-variance target yields a single
// leaf.
TreeNode fit_regression_tree(const std::vector<std::vector<double>>& columns,
                             const std::vector<double>& target_raw, std::size_t min_leaf,
                             std::size_t dataset_size);

// One candidate per internal node, pre-order.
std::vector<CutoffCandidate> extract_cutoffs(const TreeNode& tree);

}  // namespace pars
