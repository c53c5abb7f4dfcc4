#include "pars/detector.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

#include "pars/rng.hpp"

namespace pars {

namespace {

// Average unsuccessful-search path length in a BST of n nodes.
double average_path_length(std::size_t n) {
  if (n <= 1) return 0.0;
  if (n == 2) return 1.0;
  const double m = static_cast<double>(n - 1);
  const double harmonic = std::log(m) + 0.5772156649015328606;
  return 2.0 * harmonic - 2.0 * m / static_cast<double>(n);
}

std::unique_ptr<IsolationForest::Node> build_tree(
    const std::vector<std::vector<double>>& rows, std::vector<std::uint32_t> idx,
    std::size_t depth, std::size_t height_limit, Rng& rng) {
  auto node = std::make_unique<IsolationForest::Node>();
  if (depth >= height_limit || idx.size() <= 1) {
    node->size = static_cast<std::uint32_t>(idx.size());
    return node;
  }

  const std::size_t n_features = rows.front().size();
  std::vector<std::size_t> usable;
  std::vector<std::pair<double, double>> ranges(n_features);
  for (std::size_t f = 0; f < n_features; ++f) {
    double lo = rows[idx.front()][f], hi = lo;
    for (auto i : idx) {
      lo = std::min(lo, rows[i][f]);
      hi = std::max(hi, rows[i][f]);
    }
    ranges[f] = {lo, hi};
    if (lo < hi) usable.push_back(f);
  }
  if (usable.empty()) {
    node->size = static_cast<std::uint32_t>(idx.size());
    return node;
  }

  const std::size_t feature = usable[rng.below(usable.size())];
  const auto [lo, hi] = ranges[feature];
  const double threshold = rng.uniform(lo, hi);

  std::vector<std::uint32_t> left_idx, right_idx;
  for (auto i : idx) (rows[i][feature] < threshold ? left_idx : right_idx).push_back(i);
  idx.clear();
  idx.shrink_to_fit();

  node->feature = feature;
  node->threshold = threshold;
  node->left = build_tree(rows, std::move(left_idx), depth + 1, height_limit, rng);
  node->right = build_tree(rows, std::move(right_idx), depth + 1, height_limit, rng);
  return node;
}

}  // namespace

IsolationForest fit_isolation_forest(const Dataset& train, std::size_t n_trees,
                                     std::size_t subsample, std::uint64_t seed) {
  if (train.rows.empty()) throw Error("cannot fit isolation forest on an empty dataset");
  if (n_trees == 0) throw Error("isolation forest needs at least one tree");

  IsolationForest model;
  model.schema = train.schema;
  model.seed = seed;
  model.subsample_size = std::min(subsample, train.n_rows());
  model.category_codes.resize(train.schema.size());
  for (std::size_t f = 0; f < train.schema.size(); ++f) {
    if (train.schema.features[f].kind != FeatureKind::Categorical) continue;
    std::set<std::string> tokens;
    for (const auto& row : train.rows) tokens.insert(cell_category(row[f]));
    model.category_codes[f].assign(tokens.begin(), tokens.end());
  }

  std::vector<std::vector<double>> rows;
  rows.reserve(train.n_rows());
  for (const auto& row : train.rows) {
    std::vector<double> encoded(train.schema.size());
    for (std::size_t f = 0; f < train.schema.size(); ++f) {
      if (train.schema.features[f].kind == FeatureKind::Numeric) {
        encoded[f] = cell_number(row[f]);
      } else {
        const auto& codes = model.category_codes[f];
        const auto it =
            std::lower_bound(codes.begin(), codes.end(), cell_category(row[f]));
        encoded[f] = static_cast<double>(it - codes.begin());
      }
    }
    rows.push_back(std::move(encoded));
  }

  const auto height_limit = static_cast<std::size_t>(
      std::ceil(std::log2(static_cast<double>(std::max<std::size_t>(2, model.subsample_size)))));

  std::vector<std::uint32_t> all(train.n_rows());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<std::uint32_t>(i);
  for (std::size_t t = 0; t < n_trees; ++t) {
    Rng rng(derive_seed(seed, 0x1F0000 + t));
    std::vector<std::uint32_t> sample(all);
    rng.shuffle(sample);
    sample.resize(model.subsample_size);
    model.trees.push_back(build_tree(rows, std::move(sample), 0, height_limit, rng));
  }
  return model;
}

double score(const IsolationForest& model, const Instance& x) {
  if (x.size() != model.schema.size())
    throw Error("instance does not match the detector schema");
  std::vector<double> encoded(x.size());
  for (std::size_t f = 0; f < x.size(); ++f) {
    if (model.schema.features[f].kind == FeatureKind::Numeric) {
      encoded[f] = cell_number(x[f]);
    } else {
      const auto& codes = model.category_codes[f];
      const auto it = std::lower_bound(codes.begin(), codes.end(), cell_category(x[f]));
      // Unseen tokens code just past the known range.
      encoded[f] = (it != codes.end() && *it == cell_category(x[f]))
                       ? static_cast<double>(it - codes.begin())
                       : static_cast<double>(codes.size());
    }
  }

  double total = 0.0;
  for (const auto& tree : model.trees) {
    const IsolationForest::Node* node = tree.get();
    double depth = 0.0;
    while (!node->is_external()) {
      node = encoded[node->feature] < node->threshold ? node->left.get() : node->right.get();
      depth += 1.0;
    }
    total += depth + average_path_length(node->size);
  }
  const double mean_path = total / static_cast<double>(model.trees.size());
  const double normalizer = average_path_length(std::max<std::size_t>(2, model.subsample_size));
  return std::pow(2.0, -mean_path / normalizer);
}

std::vector<double> score_all(const IsolationForest& model, const Dataset& d) {
  std::vector<double> out;
  out.reserve(d.n_rows());
  for (const auto& row : d.rows) out.push_back(score(model, row));
  return out;
}

double tune_threshold(const std::vector<double>& scores, const std::vector<int>& labels) {
  if (scores.size() != labels.size())
    throw std::logic_error("tune_threshold: length mismatch");
  if (std::find(labels.begin(), labels.end(), 1) == labels.end())
    throw Error("threshold tuning needs at least one positive label");

  std::vector<double> unique_scores(scores);
  std::sort(unique_scores.begin(), unique_scores.end());
  unique_scores.erase(std::unique(unique_scores.begin(), unique_scores.end()),
                      unique_scores.end());

  std::vector<double> candidates;
  for (std::size_t i = 0; i + 1 < unique_scores.size(); ++i)
    candidates.push_back(std::midpoint(unique_scores[i], unique_scores[i + 1]));
  if (candidates.empty()) return unique_scores.front();

  auto f1_at = [&](double threshold) {
    std::size_t tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
      const bool pred = scores[i] >= threshold;
      if (pred && labels[i] == 1) ++tp;
      else if (pred) ++fp;
      else if (labels[i] == 1) ++fn;
    }
    const double denom = static_cast<double>(2 * tp + fp + fn);
    return denom == 0.0 ? 0.0 : 2.0 * static_cast<double>(tp) / denom;
  };

  double best_threshold = candidates.front();
  double best_f1 = -1.0;
  for (double c : candidates) {
    const double f1 = f1_at(c);
    if (f1 > best_f1) {
      best_f1 = f1;
      best_threshold = c;
    }
  }
  return best_threshold;
}

}  // namespace pars
