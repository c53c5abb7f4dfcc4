#include "pars/predicates.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <numeric>

namespace pars {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

bool satisfies_atom(const CategoryIn& body, const Instance& x) {
  const Cell& cell = x[body.feature];
  if (!std::holds_alternative<std::string>(cell)) return false;
  return std::binary_search(body.values.begin(), body.values.end(), cell_category(cell));
}

bool satisfies_atom(const NumericInterval& body, const Instance& x) {
  const Cell& cell = x[body.feature];
  if (!std::holds_alternative<double>(cell)) return false;
  const double v = cell_number(cell);
  const bool above = body.lo_closed ? v >= body.lo : v > body.lo;
  const bool below = body.hi_closed ? v <= body.hi : v < body.hi;
  return above && below;
}
}  // namespace

bool satisfies(const PredicateBody& p, const Instance& x) {
  return std::visit(
      [&](const auto& body) -> bool {
        using T = std::decay_t<decltype(body)>;
        if constexpr (std::is_same_v<T, Disjunction>) {
          for (const auto& part : body.parts)
            if (std::visit([&](const auto& atom) { return satisfies_atom(atom, x); }, part))
              return true;
          return false;
        } else {
          return satisfies_atom(body, x);
        }
      },
      p);
}

bool satisfies(const Predicate& p, const Instance& x) { return satisfies(p.body, x); }

double support(const PredicateBody& p, const Dataset& d) {
  std::size_t count = 0;
  for (const auto& row : d.rows)
    if (satisfies(p, row)) ++count;
  return static_cast<double>(count) / static_cast<double>(d.n_rows());
}

std::vector<std::size_t> predicate_features(const PredicateBody& p) {
  std::vector<std::size_t> out;
  auto add = [&](std::size_t f) {
    if (std::find(out.begin(), out.end(), f) == out.end()) out.push_back(f);
  };
  std::visit(
      [&](const auto& body) {
        using T = std::decay_t<decltype(body)>;
        if constexpr (std::is_same_v<T, Disjunction>) {
          for (const auto& part : body.parts)
            std::visit([&](const auto& atom) { add(atom.feature); }, part);
        } else {
          add(body.feature);
        }
      },
      p);
  return out;
}

namespace {

// Display precision only; serialized models keep exact values.
std::string format_display(double v) {
  char buf[32];
  const int n = std::snprintf(buf, sizeof(buf), "%.6g", v);
  return std::string(buf, static_cast<std::size_t>(n));
}

std::string interval_to_string(const NumericInterval& p, const Schema& schema) {
  const std::string& name = schema.features[p.feature].name;
  const bool lo_open_ended = std::isinf(p.lo) && p.lo < 0;
  const bool hi_open_ended = std::isinf(p.hi) && p.hi > 0;
  if (lo_open_ended && hi_open_ended) return name + "=*";
  if (lo_open_ended) return name + (p.hi_closed ? "<=" : "<") + format_display(p.hi);
  if (hi_open_ended) return name + (p.lo_closed ? ">=" : ">") + format_display(p.lo);
  return format_display(p.lo) + (p.lo_closed ? "<=" : "<") + name +
         (p.hi_closed ? "<=" : "<") + format_display(p.hi);
}

std::string category_to_string(const CategoryIn& p, const Schema& schema) {
  const std::string& name = schema.features[p.feature].name;
  std::string out;
  for (std::size_t i = 0; i < p.values.size(); ++i) {
    if (i) out += '|';
    out += name + "=" + p.values[i];
  }
  return out;
}

}  // namespace

std::string to_string(const PredicateBody& p, const Schema& schema) {
  return std::visit(
      [&](const auto& body) -> std::string {
        using T = std::decay_t<decltype(body)>;
        if constexpr (std::is_same_v<T, CategoryIn>) {
          return category_to_string(body, schema);
        } else if constexpr (std::is_same_v<T, NumericInterval>) {
          return interval_to_string(body, schema);
        } else {
          std::string out;
          for (std::size_t i = 0; i < body.parts.size(); ++i) {
            if (i) out += '|';
            out += std::visit(
                [&](const auto& atom) { return to_string(PredicateBody(atom), schema); },
                body.parts[i]);
          }
          return out;
        }
      },
      p);
}

std::vector<PredicateBody> generate_categorical_predicates(
    const Dataset& d, double theta, const std::vector<std::size_t>& categorical_features) {
  const double n = static_cast<double>(d.n_rows());
  std::vector<PredicateBody> out;
  std::vector<CategoryIn> leftovers;

  for (std::size_t f : categorical_features) {
    std::map<std::string, std::size_t> counts;
    for (const auto& row : d.rows) ++counts[cell_category(row[f])];

    std::vector<std::string> low;
    std::size_t low_count = 0;
    for (const auto& [value, count] : counts) {
      if (static_cast<double>(count) / n > theta) {
        out.push_back(CategoryIn{f, {value}});
      } else {
        low.push_back(value);
        low_count += count;
      }
    }
    if (low.size() > 1) {
      CategoryIn merged{f, std::move(low)};
      if (static_cast<double>(low_count) / n > theta)
        out.push_back(std::move(merged));
      else
        leftovers.push_back(std::move(merged));
    } else if (low.size() == 1) {
      leftovers.push_back(CategoryIn{f, std::move(low)});
    }
  }

  // Left-to-right sweep over the leftover list: emit a disjunction as soon
  // as the running group clears theta; if the remaining tail cannot clear it
  // on its own, absorb the tail into the final group and stop.
  auto group_support = [&](std::size_t from, std::size_t to) {  // inclusive range
    Disjunction dis;
    for (std::size_t i = from; i <= to; ++i) dis.parts.emplace_back(leftovers[i]);
    return support(PredicateBody(std::move(dis)), d);
  };
  auto emit_group = [&](std::size_t from, std::size_t to) {
    Disjunction dis;
    for (std::size_t i = from; i <= to; ++i) dis.parts.emplace_back(leftovers[i]);
    out.push_back(std::move(dis));
  };
  std::size_t k = 0;
  for (std::size_t j = 1; j < leftovers.size(); ++j) {
    if (group_support(k, j) > theta) {
      const bool tail_frequent =
          j + 1 < leftovers.size() && group_support(j + 1, leftovers.size() - 1) > theta;
      if (tail_frequent) {
        emit_group(k, j);
        k = j + 1;
      } else {
        emit_group(k, leftovers.size() - 1);
        break;
      }
    }
  }
  return out;
}

namespace {

std::vector<NumericInterval> interval_partition(std::size_t feature,
                                                const std::vector<double>& cutoffs) {
  std::vector<NumericInterval> out;
  if (cutoffs.empty()) return out;
  out.push_back({feature, -kInf, cutoffs.front(), false, false});
  for (std::size_t i = 0; i + 1 < cutoffs.size(); ++i)
    out.push_back({feature, cutoffs[i], cutoffs[i + 1], true, false});
  out.push_back({feature, cutoffs.back(), kInf, true, false});
  return out;
}

std::size_t count_in(const std::vector<double>& values, double lo, double hi) {
  std::size_t count = 0;
  for (double v : values)
    if (v >= lo && v < hi) ++count;
  return count;
}

}  // namespace

std::vector<double> select_cutoffs(const std::vector<double>& values,
                                   std::vector<CutoffCandidate> candidates, double theta) {
  std::sort(candidates.begin(), candidates.end(), [](const auto& a, const auto& b) {
    if (a.q_tau != b.q_tau) return a.q_tau > b.q_tau;
    return a.tau < b.tau;
  });
  const double n = static_cast<double>(values.size());
  auto frequent = [&](double lo, double hi) {
    return static_cast<double>(count_in(values, lo, hi)) / n > theta;
  };

  std::vector<double> kept;
  for (const auto& cand : candidates) {
    if (kept.empty()) {
      kept.push_back(cand.tau);
      continue;
    }
    const auto pos = static_cast<std::size_t>(
        std::lower_bound(kept.begin(), kept.end(), cand.tau) - kept.begin());
    bool ok;
    if (pos == 0) {
      ok = frequent(cand.tau, kept.front());
    } else if (pos == kept.size()) {
      ok = frequent(kept.back(), cand.tau);
    } else {
      ok = frequent(kept[pos - 1], cand.tau) && frequent(cand.tau, kept[pos]);
    }
    if (ok) kept.insert(kept.begin() + static_cast<std::ptrdiff_t>(pos), cand.tau);
  }
  return kept;
}

std::vector<PredicateBody> generate_numeric_predicates(
    const Dataset& d, double theta, const std::vector<std::size_t>& categorical_features,
    const std::vector<std::size_t>& numeric_features) {
  std::vector<PredicateBody> out;
  if (numeric_features.empty()) return out;

  const std::size_t n = d.n_rows();
  const auto min_leaf =
      static_cast<std::size_t>(std::floor(static_cast<double>(n) * theta)) + 1;

  std::map<std::size_t, std::vector<double>> columns;
  for (std::size_t f : numeric_features) columns[f] = d.numeric_column(f);

  std::map<std::size_t, std::vector<CutoffCandidate>> pool;
  auto add_candidates = [&](const TreeNode& tree, const std::vector<std::size_t>& input_map) {
    for (const auto& cand : extract_cutoffs(tree)) {
      const std::size_t global = input_map[cand.feature];
      pool[global].push_back({global, cand.tau, cand.q_tau});
    }
  };

  // One classification tree per categorical target over all numeric inputs.
  {
    std::vector<std::vector<double>> inputs;
    std::vector<std::size_t> input_map;
    for (std::size_t f : numeric_features) {
      inputs.push_back(columns[f]);
      input_map.push_back(f);
    }
    for (std::size_t target_f : categorical_features) {
      std::map<std::string, int> codes;
      for (const auto& row : d.rows) codes.emplace(cell_category(row[target_f]), 0);
      int next = 0;
      for (auto& [token, code] : codes) code = next++;
      std::vector<int> target(n);
      for (std::size_t i = 0; i < n; ++i) target[i] = codes[cell_category(d.rows[i][target_f])];
      add_candidates(fit_classification_tree(inputs, target, min_leaf, n), input_map);
    }
  }

  // One regression tree per numeric target over the remaining numeric inputs.
  if (numeric_features.size() >= 2) {
    for (std::size_t target_f : numeric_features) {
      std::vector<std::vector<double>> inputs;
      std::vector<std::size_t> input_map;
      for (std::size_t f : numeric_features) {
        if (f == target_f) continue;
        inputs.push_back(columns[f]);
        input_map.push_back(f);
      }
      add_candidates(fit_regression_tree(inputs, columns[target_f], min_leaf, n), input_map);
    }
  }

  for (std::size_t f : numeric_features) {
    auto it = pool.find(f);
    if (it == pool.end()) continue;
    auto& cands = it->second;
    // Same cut-off proposed by several trees: keep the highest q_tau.
    std::sort(cands.begin(), cands.end(), [](const auto& a, const auto& b) {
      if (a.tau != b.tau) return a.tau < b.tau;
      return a.q_tau > b.q_tau;
    });
    cands.erase(std::unique(cands.begin(), cands.end(),
                            [](const auto& a, const auto& b) { return a.tau == b.tau; }),
                cands.end());

    const auto kept = select_cutoffs(columns[f], cands, theta);
    for (const auto& interval : interval_partition(f, kept))
      if (support(PredicateBody(interval), d) > theta) out.push_back(interval);
  }
  return out;
}

std::vector<PredicateBody> generate_uniform_bin_predicates(
    const Dataset& d, const std::vector<std::size_t>& numeric_features, int bins) {
  if (bins < 2) throw Error("uniform discretizer needs bins >= 2");
  std::vector<PredicateBody> out;
  for (std::size_t f : numeric_features) {
    const auto values = d.numeric_column(f);
    const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
    const double lo = *lo_it, hi = *hi_it;
    if (!(lo < hi)) continue;
    std::vector<double> cutoffs;
    for (int i = 1; i < bins; ++i) {
      const double c = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(bins);
      if (c > lo && c < hi && (cutoffs.empty() || c > cutoffs.back())) cutoffs.push_back(c);
    }
    for (const auto& interval : interval_partition(f, cutoffs))
      if (support(PredicateBody(interval), d) > 0.0) out.push_back(interval);
  }
  return out;
}

namespace {

// Lloyd iterations over sorted values; clusters are contiguous ranges split
// at midpoints between sorted centroids. An emptied cluster keeps its
// previous centroid.
std::vector<double> kmeans_1d(const std::vector<double>& sorted_values, std::size_t k) {
  std::vector<double> distinct(sorted_values);
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  k = std::min(k, distinct.size());
  if (k == 0) return {};

  // Farthest-point init from the median.
  std::vector<double> centroids{sorted_values[(sorted_values.size() - 1) / 2]};
  while (centroids.size() < k) {
    double best_value = distinct.front();
    double best_dist = -1.0;
    for (double v : distinct) {
      double nearest = kInf;
      for (double c : centroids) nearest = std::min(nearest, std::abs(v - c));
      if (nearest > best_dist) {
        best_dist = nearest;
        best_value = v;
      }
    }
    centroids.push_back(best_value);
    std::sort(centroids.begin(), centroids.end());
  }

  std::vector<double> prefix(sorted_values.size() + 1, 0.0);
  for (std::size_t i = 0; i < sorted_values.size(); ++i)
    prefix[i + 1] = prefix[i] + sorted_values[i];

  for (int iter = 0; iter < 100; ++iter) {
    std::vector<double> boundaries;
    for (std::size_t i = 0; i + 1 < centroids.size(); ++i)
      boundaries.push_back(std::midpoint(centroids[i], centroids[i + 1]));
    std::vector<double> next = centroids;
    std::size_t begin = 0;
    for (std::size_t c = 0; c < centroids.size(); ++c) {
      const std::size_t end =
          c < boundaries.size()
              ? static_cast<std::size_t>(std::lower_bound(sorted_values.begin(),
                                                          sorted_values.end(), boundaries[c]) -
                                         sorted_values.begin())
              : sorted_values.size();
      if (end > begin)
        next[c] = (prefix[end] - prefix[begin]) / static_cast<double>(end - begin);
      begin = end;
    }
    std::sort(next.begin(), next.end());
    if (next == centroids) break;
    centroids = std::move(next);
  }
  centroids.erase(std::unique(centroids.begin(), centroids.end()), centroids.end());
  return centroids;
}

}  // namespace

std::vector<PredicateBody> generate_kmeans_bin_predicates(
    const Dataset& d, const std::vector<std::size_t>& numeric_features, int bins) {
  if (bins < 2) throw Error("k-means discretizer needs bins >= 2");
  std::vector<PredicateBody> out;
  for (std::size_t f : numeric_features) {
    auto values = d.numeric_column(f);
    std::sort(values.begin(), values.end());
    const auto centroids = kmeans_1d(values, static_cast<std::size_t>(bins));
    std::vector<double> cutoffs;
    for (std::size_t i = 0; i + 1 < centroids.size(); ++i) {
      const double c = std::midpoint(centroids[i], centroids[i + 1]);
      if (cutoffs.empty() || c > cutoffs.back()) cutoffs.push_back(c);
    }
    for (const auto& interval : interval_partition(f, cutoffs))
      if (support(PredicateBody(interval), d) > 0.0) out.push_back(interval);
  }
  return out;
}

std::vector<Transaction> encode_transactions(const Dataset& d,
                                             const std::vector<Predicate>& predicates) {
  std::vector<Transaction> out;
  out.reserve(d.n_rows());
  for (const auto& row : d.rows) {
    Transaction t;
    for (const auto& p : predicates)
      if (satisfies(p.body, row)) t.push_back(p.id);
    out.push_back(std::move(t));
  }
  return out;
}

}  // namespace pars
