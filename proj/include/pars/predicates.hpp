#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "pars/dataset.hpp"
#include "pars/dtree.hpp"

namespace pars {

using PredicateId = std::int32_t;

// F in {values}; values sorted, unique, non-empty.
struct CategoryIn {
  std::size_t feature = 0;
  std::vector<std::string> values;
  bool operator==(const CategoryIn&) const = default;
};

// lo/hi may be -inf/+inf. Canonical generated forms are half-open
// [tau_{j-1}, tau_j); univariate bounds are closed on both sides.
struct NumericInterval {
  std::size_t feature = 0;
  double lo = 0.0, hi = 0.0;
  bool lo_closed = true, hi_closed = false;
  bool operator==(const NumericInterval&) const = default;
};

using AtomicBody = std::variant<CategoryIn, NumericInterval>;

// Satisfied iff any part is; parts may span features.
struct Disjunction {
  std::vector<AtomicBody> parts;
  bool operator==(const Disjunction&) const = default;
};

using PredicateBody = std::variant<CategoryIn, NumericInterval, Disjunction>;

struct Predicate {
  PredicateId id = 0;
  PredicateBody body;
  bool operator==(const Predicate&) const = default;
};

// Sorted set of ids of satisfied predicates for one instance.
using Transaction = std::vector<PredicateId>;

bool satisfies(const PredicateBody& p, const Instance& x);
bool satisfies(const Predicate& p, const Instance& x);

// Fraction of rows satisfying p.
double support(const PredicateBody& p, const Dataset& d);

// Features a predicate touches, in disjunct order, deduplicated.
std::vector<std::size_t> predicate_features(const PredicateBody& p);

// Display form: `Pump=ON`, `Level>=10.25`, `8.21<=AIT202<8.84`, `A=x|B=y`.
std::string to_string(const PredicateBody& p, const Schema& schema);

// Per-feature singleton predicates for frequent values; low-support values
// merge into a within-feature disjunction, and a final left-to-right sweep
// over the global leftover list emits cross-entry disjunctions once their
// combined support clears theta (absorbing a tail that cannot).
std::vector<PredicateBody> generate_categorical_predicates(
    const Dataset& d, double theta, const std::vector<std::size_t>& categorical_features);

// Dependency-based discretization: decision trees propose cut-offs ranked by
// impurity decrease; a cut-off is kept only if the intervals it induces next
// to already-kept cut-offs all have support > theta.
std::vector<PredicateBody> generate_numeric_predicates(
    const Dataset& d, double theta, const std::vector<std::size_t>& categorical_features,
    const std::vector<std::size_t>& numeric_features);

// Equal-width bins over the observed range; empty intervals dropped.
std::vector<PredicateBody> generate_uniform_bin_predicates(
    const Dataset& d, const std::vector<std::size_t>& numeric_features, int bins = 10);

// 1-D k-means (deterministic farthest-point init from the median,
// <= 100 Lloyd iterations); cut-offs at midpoints between sorted centroids.
std::vector<PredicateBody> generate_kmeans_bin_predicates(
    const Dataset& d, const std::vector<std::size_t>& numeric_features, int bins = 10);

// Greedy cut-off acceptance for one feature (the dependency discretizer's
// selection stage). Candidates are processed in descending q_tau order; the
// result is the kept list in ascending value order.
std::vector<double> select_cutoffs(const std::vector<double>& values,
                                   std::vector<CutoffCandidate> candidates, double theta);

// One transaction per row: ids of exactly the satisfied predicates.
std::vector<Transaction> encode_transactions(const Dataset& d,
                                             const std::vector<Predicate>& predicates);

}  // namespace pars
