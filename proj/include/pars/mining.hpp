#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "pars/dataset.hpp"
#include "pars/predicates.hpp"

namespace pars {

enum class Discretizer { Dependency, Uniform, KMeans };

const char* to_string(Discretizer d);
std::optional<Discretizer> discretizer_from_string(std::string_view s);

struct LearningConfig {
  double theta = 0.01;   // minimum support
  double gamma = 0.9;    // minimum confidence
  double lambda = 5.0;   // confidence weight in the accuracy score
  int max_antecedents = 4;
  Discretizer discretizer = Discretizer::Dependency;
  std::uint64_t seed = 0;

  static double default_theta(std::size_t n_rows) {
    return std::max(10.0 / static_cast<double>(n_rows), 0.01);
  }
  void validate() const;
  bool operator==(const LearningConfig&) const = default;
};

struct Par {
  std::vector<PredicateId> antecedent;  // sorted, size 0..max_antecedents
  PredicateId consequent = 0;
  double support = 0.0;
  double confidence = 0.0;
  double score = 0.0;
  bool operator==(const Par&) const = default;
};

using ItemSet = std::vector<PredicateId>;  // sorted ascending

// Frequent itemsets as exact transaction counts; supports are derived by a
// single division so threshold comparisons stay reproducible.
struct FrequentSets {
  std::size_t n_transactions = 0;
  std::map<ItemSet, std::uint64_t> counts;

  double support_of(const ItemSet& items) const;
  std::map<ItemSet, double> supports() const;
};

// FP-growth. Returns exactly the itemsets of size 1..max_size with
// support > theta (strict). Throws on an empty transaction list.
FrequentSets mine_frequent_predicate_sets(const std::vector<Transaction>& transactions,
                                          double theta, int max_size);

// For every frequent P with |P| >= 2 and every p in P, emit P-p -> p iff
// sup(P)/sup(P-p) > gamma. Scores are left at zero until the rulebook is
// assembled.
std::vector<Par> generate_pars(const FrequentSets& frequent, double gamma);

// Constructed rules with an empty antecedent: seen-value set per categorical
// feature, mean +/- 3 sigma (population) per numeric feature. Coverage is the
// fraction of training rows satisfying the consequent.
struct UnivariatePar {
  PredicateBody consequent;
  double coverage = 0.0;
};
std::vector<UnivariatePar> generate_univariate_pars(const Dataset& d);

double accuracy_score(double support, double confidence, const LearningConfig& config);

struct RuleBook {
  Schema schema;
  std::vector<Predicate> predicates;  // dense ids 0..n-1
  std::vector<Par> rules;             // sorted by score descending
  LearningConfig config;
};

// Scores, sorts (score desc; ties: fewer antecedents, then id tuple),
// deduplicates identical rules keeping the first, and appends univariate
// consequent predicates to the table (reusing structurally equal entries).
RuleBook build_rulebook(Schema schema, std::vector<Predicate> predicates,
                        std::vector<Par> mined, const std::vector<UnivariatePar>& univariate,
                        const LearningConfig& config);

// Full learning pipeline: predicate generation per the configured
// discretizer, transaction encoding, mining, univariate rules, assembly.
RuleBook learn_rulebook(const Dataset& train, const LearningConfig& config);

}  // namespace pars
