#pragma once

#include <string>
#include <vector>

#include "pars/mining.hpp"

namespace pars {

// Violated rules for one instance, in rulebook (descending score) order,
// plus the derived suspected-feature list.
struct Explanation {
  Instance instance;
  std::vector<Par> pars;
  std::vector<std::string> suspected_features;
};

// True iff every antecedent predicate holds (vacuously for an empty
// antecedent) and the consequent does not.
bool violates(const Par& rule, const Instance& x, const std::vector<Predicate>& predicates);

// Single pass over the sorted rules, stopping after k violations. May return
// fewer than k rules, including none.
Explanation explain(const RuleBook& rb, const Instance& x, int k);

// Consequent features of the given rules in rank order, duplicates dropped
// keeping the earliest rank.
std::vector<std::string> suspected_features(const RuleBook& rb, const std::vector<Par>& pars);

std::string render_rule(const RuleBook& rb, const Par& rule);
std::string render_text(const RuleBook& rb, const Explanation& e);
std::string render_json(const RuleBook& rb, const Explanation& e);

}  // namespace pars
