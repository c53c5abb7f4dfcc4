#include "pars/mining.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <memory>
#include <set>
#include <stdexcept>

namespace pars {

const char* to_string(Discretizer d) {
  switch (d) {
    case Discretizer::Uniform: return "uniform";
    case Discretizer::KMeans: return "kmeans";
    default: return "dependency";
  }
}

std::optional<Discretizer> discretizer_from_string(std::string_view s) {
  if (s == "dependency") return Discretizer::Dependency;
  if (s == "uniform") return Discretizer::Uniform;
  if (s == "kmeans") return Discretizer::KMeans;
  return std::nullopt;
}

void LearningConfig::validate() const {
  if (!(theta > 0.0 && theta < 1.0))
    throw Error("theta must be in (0,1), got " + format_number(theta));
  if (!(gamma > 0.0 && gamma < 1.0))
    throw Error("gamma must be in (0,1), got " + format_number(gamma));
  if (!(lambda > 0.0)) throw Error("lambda must be > 0, got " + format_number(lambda));
  if (max_antecedents < 1)
    throw Error("max_antecedents must be >= 1, got " + std::to_string(max_antecedents));
}

double FrequentSets::support_of(const ItemSet& items) const {
  auto it = counts.find(items);
  if (it == counts.end())
    throw std::logic_error("frequent-set table is missing a required subset");
  return static_cast<double>(it->second) / static_cast<double>(n_transactions);
}

std::map<ItemSet, double> FrequentSets::supports() const {
  std::map<ItemSet, double> out;
  for (const auto& [items, count] : counts)
    out.emplace(items, static_cast<double>(count) / static_cast<double>(n_transactions));
  return out;
}

namespace {

struct FpNode {
  PredicateId item = -1;
  std::uint64_t count = 0;
  FpNode* parent = nullptr;
  FpNode* next_same_item = nullptr;
  std::map<PredicateId, std::unique_ptr<FpNode>> children;
};

struct HeaderEntry {
  std::uint64_t count = 0;
  FpNode* head = nullptr;
};

struct WeightedItems {
  std::vector<PredicateId> items;  // ordered by insertion rank
  std::uint64_t weight = 1;
};

struct FpTree {
  FpNode root;
  std::map<PredicateId, HeaderEntry> header;

  void insert(const std::vector<PredicateId>& items, std::uint64_t weight) {
    FpNode* node = &root;
    for (PredicateId item : items) {
      auto it = node->children.find(item);
      if (it == node->children.end()) {
        auto child = std::make_unique<FpNode>();
        child->item = item;
        child->parent = node;
        auto& entry = header[item];
        child->next_same_item = entry.head;
        entry.head = child.get();
        it = node->children.emplace(item, std::move(child)).first;
      }
      it->second->count += weight;
      node = it->second.get();
    }
  }
};

// Builds a tree over the frequent items of `db`, inserting items ordered by
// descending global count (ties: ascending id).
FpTree build_tree(const std::vector<WeightedItems>& db,
                  const std::map<PredicateId, std::uint64_t>& item_counts,
                  const std::vector<PredicateId>& frequent_order) {
  std::map<PredicateId, std::size_t> rank;
  for (std::size_t i = 0; i < frequent_order.size(); ++i) rank[frequent_order[i]] = i;

  FpTree tree;
  for (auto& entry : frequent_order) tree.header[entry].count = item_counts.at(entry);
  std::vector<PredicateId> filtered;
  for (const auto& t : db) {
    filtered.clear();
    for (PredicateId item : t.items)
      if (rank.count(item)) filtered.push_back(item);
    std::sort(filtered.begin(), filtered.end(),
              [&](PredicateId a, PredicateId b) { return rank[a] < rank[b]; });
    if (!filtered.empty()) tree.insert(filtered, t.weight);
  }
  return tree;
}

void mine_tree(const std::vector<WeightedItems>& db, std::uint64_t n_transactions, double theta,
               int max_size, const ItemSet& suffix, std::map<ItemSet, std::uint64_t>& out) {
  auto is_frequent = [&](std::uint64_t count) {
    return static_cast<double>(count) / static_cast<double>(n_transactions) > theta;
  };

  std::map<PredicateId, std::uint64_t> item_counts;
  for (const auto& t : db)
    for (PredicateId item : t.items) item_counts[item] += t.weight;

  std::vector<PredicateId> frequent_order;
  for (const auto& [item, count] : item_counts)
    if (is_frequent(count)) frequent_order.push_back(item);
  std::sort(frequent_order.begin(), frequent_order.end(), [&](PredicateId a, PredicateId b) {
    if (item_counts[a] != item_counts[b]) return item_counts[a] > item_counts[b];
    return a < b;
  });
  if (frequent_order.empty()) return;

  FpTree tree = build_tree(db, item_counts, frequent_order);

  // Grow from the least frequent item upward.
  for (auto it = frequent_order.rbegin(); it != frequent_order.rend(); ++it) {
    const PredicateId item = *it;
    const auto& entry = tree.header[item];

    ItemSet grown = suffix;
    grown.insert(std::lower_bound(grown.begin(), grown.end(), item), item);
    out.emplace(grown, entry.count);
    if (static_cast<int>(grown.size()) >= max_size) continue;

    std::vector<WeightedItems> conditional;
    for (FpNode* node = entry.head; node != nullptr; node = node->next_same_item) {
      WeightedItems path;
      path.weight = node->count;
      for (FpNode* up = node->parent; up != nullptr && up->parent != nullptr; up = up->parent)
        path.items.push_back(up->item);
      if (!path.items.empty()) conditional.push_back(std::move(path));
    }
    if (!conditional.empty())
      mine_tree(conditional, n_transactions, theta, max_size, grown, out);
  }
}

}  // namespace

FrequentSets mine_frequent_predicate_sets(const std::vector<Transaction>& transactions,
                                          double theta, int max_size) {
  if (transactions.empty()) throw Error("cannot mine an empty transaction list");
  if (max_size < 1) throw Error("max itemset size must be >= 1");

  std::vector<WeightedItems> db;
  db.reserve(transactions.size());
  for (const auto& t : transactions) db.push_back({t, 1});

  FrequentSets result;
  result.n_transactions = transactions.size();
  mine_tree(db, transactions.size(), theta, max_size, {}, result.counts);
  return result;
}

std::vector<Par> generate_pars(const FrequentSets& frequent, double gamma) {
  std::vector<Par> out;
  const double n = static_cast<double>(frequent.n_transactions);
  for (const auto& [items, count] : frequent.counts) {
    if (items.size() < 2) continue;
    for (std::size_t i = 0; i < items.size(); ++i) {
      ItemSet antecedent;
      antecedent.reserve(items.size() - 1);
      for (std::size_t j = 0; j < items.size(); ++j)
        if (j != i) antecedent.push_back(items[j]);
      auto it = frequent.counts.find(antecedent);
      if (it == frequent.counts.end())
        throw std::logic_error("frequent-set table violates anti-monotone closure");
      const double confidence =
          static_cast<double>(count) / static_cast<double>(it->second);
      if (confidence > gamma) {
        Par rule;
        rule.antecedent = std::move(antecedent);
        rule.consequent = items[i];
        rule.support = static_cast<double>(count) / n;
        rule.confidence = confidence;
        out.push_back(std::move(rule));
      }
    }
  }
  return out;
}

std::vector<UnivariatePar> generate_univariate_pars(const Dataset& d) {
  std::vector<UnivariatePar> out;
  for (std::size_t f = 0; f < d.schema.size(); ++f) {
    if (d.schema.features[f].kind == FeatureKind::Categorical) {
      std::set<std::string> seen;
      for (const auto& row : d.rows) seen.insert(cell_category(row[f]));
      CategoryIn body{f, {seen.begin(), seen.end()}};
      const double coverage = support(PredicateBody(body), d);
      out.push_back({std::move(body), coverage});
    } else {
      const auto values = d.numeric_column(f);
      double mean = 0.0;
      for (double v : values) mean += v;
      mean /= static_cast<double>(values.size());
      double ss = 0.0;
      for (double v : values) ss += (v - mean) * (v - mean);
      const double sigma = std::sqrt(ss / static_cast<double>(values.size()));
      NumericInterval body{f, mean - 3.0 * sigma, mean + 3.0 * sigma, true, true};
      const double coverage = support(PredicateBody(body), d);
      out.push_back({body, coverage});
    }
  }
  return out;
}

double accuracy_score(double support, double confidence, const LearningConfig& config) {
  return (support - config.theta) / (1.0 - config.theta) +
         config.lambda * (confidence - config.gamma) / (1.0 - config.gamma);
}

RuleBook build_rulebook(Schema schema, std::vector<Predicate> predicates, std::vector<Par> mined,
                        const std::vector<UnivariatePar>& univariate,
                        const LearningConfig& config) {
  for (std::size_t i = 0; i < predicates.size(); ++i)
    if (predicates[i].id != static_cast<PredicateId>(i))
      throw std::logic_error("predicate ids must be dense and ordered");

  RuleBook rb;
  rb.schema = std::move(schema);
  rb.predicates = std::move(predicates);
  rb.config = config;
  rb.rules = std::move(mined);

  for (const auto& u : univariate) {
    PredicateId id = -1;
    for (const auto& p : rb.predicates) {
      if (p.body == u.consequent) {
        id = p.id;
        break;
      }
    }
    if (id < 0) {
      id = static_cast<PredicateId>(rb.predicates.size());
      rb.predicates.push_back({id, u.consequent});
    }
    Par rule;
    rule.consequent = id;
    rule.support = u.coverage;
    rule.confidence = u.coverage;
    rb.rules.push_back(std::move(rule));
  }

  for (auto& rule : rb.rules)
    rule.score = accuracy_score(rule.support, rule.confidence, config);

  std::sort(rb.rules.begin(), rb.rules.end(), [](const Par& a, const Par& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.antecedent.size() != b.antecedent.size())
      return a.antecedent.size() < b.antecedent.size();
    if (a.antecedent != b.antecedent) return a.antecedent < b.antecedent;
    return a.consequent < b.consequent;
  });

  std::set<std::pair<ItemSet, PredicateId>> seen;
  std::vector<Par> unique_rules;
  unique_rules.reserve(rb.rules.size());
  for (auto& rule : rb.rules)
    if (seen.emplace(rule.antecedent, rule.consequent).second)
      unique_rules.push_back(std::move(rule));
  rb.rules = std::move(unique_rules);

  if (rb.rules.empty())
    std::cerr << "warning: rulebook is empty; every explanation will come back empty\n";
  return rb;
}

RuleBook learn_rulebook(const Dataset& train, const LearningConfig& config) {
  config.validate();
  train.schema.validate();
  if (train.rows.empty()) throw Error("cannot learn from an empty dataset");

  const auto cats = train.schema.categorical_indices();
  const auto nums = train.schema.numeric_indices();

  std::vector<PredicateBody> bodies =
      generate_categorical_predicates(train, config.theta, cats);
  std::vector<PredicateBody> numeric_bodies;
  switch (config.discretizer) {
    case Discretizer::Dependency:
      numeric_bodies = generate_numeric_predicates(train, config.theta, cats, nums);
      break;
    case Discretizer::Uniform:
      numeric_bodies = generate_uniform_bin_predicates(train, nums);
      break;
    case Discretizer::KMeans:
      numeric_bodies = generate_kmeans_bin_predicates(train, nums);
      break;
  }
  bodies.insert(bodies.end(), std::make_move_iterator(numeric_bodies.begin()),
                std::make_move_iterator(numeric_bodies.end()));

  std::vector<Predicate> predicates;
  predicates.reserve(bodies.size());
  for (std::size_t i = 0; i < bodies.size(); ++i)
    predicates.push_back({static_cast<PredicateId>(i), std::move(bodies[i])});

  const auto transactions = encode_transactions(train, predicates);
  const auto frequent =
      mine_frequent_predicate_sets(transactions, config.theta, config.max_antecedents + 1);
  auto mined = generate_pars(frequent, config.gamma);
  const auto univariate = generate_univariate_pars(train);
  return build_rulebook(train.schema, std::move(predicates), std::move(mined), univariate,
                        config);
}

}  // namespace pars
