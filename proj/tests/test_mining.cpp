#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "pars/mining.hpp"
#include "pars/rng.hpp"
#include "test_util.hpp"

using namespace pars;

namespace {

std::vector<Transaction> random_transactions(Rng& rng, std::size_t rows, int n_items,
                                             double density) {
  std::vector<Transaction> out;
  for (std::size_t r = 0; r < rows; ++r) {
    Transaction t;
    for (int i = 0; i < n_items; ++i)
      if (rng.unit() < density) t.push_back(i);
    out.push_back(std::move(t));
  }
  return out;
}

}  // namespace

TEST_CASE("frequent sets on the worked micro example") {
  const std::vector<Transaction> transactions = {{0, 1}, {0, 1}, {0}, {1}};
  const FrequentSets frequent = mine_frequent_predicate_sets(transactions, 0.4, 2);
  const auto supports = frequent.supports();
  REQUIRE(supports.size() == 3);
  CHECK(supports.at({0}) == doctest::Approx(0.75));
  CHECK(supports.at({1}) == doctest::Approx(0.75));
  CHECK(supports.at({0, 1}) == doctest::Approx(0.5));
}

TEST_CASE("strict threshold semantics") {
  // Item 0 in 99/100 transactions, theta=0.99: 0.99 > 0.99 is false.
  std::vector<Transaction> transactions(100, Transaction{0});
  transactions[0] = {};
  const FrequentSets frequent = mine_frequent_predicate_sets(transactions, 0.99, 2);
  CHECK(frequent.counts.empty());

  transactions[0] = {0};  // now 100/100
  const FrequentSets all = mine_frequent_predicate_sets(transactions, 0.99, 2);
  CHECK(all.counts.size() == 1);
}

TEST_CASE("empty transaction list is an error") {
  CHECK_THROWS_AS(mine_frequent_predicate_sets({}, 0.1, 2), Error);
}

TEST_CASE("fp-growth equals apriori enumeration on random data") {
  Rng rng(2024);
  const double thetas[] = {0.05, 0.1, 0.3};
  for (int trial = 0; trial < 25; ++trial) {
    const auto transactions =
        random_transactions(rng, 20 + rng.below(180), 4 + static_cast<int>(rng.below(9)),
                            0.1 + rng.unit() * 0.6);
    const double theta = thetas[trial % 3];
    const int max_size = 1 + static_cast<int>(rng.below(5));
    const FrequentSets got = mine_frequent_predicate_sets(transactions, theta, max_size);
    const auto want = oracle::apriori_counts(transactions, theta, max_size);
    CHECK(got.counts == want);
  }
}

TEST_CASE("rule generation on the worked example") {
  const std::vector<Transaction> transactions = {{0, 1}, {0, 1}, {0}, {1}};
  const FrequentSets frequent = mine_frequent_predicate_sets(transactions, 0.4, 2);
  const auto rules = generate_pars(frequent, 0.6);
  REQUIRE(rules.size() == 2);
  for (const auto& rule : rules) {
    CHECK(rule.antecedent.size() == 1);
    CHECK(rule.confidence == doctest::Approx(2.0 / 3.0));
    CHECK(rule.support == doctest::Approx(0.5));
    CHECK(rule.consequent != rule.antecedent[0]);
  }
}

TEST_CASE("confidence exactly at gamma is excluded") {
  // {0}: 2 rows, {0,1}: 1 row -> confidence exactly 0.5.
  const std::vector<Transaction> transactions = {{0, 1}, {0}, {2}, {2}};
  const FrequentSets frequent = mine_frequent_predicate_sets(transactions, 0.2, 2);
  const auto rules = generate_pars(frequent, 0.5);
  for (const auto& rule : rules) {
    CHECK(!(rule.antecedent == ItemSet{0} && rule.consequent == 1));
  }
}

TEST_CASE("singleton-only frequent sets generate no rules") {
  const std::vector<Transaction> transactions = {{0}, {1}, {0}, {1}};
  const FrequentSets frequent = mine_frequent_predicate_sets(transactions, 0.1, 3);
  CHECK(generate_pars(frequent, 0.5).empty());
}

TEST_CASE("missing subset support is an internal error") {
  FrequentSets broken;
  broken.n_transactions = 4;
  broken.counts[{0, 1}] = 2;  // {0} and {1} absent
  CHECK_THROWS_AS(generate_pars(broken, 0.5), std::logic_error);
}

TEST_CASE("mined rules equal brute-force enumeration with all contracts") {
  Rng rng(777);
  for (int trial = 0; trial < 15; ++trial) {
    const auto transactions =
        random_transactions(rng, 30 + rng.below(120), 5 + static_cast<int>(rng.below(7)),
                            0.2 + rng.unit() * 0.5);
    const double theta = 0.1;
    const double gamma = 0.5 + rng.unit() * 0.4;
    const int max_antecedents = 4;

    const FrequentSets frequent =
        mine_frequent_predicate_sets(transactions, theta, max_antecedents + 1);
    auto got = generate_pars(frequent, gamma);
    auto want = oracle::brute_force_rules(frequent.counts, transactions.size(), gamma);

    auto key = [](const auto& r) { return std::make_pair(r.antecedent, r.consequent); };
    std::sort(got.begin(), got.end(),
              [&](const auto& a, const auto& b) { return key(a) < key(b); });
    std::sort(want.begin(), want.end(),
              [&](const auto& a, const auto& b) { return key(a) < key(b); });
    REQUIRE(got.size() == want.size());
    for (std::size_t i = 0; i < got.size(); ++i) {
      CHECK(got[i].antecedent == want[i].antecedent);
      CHECK(got[i].consequent == want[i].consequent);
      CHECK(got[i].support == want[i].support);
      CHECK(got[i].confidence == want[i].confidence);
      CHECK(got[i].support > theta);
      CHECK(got[i].confidence > gamma);
      CHECK(got[i].antecedent.size() <= static_cast<std::size_t>(max_antecedents));
      CHECK(!std::binary_search(got[i].antecedent.begin(), got[i].antecedent.end(),
                                got[i].consequent));
    }
  }
}

TEST_CASE("single-consequent decompositions dominate multi-consequent rules") {
  Rng rng(31337);
  for (int trial = 0; trial < 10; ++trial) {
    const auto transactions =
        random_transactions(rng, 40 + rng.below(100), 6, 0.3 + rng.unit() * 0.4);
    const FrequentSets frequent = mine_frequent_predicate_sets(transactions, 0.1, 5);

    for (const auto& [items, count] : frequent.counts) {
      if (items.size() < 3) continue;
      // Treat each unordered pair as a two-predicate consequent.
      for (std::size_t i = 0; i < items.size(); ++i) {
        for (std::size_t j = i + 1; j < items.size(); ++j) {
          ItemSet antecedent;
          for (std::size_t k = 0; k < items.size(); ++k)
            if (k != i && k != j) antecedent.push_back(items[k]);
          const auto ant_count = frequent.counts.at(antecedent);
          const double multi_conf =
              static_cast<double>(count) / static_cast<double>(ant_count);

          for (PredicateId consequent : {items[i], items[j]}) {
            ItemSet single = antecedent;
            single.insert(std::lower_bound(single.begin(), single.end(), consequent),
                          consequent);
            const auto single_count = frequent.counts.at(single);
            const double single_conf =
                static_cast<double>(single_count) / static_cast<double>(ant_count);
            CHECK(single_count >= count);       // support dominance
            CHECK(single_conf >= multi_conf);   // confidence dominance
          }
        }
      }
    }
  }
}

TEST_CASE("univariate rules: seen categories and three-sigma bands") {
  Dataset d;
  d.schema.features = {{"state", FeatureKind::Categorical}, {"v", FeatureKind::Numeric}};
  Rng rng(5);
  for (int i = 0; i < 500; ++i)
    d.rows.push_back({std::string(i % 2 ? "ON" : "OFF"), rng.gaussian()});

  const auto univariate = generate_univariate_pars(d);
  REQUIRE(univariate.size() == 2);

  const auto* cat = std::get_if<CategoryIn>(&univariate[0].consequent);
  REQUIRE(cat != nullptr);
  CHECK(cat->values == std::vector<std::string>{"OFF", "ON"});
  CHECK(univariate[0].coverage == 1.0);
  CHECK(!satisfies(univariate[0].consequent, Instance{std::string("BROKEN"), 0.0}));

  const auto* band = std::get_if<NumericInterval>(&univariate[1].consequent);
  REQUIRE(band != nullptr);
  CHECK(band->lo_closed);
  CHECK(band->hi_closed);
  // A 4-sigma point violates, a 2-sigma point satisfies.
  const double sigma = (band->hi - band->lo) / 6.0;
  const double mu = (band->hi + band->lo) / 2.0;
  CHECK(!satisfies(univariate[1].consequent, Instance{std::string("ON"), mu + 4.0 * sigma}));
  CHECK(satisfies(univariate[1].consequent, Instance{std::string("ON"), mu + 2.0 * sigma}));
}

TEST_CASE("univariate band for a constant feature is the point interval") {
  Dataset d;
  d.schema.features = {{"v", FeatureKind::Numeric}};
  for (int i = 0; i < 10; ++i) d.rows.push_back({7.5});
  const auto univariate = generate_univariate_pars(d);
  const auto* band = std::get_if<NumericInterval>(&univariate[0].consequent);
  REQUIRE(band != nullptr);
  CHECK(band->lo == 7.5);
  CHECK(band->hi == 7.5);
  CHECK(satisfies(univariate[0].consequent, Instance{7.5}));
  CHECK(!satisfies(univariate[0].consequent, Instance{7.5000001}));
  CHECK(univariate[0].coverage == 1.0);
}

TEST_CASE("accuracy score formula") {
  LearningConfig config;
  config.theta = 0.01;
  config.gamma = 0.9;
  config.lambda = 5.0;
  CHECK(accuracy_score(config.theta, 1.0, config) == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(accuracy_score(1.0, 0.98, config) == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(accuracy_score(config.theta, config.gamma, config) == 0.0);
}

TEST_CASE("rulebook ordering, tie-breaks, and deduplication") {
  Schema schema{{{"a", FeatureKind::Categorical}, {"b", FeatureKind::Categorical}}};
  std::vector<Predicate> predicates = {{0, CategoryIn{0, {"x"}}},
                                       {1, CategoryIn{0, {"y"}}},
                                       {2, CategoryIn{1, {"z"}}}};
  LearningConfig config;
  config.theta = 0.1;

  std::vector<Par> mined;
  Par high;  // score (1-theta)/(1-theta) + 5*(1-gamma)/(1-gamma) = 6
  high.antecedent = {0};
  high.consequent = 2;
  high.support = 1.0;
  high.confidence = 1.0;
  Par low;
  low.antecedent = {1};
  low.consequent = 2;
  low.support = 0.4;
  low.confidence = 0.95;
  // Same score as `high` but two antecedents: must sort after it.
  Par wide = high;
  wide.antecedent = {0, 1};
  // Exact duplicate of high with a lower stated support: deduplicated away.
  Par dup = high;
  dup.support = 0.5;
  mined = {low, wide, high, dup};

  const RuleBook rb = build_rulebook(schema, predicates, mined, {}, config);
  REQUIRE(rb.rules.size() == 3);
  CHECK(rb.rules[0].antecedent == ItemSet{0});
  CHECK(rb.rules[0].support == 1.0);  // the higher-scored copy won
  CHECK(rb.rules[1].antecedent == ItemSet{0, 1});
  CHECK(rb.rules[2].antecedent == ItemSet{1});
  CHECK(std::is_sorted(rb.rules.begin(), rb.rules.end(),
                       [](const Par& a, const Par& b) { return a.score > b.score; }));
}

TEST_CASE("univariate consequents join the predicate table once") {
  Schema schema{{{"a", FeatureKind::Categorical}}};
  std::vector<Predicate> predicates = {{0, CategoryIn{0, {"x"}}}};
  std::vector<UnivariatePar> univariate = {{CategoryIn{0, {"x"}}, 1.0},
                                           {CategoryIn{0, {"q"}}, 0.9}};
  const RuleBook rb = build_rulebook(schema, predicates, {}, univariate, LearningConfig{});
  REQUIRE(rb.predicates.size() == 2);  // {"x"} reused, {"q"} appended
  CHECK(rb.rules.size() == 2);
  for (const auto& rule : rb.rules) CHECK(rule.antecedent.empty());
}

TEST_CASE("learning config validation") {
  LearningConfig config;
  config.theta = 1.5;
  CHECK_THROWS_AS(config.validate(), Error);
  config.theta = 0.01;
  config.gamma = 0.0;
  CHECK_THROWS_AS(config.validate(), Error);
  config.gamma = 0.9;
  config.lambda = 0.0;
  CHECK_THROWS_AS(config.validate(), Error);
  config.lambda = 5.0;
  config.max_antecedents = 0;
  CHECK_THROWS_AS(config.validate(), Error);
  CHECK(LearningConfig::default_theta(100) == doctest::Approx(0.1));
  CHECK(LearningConfig::default_theta(10000) == doctest::Approx(0.01));
}
