#include <algorithm>
#include <limits>
#include <thread>

#include "doctest.h"
#include "pars/explain.hpp"
#include "pars/rng.hpp"
#include "test_util.hpp"

using namespace pars;

namespace {

// The water-tank rulebook from the worked example: Level>10, Pump=ON ->
// Valve=Open, plus a univariate seen-values rule for Pump.
RuleBook table_rulebook() {
  const double inf = std::numeric_limits<double>::infinity();
  RuleBook rb;
  rb.schema.features = {{"Level", FeatureKind::Numeric},
                        {"Pump", FeatureKind::Categorical},
                        {"Valve", FeatureKind::Categorical},
                        {"Temperature", FeatureKind::Numeric}};
  rb.predicates = {
      {0, NumericInterval{0, 10.0, inf, false, false}},  // Level > 10
      {1, CategoryIn{1, {"ON"}}},
      {2, CategoryIn{2, {"Open"}}},
      {3, CategoryIn{1, {"OFF", "ON"}}},                 // univariate Pump
      {4, NumericInterval{3, 20.0, 30.0, true, true}},   // Temperature band
  };
  Par tank;
  tank.antecedent = {0, 1};
  tank.consequent = 2;
  tank.support = 0.25;
  tank.confidence = 1.0;
  Par pump_domain;
  pump_domain.consequent = 3;
  pump_domain.support = 1.0;
  pump_domain.confidence = 1.0;
  Par temp_band;
  temp_band.antecedent = {1};
  temp_band.consequent = 4;
  temp_band.support = 0.4;
  temp_band.confidence = 0.92;
  rb.rules = {pump_domain, tank, temp_band};  // scored & sorted below
  for (auto& r : rb.rules) r.score = accuracy_score(r.support, r.confidence, rb.config);
  std::sort(rb.rules.begin(), rb.rules.end(),
            [](const Par& a, const Par& b) { return a.score > b.score; });
  return rb;
}

}  // namespace

TEST_CASE("violation semantics on the worked example") {
  const RuleBook rb = table_rulebook();
  const Par* tank = nullptr;
  for (const auto& r : rb.rules)
    if (r.antecedent == ItemSet{0, 1}) tank = &r;
  REQUIRE(tank != nullptr);

  const Instance anomaly = {11.1, std::string("ON"), std::string("Close"), 25.0};
  CHECK(violates(*tank, anomaly, rb.predicates));

  const Instance pump_off = {11.1, std::string("OFF"), std::string("Close"), 25.0};
  CHECK(!violates(*tank, pump_off, rb.predicates));  // antecedent unsatisfied

  // Univariate rule: vacuous antecedent, violated by an unseen token.
  const Par* domain = nullptr;
  for (const auto& r : rb.rules)
    if (r.antecedent.empty()) domain = &r;
  REQUIRE(domain != nullptr);
  CHECK(violates(*domain, Instance{1.0, std::string("BROKEN"), std::string("Open"), 25.0},
                 rb.predicates));
  CHECK(!violates(*domain, anomaly, rb.predicates));
}

TEST_CASE("explain scans in score order and stops at k") {
  const RuleBook rb = table_rulebook();
  const Instance anomaly = {11.1, std::string("ON"), std::string("Close"), 35.0};
  // Violates the tank rule and the temperature rule, not the pump domain.

  const Explanation top2 = explain(rb, anomaly, 2);
  REQUIRE(top2.pars.size() == 2);
  CHECK(top2.pars[0].consequent == 2);
  CHECK(top2.pars[1].consequent == 4);
  CHECK(top2.pars[0].score >= top2.pars[1].score);

  const Explanation top1 = explain(rb, anomaly, 1);
  REQUIRE(top1.pars.size() == 1);
  CHECK(top1.pars[0].consequent == top2.pars[0].consequent);

  CHECK(top2.suspected_features == std::vector<std::string>{"Valve", "Temperature"});
  CHECK_THROWS_AS(explain(rb, anomaly, 0), Error);
}

TEST_CASE("normal instances explain to nothing") {
  const RuleBook rb = table_rulebook();
  const Explanation e =
      explain(rb, Instance{5.0, std::string("OFF"), std::string("Close"), 25.0}, 5);
  CHECK(e.pars.empty());
  CHECK(e.suspected_features.empty());
  CHECK(render_text(rb, e) == "NO PAR FOUND\n");
}

TEST_CASE("explain equals filter-then-take-k and is prefix-monotone") {
  Rng rng(909);
  Dataset d = testutil::random_dataset(rng, 150, 2, 2, 2);
  LearningConfig config;
  config.theta = 0.05;
  config.gamma = 0.5;
  const RuleBook rb = learn_rulebook(d, config);

  for (int trial = 0; trial < 30; ++trial) {
    Instance x;  // schema order: num0, num1, cat0, cat1
    x.emplace_back(rng.uniform(-15.0, 15.0));
    x.emplace_back(rng.uniform(-15.0, 15.0));
    x.emplace_back("t" + std::to_string(rng.below(3)));
    x.emplace_back("t" + std::to_string(rng.below(3)));

    std::vector<Par> all_violated;
    for (const auto& rule : rb.rules)
      if (violates(rule, x, rb.predicates)) all_violated.push_back(rule);

    for (int k : {1, 3, 5, 50}) {
      const Explanation e = explain(rb, x, k);
      const std::size_t expect = std::min<std::size_t>(all_violated.size(), k);
      REQUIRE(e.pars.size() == expect);
      for (std::size_t i = 0; i < expect; ++i) CHECK(e.pars[i] == all_violated[i]);
    }
    // Monotonicity: k+1 extends k.
    const Explanation k2 = explain(rb, x, 2);
    const Explanation k3 = explain(rb, x, 3);
    for (std::size_t i = 0; i < k2.pars.size(); ++i) CHECK(k3.pars[i] == k2.pars[i]);
  }
}

TEST_CASE("suspected features deduplicate and follow rank order") {
  RuleBook rb;
  rb.schema.features = {{"A", FeatureKind::Categorical},
                        {"B", FeatureKind::Categorical},
                        {"C", FeatureKind::Categorical}};
  rb.predicates = {
      {0, CategoryIn{0, {"x"}}},
      {1, CategoryIn{0, {"y"}}},
      {2, Disjunction{{CategoryIn{1, {"u"}}, CategoryIn{2, {"v"}}}}},
  };
  Par first;
  first.consequent = 0;
  Par second;
  second.consequent = 1;  // same feature as first
  Par third;
  third.consequent = 2;  // disjunction spanning B and C
  CHECK(suspected_features(rb, {first, second, third}) ==
        std::vector<std::string>{"A", "B", "C"});
}

TEST_CASE("missing values: antecedent rules are skipped, consequent rules fire") {
  const RuleBook rb = table_rulebook();
  // Level missing: the tank rule's antecedent cannot hold.
  const Instance level_missing = {std::monostate{}, std::string("ON"), std::string("Close"),
                                  25.0};
  const Explanation e1 = explain(rb, level_missing, 5);
  for (const auto& rule : e1.pars) CHECK(rule.antecedent != ItemSet{0, 1});

  // Valve missing: the consequent Valve=Open is unsatisfied, so the tank rule
  // fires when the antecedent holds.
  const Instance valve_missing = {11.1, std::string("ON"), std::monostate{}, 25.0};
  const Explanation e2 = explain(rb, valve_missing, 5);
  bool tank_found = false;
  for (const auto& rule : e2.pars)
    if (rule.antecedent == ItemSet{0, 1}) tank_found = true;
  CHECK(tank_found);
}

TEST_CASE("explain is reentrant over a shared rulebook") {
  Rng rng(1717);
  Dataset d = testutil::random_dataset(rng, 200, 2, 2, 2);
  LearningConfig config;
  config.theta = 0.05;
  config.gamma = 0.5;
  const RuleBook rb = learn_rulebook(d, config);

  std::vector<Instance> probes;
  for (int i = 0; i < 64; ++i) {
    Instance x;
    x.emplace_back(rng.uniform(-15.0, 15.0));
    x.emplace_back(rng.uniform(-15.0, 15.0));
    x.emplace_back("t" + std::to_string(rng.below(3)));
    x.emplace_back("t" + std::to_string(rng.below(3)));
    probes.push_back(std::move(x));
  }
  std::vector<Explanation> expected;
  for (const auto& x : probes) expected.push_back(explain(rb, x, 5));

  std::vector<std::vector<Explanation>> results(4);
  std::vector<std::thread> threads;
  for (int t = 0; t < 4; ++t) {
    threads.emplace_back([&, t] {
      for (const auto& x : probes) results[t].push_back(explain(rb, x, 5));
    });
  }
  for (auto& t : threads) t.join();
  for (const auto& batch : results) {
    REQUIRE(batch.size() == expected.size());
    for (std::size_t i = 0; i < batch.size(); ++i) {
      CHECK(batch[i].pars == expected[i].pars);
      CHECK(batch[i].suspected_features == expected[i].suspected_features);
    }
  }
}

TEST_CASE("text rendering names the suspected feature") {
  const RuleBook rb = table_rulebook();
  const Instance anomaly = {11.1, std::string("ON"), std::string("Close"), 25.0};
  const std::string text = render_text(rb, explain(rb, anomaly, 5));
  CHECK(text.find("Level>10") != std::string::npos);
  CHECK(text.find("Pump=ON") != std::string::npos);
  CHECK(text.find("Valve=Open should hold") != std::string::npos);
  CHECK(text.find("however, Valve=Close") != std::string::npos);
  CHECK(text.find("suspected features: Valve") != std::string::npos);

  const std::string json = render_json(rb, explain(rb, anomaly, 5));
  CHECK(json.find("\"suspected_features\":[\"Valve\"]") != std::string::npos);
}
