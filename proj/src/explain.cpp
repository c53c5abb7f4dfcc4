#include "pars/explain.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>

#include "json.hpp"

namespace pars {

bool violates(const Par& rule, const Instance& x, const std::vector<Predicate>& predicates) {
  for (PredicateId id : rule.antecedent)
    if (!satisfies(predicates[static_cast<std::size_t>(id)].body, x)) return false;
  return !satisfies(predicates[static_cast<std::size_t>(rule.consequent)].body, x);
}

Explanation explain(const RuleBook& rb, const Instance& x, int k) {
  if (k < 1) throw Error("k must be >= 1");
  if (x.size() != rb.schema.size())
    throw Error("instance has " + std::to_string(x.size()) + " values, schema expects " +
                std::to_string(rb.schema.size()));
  Explanation e;
  e.instance = x;
  for (const auto& rule : rb.rules) {
    if (violates(rule, x, rb.predicates)) {
      e.pars.push_back(rule);
      if (static_cast<int>(e.pars.size()) == k) break;
    }
  }
  e.suspected_features = suspected_features(rb, e.pars);
  return e;
}

std::vector<std::string> suspected_features(const RuleBook& rb, const std::vector<Par>& pars) {
  std::vector<std::string> out;
  for (const auto& rule : pars) {
    const auto& body = rb.predicates[static_cast<std::size_t>(rule.consequent)].body;
    for (std::size_t f : predicate_features(body)) {
      const std::string& name = rb.schema.features[f].name;
      if (std::find(out.begin(), out.end(), name) == out.end()) out.push_back(name);
    }
  }
  return out;
}

namespace {

std::string actual_values_clause(const RuleBook& rb, const Par& rule, const Instance& x) {
  std::string out;
  const auto& body = rb.predicates[static_cast<std::size_t>(rule.consequent)].body;
  for (std::size_t f : predicate_features(body)) {
    if (!out.empty()) out += ", ";
    const Cell& cell = x[f];
    out += rb.schema.features[f].name + "=" +
           (is_missing(cell) ? std::string("<missing>") : cell_to_string(cell));
  }
  return out;
}

}  // namespace

std::string render_rule(const RuleBook& rb, const Par& rule) {
  std::string out;
  for (std::size_t i = 0; i < rule.antecedent.size(); ++i) {
    if (i) out += ", ";
    out += to_string(rb.predicates[static_cast<std::size_t>(rule.antecedent[i])].body,
                     rb.schema);
  }
  if (rule.antecedent.empty()) out += "{}";
  out += " -> ";
  out += to_string(rb.predicates[static_cast<std::size_t>(rule.consequent)].body, rb.schema);
  return out;
}

std::string render_text(const RuleBook& rb, const Explanation& e) {
  std::string out;
  if (e.pars.empty()) return "NO PAR FOUND\n";
  for (std::size_t i = 0; i < e.pars.size(); ++i) {
    const Par& rule = e.pars[i];
    char stats[96];
    std::snprintf(stats, sizeof(stats), " (support=%.4f confidence=%.4f score=%.4f)\n",
                  rule.support, rule.confidence, rule.score);
    out += "[" + std::to_string(i + 1) + "] " + render_rule(rb, rule) + stats;

    const std::string consequent_text =
        to_string(rb.predicates[static_cast<std::size_t>(rule.consequent)].body, rb.schema);
    std::string sentence;
    if (rule.antecedent.empty()) {
      sentence = "    " + consequent_text + " should hold";
    } else {
      sentence = "    If ";
      for (std::size_t a = 0; a < rule.antecedent.size(); ++a) {
        if (a) sentence += " and ";
        sentence += to_string(
            rb.predicates[static_cast<std::size_t>(rule.antecedent[a])].body, rb.schema);
      }
      sentence += ", then " + consequent_text + " should hold";
    }
    sentence += "; however, " + actual_values_clause(rb, rule, e.instance) + ".\n";
    out += sentence;
  }
  out += "suspected features: ";
  for (std::size_t i = 0; i < e.suspected_features.size(); ++i) {
    if (i) out += ", ";
    out += e.suspected_features[i];
  }
  out += '\n';
  return out;
}

std::string render_json(const RuleBook& rb, const Explanation& e) {
  nlohmann::ordered_json doc;
  doc["instance"] = nlohmann::ordered_json::object();
  for (std::size_t f = 0; f < rb.schema.size(); ++f) {
    const auto& name = rb.schema.features[f].name;
    const Cell& cell = e.instance[f];
    if (is_missing(cell))
      doc["instance"][name] = nullptr;
    else if (std::holds_alternative<double>(cell))
      doc["instance"][name] = cell_number(cell);
    else
      doc["instance"][name] = cell_category(cell);
  }
  doc["pars"] = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < e.pars.size(); ++i) {
    const Par& rule = e.pars[i];
    nlohmann::ordered_json jr;
    jr["rank"] = i + 1;
    jr["antecedent"] = nlohmann::ordered_json::array();
    for (PredicateId id : rule.antecedent) {
      jr["antecedent"].push_back(
          {{"id", id},
           {"text", to_string(rb.predicates[static_cast<std::size_t>(id)].body, rb.schema)}});
    }
    jr["consequent"] = {
        {"id", rule.consequent},
        {"text",
         to_string(rb.predicates[static_cast<std::size_t>(rule.consequent)].body, rb.schema)}};
    jr["support"] = rule.support;
    jr["confidence"] = rule.confidence;
    jr["score"] = rule.score;
    doc["pars"].push_back(std::move(jr));
  }
  doc["suspected_features"] = e.suspected_features;
  return doc.dump();
}

}  // namespace pars
