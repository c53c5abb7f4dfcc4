#include "pars/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <set>
#include <stdexcept>

#include "pars/rng.hpp"

namespace pars {

TrainingStats compute_training_stats(const Dataset& train) {
  TrainingStats stats;
  const std::size_t n_features = train.schema.size();
  stats.mean.assign(n_features, 0.0);
  stats.stddev.assign(n_features, 0.0);
  stats.categories.resize(n_features);
  for (std::size_t f = 0; f < n_features; ++f) {
    if (train.schema.features[f].kind == FeatureKind::Numeric) {
      const auto values = train.numeric_column(f);
      double mean = 0.0;
      for (double v : values) mean += v;
      mean /= static_cast<double>(values.size());
      double ss = 0.0;
      for (double v : values) ss += (v - mean) * (v - mean);
      stats.mean[f] = mean;
      stats.stddev[f] = std::sqrt(ss / static_cast<double>(values.size()));
    } else {
      std::set<std::string> tokens;
      for (const auto& row : train.rows) tokens.insert(cell_category(row[f]));
      stats.categories[f].assign(tokens.begin(), tokens.end());
    }
  }
  return stats;
}

namespace {

bool perturbable(const Schema& schema, const TrainingStats& stats, const Instance& row,
                 std::size_t f) {
  if (schema.features[f].kind == FeatureKind::Numeric) return stats.stddev[f] > 0.0;
  const auto& cats = stats.categories[f];
  if (cats.empty()) return false;
  if (cats.size() > 1) return true;
  return is_missing(row[f]) || cats.front() != cell_category(row[f]);
}

// Perturbs up to `m` uniformly chosen perturbable features in place;
// returns the names of the features actually changed.
std::vector<std::string> perturb_features(Instance& row, const Schema& schema,
                                          const TrainingStats& stats, std::size_t m, Rng& rng) {
  std::vector<std::size_t> order(schema.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  rng.shuffle(order);

  std::vector<std::string> changed;
  for (std::size_t f : order) {
    if (changed.size() == m) break;
    if (!perturbable(schema, stats, row, f)) continue;
    if (schema.features[f].kind == FeatureKind::Numeric) {
      const double source = cell_number(row[f]);
      double value = source;
      for (int attempt = 0; attempt < 8 && value == source; ++attempt) {
        const double sign = rng.coin() ? 1.0 : -1.0;
        value = stats.mean[f] + sign * rng.uniform(3.0 * stats.stddev[f], 6.0 * stats.stddev[f]);
      }
      if (value == source) continue;
      row[f] = value;
    } else {
      std::vector<const std::string*> alternatives;
      for (const auto& token : stats.categories[f])
        if (is_missing(row[f]) || token != cell_category(row[f]))
          alternatives.push_back(&token);
      if (alternatives.empty()) continue;
      row[f] = *alternatives[rng.below(alternatives.size())];
    }
    changed.push_back(schema.features[f].name);
  }
  return changed;
}

}  // namespace

std::vector<PerturbedInstance> perturb_normals(const Dataset& test_normals,
                                               const TrainingStats& stats, std::uint64_t seed) {
  if (test_normals.rows.empty()) throw Error("no normal instances to perturb");
  Rng rng(derive_seed(seed, 2));
  std::vector<PerturbedInstance> out;
  for (std::size_t r = 0; r < test_normals.n_rows(); ++r) {
    const std::size_t m = 1 + static_cast<std::size_t>(rng.below(3));
    PerturbedInstance pi;
    pi.instance = test_normals.rows[r];
    pi.source_row = r;
    pi.ground_truth_features =
        perturb_features(pi.instance, test_normals.schema, stats, m, rng);
    if (!pi.ground_truth_features.empty()) out.push_back(std::move(pi));
  }
  return out;
}

std::vector<int> rules_as_detector(const RuleBook& rb, const std::vector<Par>& pars,
                                   const Dataset& data) {
  if (pars.empty()) throw Error("rules_as_detector needs at least one rule");
  std::vector<int> out;
  out.reserve(data.n_rows());
  for (const auto& row : data.rows) {
    int hit = 0;
    for (const auto& rule : pars) {
      if (violates(rule, row, rb.predicates)) {
        hit = 1;
        break;
      }
    }
    out.push_back(hit);
  }
  return out;
}

Prf precision_recall_f1(const std::vector<int>& preds, const std::vector<int>& labels) {
  if (preds.size() != labels.size())
    throw std::logic_error("precision_recall_f1: length mismatch");
  std::size_t tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    if (preds[i] == 1 && labels[i] == 1) ++tp;
    else if (preds[i] == 1) ++fp;
    else if (labels[i] == 1) ++fn;
  }
  Prf out;
  out.precision = tp + fp == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
  out.recall = tp + fn == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
  out.f1 = out.precision + out.recall == 0.0
               ? 0.0
               : 2.0 * out.precision * out.recall / (out.precision + out.recall);
  return out;
}

double hit_rate(const std::vector<std::string>& gf, const std::vector<std::string>& suspects,
                int p_percent) {
  if (gf.empty()) throw Error("hit_rate needs a non-empty ground-truth feature set");
  const std::size_t window =
      static_cast<std::size_t>(p_percent) * gf.size() / 100;  // floor
  const std::size_t limit = std::min(window, suspects.size());
  std::size_t hits = 0;
  for (std::size_t i = 0; i < limit; ++i)
    if (std::find(gf.begin(), gf.end(), suspects[i]) != gf.end()) ++hits;
  return static_cast<double>(hits) / static_cast<double>(gf.size());
}

PofResult pof(const std::vector<Explanation>& explanations, const std::vector<int>& is_tp) {
  if (explanations.size() != is_tp.size()) throw std::logic_error("pof: length mismatch");
  std::size_t tp_total = 0, tp_found = 0, fp_total = 0, fp_found = 0;
  for (std::size_t i = 0; i < explanations.size(); ++i) {
    const bool found = !explanations[i].pars.empty();
    if (is_tp[i] == 1) {
      ++tp_total;
      tp_found += found;
    } else {
      ++fp_total;
      fp_found += found;
    }
  }
  PofResult out;
  if (tp_total > 0) out.tp = static_cast<double>(tp_found) / static_cast<double>(tp_total);
  if (fp_total > 0) out.fp = static_cast<double>(fp_found) / static_cast<double>(fp_total);
  return out;
}

Dataset contaminate_training(const Dataset& train, double proportion, std::uint64_t seed) {
  if (!(proportion >= 0.0 && proportion <= 0.2))
    throw Error("contamination proportion must be in [0, 0.2], got " +
                format_number(proportion));
  Dataset out = train;
  const auto target = static_cast<std::size_t>(
      std::floor(proportion * static_cast<double>(train.n_rows())));
  if (target == 0) return out;

  const TrainingStats stats = compute_training_stats(train);
  Rng rng(derive_seed(seed, 3));
  std::vector<std::size_t> order(train.n_rows());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  rng.shuffle(order);

  std::size_t replaced = 0;
  for (std::size_t r : order) {
    if (replaced == target) break;
    Instance row = train.rows[r];
    const std::size_t m = 1 + static_cast<std::size_t>(rng.below(3));
    if (perturb_features(row, train.schema, stats, m, rng).empty()) continue;
    out.rows[r] = std::move(row);
    ++replaced;
  }
  return out;
}

namespace {
std::string opt_to_string(const std::optional<double>& v, const char* format = "%.4f") {
  if (!v) return "n.a";
  char buf[32];
  std::snprintf(buf, sizeof(buf), format, *v);
  return buf;
}
}  // namespace

std::string render_report(const EvalReport& report) {
  std::string out;
  auto line = [&](const char* name, const std::optional<double>& v) {
    if (v) out += std::string(name) + ": " + opt_to_string(v) + "\n";
  };
  line("precision", report.precision);
  line("recall", report.recall);
  line("f1", report.f1);
  line("hitrate@100%", report.hitrate100);
  line("hitrate@150%", report.hitrate150);
  if (report.pof_tp || report.pof_fp) {
    out += "pof@tps: " + opt_to_string(report.pof_tp) + "\n";
    out += "pof@fps: " + opt_to_string(report.pof_fp) + "\n";
  }
  char buf[64];
  std::snprintf(buf, sizeof(buf), "mean explain time: %.6f s\n", report.mean_explain_seconds);
  out += buf;
  return out;
}

std::string records_to_csv(const std::vector<PerInstanceRecord>& records) {
  std::string out = "instance_id,is_tp,pars_found,hitrate100,hitrate150,explain_seconds\n";
  for (const auto& r : records) {
    out += std::to_string(r.instance_id) + "," + (r.is_tp ? "1" : "0") + "," +
           std::to_string(r.pars_found) + ",";
    if (r.hitrate100) out += format_number(*r.hitrate100);
    out += ",";
    if (r.hitrate150) out += format_number(*r.hitrate150);
    out += "," + format_number(r.explain_seconds) + "\n";
  }
  return out;
}

namespace {
double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}
}  // namespace

EvalOutcome eval_rules_accuracy(const RuleBook& rb, const Dataset& test,
                                const std::vector<int>& labels,
                                const std::vector<std::size_t>& flagged, int k) {
  if (test.n_rows() != labels.size())
    throw std::logic_error("eval_rules_accuracy: label/test length mismatch");
  EvalOutcome out;
  double sum_p = 0, sum_r = 0, sum_f1 = 0, sum_time = 0;
  std::size_t scored = 0;

  for (std::size_t idx : flagged) {
    const auto start = std::chrono::steady_clock::now();
    const Explanation e = explain(rb, test.rows[idx], k);
    const double dt = seconds_since(start);
    sum_time += dt;

    PerInstanceRecord rec;
    rec.instance_id = idx;
    rec.is_tp = labels[idx] == 1;
    rec.pars_found = e.pars.size();
    rec.explain_seconds = dt;
    out.records.push_back(rec);

    if (e.pars.empty()) continue;
    std::vector<int> preds, truth;
    preds.reserve(test.n_rows() - 1);
    for (std::size_t r = 0; r < test.n_rows(); ++r) {
      if (r == idx) continue;  // the explained instance itself is excluded
      int hit = 0;
      for (const auto& rule : e.pars) {
        if (violates(rule, test.rows[r], rb.predicates)) {
          hit = 1;
          break;
        }
      }
      preds.push_back(hit);
      truth.push_back(labels[r]);
    }
    const Prf prf = precision_recall_f1(preds, truth);
    sum_p += prf.precision;
    sum_r += prf.recall;
    sum_f1 += prf.f1;
    ++scored;
  }

  if (scored > 0) {
    out.report.precision = sum_p / static_cast<double>(scored);
    out.report.recall = sum_r / static_cast<double>(scored);
    out.report.f1 = sum_f1 / static_cast<double>(scored);
  }
  if (!flagged.empty())
    out.report.mean_explain_seconds = sum_time / static_cast<double>(flagged.size());
  return out;
}

EvalOutcome eval_hitrate(const RuleBook& rb, const std::vector<PerturbedInstance>& detected,
                         int k) {
  EvalOutcome out;
  double sum100 = 0, sum150 = 0, sum_time = 0;
  for (const auto& pi : detected) {
    const auto start = std::chrono::steady_clock::now();
    const Explanation e = explain(rb, pi.instance, k);
    const double dt = seconds_since(start);
    sum_time += dt;

    const double h100 = hit_rate(pi.ground_truth_features, e.suspected_features, 100);
    const double h150 = hit_rate(pi.ground_truth_features, e.suspected_features, 150);
    sum100 += h100;
    sum150 += h150;

    PerInstanceRecord rec;
    rec.instance_id = pi.source_row;
    rec.is_tp = true;
    rec.pars_found = e.pars.size();
    rec.hitrate100 = h100;
    rec.hitrate150 = h150;
    rec.explain_seconds = dt;
    out.records.push_back(rec);
  }
  if (!detected.empty()) {
    out.report.hitrate100 = sum100 / static_cast<double>(detected.size());
    out.report.hitrate150 = sum150 / static_cast<double>(detected.size());
    out.report.mean_explain_seconds = sum_time / static_cast<double>(detected.size());
  }
  return out;
}

EvalOutcome eval_pof(const RuleBook& rb, const Dataset& test,
                     const std::vector<std::size_t>& flagged, const std::vector<int>& labels,
                     int k) {
  if (test.n_rows() != labels.size())
    throw std::logic_error("eval_pof: label/test length mismatch");
  EvalOutcome out;
  std::vector<Explanation> explanations;
  std::vector<int> is_tp;
  double sum_time = 0;
  for (std::size_t idx : flagged) {
    const auto start = std::chrono::steady_clock::now();
    explanations.push_back(explain(rb, test.rows[idx], k));
    const double dt = seconds_since(start);
    sum_time += dt;

    is_tp.push_back(labels[idx] == 1 ? 1 : 0);
    PerInstanceRecord rec;
    rec.instance_id = idx;
    rec.is_tp = labels[idx] == 1;
    rec.pars_found = explanations.back().pars.size();
    rec.explain_seconds = dt;
    out.records.push_back(rec);
  }
  const PofResult result = pof(explanations, is_tp);
  out.report.pof_tp = result.tp;
  out.report.pof_fp = result.fp;
  if (!flagged.empty())
    out.report.mean_explain_seconds = sum_time / static_cast<double>(flagged.size());
  return out;
}

}  // namespace pars
