#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pars/dataset.hpp"
#include "pars/explain.hpp"
#include "pars/mining.hpp"

namespace pars {

// Per-feature training statistics used by the perturbation machinery:
// population mean/stddev for numeric features, sorted observed tokens for
// categorical ones.
struct TrainingStats {
  std::vector<double> mean;
  std::vector<double> stddev;
  std::vector<std::vector<std::string>> categories;
};

TrainingStats compute_training_stats(const Dataset& train);

struct PerturbedInstance {
  Instance instance;
  std::vector<std::string> ground_truth_features;  // 1..3 names
  std::size_t source_row = 0;
};

// Per instance: perturb m ~ U{1,2,3} uniformly chosen features. Numeric
// values move to mean +/- U(3,6) sigma (training stats); categorical values
// flip to a different observed token. Unperturbable features are resampled;
// an instance with none is skipped.
std::vector<PerturbedInstance> perturb_normals(const Dataset& test_normals,
                                               const TrainingStats& stats, std::uint64_t seed);

// Predicts 1 iff the instance violates at least one of the given rules.
std::vector<int> rules_as_detector(const RuleBook& rb, const std::vector<Par>& pars,
                                   const Dataset& data);

struct Prf {
  double precision = 0.0, recall = 0.0, f1 = 0.0;
};
Prf precision_recall_f1(const std::vector<int>& preds, const std::vector<int>& labels);

// |gf intersect first floor(P% * |gf|) suspects| / |gf|, P in {100, 150}.
double hit_rate(const std::vector<std::string>& gf, const std::vector<std::string>& suspects,
                int p_percent);

struct PofResult {
  std::optional<double> tp, fp;  // empty when the class is absent
};
PofResult pof(const std::vector<Explanation>& explanations, const std::vector<int>& is_tp);

// Replaces floor(proportion * n) uniformly chosen rows with perturbed copies;
// they enter learning unlabeled, as if normal.
Dataset contaminate_training(const Dataset& train, double proportion, std::uint64_t seed);

struct EvalReport {
  std::optional<double> precision, recall, f1;
  std::optional<double> hitrate100, hitrate150;
  std::optional<double> pof_tp, pof_fp;
  double mean_explain_seconds = 0.0;
};
std::string render_report(const EvalReport& report);

struct PerInstanceRecord {
  std::size_t instance_id = 0;
  bool is_tp = false;
  std::size_t pars_found = 0;
  std::optional<double> hitrate100, hitrate150;
  double explain_seconds = 0.0;
};
std::string records_to_csv(const std::vector<PerInstanceRecord>& records);

struct EvalOutcome {
  EvalReport report;
  std::vector<PerInstanceRecord> records;
};

// For each flagged test row: explain it, then use its rules to detect
// anomalies in the remaining test rows. Macro-averages over rows where at
// least one rule was found (empty explanations feed PoF instead).
EvalOutcome eval_rules_accuracy(const RuleBook& rb, const Dataset& test,
                                const std::vector<int>& labels,
                                const std::vector<std::size_t>& flagged, int k);

// HitRate over perturbed instances that the detector actually flagged.
EvalOutcome eval_hitrate(const RuleBook& rb, const std::vector<PerturbedInstance>& detected,
                         int k);

// Probability of finding at least one rule, split by TP/FP.
EvalOutcome eval_pof(const RuleBook& rb, const Dataset& test,
                     const std::vector<std::size_t>& flagged, const std::vector<int>& labels,
                     int k);

}  // namespace pars
