// Command-line frontend: learn a rulebook, explain instances, run
// evaluations, and generate the synthetic water-tank fixture.

#include <chrono>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pars/dataset.hpp"
#include "pars/detector.hpp"
#include "pars/eval.hpp"
#include "pars/explain.hpp"
#include "pars/mining.hpp"
#include "pars/rng.hpp"
#include "pars/rulebook_io.hpp"
#include "pars/synth.hpp"

namespace {

using namespace pars;

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

struct LearnOptions {
  std::string train_path, schema_path, out_path;
  double theta = -1.0;  // < 0 means max(10/n, 0.01)
  double gamma = 0.9;
  double lambda = 5.0;
  int max_antecedents = 4;
  std::string discretizer = "dependency";
  std::uint64_t seed = 0;
};

int cmd_learn(const LearnOptions& opt) {
  std::optional<Schema> schema;
  if (!opt.schema_path.empty()) schema = load_schema_sidecar(opt.schema_path);
  const Dataset train = load_csv(opt.train_path, schema);

  LearningConfig config;
  config.theta = opt.theta < 0.0 ? LearningConfig::default_theta(train.n_rows()) : opt.theta;
  config.gamma = opt.gamma;
  config.lambda = opt.lambda;
  config.max_antecedents = opt.max_antecedents;
  config.seed = opt.seed;
  const auto discretizer = discretizer_from_string(opt.discretizer);
  if (!discretizer) throw Error("unknown discretizer '" + opt.discretizer + "'");
  config.discretizer = *discretizer;
  config.validate();

  const auto start = std::chrono::steady_clock::now();
  const RuleBook rb = learn_rulebook(train, config);
  const double elapsed = seconds_since(start);

  save_rulebook(rb, opt.out_path);
  std::printf("learned %zu rules over %zu predicates in %.3f s\n", rb.rules.size(),
              rb.predicates.size(), elapsed);
  std::printf("wrote %s\n", opt.out_path.c_str());
  return 0;
}

struct ExplainOptions {
  std::string model_path, input_path, format = "text";
  int k = 5;
};

int cmd_explain(const ExplainOptions& opt) {
  const RuleBook rb = load_rulebook(opt.model_path);
  const Dataset input = load_csv(opt.input_path, rb.schema, MissingPolicy::Allow);

  const bool machine = opt.format == "machine";
  std::string json_out = "[";
  for (std::size_t r = 0; r < input.n_rows(); ++r) {
    const Explanation e = explain(rb, input.rows[r], opt.k);
    if (machine) {
      if (r) json_out += ",";
      json_out += render_json(rb, e);
    } else {
      std::printf("instance %zu:\n%s\n", r, render_text(rb, e).c_str());
    }
  }
  if (machine) {
    json_out += "]\n";
    std::fputs(json_out.c_str(), stdout);
  }
  return 0;
}

struct EvalOptions {
  std::string model_path, test_path, train_path, truth_path, label_column, records_path;
  std::string mode, detector = "iforest";
  std::uint64_t seed = 0;
  int k = 5;
};

struct LabeledData {
  Dataset data;
  std::vector<int> labels;
};

LabeledData load_labeled(const EvalOptions& opt, const Schema& schema) {
  LabeledData out;
  if (!opt.label_column.empty()) {
    auto records = parse_csv(read_text_file(opt.test_path));
    if (records.empty()) throw Error(opt.test_path + ": empty CSV file");
    auto header = records.front();
    records.erase(records.begin());
    std::size_t label_idx = header.size();
    for (std::size_t c = 0; c < header.size(); ++c)
      if (std::string(trim(header[c])) == opt.label_column) label_idx = c;
    if (label_idx == header.size())
      throw Error(opt.test_path + ": no column named '" + opt.label_column + "'");
    header.erase(header.begin() + static_cast<std::ptrdiff_t>(label_idx));
    for (std::size_t r = 0; r < records.size(); ++r) {
      auto& row = records[r];
      if (label_idx >= row.size())
        throw Error(opt.test_path + ": short row " + std::to_string(r + 2));
      const auto v = parse_number(trim(row[label_idx]));
      if (!v || (*v != 0.0 && *v != 1.0))
        throw Error(opt.test_path + ": label must be 0 or 1 at row " + std::to_string(r + 2));
      out.labels.push_back(static_cast<int>(*v));
      row.erase(row.begin() + static_cast<std::ptrdiff_t>(label_idx));
    }
    out.data = dataset_from_cells(header, records, schema);
    return out;
  }
  if (!opt.truth_path.empty()) {
    out.data = load_csv(opt.test_path, schema);
    const Truth truth = load_truth_csv(opt.truth_path);
    if (truth.labels.size() != out.data.n_rows())
      throw Error(opt.truth_path + ": " + std::to_string(truth.labels.size()) +
                  " truth rows for " + std::to_string(out.data.n_rows()) + " test rows");
    out.labels = truth.labels;
    return out;
  }
  throw Error("eval needs labels: pass --truth <file> or --label-column <name>");
}

std::vector<std::size_t> detector_flagged(const EvalOptions& opt, const LabeledData& test,
                                          const Dataset* train) {
  std::vector<std::size_t> flagged;
  if (opt.detector == "labels") {
    for (std::size_t r = 0; r < test.labels.size(); ++r)
      if (test.labels[r] == 1) flagged.push_back(r);
    return flagged;
  }
  if (train == nullptr) throw Error("--detector iforest needs --train");
  const IsolationForest model =
      fit_isolation_forest(*train, 100, 256, derive_seed(opt.seed, 10));
  const auto scores = score_all(model, test.data);
  const double threshold = tune_threshold(scores, test.labels);
  for (std::size_t r = 0; r < scores.size(); ++r)
    if (scores[r] >= threshold) flagged.push_back(r);
  return flagged;
}

void emit(const EvalOutcome& outcome, const std::string& records_path) {
  std::fputs(render_report(outcome.report).c_str(), stdout);
  if (!records_path.empty()) {
    write_text_file(records_path, records_to_csv(outcome.records));
    std::printf("wrote per-instance records to %s\n", records_path.c_str());
  }
}

int cmd_eval(const EvalOptions& opt) {
  const RuleBook rb = load_rulebook(opt.model_path);
  const LabeledData test = load_labeled(opt, rb.schema);

  std::optional<Dataset> train;
  if (!opt.train_path.empty()) train = load_csv(opt.train_path, rb.schema);

  if (opt.mode == "rules-accuracy") {
    const auto flagged = detector_flagged(opt, test, train ? &*train : nullptr);
    std::printf("flagged %zu of %zu test instances\n", flagged.size(), test.data.n_rows());
    emit(eval_rules_accuracy(rb, test.data, test.labels, flagged, opt.k), opt.records_path);
    return 0;
  }

  if (opt.mode == "pof") {
    const auto flagged = detector_flagged(opt, test, train ? &*train : nullptr);
    std::printf("flagged %zu of %zu test instances\n", flagged.size(), test.data.n_rows());
    emit(eval_pof(rb, test.data, flagged, test.labels, opt.k), opt.records_path);
    return 0;
  }

  if (opt.mode == "hitrate") {
    if (!train) throw Error("--mode hitrate needs --train for perturbation statistics");
    Dataset normals;
    normals.schema = test.data.schema;
    for (std::size_t r = 0; r < test.data.n_rows(); ++r)
      if (test.labels[r] == 0) normals.rows.push_back(test.data.rows[r]);
    if (normals.rows.empty()) throw Error("no normal instances in the test set");

    const TrainingStats stats = compute_training_stats(*train);
    auto perturbed = perturb_normals(normals, stats, derive_seed(opt.seed, 11));

    if (opt.detector == "iforest") {
      const IsolationForest model =
          fit_isolation_forest(*train, 100, 256, derive_seed(opt.seed, 10));
      const double threshold = tune_threshold(score_all(model, test.data), test.labels);
      std::vector<PerturbedInstance> detected;
      for (auto& pi : perturbed)
        if (score(model, pi.instance) >= threshold) detected.push_back(std::move(pi));
      perturbed = std::move(detected);
    }
    std::printf("explaining %zu detected perturbed instances\n", perturbed.size());
    emit(eval_hitrate(rb, perturbed, opt.k), opt.records_path);
    return 0;
  }

  if (opt.mode == "noise") {
    if (!train) throw Error("--mode noise needs --train");
    std::printf("proportion  pof@tps  precision  recall  f1\n");
    const std::vector<double> proportions = {0.0, 0.05, 0.10, 0.15, 0.20};
    for (std::size_t i = 0; i < proportions.size(); ++i) {
      const double p = proportions[i];
      const Dataset noisy = contaminate_training(*train, p, derive_seed(opt.seed, 100 + i));
      const RuleBook noisy_rb = learn_rulebook(noisy, rb.config);

      EvalOptions flag_opt = opt;
      std::optional<Dataset> flag_train = noisy;
      const auto flagged = detector_flagged(flag_opt, test, &*flag_train);
      const auto pof_out = eval_pof(noisy_rb, test.data, flagged, test.labels, opt.k);
      const auto acc_out = eval_rules_accuracy(noisy_rb, test.data, test.labels, flagged, opt.k);

      auto fmt = [](const std::optional<double>& v) {
        char buf[16];
        if (!v) return std::string("n.a");
        std::snprintf(buf, sizeof(buf), "%.4f", *v);
        return std::string(buf);
      };
      std::printf("%-11.2f %-8s %-10s %-7s %s\n", p, fmt(pof_out.report.pof_tp).c_str(),
                  fmt(acc_out.report.precision).c_str(), fmt(acc_out.report.recall).c_str(),
                  fmt(acc_out.report.f1).c_str());
    }
    return 0;
  }

  throw Error("unknown eval mode '" + opt.mode +
              "' (expected rules-accuracy, hitrate, pof, or noise)");
}

struct SynthOptions {
  std::string scenario = "water-tank";
  std::string out_path;
  std::size_t rows = 1000;
  std::size_t anomalies = 50;
  std::uint64_t seed = 0;
};

int cmd_synth(const SynthOptions& opt) {
  if (opt.scenario != "water-tank")
    throw Error("unknown scenario '" + opt.scenario + "' (expected water-tank)");
  const SynthData synth = synth_water_tank(opt.rows, opt.anomalies, opt.seed);
  save_csv(synth.data, opt.out_path);
  const std::string truth_path = opt.out_path + ".truth";
  save_truth_csv(synth, truth_path);
  std::printf("wrote %zu rows (%zu anomalies) to %s\n", synth.data.n_rows(), opt.anomalies,
              opt.out_path.c_str());
  std::printf("wrote ground truth to %s\n", truth_path.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Predicate-based association rules for tabular anomaly explanation"};
  app.require_subcommand(1);

  LearnOptions learn_opt;
  auto* learn = app.add_subcommand("learn", "Mine a rulebook from training data");
  learn->add_option("--train", learn_opt.train_path, "Training CSV")->required();
  learn->add_option("--schema", learn_opt.schema_path, "Schema sidecar (name,kind per line)");
  learn->add_option("--theta", learn_opt.theta, "Minimum support (default max(10/n, 0.01))");
  learn->add_option("--gamma", learn_opt.gamma, "Minimum confidence")->capture_default_str();
  learn->add_option("--lambda", learn_opt.lambda, "Confidence weight in the score")->capture_default_str();
  learn->add_option("--max-antecedents", learn_opt.max_antecedents, "Antecedent cap")->capture_default_str();
  learn->add_option("--discretizer", learn_opt.discretizer,
                    "dependency | uniform | kmeans")->capture_default_str();
  learn->add_option("--seed", learn_opt.seed, "Random seed")->capture_default_str();
  learn->add_option("--out", learn_opt.out_path, "Output model path")->required();

  ExplainOptions explain_opt;
  auto* explain_cmd = app.add_subcommand("explain", "Explain anomaly instances");
  explain_cmd->add_option("--model", explain_opt.model_path, "Rulebook file")->required();
  explain_cmd->add_option("--input", explain_opt.input_path, "CSV of instances")->required();
  explain_cmd->add_option("--k", explain_opt.k, "Rules per explanation")->capture_default_str();
  explain_cmd->add_option("--format", explain_opt.format, "text | machine")->capture_default_str();

  EvalOptions eval_opt;
  auto* eval_cmd = app.add_subcommand("eval", "Run an evaluation protocol");
  eval_cmd->add_option("--model", eval_opt.model_path, "Rulebook file")->required();
  eval_cmd->add_option("--test", eval_opt.test_path, "Test CSV")->required();
  eval_cmd->add_option("--mode", eval_opt.mode, "rules-accuracy | hitrate | pof | noise")
      ->required();
  eval_cmd->add_option("--train", eval_opt.train_path,
                       "Training CSV (isolation forest, perturbation stats, noise)");
  eval_cmd->add_option("--truth", eval_opt.truth_path, "Ground-truth sidecar from synth");
  eval_cmd->add_option("--label-column", eval_opt.label_column, "0/1 label column in --test");
  eval_cmd->add_option("--detector", eval_opt.detector, "iforest | labels")->capture_default_str();
  eval_cmd->add_option("--seed", eval_opt.seed, "Random seed")->capture_default_str();
  eval_cmd->add_option("--k", eval_opt.k, "Rules per explanation")->capture_default_str();
  eval_cmd->add_option("--records", eval_opt.records_path, "Per-instance records CSV path");

  SynthOptions synth_opt;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic fixture");
  synth_cmd->add_option("--scenario", synth_opt.scenario, "water-tank")->capture_default_str();
  synth_cmd->add_option("--rows", synth_opt.rows, "Total rows")->capture_default_str();
  synth_cmd->add_option("--anomalies", synth_opt.anomalies, "Anomalous rows")->capture_default_str();
  synth_cmd->add_option("--seed", synth_opt.seed, "Random seed")->capture_default_str();
  synth_cmd->add_option("--out", synth_opt.out_path, "Output CSV path")->required();

  try {
    app.parse(argc, argv);
    if (learn->parsed()) return cmd_learn(learn_opt);
    if (explain_cmd->parsed()) return cmd_explain(explain_opt);
    if (eval_cmd->parsed()) return cmd_eval(eval_opt);
    if (synth_cmd->parsed()) return cmd_synth(synth_opt);
    return 1;
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;  // help/version exit cleanly, usage errors -> 1
  } catch (const pars::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return 2;
  }
}
