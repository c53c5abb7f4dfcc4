#include "pars/synth.hpp"

#include <algorithm>

#include "pars/rng.hpp"

namespace pars {

SynthData synth_water_tank(std::size_t rows, std::size_t anomalies, std::uint64_t seed) {
  if (rows == 0) throw Error("need at least one row");
  if (anomalies > rows) throw Error("more anomalies than rows requested");

  SynthData out;
  out.data.schema.features = {{"Level", FeatureKind::Numeric},
                              {"Pump", FeatureKind::Categorical},
                              {"Valve", FeatureKind::Categorical},
                              {"Temperature", FeatureKind::Numeric}};

  Rng rng(derive_seed(seed, 4));
  std::vector<int> labels(rows, 0);
  for (std::size_t i = 0; i < anomalies; ++i) labels[i] = 1;
  rng.shuffle(labels);

  // Level stays clear of (9.5, 10.5): below the gap the valve is free,
  // above it the interlock forces Pump=ON and Valve=Open.
  auto normal_level = [&] {
    const double u = rng.uniform(0.0, 19.0);
    return u < 9.5 ? u : u + 1.0;
  };
  auto high_level = [&] { return rng.uniform(10.5, 20.0); };

  for (std::size_t r = 0; r < rows; ++r) {
    Instance row(4);
    const double temperature = 25.0 + 2.0 * rng.gaussian();
    if (labels[r] == 1) {
      row[0] = high_level();
      row[1] = std::string("ON");
      row[2] = std::string("Close");  // the planted violation
      row[3] = temperature;
      out.abnormal_features.push_back({"Valve"});
    } else {
      const double level = normal_level();
      row[0] = level;
      row[1] = std::string(level > 10.0 ? "ON" : "OFF");
      row[2] = std::string(level > 10.0 ? "Open" : (rng.coin() ? "Open" : "Close"));
      row[3] = temperature;
      out.abnormal_features.push_back({});
    }
    out.data.rows.push_back(std::move(row));
  }
  out.labels = std::move(labels);
  return out;
}

std::string truth_to_csv(const SynthData& synth) {
  std::string out = "row,is_anomaly,abnormal_features\n";
  for (std::size_t r = 0; r < synth.labels.size(); ++r) {
    std::string joined;
    for (std::size_t i = 0; i < synth.abnormal_features[r].size(); ++i) {
      if (i) joined += ';';
      joined += synth.abnormal_features[r][i];
    }
    out += std::to_string(r) + "," + std::to_string(synth.labels[r]) + "," +
           csv_quote(joined) + "\n";
  }
  return out;
}

void save_truth_csv(const SynthData& synth, const std::string& path) {
  write_text_file(path, truth_to_csv(synth));
}

Truth load_truth_csv(const std::string& path) {
  auto records = parse_csv(read_text_file(path));
  if (records.empty()) throw Error(path + ": empty truth file");
  Truth truth;
  for (std::size_t r = 1; r < records.size(); ++r) {  // skip header
    if (records[r].size() != 3)
      throw Error(path + ": truth line " + std::to_string(r + 1) +
                  " must be 'row,is_anomaly,abnormal_features'");
    const auto label = parse_number(trim(records[r][1]));
    if (!label || (*label != 0.0 && *label != 1.0))
      throw Error(path + ": is_anomaly must be 0 or 1 on line " + std::to_string(r + 1));
    truth.labels.push_back(static_cast<int>(*label));
    std::vector<std::string> features;
    std::string_view rest = records[r][2];
    while (!rest.empty()) {
      const auto sep = rest.find(';');
      const auto part = trim(rest.substr(0, sep));
      if (!part.empty()) features.emplace_back(part);
      if (sep == std::string_view::npos) break;
      rest.remove_prefix(sep + 1);
    }
    truth.abnormal_features.push_back(std::move(features));
  }
  return truth;
}

}  // namespace pars
