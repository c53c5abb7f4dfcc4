#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pars/dataset.hpp"

namespace pars {

// Water-tank condition-monitoring fixture. Normal rows obey the interlock
// "Level > 10 and Pump=ON implies Valve=Open" (the pump itself switches ON
// exactly when Level > 10); anomaly rows break it by closing the valve, so
// their one abnormal feature is Valve. Level values avoid (9.5, 10.5) so the
// rule boundary is unambiguous in data.
struct SynthData {
  Dataset data;
  std::vector<int> labels;                                   // 1 = anomaly
  std::vector<std::vector<std::string>> abnormal_features;   // empty for normals
};

SynthData synth_water_tank(std::size_t rows, std::size_t anomalies, std::uint64_t seed);

// Sidecar: row,is_anomaly,abnormal_features (semicolon-joined names).
std::string truth_to_csv(const SynthData& synth);
void save_truth_csv(const SynthData& synth, const std::string& path);

struct Truth {
  std::vector<int> labels;
  std::vector<std::vector<std::string>> abnormal_features;
};
Truth load_truth_csv(const std::string& path);

}  // namespace pars
