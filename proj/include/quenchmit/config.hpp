#ifndef QUENCHMIT_CONFIG_HPP
#define QUENCHMIT_CONFIG_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "quenchmit/model.hpp"
#include "quenchmit/noise.hpp"
#include "quenchmit/observable.hpp"
#include "quenchmit/training.hpp"

namespace quenchmit {

// Everything one experiment run needs; parsed from an INI-style file with
// [model], [initial], [grid], [noise], [experiment], [policy], [observables].
struct ExperimentConfig {
  ModelParams model;
  ProductState initial;
  TimeGrid grid;
  NoiseModel noise;
  std::vector<int> levels = {1, 3};
  std::int64_t shots = 8192;
  int repeats = 6;
  std::vector<std::string> methods = {"raw", "zne", "cdr", "vncdr", "pmcdr"};
  SubstitutionPolicy policy;
  int trainingCount = 50;
  std::vector<Observable> observables;
  std::uint64_t masterSeed = 0;

  void validate() const;
};

ExperimentConfig parse_config(const std::string& iniText);
ExperimentConfig load_config(const std::string& path);

// Normalized key/value rendering of a config; hashed into the run manifest.
std::string config_canonical_text(const ExperimentConfig& config);

}  // namespace quenchmit

#endif
