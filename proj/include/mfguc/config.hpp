#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mfguc/carleman.hpp"
#include "mfguc/grid.hpp"
#include "mfguc/mfg.hpp"

namespace mfguc::config {

struct GeometryBlock {
  geometry::DomainSpec domain;
  geometry::WeightParameters weight;
};

struct CarlemanBlock {
  double s_min = 1.0;
  /// Empty means the overflow-guard limit of the grid.
  std::optional<double> s_max;
  int s_steps = 40;
  carleman::Estimate estimate = carleman::Estimate::lemma1_k1;
  /// bump | case | pair
  std::string input = "bump";
  bool time_reversed = false;
  carleman::BoundaryFunctionalParams boundary;
};

struct UCBlock {
  double s_min = 1.0;
  double s_max = 50.0;
  int s_steps = 50;
  std::optional<double> rho;
  double tol_gamma = 1e-10;
  std::vector<double> noise_levels{1e-1, 1e-2, 1e-3};
  double T = 1.0;
  int t0_count = 10;
  double s_reconstruct = 2.0;
  double slack_constant = 1.0;
  /// layer | zero
  std::string perturbation = "layer";
  double layer = 0.2;
};

struct RunBlock {
  std::uint64_t seed = 0;
  std::string output_dir = "mfguc-out";
  unsigned workers = 1;
};

struct ExperimentConfig {
  GeometryBlock geometry;
  disc::GridSize grid;
  std::string case_id = "1d-nonlinear";
  mfg::SolverOptions solver;
  int mms_levels = 3;
  CarlemanBlock carleman;
  UCBlock uc;
  RunBlock run;
  /// Effective key/value pairs after defaults, file and overrides.
  std::map<std::string, std::string> values;

  /// FNV-1a over the sorted effective pairs, run.output_dir and run.workers excluded.
  std::string hash() const;
};

/// Every recognised key with its default, as "section.key" -> value.
const std::map<std::string, std::string>& defaults();

/// Reads an INI file (optional) and applies "section.key=value" overrides.
/// Unknown keys and malformed values throw ConfigError.
ExperimentConfig load(const std::optional<std::string>& path, const std::vector<std::string>& overrides = {});
ExperimentConfig from_values(std::map<std::string, std::string> values);

/// Cross-block checks that do not depend on the subcommand.
void validate(const ExperimentConfig& cfg);

/// Time-horizon checks for the unique-continuation commands.
void validate_horizon(const ExperimentConfig& cfg);

std::uint64_t fnv1a(const std::string& text);

}  // namespace mfguc::config
