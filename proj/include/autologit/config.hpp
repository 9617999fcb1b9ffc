#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "autologit/dataset.hpp"
#include "autologit/estimator.hpp"
#include "autologit/lattice.hpp"
#include "autologit/model.hpp"
#include "autologit/sampler.hpp"
#include "autologit/selector.hpp"
#include "autologit/simstudy.hpp"

namespace autologit {

// Everything a subcommand needs besides its input files. Every key is
// optional in the JSON form; unknown keys are rejected. See docs/config.md.
struct RunConfig {
  std::uint64_t seed = 1;
  int threads = 1;
  std::filesystem::path out = "out";
  std::optional<std::filesystem::path> field;
  std::optional<std::filesystem::path> covariates;

  // Lattice and generating model (simulate), graph for fit.
  GridShape shape{20, 20};
  NeighborhoodSpec neighborhood = RectNeighborhood{2, 1};
  std::optional<NeighborhoodSpec> past_neighborhood;
  ModelParams model;
  int horizon = 15;
  TemporalCovariate covariate = TemporalCovariate::None;
  SamplerConfig sampler;

  // fit
  FitOptions fit;
  int bootstrap_replicates = 0;
  bool bootstrap_reuse_initial_slice = true;

  // select
  std::string candidate_family = "rect";  // rect | ellipse
  std::vector<double> cand_row{1, 2, 3};
  std::vector<double> cand_col{1, 2, 3};
  bool only_col_le_row = true;
  std::vector<double> cand_past_row;
  std::vector<double> cand_past_col;

  // study
  std::string study_preset = "model1";  // model1 | model2 | custom
  StudyConfig study = model1_study();

  // surrogate
  SurrogateConfig surrogate;

  RunConfig();
  void validate() const;
  CandidateSet candidates() const;
};

RunConfig parse_run_config(const std::string& json_text);
RunConfig load_run_config(const std::filesystem::path& path);
// Fully resolved configuration, every key present. Thread count is omitted
// when include_threads is false so artifacts do not depend on it.
std::string run_config_json(const RunConfig& config, bool include_threads = true);

// Replaces the study block with a preset and keeps nothing from the old one.
StudyConfig study_preset(const std::string& name);
// "trajectory" -> {0.3,0.5,0.7}^2, "band" -> {0.5,0.7}^2.
std::vector<std::pair<double, double>> named_grid(const std::string& name);

}  // namespace autologit
