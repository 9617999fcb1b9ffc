#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "autologit/lattice.hpp"
#include "autologit/model.hpp"
#include "autologit/rng.hpp"
#include "autologit/sampler.hpp"

namespace autologit {

// Reserved covariate name for the past-neighbourhood count column.
inline constexpr const char* kPastNeighborsColumn = "past_neighbors";

struct Dataset {
  GridShape shape;
  BinaryFieldSeries z;
  CovariateSeries x;
  // Free-form provenance (generator name, seed, true parameters), serialised
  // as JSON text.
  std::string provenance_json;

  int horizon() const { return z.horizon(); }
};

// Field CSV: header t,row,col,z with one line per cell for t = 0..T, rows and
// cols zero-based. Covariate CSV: header t,name1..namep (spatially constant)
// or t,row,col,name1..namep. Without a covariate file the model is
// intercept-only.
Dataset load_dataset(const std::filesystem::path& field_path,
                     const std::optional<std::filesystem::path>& covariate_path = std::nullopt);

void save_field_csv(const std::filesystem::path& path, const GridShape& shape, const BinaryFieldSeries& z);
// Writes the spatially constant layout when the series allows it.
void save_covariates_csv(const std::filesystem::path& path, const GridShape& shape, const CovariateSeries& x);

// Column laid out [t][site]: value at (i, t) is sum_{j in N^p_i} Z_{j,t-1};
// t = 0 has no past and is 0.
std::vector<double> build_past_neighbor_covariate(const BinaryFieldSeries& z, const NeighborGraph& past_graph);
// Copy of x with the past-neighbour column appended under kPastNeighborsColumn.
CovariateSeries with_past_neighbor_covariate(const CovariateSeries& x, const BinaryFieldSeries& z,
                                             const NeighborGraph& past_graph);

struct SurrogateConfig {
  GridShape shape{30, 66};
  int years = 14;  // slices t = 0..years-1
  double beta0 = -3.04;
  double beta_past = 0.178;
  double rho1 = 0.135;
  double rho2 = 2.28;
  NeighborhoodSpec instantaneous = EllipseNeighborhood{5.0, 4.0};
  NeighborhoodSpec past = EllipseNeighborhood{1.0, 1.0};
  double initial_p = 0.0456;
  // Defaults to 10 Gibbs sweeps per year started from the previous year.
  // At these parameters the exact slice law is bistable and puts almost all
  // of its mass near full infection, so exact draws would not resemble a
  // low-prevalence vineyard; short chains stay in the low-prevalence state.
  SamplerConfig sampler;

  SurrogateConfig();
  ModelParams truth() const;
};

// Synthetic vineyard-style data: intercept plus the past-neighbour count
// covariate, centered instantaneous autoregression and autoregression on the
// vine's own past state. Slice t is drawn after the covariate at t has been
// computed from slice t-1.
Dataset generate_surrogate_vineyard(const SurrogateConfig& config, const RngStream& rng);

}  // namespace autologit
