#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "autologit/lattice.hpp"
#include "autologit/model.hpp"
#include "autologit/rng.hpp"
#include "autologit/sampler.hpp"

namespace autologit {

// Average of logistic(x_it' beta) over sites: the mean implied by the
// covariates alone. Reduces to a single logistic for spatially constant X_t.
double large_scale_L(const ModelParams& params, const CovariateSeries& x, int t);

// (1/n) sum_i logistic(x_it' beta + rho2 z_{i,t-1}): the mean given the past,
// excluding the instantaneous spatial term.
double conditional_scale_C(const ModelParams& params, const CovariateSeries& x, int t,
                           std::span<const std::uint8_t> z_prev);

// Fraction of ones in a slice.
double empirical_mean_D(std::span<const std::uint8_t> slice);

enum class TemporalCovariate { None, Linear, Tent };

struct StudyConfig {
  std::string model_id = "custom";
  GridShape shape{20, 20};
  NeighborhoodSpec neighborhood = RectNeighborhood{2, 1};
  int horizon = 50;
  std::vector<CenteringVariant> variants{CenteringVariant::Traditional, CenteringVariant::OneStep,
                                         CenteringVariant::NewCentered};
  std::vector<std::pair<double, double>> rho_grid;  // (rho1, rho2) cells
  int replicates = 100;
  double initial_p = 0.2;
  std::vector<double> beta{-1.3862943611198906};
  TemporalCovariate covariate = TemporalCovariate::None;
  SamplerConfig sampler;
  int threads = 1;

  void validate() const;
  CovariateSeries covariates() const;
};

// (rho1, rho2) in {0.3, 0.5, 0.7}^2 (single-trajectory comparison) and
// {0.5, 0.7}^2 (replicate bands).
std::vector<std::pair<double, double>> trajectory_grid();
std::vector<std::pair<double, double>> band_grid();

// Intercept-only, logistic(beta0) = 0.2, Bernoulli(0.2) start.
StudyConfig model1_study();
// X_t = t, logistic(beta0) = 0.1, beta1 = 0.1, Bernoulli(0.1) start.
StudyConfig model2_study();

struct StudyCell {
  CenteringVariant variant;
  double rho1 = 0.0;
  double rho2 = 0.0;
  std::vector<double> L;                  // t = 0..T
  std::vector<std::vector<double>> C;     // [replicate][t], C[.][0] is NaN (no past)
  std::vector<std::vector<double>> D;     // [replicate][t]
  std::vector<double> lower, median, upper;  // empirical 2.5/50/97.5% of D per t

  double time_averaged_D(std::size_t replicate, int from_t = 1) const;
};

struct StudySeries {
  StudyConfig config;
  std::vector<StudyCell> cells;  // variant-major, then grid order

  const StudyCell& cell(CenteringVariant v, double rho1, double rho2) const;
};

// Cell c (variant-major order) and replicate b use stream rng.split(c).split(b).
StudySeries replicate_study(const StudyConfig& config, const RngStream& rng);

// Linear-interpolated empirical quantile of unsorted values.
double empirical_quantile(std::vector<double> values, double q);

// Tidy rows: variant,rho1,rho2,replicate,t,L,C,D.
void write_study_csv(const std::filesystem::path& path, const StudySeries& series);
// variant,rho1,rho2,t,L,D_lower,D_median,D_upper.
void write_band_csv(const std::filesystem::path& path, const StudySeries& series);

}  // namespace autologit
