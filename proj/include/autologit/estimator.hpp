#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "autologit/kernels.hpp"
#include "autologit/lattice.hpp"
#include "autologit/model.hpp"
#include "autologit/rng.hpp"
#include "autologit/sampler.hpp"

namespace autologit {

// Which neighbour sum fills the spatial column of the U rows used for the
// sandwich variance. Centered is the regressor that actually enters the
// pseudo-likelihood; Raw reproduces rows built from plain neighbour counts.
enum class SpatialRows { Centered, Raw };

struct FitOptions {
  CenteringVariant variant = CenteringVariant::NewCentered;
  bool fix_rho1_zero = false;
  double initial_rho1 = 1.0;
  int max_em_iterations = 50;
  double em_tolerance = 1e-6;
  int max_qn_iterations = 200;
  double gradient_tolerance = 1e-8;
  SpatialRows sandwich_rows = SpatialRows::Centered;
};

// Design of the pseudo-likelihood: one row per (site, t), t = 1..T, with
// columns [1, X_1..X_p, spatial, past]. The spatial column holds the
// neighbour sums of Z** for the centering parameters last set; everything
// else is fixed by the data.
class PlDesign {
 public:
  PlDesign(const BinaryFieldSeries& z, const CovariateSeries& x, const NeighborGraph& graph);

  std::size_t rows() const { return response_.size(); }
  std::size_t num_covariates() const { return covariates_.size(); }
  // Parameter count p + 3.
  std::size_t num_params() const { return num_covariates() + 3; }
  std::size_t spatial_column() const { return num_covariates() + 1; }
  std::size_t past_column() const { return num_covariates() + 2; }

  // Spatial column = sum_{j in N_i} (Z_jt - offset_jt) with offsets of
  // `centering.variant` evaluated at `centering`.
  void set_centered_sums(const ModelParams& centering);
  void set_raw_sums();
  std::span<const double> spatial() const { return spatial_; }
  std::span<const double> raw_sums() const { return raw_sums_; }
  std::span<const double> response() const { return response_; }

  // Full design, or the design with the spatial column dropped.
  kernels::DesignView view(bool with_spatial = true) const;
  bool spatial_is_zero() const;

  // Derivative of the centered sums with respect to theta (rows x (p+3),
  // column-major), used by the unfrozen gradient.
  std::vector<double> centered_sum_jacobian(const ModelParams& centering) const;

 private:
  void update_column_pointers();

  const BinaryFieldSeries* z_ = nullptr;
  const CovariateSeries* x_ = nullptr;
  const NeighborGraph* graph_ = nullptr;
  std::size_t sites_ = 0;
  int horizon_ = 0;
  std::vector<double> intercept_;
  std::vector<std::vector<double>> covariates_;
  std::vector<double> spatial_;
  std::vector<double> past_;
  std::vector<double> raw_sums_;
  std::vector<double> response_;
  std::vector<const double*> all_columns_;
  std::vector<const double*> no_spatial_columns_;
};

double pseudo_log_likelihood(const ModelParams& params, const BinaryFieldSeries& z, const CovariateSeries& x,
                             const NeighborGraph& graph);

// Gradient of the log pseudo-likelihood in (beta, rho1, rho2). With
// centering_fixed the Z** are treated as constants (the M-step objective);
// otherwise their dependence on theta is differentiated too.
std::vector<double> pl_gradient(const ModelParams& params, const BinaryFieldSeries& z, const CovariateSeries& x,
                                const NeighborGraph& graph, bool centering_fixed = true);

struct MStepResult {
  ModelParams params;
  double loglik_start = 0.0;
  double loglik_end = 0.0;
  int iterations = 0;
};

// BFGS maximisation of the pseudo-likelihood with the spatial column frozen
// as currently set in `design`. With fix_rho1_zero the spatial column is
// dropped and rho1 stays 0.
MStepResult maximize_pl_step(const PlDesign& design, const ModelParams& init, const FitOptions& options);

struct EmIteration {
  int iteration = 0;
  double pl_frozen_start = 0.0;  // log-PL with this iteration's Z**, at theta^{l-1}
  double pl_frozen_end = 0.0;    // same objective at theta^l
  double pl_exact = 0.0;         // log-PL with Z** recomputed at theta^l
  int qn_iterations = 0;
  std::vector<double> theta;
};

struct FitResult {
  ModelParams params;
  std::vector<std::string> parameter_names;
  double pl_value = 0.0;
  Eigen::MatrixXd information;    // U'WU
  Eigen::MatrixXd cov_sandwich;   // (U'WU)^{-1}
  std::optional<Eigen::MatrixXd> cov_bootstrap;
  int bootstrap_replicates = 0;
  std::vector<double> stage1_theta;  // (beta, rho2) of the rho1 = 0 fit
  int em_iterations = 0;
  bool converged = false;
  std::vector<EmIteration> trace;

  std::vector<double> sd_sandwich() const;
  std::vector<double> sd_bootstrap() const;
};

FitResult empl_fit(const BinaryFieldSeries& z, const CovariateSeries& x, const NeighborGraph& graph,
                   const FitOptions& options = {});

struct SandwichResult {
  Eigen::MatrixXd information;
  Eigen::MatrixXd covariance;
};

// Inverse of U'WU at the fitted parameters with W = diag(p(1-p)).
// Throws NumericalError naming the collinear columns when U'WU is singular.
SandwichResult variance_sandwich(const ModelParams& params, const BinaryFieldSeries& z, const CovariateSeries& x,
                                 const NeighborGraph& graph, SpatialRows rows = SpatialRows::Centered,
                                 bool rho1_fixed_zero = false);

struct BootstrapOptions {
  int replicates = 100;
  int threads = 1;
  SamplerConfig sampler;
  // Start every replicate from the observed initial slice (conditional
  // bootstrap); otherwise from Bernoulli(observed slice-0 mean).
  bool reuse_initial_slice = true;
  // Diagnostic: every replicate uses stream 0.
  bool single_stream = false;
};

struct BootstrapResult {
  Eigen::MatrixXd covariance;
  std::vector<std::vector<double>> estimates;  // successful replicates, in replicate order
  std::vector<std::pair<int, std::string>> failures;
};

BootstrapResult bootstrap_variance(const FitResult& fit, const BinaryFieldSeries& observed, const CovariateSeries& x,
                                   const NeighborGraph& graph, const RngStream& rng,
                                   const BootstrapOptions& boot = {}, const FitOptions& options = {});

// Sample covariance (divisor B - 1) of row vectors.
Eigen::MatrixXd empirical_covariance(const std::vector<std::vector<double>>& rows);

std::vector<std::string> parameter_names(const CovariateSeries& x);

}  // namespace autologit
