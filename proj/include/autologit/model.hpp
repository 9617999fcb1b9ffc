#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "autologit/lattice.hpp"

namespace autologit {

enum class CenteringVariant { Traditional, OneStep, NewCentered };

std::string to_string(CenteringVariant v);
CenteringVariant parse_variant(const std::string& name);

inline double logistic(double eta) {
  if (eta >= 0.0) return 1.0 / (1.0 + std::exp(-eta));
  const double e = std::exp(eta);
  return e / (1.0 + e);
}

// log(1 + exp(eta)) without overflow.
inline double softplus(double eta) { return std::max(eta, 0.0) + std::log1p(std::exp(-std::abs(eta))); }

// theta = (beta, rho1, rho2). beta[0] is the intercept, beta[1..p] multiply
// the covariates.
struct ModelParams {
  std::vector<double> beta{0.0};
  double rho1 = 0.0;
  double rho2 = 0.0;
  CenteringVariant variant = CenteringVariant::NewCentered;

  std::size_t num_covariates() const { return beta.empty() ? 0 : beta.size() - 1; }
  // Flat vector (beta..., rho1, rho2), the layout used by the estimator.
  std::vector<double> packed() const;
  static ModelParams unpack(std::span<const double> theta, CenteringVariant variant);
  double linear_predictor(std::span<const double> x) const;
  void validate() const;
};

// Covariate vectors X[site, t] of dimension p for t = 0..horizon (the
// intercept is not stored). Storage is dense [t][site][k].
class CovariateSeries {
 public:
  CovariateSeries() = default;
  CovariateSeries(std::size_t num_sites, int horizon, std::size_t dim, std::vector<std::string> names = {});

  // Intercept-only models.
  static CovariateSeries none(std::size_t num_sites, int horizon);
  // Spatially constant covariates: per_time[t] holds the p values at time t.
  static CovariateSeries temporal(std::size_t num_sites, const std::vector<std::vector<double>>& per_time,
                                  std::vector<std::string> names = {});

  std::size_t num_sites() const { return num_sites_; }
  int horizon() const { return horizon_; }
  std::size_t dim() const { return dim_; }
  const std::vector<std::string>& names() const { return names_; }
  bool spatially_constant() const;

  std::span<const double> at(std::size_t site, int t) const {
    return {values_.data() + offset(site, t), dim_};
  }
  std::span<double> at(std::size_t site, int t) { return {values_.data() + offset(site, t), dim_}; }

  // Appends one covariate column; `column` is laid out [t][site].
  void append_column(const std::string& name, std::span<const double> column);
  bool operator==(const CovariateSeries&) const = default;

 private:
  std::size_t offset(std::size_t site, int t) const {
    return (static_cast<std::size_t>(t) * num_sites_ + site) * dim_;
  }
  std::size_t num_sites_ = 0;
  int horizon_ = 0;
  std::size_t dim_ = 0;
  std::vector<std::string> names_;
  std::vector<double> values_;
};

// Binary states Z[site, t], t = 0..horizon, stored slice by slice.
class BinaryFieldSeries {
 public:
  BinaryFieldSeries() = default;
  BinaryFieldSeries(std::size_t num_sites, int horizon) : num_sites_(num_sites), horizon_(horizon),
        values_(num_sites * static_cast<std::size_t>(horizon + 1), 0) {}

  std::size_t num_sites() const { return num_sites_; }
  int horizon() const { return horizon_; }
  std::span<const std::uint8_t> slice(int t) const {
    return {values_.data() + static_cast<std::size_t>(t) * num_sites_, num_sites_};
  }
  std::span<std::uint8_t> slice(int t) {
    return {values_.data() + static_cast<std::size_t>(t) * num_sites_, num_sites_};
  }
  std::uint8_t at(std::size_t site, int t) const { return slice(t)[site]; }
  void set(std::size_t site, int t, std::uint8_t v) { slice(t)[site] = v; }
  // Keeps slices 0..new_horizon.
  void truncate(int new_horizon);
  void validate() const;
  bool operator==(const BinaryFieldSeries&) const = default;

 private:
  std::size_t num_sites_ = 0;
  int horizon_ = 0;
  std::vector<std::uint8_t> values_;
};

// Mean removed from each neighbour value before it enters the spatial
// autoregression: 0 (traditional), logistic(x'beta) (one-step) or
// logistic(x'beta + rho2 * z_prev) (new centering).
double centering_offset(CenteringVariant variant, const ModelParams& params, std::span<const double> x,
                        int z_prev);

// logit P(Z_it = 1 | neighbours at t, Z_{t-1}, X_t).
double conditional_logit(std::size_t site, int t, const BinaryFieldSeries& z, const CovariateSeries& x,
                         const ModelParams& params, const NeighborGraph& graph);
double conditional_prob(std::size_t site, int t, const BinaryFieldSeries& z, const CovariateSeries& x,
                        const ModelParams& params, const NeighborGraph& graph);

// Natural parameters of the slice law at time t given the previous slice:
// logit P(Z_i = 1 | rest) = field[i] + coupling * sum_{j in N_i} z_j.
struct SliceField {
  std::vector<double> field;
  double coupling = 0.0;
};
SliceField slice_field(std::span<const std::uint8_t> z_prev, const CovariateSeries& x, int t,
                       const ModelParams& params, const NeighborGraph& graph);

// Sum of the singleton and pairwise potentials of the slice law at time t,
// i.e. log pi_t(z) up to the normalising constant.
double joint_unnormalized_log_density(std::span<const std::uint8_t> z, std::span<const std::uint8_t> z_prev,
                                      const CovariateSeries& x, int t, const ModelParams& params,
                                      const NeighborGraph& graph);

inline constexpr std::size_t kMaxBruteForceSites = 16;

// Exact slice law by enumeration of all 2^n states; entry k is the
// probability of the state whose bit i is site i.
std::vector<double> brute_force_joint(std::span<const std::uint8_t> z_prev, const CovariateSeries& x, int t,
                                      const ModelParams& params, const NeighborGraph& graph);

// log P(Z_t = z | Z_{t-1} = y, X_t) by explicit normalisation.
double transition_log_prob(std::span<const std::uint8_t> y, std::span<const std::uint8_t> z,
                           const CovariateSeries& x, int t, const ModelParams& params, const NeighborGraph& graph);

std::uint32_t state_mask(std::span<const std::uint8_t> z);
std::vector<std::uint8_t> state_from_mask(std::uint32_t mask, std::size_t n);

}  // namespace autologit
