#include "autologit/model.hpp"

#include <algorithm>
#include <cmath>

#include "autologit/errors.hpp"

namespace autologit {

std::string to_string(CenteringVariant v) {
  switch (v) {
    case CenteringVariant::Traditional: return "traditional";
    case CenteringVariant::OneStep: return "onestep";
    case CenteringVariant::NewCentered: return "new";
  }
  return "unknown";
}

CenteringVariant parse_variant(const std::string& name) {
  if (name == "traditional" || name == "trad") return CenteringVariant::Traditional;
  if (name == "onestep" || name == "one-step") return CenteringVariant::OneStep;
  if (name == "new" || name == "newcentered" || name == "new-centered") return CenteringVariant::NewCentered;
  throw ConfigError("unknown centering variant '" + name + "'");
}

std::vector<double> ModelParams::packed() const {
  std::vector<double> theta(beta);
  theta.push_back(rho1);
  theta.push_back(rho2);
  return theta;
}

ModelParams ModelParams::unpack(std::span<const double> theta, CenteringVariant variant) {
  if (theta.size() < 3) throw ConfigError("parameter vector needs at least intercept, rho1 and rho2");
  ModelParams p;
  p.beta.assign(theta.begin(), theta.end() - 2);
  p.rho1 = theta[theta.size() - 2];
  p.rho2 = theta[theta.size() - 1];
  p.variant = variant;
  return p;
}

double ModelParams::linear_predictor(std::span<const double> x) const {
  double eta = beta[0];
  for (std::size_t k = 0; k < x.size(); ++k) eta += beta[k + 1] * x[k];
  return eta;
}

void ModelParams::validate() const {
  if (beta.empty()) throw ConfigError("beta must contain at least the intercept");
  for (double b : beta)
    if (!std::isfinite(b)) throw ConfigError("non-finite beta coefficient");
  if (!std::isfinite(rho1) || !std::isfinite(rho2)) throw ConfigError("non-finite autoregression parameter");
}

CovariateSeries::CovariateSeries(std::size_t num_sites, int horizon, std::size_t dim, std::vector<std::string> names)
    : num_sites_(num_sites), horizon_(horizon), dim_(dim), names_(std::move(names)),
      values_(num_sites * static_cast<std::size_t>(horizon + 1) * dim, 0.0) {
  if (horizon < 0) throw ConfigError("horizon must be >= 0");
  if (names_.empty())
    for (std::size_t k = 0; k < dim; ++k) names_.push_back("x" + std::to_string(k + 1));
  if (names_.size() != dim) throw ConfigError("covariate name count does not match dimension");
}

CovariateSeries CovariateSeries::none(std::size_t num_sites, int horizon) {
  return CovariateSeries(num_sites, horizon, 0);
}

CovariateSeries CovariateSeries::temporal(std::size_t num_sites, const std::vector<std::vector<double>>& per_time,
                                          std::vector<std::string> names) {
  if (per_time.empty()) throw ConfigError("temporal covariates need at least one time point");
  const std::size_t dim = per_time.front().size();
  CovariateSeries out(num_sites, static_cast<int>(per_time.size()) - 1, dim, std::move(names));
  for (int t = 0; t <= out.horizon_; ++t) {
    if (per_time[t].size() != dim) throw ConfigError("inconsistent covariate dimension at t=" + std::to_string(t));
    for (std::size_t i = 0; i < num_sites; ++i) std::copy(per_time[t].begin(), per_time[t].end(), out.at(i, t).begin());
  }
  return out;
}

bool CovariateSeries::spatially_constant() const {
  for (int t = 0; t <= horizon_; ++t)
    for (std::size_t i = 1; i < num_sites_; ++i)
      if (!std::equal(at(i, t).begin(), at(i, t).end(), at(0, t).begin())) return false;
  return true;
}

void CovariateSeries::append_column(const std::string& name, std::span<const double> column) {
  const std::size_t cells = num_sites_ * static_cast<std::size_t>(horizon_ + 1);
  if (column.size() != cells) throw DataError("appended covariate column has wrong length");
  if (std::find(names_.begin(), names_.end(), name) != names_.end())
    throw DataError("duplicate covariate name '" + name + "'");
  std::vector<double> grown(cells * (dim_ + 1));
  for (std::size_t c = 0; c < cells; ++c) {
    std::copy_n(values_.begin() + static_cast<std::ptrdiff_t>(c * dim_), dim_,
                grown.begin() + static_cast<std::ptrdiff_t>(c * (dim_ + 1)));
    grown[c * (dim_ + 1) + dim_] = column[c];
  }
  values_ = std::move(grown);
  ++dim_;
  names_.push_back(name);
}

void BinaryFieldSeries::truncate(int new_horizon) {
  if (new_horizon < 0 || new_horizon > horizon_) throw ConfigError("invalid truncation horizon");
  horizon_ = new_horizon;
  values_.resize(num_sites_ * static_cast<std::size_t>(horizon_ + 1));
}

void BinaryFieldSeries::validate() const {
  for (std::size_t k = 0; k < values_.size(); ++k)
    if (values_[k] > 1)
      throw DataError("non-binary value at site " + std::to_string(k % num_sites_) + ", t=" +
                      std::to_string(k / num_sites_));
}

double centering_offset(CenteringVariant variant, const ModelParams& params, std::span<const double> x,
                        int z_prev) {
  switch (variant) {
    case CenteringVariant::Traditional: return 0.0;
    case CenteringVariant::OneStep: return logistic(params.linear_predictor(x));
    case CenteringVariant::NewCentered: return logistic(params.linear_predictor(x) + params.rho2 * z_prev);
  }
  return 0.0;
}

namespace {

void check_time(int t, const BinaryFieldSeries& z, const CovariateSeries& x) {
  if (t < 1) throw DataError("conditional probabilities need a previous slice (t >= 1)");
  if (t > z.horizon() || t > x.horizon()) throw DataError("time index beyond the data horizon");
}

void check_slice_inputs(std::span<const std::uint8_t> z_prev, const CovariateSeries& x, int t,
                        const ModelParams& params, const NeighborGraph& graph) {
  if (z_prev.size() != graph.num_sites() || x.num_sites() != graph.num_sites())
    throw DataError("slice dimensions do not match the lattice");
  if (t < 0 || t > x.horizon()) throw DataError("covariates missing at t=" + std::to_string(t));
  if (params.num_covariates() != x.dim()) throw DataError("beta length does not match covariate dimension");
}

}  // namespace

double conditional_logit(std::size_t site, int t, const BinaryFieldSeries& z, const CovariateSeries& x,
                         const ModelParams& params, const NeighborGraph& graph) {
  check_time(t, z, x);
  if (site >= graph.num_sites()) throw DataError("site index out of range");
  if (params.num_covariates() != x.dim()) throw DataError("beta length does not match covariate dimension");
  const auto now = z.slice(t);
  const auto prev = z.slice(t - 1);
  double spatial = 0.0;
  for (auto j : graph.neighbors(site))
    spatial += now[j] - centering_offset(params.variant, params, x.at(j, t), prev[j]);
  return params.linear_predictor(x.at(site, t)) + params.rho1 * spatial + params.rho2 * prev[site];
}

double conditional_prob(std::size_t site, int t, const BinaryFieldSeries& z, const CovariateSeries& x,
                        const ModelParams& params, const NeighborGraph& graph) {
  return logistic(conditional_logit(site, t, z, x, params, graph));
}

SliceField slice_field(std::span<const std::uint8_t> z_prev, const CovariateSeries& x, int t,
                       const ModelParams& params, const NeighborGraph& graph) {
  check_slice_inputs(z_prev, x, t, params, graph);
  const std::size_t n = graph.num_sites();
  std::vector<double> offset(n);
  for (std::size_t i = 0; i < n; ++i) offset[i] = centering_offset(params.variant, params, x.at(i, t), z_prev[i]);
  SliceField out;
  out.coupling = params.rho1;
  out.field.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double centering = 0.0;
    for (auto j : graph.neighbors(i)) centering += offset[j];
    out.field[i] = params.linear_predictor(x.at(i, t)) - params.rho1 * centering + params.rho2 * z_prev[i];
  }
  return out;
}

double joint_unnormalized_log_density(std::span<const std::uint8_t> z, std::span<const std::uint8_t> z_prev,
                                      const CovariateSeries& x, int t, const ModelParams& params,
                                      const NeighborGraph& graph) {
  check_slice_inputs(z_prev, x, t, params, graph);
  if (z.size() != graph.num_sites()) throw DataError("state length does not match the lattice");
  double singleton = 0.0;
  double pairwise = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (!z[i]) continue;
    double centering = 0.0;
    for (auto j : graph.neighbors(i)) {
      centering += centering_offset(params.variant, params, x.at(j, t), z_prev[j]);
      if (j > i) pairwise += z[j];
    }
    singleton += params.linear_predictor(x.at(i, t)) - params.rho1 * centering + params.rho2 * z_prev[i];
  }
  return singleton + params.rho1 * pairwise;
}

std::uint32_t state_mask(std::span<const std::uint8_t> z) {
  std::uint32_t mask = 0;
  for (std::size_t i = 0; i < z.size(); ++i)
    if (z[i]) mask |= (1u << i);
  return mask;
}

std::vector<std::uint8_t> state_from_mask(std::uint32_t mask, std::size_t n) {
  std::vector<std::uint8_t> z(n);
  for (std::size_t i = 0; i < n; ++i) z[i] = (mask >> i) & 1u;
  return z;
}

std::vector<double> brute_force_joint(std::span<const std::uint8_t> z_prev, const CovariateSeries& x, int t,
                                      const ModelParams& params, const NeighborGraph& graph) {
  const std::size_t n = graph.num_sites();
  if (n > kMaxBruteForceSites)
    throw ConfigError("brute-force joint limited to " + std::to_string(kMaxBruteForceSites) + " sites");
  const std::size_t states = std::size_t{1} << n;
  std::vector<double> logp(states);
  for (std::size_t k = 0; k < states; ++k) {
    const auto z = state_from_mask(static_cast<std::uint32_t>(k), n);
    logp[k] = joint_unnormalized_log_density(z, z_prev, x, t, params, graph);
  }
  const double top = *std::max_element(logp.begin(), logp.end());
  double total = 0.0;
  for (double& v : logp) {
    v = std::exp(v - top);
    total += v;
  }
  for (double& v : logp) v /= total;
  return logp;
}

double transition_log_prob(std::span<const std::uint8_t> y, std::span<const std::uint8_t> z,
                           const CovariateSeries& x, int t, const ModelParams& params, const NeighborGraph& graph) {
  const std::size_t n = graph.num_sites();
  if (n > kMaxBruteForceSites)
    throw ConfigError("transition probabilities limited to " + std::to_string(kMaxBruteForceSites) + " sites");
  if (z.size() != n) throw DataError("state length does not match the lattice");
  const std::size_t states = std::size_t{1} << n;
  std::vector<double> logp(states);
  for (std::size_t k = 0; k < states; ++k)
    logp[k] = joint_unnormalized_log_density(state_from_mask(static_cast<std::uint32_t>(k), n), y, x, t, params, graph);
  const double top = *std::max_element(logp.begin(), logp.end());
  double total = 0.0;
  for (double v : logp) total += std::exp(v - top);
  return logp[state_mask(z)] - top - std::log(total);
}

}  // namespace autologit
