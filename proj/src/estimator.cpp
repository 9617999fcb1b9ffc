#include "autologit/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "autologit/errors.hpp"
#include "autologit/parallel.hpp"

namespace autologit {

PlDesign::PlDesign(const BinaryFieldSeries& z, const CovariateSeries& x, const NeighborGraph& graph)
    : z_(&z), x_(&x), graph_(&graph), sites_(graph.num_sites()), horizon_(z.horizon()) {
  if (z.num_sites() != sites_ || x.num_sites() != sites_)
    throw DataError("field, covariates and lattice disagree on the number of sites");
  if (horizon_ < 1) throw DataError("pseudo-likelihood needs at least two time slices (T >= 1)");
  if (x.horizon() < horizon_) throw DataError("covariates do not cover the field horizon");

  const std::size_t n_rows = sites_ * static_cast<std::size_t>(horizon_);
  intercept_.assign(n_rows, 1.0);
  covariates_.assign(x.dim(), std::vector<double>(n_rows));
  spatial_.assign(n_rows, 0.0);
  past_.resize(n_rows);
  raw_sums_.resize(n_rows);
  response_.resize(n_rows);
  for (int t = 1; t <= horizon_; ++t) {
    const auto now = z.slice(t);
    const auto prev = z.slice(t - 1);
    for (std::size_t i = 0; i < sites_; ++i) {
      const std::size_t r = static_cast<std::size_t>(t - 1) * sites_ + i;
      const auto xi = x.at(i, t);
      for (std::size_t k = 0; k < xi.size(); ++k) covariates_[k][r] = xi[k];
      int sum = 0;
      for (auto j : graph.neighbors(i)) sum += now[j];
      raw_sums_[r] = sum;
      past_[r] = prev[i];
      response_[r] = now[i];
    }
  }
  spatial_ = raw_sums_;
  update_column_pointers();
}

void PlDesign::update_column_pointers() {
  all_columns_.clear();
  no_spatial_columns_.clear();
  all_columns_.push_back(intercept_.data());
  for (const auto& c : covariates_) all_columns_.push_back(c.data());
  no_spatial_columns_ = all_columns_;
  all_columns_.push_back(spatial_.data());
  all_columns_.push_back(past_.data());
  no_spatial_columns_.push_back(past_.data());
}

kernels::DesignView PlDesign::view(bool with_spatial) const {
  return with_spatial ? kernels::DesignView{all_columns_, rows()} : kernels::DesignView{no_spatial_columns_, rows()};
}

void PlDesign::set_raw_sums() { std::copy(raw_sums_.begin(), raw_sums_.end(), spatial_.begin()); }

void PlDesign::set_centered_sums(const ModelParams& centering) {
  if (centering.num_covariates() != num_covariates()) throw DataError("beta length does not match covariate dimension");
  if (centering.variant == CenteringVariant::Traditional) {
    set_raw_sums();
    return;
  }
  std::vector<double> offset(sites_);
  for (int t = 1; t <= horizon_; ++t) {
    const auto prev = z_->slice(t - 1);
    for (std::size_t j = 0; j < sites_; ++j)
      offset[j] = centering_offset(centering.variant, centering, x_->at(j, t), prev[j]);
    const std::size_t base = static_cast<std::size_t>(t - 1) * sites_;
    for (std::size_t i = 0; i < sites_; ++i) {
      double s = 0.0;
      for (auto j : graph_->neighbors(i)) s += offset[j];
      spatial_[base + i] = raw_sums_[base + i] - s;
    }
  }
}

bool PlDesign::spatial_is_zero() const {
  return std::all_of(spatial_.begin(), spatial_.end(), [](double v) { return v == 0.0; });
}

std::vector<double> PlDesign::centered_sum_jacobian(const ModelParams& centering) const {
  const std::size_t P = num_params();
  std::vector<double> jac(rows() * P, 0.0);
  if (centering.variant == CenteringVariant::Traditional) return jac;
  const bool with_past = centering.variant == CenteringVariant::NewCentered;
  // d offset_j / d theta for the current slice, row-major [site][param].
  std::vector<double> d_offset(sites_ * P);
  for (int t = 1; t <= horizon_; ++t) {
    const auto prev = z_->slice(t - 1);
    std::fill(d_offset.begin(), d_offset.end(), 0.0);
    for (std::size_t j = 0; j < sites_; ++j) {
      const auto xj = x_->at(j, t);
      const double mu = centering_offset(centering.variant, centering, xj, prev[j]);
      const double slope = mu * (1.0 - mu);
      double* row = d_offset.data() + j * P;
      row[0] = slope;
      for (std::size_t k = 0; k < xj.size(); ++k) row[k + 1] = slope * xj[k];
      if (with_past) row[past_column()] = slope * prev[j];
    }
    const std::size_t base = static_cast<std::size_t>(t - 1) * sites_;
    for (std::size_t i = 0; i < sites_; ++i) {
      for (auto j : graph_->neighbors(i)) {
        const double* row = d_offset.data() + static_cast<std::size_t>(j) * P;
        for (std::size_t k = 0; k < P; ++k) jac[k * rows() + base + i] -= row[k];
      }
    }
  }
  return jac;
}

std::vector<std::string> parameter_names(const CovariateSeries& x) {
  std::vector<std::string> names{"beta0"};
  for (std::size_t k = 0; k < x.dim(); ++k) names.push_back("beta" + std::to_string(k + 1));
  names.push_back("rho1");
  names.push_back("rho2");
  return names;
}

double pseudo_log_likelihood(const ModelParams& params, const BinaryFieldSeries& z, const CovariateSeries& x,
                             const NeighborGraph& graph) {
  PlDesign design(z, x, graph);
  design.set_centered_sums(params);
  const auto theta = params.packed();
  return kernels::active().loglik(design.view(), theta.data(), design.response().data(), nullptr);
}

std::vector<double> pl_gradient(const ModelParams& params, const BinaryFieldSeries& z, const CovariateSeries& x,
                                const NeighborGraph& graph, bool centering_fixed) {
  PlDesign design(z, x, graph);
  design.set_centered_sums(params);
  const auto theta = params.packed();
  const auto& k = kernels::active();
  std::vector<double> grad(theta.size());
  k.loglik(design.view(), theta.data(), design.response().data(), grad.data());
  if (centering_fixed || params.rho1 == 0.0) return grad;

  std::vector<double> fitted(design.rows());
  k.fitted(design.view(), theta.data(), fitted.data());
  const auto jac = design.centered_sum_jacobian(params);
  const auto response = design.response();
  for (std::size_t c = 0; c < theta.size(); ++c) {
    double acc = 0.0;
    const double* col = jac.data() + c * design.rows();
    for (std::size_t r = 0; r < design.rows(); ++r) acc += (response[r] - fitted[r]) * col[r];
    grad[c] += params.rho1 * acc;
  }
  return grad;
}

namespace {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

std::vector<double> active_theta(const ModelParams& p, bool drop_rho1) {
  auto theta = p.packed();
  if (drop_rho1) theta.erase(theta.end() - 2);
  return theta;
}

ModelParams from_active(const Vec& theta, bool drop_rho1, CenteringVariant variant) {
  std::vector<double> full(theta.data(), theta.data() + theta.size());
  if (drop_rho1) full.insert(full.end() - 1, 0.0);
  return ModelParams::unpack(full, variant);
}

std::string describe_theta(const ModelParams& p) {
  std::ostringstream os;
  os << "(";
  for (double b : p.beta) os << b << ", ";
  os << p.rho1 << ", " << p.rho2 << ")";
  return os.str();
}

}  // namespace

MStepResult maximize_pl_step(const PlDesign& design, const ModelParams& init, const FitOptions& options) {
  const bool drop = options.fix_rho1_zero;
  const auto view = design.view(!drop);
  const std::size_t K = view.cols();
  const auto& kern = kernels::active();
  const double* y = design.response().data();

  auto theta0 = active_theta(init, drop);
  if (theta0.size() != K) throw DataError("parameter dimension does not match the design");
  Vec theta = Eigen::Map<Vec>(theta0.data(), static_cast<Eigen::Index>(K));
  Vec grad(K), trial_grad(K);

  // Maximise the log-PL by minimising its negative.
  auto evaluate = [&](const Vec& th, Vec& g) {
    const double ll = kern.loglik(view, th.data(), y, g.data());
    g = -g;
    return -ll;
  };

  double f = evaluate(theta, grad);
  if (!std::isfinite(f)) throw NumericalError("pseudo-likelihood is not finite at the starting point");

  auto newton_inverse = [&](const Vec& th) -> Mat {
    Mat info(K, K);
    kern.information(view, th.data(), info.data());
    Eigen::LDLT<Mat> ldlt(info);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive() || ldlt.vectorD().minCoeff() <= 1e-12 * info.diagonal().maxCoeff())
      return Mat::Identity(K, K) / std::max(1.0, info.diagonal().maxCoeff());
    return ldlt.solve(Mat::Identity(K, K));
  };

  MStepResult result;
  result.loglik_start = -f;
  Mat H = newton_inverse(theta);
  int iter = 0;
  for (; iter < options.max_qn_iterations; ++iter) {
    if (grad.lpNorm<Eigen::Infinity>() < options.gradient_tolerance) break;
    Vec direction = -H * grad;
    double slope = grad.dot(direction);
    if (!(slope < 0.0)) {
      H = newton_inverse(theta);
      direction = -H * grad;
      slope = grad.dot(direction);
      if (!(slope < 0.0)) {
        H = Mat::Identity(K, K);
        direction = -grad;
        slope = grad.dot(direction);
      }
    }
    double step = 1.0;
    Vec trial;
    double f_trial = 0.0;
    bool accepted = false;
    for (int bt = 0; bt < 60; ++bt, step *= 0.5) {
      trial = theta + step * direction;
      f_trial = evaluate(trial, trial_grad);
      if (!std::isfinite(f_trial)) continue;
      const bool armijo = f_trial <= f + 1e-4 * step * slope;
      // Near the optimum the decrease drops below rounding noise in f; the
      // gradient is still informative there.
      const bool within_noise = std::abs(f_trial - f) <= 1e-12 * (1.0 + std::abs(f)) &&
                                trial_grad.lpNorm<Eigen::Infinity>() < grad.lpNorm<Eigen::Infinity>();
      if (armijo || within_noise) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      if (grad.lpNorm<Eigen::Infinity>() < 1e3 * options.gradient_tolerance) break;
      throw NumericalError("quasi-Newton line search failed at theta = " +
                           describe_theta(from_active(theta, drop, init.variant)) + " (gradient sup-norm " +
                           std::to_string(grad.lpNorm<Eigen::Infinity>()) + ")");
    }
    const Vec s = trial - theta;
    const Vec yv = trial_grad - grad;
    const double sy = s.dot(yv);
    theta = trial;
    grad = trial_grad;
    f = f_trial;
    if (sy > 1e-12 * s.norm() * yv.norm()) {
      const double rho = 1.0 / sy;
      const Mat I = Mat::Identity(K, K);
      H = (I - rho * s * yv.transpose()) * H * (I - rho * yv * s.transpose()) + rho * s * s.transpose();
    }
  }
  if (iter >= options.max_qn_iterations && grad.lpNorm<Eigen::Infinity>() >= options.gradient_tolerance)
    throw NumericalError("quasi-Newton did not converge in " + std::to_string(options.max_qn_iterations) +
                         " iterations (gradient sup-norm " + std::to_string(grad.lpNorm<Eigen::Infinity>()) + ")");
  result.params = from_active(theta, drop, init.variant);
  result.loglik_end = -f;
  result.iterations = iter;
  return result;
}

namespace {

Mat invert_information(const Mat& info, const std::vector<std::string>& names) {
  Eigen::SelfAdjointEigenSolver<Mat> eig(info);
  const double top = eig.eigenvalues().maxCoeff();
  const double bottom = eig.eigenvalues().minCoeff();
  if (!(top > 0.0) || bottom <= 1e-12 * top) {
    const Vec v = eig.eigenvectors().col(0);
    std::ostringstream os;
    os << "U'WU is singular; collinear columns:";
    for (Eigen::Index k = 0; k < v.size(); ++k)
      if (std::abs(v[k]) > 0.1) os << " " << names[static_cast<std::size_t>(k)];
    throw NumericalError(os.str());
  }
  Mat cov = eig.eigenvectors() * eig.eigenvalues().cwiseInverse().asDiagonal() * eig.eigenvectors().transpose();
  return 0.5 * (cov + cov.transpose());
}

}  // namespace

SandwichResult variance_sandwich(const ModelParams& params, const BinaryFieldSeries& z, const CovariateSeries& x,
                                 const NeighborGraph& graph, SpatialRows rows, bool rho1_fixed_zero) {
  PlDesign design(z, x, graph);
  design.set_centered_sums(params);
  const auto& kern = kernels::active();
  const auto theta = params.packed();
  const std::size_t P = theta.size();
  auto names = parameter_names(x);

  std::vector<double> weights(design.rows());
  kern.fitted(design.view(), theta.data(), weights.data());
  for (double& w : weights) w = w * (1.0 - w);
  if (rows == SpatialRows::Raw) design.set_raw_sums();

  const auto view = design.view(!rho1_fixed_zero);
  const std::size_t K = view.cols();
  Mat info(K, K);
  kern.weighted_gram(view, weights.data(), info.data());
  if (rho1_fixed_zero) names.erase(names.end() - 2);
  Mat cov = invert_information(info, names);

  SandwichResult out;
  if (!rho1_fixed_zero) {
    out.information = info;
    out.covariance = cov;
    return out;
  }
  // Re-embed with a zero row/column for the constrained rho1.
  std::vector<Eigen::Index> map;
  for (std::size_t k = 0; k < P; ++k)
    if (k != P - 2) map.push_back(static_cast<Eigen::Index>(k));
  out.information = Mat::Zero(P, P);
  out.covariance = Mat::Zero(P, P);
  for (std::size_t a = 0; a < K; ++a)
    for (std::size_t b = 0; b < K; ++b) {
      out.information(map[a], map[b]) = info(a, b);
      out.covariance(map[a], map[b]) = cov(a, b);
    }
  return out;
}

std::vector<double> FitResult::sd_sandwich() const {
  std::vector<double> sd(static_cast<std::size_t>(cov_sandwich.rows()));
  for (std::size_t k = 0; k < sd.size(); ++k) sd[k] = std::sqrt(std::max(0.0, cov_sandwich(k, k)));
  return sd;
}

std::vector<double> FitResult::sd_bootstrap() const {
  if (!cov_bootstrap) return {};
  std::vector<double> sd(static_cast<std::size_t>(cov_bootstrap->rows()));
  for (std::size_t k = 0; k < sd.size(); ++k) sd[k] = std::sqrt(std::max(0.0, (*cov_bootstrap)(k, k)));
  return sd;
}

FitResult empl_fit(const BinaryFieldSeries& z, const CovariateSeries& x, const NeighborGraph& graph,
                   const FitOptions& options) {
  if (options.max_em_iterations < 1 || options.max_qn_iterations < 1) throw ConfigError("iteration caps must be >= 1");
  z.validate();
  PlDesign design(z, x, graph);
  const auto& kern = kernels::active();
  const std::size_t P = design.num_params();

  FitResult fit;
  fit.parameter_names = parameter_names(x);

  // Stage 1: logit(p) = x'beta + rho2 z_prev.
  FitOptions stage1_opts = options;
  stage1_opts.fix_rho1_zero = true;
  ModelParams start;
  start.beta.assign(P - 2, 0.0);
  start.variant = options.variant;
  MStepResult stage1;
  try {
    stage1 = maximize_pl_step(design, start, stage1_opts);
  } catch (const NumericalError& e) {
    throw NumericalError(std::string("stage-1 fit failed: ") + e.what());
  }
  fit.stage1_theta = active_theta(stage1.params, true);

  if (options.fix_rho1_zero) {
    fit.params = stage1.params;
    fit.pl_value = stage1.loglik_end;
    fit.em_iterations = 0;
    fit.converged = true;
    auto sandwich = variance_sandwich(fit.params, z, x, graph, options.sandwich_rows, true);
    fit.information = sandwich.information;
    fit.cov_sandwich = sandwich.covariance;
    return fit;
  }

  if (graph.empty())
    throw NumericalError("neighbourhood graph has no edges: the spatial regressor is identically zero and rho1 is "
                         "not identifiable");

  ModelParams current = stage1.params;
  current.rho1 = options.initial_rho1;
  for (int l = 1; l <= options.max_em_iterations; ++l) {
    design.set_centered_sums(current);
    MStepResult m;
    try {
      m = maximize_pl_step(design, current, options);
    } catch (const NumericalError& e) {
      throw NumericalError("EM iteration " + std::to_string(l) + ": " + e.what());
    }
    double change = 0.0;
    const auto a = current.packed();
    const auto b = m.params.packed();
    for (std::size_t k = 0; k < a.size(); ++k) change = std::max(change, std::abs(a[k] - b[k]));

    EmIteration record;
    record.iteration = l;
    record.pl_frozen_start = m.loglik_start;
    record.pl_frozen_end = m.loglik_end;
    record.qn_iterations = m.iterations;
    record.theta = b;
    current = m.params;
    {
      PlDesign exact(z, x, graph);
      exact.set_centered_sums(current);
      record.pl_exact = kern.loglik(exact.view(), b.data(), exact.response().data(), nullptr);
    }
    fit.trace.push_back(record);
    fit.em_iterations = l;
    if (change < options.em_tolerance) {
      fit.converged = true;
      break;
    }
  }
  fit.params = current;
  fit.pl_value = fit.trace.back().pl_exact;
  auto sandwich = variance_sandwich(fit.params, z, x, graph, options.sandwich_rows, false);
  fit.information = sandwich.information;
  fit.cov_sandwich = sandwich.covariance;
  return fit;
}

Eigen::MatrixXd empirical_covariance(const std::vector<std::vector<double>>& rows) {
  if (rows.size() < 2) throw NumericalError("covariance needs at least two replicates");
  const std::size_t K = rows.front().size();
  Vec mean = Vec::Zero(K);
  for (const auto& r : rows) mean += Eigen::Map<const Vec>(r.data(), static_cast<Eigen::Index>(K));
  mean /= static_cast<double>(rows.size());
  Mat cov = Mat::Zero(K, K);
  for (const auto& r : rows) {
    const Vec d = Eigen::Map<const Vec>(r.data(), static_cast<Eigen::Index>(K)) - mean;
    cov += d * d.transpose();
  }
  return cov / static_cast<double>(rows.size() - 1);
}

BootstrapResult bootstrap_variance(const FitResult& fit, const BinaryFieldSeries& observed, const CovariateSeries& x,
                                   const NeighborGraph& graph, const RngStream& rng, const BootstrapOptions& boot,
                                   const FitOptions& options) {
  if (boot.replicates < 2) throw ConfigError("bootstrap needs at least two replicates");
  SamplerConfig sampler = boot.sampler;
  if (boot.reuse_initial_slice) {
    const auto s0 = observed.slice(0);
    sampler.initial = ExplicitInit{std::vector<std::uint8_t>(s0.begin(), s0.end())};
  } else {
    const auto s0 = observed.slice(0);
    const double mean = static_cast<double>(std::accumulate(s0.begin(), s0.end(), 0)) / static_cast<double>(s0.size());
    sampler.initial = BernoulliInit{mean};
  }

  const auto B = static_cast<std::size_t>(boot.replicates);
  std::vector<std::optional<std::vector<double>>> estimates(B);
  std::vector<std::string> errors(B);
  parallel_for(B, boot.threads, [&](std::size_t b) {
    const RngStream stream = rng.split(boot.single_stream ? 0 : b);
    try {
      const auto sim = simulate_trajectory(observed.horizon(), x, fit.params, graph, sampler, stream);
      estimates[b] = empl_fit(sim, x, graph, options).params.packed();
    } catch (const Error& e) {
      errors[b] = e.what();
    }
  });

  BootstrapResult out;
  for (std::size_t b = 0; b < B; ++b) {
    if (estimates[b]) out.estimates.push_back(*estimates[b]);
    else out.failures.emplace_back(static_cast<int>(b), errors[b]);
  }
  if (out.estimates.size() < 2)
    throw NumericalError("bootstrap: only " + std::to_string(out.estimates.size()) + " of " + std::to_string(B) +
                         " replicate fits succeeded");
  out.covariance = empirical_covariance(out.estimates);
  return out;
}

}  // namespace autologit
