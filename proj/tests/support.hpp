#pragma once

// Oracles written independently of the library's estimation and sampling
// paths. They only rely on the data containers and graph construction.

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "autologit/lattice.hpp"
#include "autologit/model.hpp"

namespace testsupport {

using namespace autologit;

inline double sigmoid(double e) { return 1.0 / (1.0 + std::exp(-e)); }

// Logistic regression by Newton-Raphson (IRLS) on a dense design.
struct LogisticFit {
  Eigen::VectorXd coef;
  Eigen::MatrixXd cov;  // inverse observed information
  double loglik = 0.0;
};

inline LogisticFit irls(const Eigen::MatrixXd& U, const Eigen::VectorXd& y) {
  Eigen::VectorXd b = Eigen::VectorXd::Zero(U.cols());
  for (int it = 0; it < 100; ++it) {
    const Eigen::VectorXd p = (U * b).unaryExpr([](double e) { return sigmoid(e); });
    const Eigen::VectorXd w = p.array() * (1.0 - p.array());
    const Eigen::MatrixXd H = U.transpose() * w.asDiagonal() * U;
    const Eigen::VectorXd step = H.ldlt().solve(U.transpose() * (y - p));
    b += step;
    if (step.cwiseAbs().maxCoeff() < 1e-14) break;
  }
  LogisticFit f;
  f.coef = b;
  const Eigen::VectorXd eta = U * b;
  const Eigen::VectorXd p = eta.unaryExpr([](double e) { return sigmoid(e); });
  const Eigen::VectorXd w = p.array() * (1.0 - p.array());
  f.cov = (U.transpose() * w.asDiagonal() * U).inverse();
  for (Eigen::Index r = 0; r < y.size(); ++r) f.loglik += y[r] * eta[r] - std::log1p(std::exp(eta[r]));
  return f;
}

// Design [1, X, Z_{t-1}] with rows (t-1)*n + i for t = 1..T.
inline void independence_design(const BinaryFieldSeries& z, const CovariateSeries& x, Eigen::MatrixXd& U,
                                 Eigen::VectorXd& y) {
  const auto n = z.num_sites();
  const int T = z.horizon();
  const auto p = x.dim();
  U.resize(static_cast<Eigen::Index>(n) * T, static_cast<Eigen::Index>(p + 2));
  y.resize(U.rows());
  Eigen::Index r = 0;
  for (int t = 1; t <= T; ++t)
    for (std::size_t i = 0; i < n; ++i, ++r) {
      U(r, 0) = 1.0;
      for (std::size_t k = 0; k < p; ++k) U(r, static_cast<Eigen::Index>(k + 1)) = x.at(i, t)[k];
      U(r, static_cast<Eigen::Index>(p + 1)) = z.at(i, t - 1);
      y[r] = z.at(i, t);
    }
}

inline double offset_of(CenteringVariant v, const ModelParams& m, std::span<const double> x, int y) {
  double eta = m.beta[0];
  for (std::size_t k = 0; k < x.size(); ++k) eta += m.beta[k + 1] * x[k];
  switch (v) {
    case CenteringVariant::Traditional: return 0.0;
    case CenteringVariant::OneStep: return sigmoid(eta);
    case CenteringVariant::NewCentered: return sigmoid(eta + m.rho2 * y);
  }
  return 0.0;
}

// Slice law at time t written out from the pairwise potentials: singleton
// term z_i (x'beta - rho1 sum_{j~i} mu_j + rho2 y_i) plus rho1 z_i z_j per
// edge. Returns normalised probabilities indexed by bitmask.
inline std::vector<double> joint_by_potentials(std::span<const std::uint8_t> y, const CovariateSeries& x, int t,
                                               const ModelParams& m, const NeighborGraph& g) {
  const std::size_t n = g.num_sites();
  std::vector<double> mu(n), single(n);
  for (std::size_t i = 0; i < n; ++i) mu[i] = offset_of(m.variant, m, x.at(i, t), y[i]);
  for (std::size_t i = 0; i < n; ++i) {
    double eta = m.beta[0];
    for (std::size_t k = 0; k < x.dim(); ++k) eta += m.beta[k + 1] * x.at(i, t)[k];
    double s = 0.0;
    for (auto j : g.neighbors(i)) s += mu[j];
    single[i] = eta - m.rho1 * s + m.rho2 * y[i];
  }
  std::vector<double> logp(std::size_t{1} << n);
  double mx = -1e300;
  for (std::uint32_t mask = 0; mask < logp.size(); ++mask) {
    double v = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!((mask >> i) & 1u)) continue;
      v += single[i];
      for (auto j : g.neighbors(i))
        if (j > i && ((mask >> j) & 1u)) v += m.rho1;
    }
    logp[mask] = v;
    mx = std::max(mx, v);
  }
  double total = 0.0;
  for (auto& v : logp) total += (v = std::exp(v - mx));
  for (auto& v : logp) v /= total;
  return logp;
}

inline double total_variation(const std::vector<double>& p, const std::vector<double>& q) {
  double s = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) s += std::abs(p[k] - q[k]);
  return 0.5 * s;
}

inline BinaryFieldSeries random_field(std::size_t n, int T, double p, std::mt19937_64& gen) {
  BinaryFieldSeries z(n, T);
  std::bernoulli_distribution b(p);
  for (int t = 0; t <= T; ++t)
    for (std::size_t i = 0; i < n; ++i) z.set(i, t, b(gen) ? 1 : 0);
  return z;
}

inline CovariateSeries random_covariates(std::size_t n, int T, std::size_t p, std::mt19937_64& gen) {
  CovariateSeries x(n, T, p);
  std::normal_distribution<double> nd(0.0, 1.0);
  for (int t = 0; t <= T; ++t)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < p; ++k) x.at(i, t)[k] = nd(gen);
  return x;
}

}  // namespace testsupport
