#include <cmath>
#include <vector>

#include "autologit/kernels.hpp"
#include "autologit/model.hpp"

namespace autologit::kernels {

namespace {

double linear(const DesignView& d, const double* theta, std::size_t r) {
  double eta = 0.0;
  for (std::size_t k = 0; k < d.cols(); ++k) eta += theta[k] * d.columns[k][r];
  return eta;
}

double loglik_scalar(const DesignView& d, const double* theta, const double* response, double* score) {
  const std::size_t K = d.cols();
  if (score)
    for (std::size_t k = 0; k < K; ++k) score[k] = 0.0;
  double total = 0.0;
  for (std::size_t r = 0; r < d.rows; ++r) {
    const double eta = linear(d, theta, r);
    total += response[r] * eta - softplus(eta);
    if (score) {
      const double resid = response[r] - logistic(eta);
      for (std::size_t k = 0; k < K; ++k) score[k] += resid * d.columns[k][r];
    }
  }
  return total;
}

void information_scalar(const DesignView& d, const double* theta, double* gram) {
  const std::size_t K = d.cols();
  for (std::size_t k = 0; k < K * K; ++k) gram[k] = 0.0;
  for (std::size_t r = 0; r < d.rows; ++r) {
    const double p = logistic(linear(d, theta, r));
    const double w = p * (1.0 - p);
    for (std::size_t a = 0; a < K; ++a) {
      const double wa = w * d.columns[a][r];
      for (std::size_t b = a; b < K; ++b) gram[a * K + b] += wa * d.columns[b][r];
    }
  }
  for (std::size_t a = 0; a < K; ++a)
    for (std::size_t b = 0; b < a; ++b) gram[a * K + b] = gram[b * K + a];
}

void weighted_gram_scalar(const DesignView& d, const double* weights, double* gram) {
  const std::size_t K = d.cols();
  for (std::size_t k = 0; k < K * K; ++k) gram[k] = 0.0;
  for (std::size_t r = 0; r < d.rows; ++r) {
    for (std::size_t a = 0; a < K; ++a) {
      const double wa = weights[r] * d.columns[a][r];
      for (std::size_t b = a; b < K; ++b) gram[a * K + b] += wa * d.columns[b][r];
    }
  }
  for (std::size_t a = 0; a < K; ++a)
    for (std::size_t b = 0; b < a; ++b) gram[a * K + b] = gram[b * K + a];
}

void fitted_scalar(const DesignView& d, const double* theta, double* out) {
  for (std::size_t r = 0; r < d.rows; ++r) out[r] = logistic(linear(d, theta, r));
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{"scalar", &loglik_scalar, &information_scalar, &weighted_gram_scalar, &fitted_scalar};
  return table;
}

}  // namespace autologit::kernels
