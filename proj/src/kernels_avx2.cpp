// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.
#include <immintrin.h>

#include <array>
#include <cmath>

#include "autologit/kernels.hpp"
#include "autologit/model.hpp"

namespace autologit::kernels {

namespace {

constexpr std::size_t kLanes = 4;
constexpr std::size_t kMaxColumns = 16;

inline __m256d splat(double v) { return _mm256_set1_pd(v); }

inline double horizontal_sum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d pair = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(pair, _mm_unpackhi_pd(pair, pair)));
}

// exp(x) for x <= 0. Inputs below -708 are clamped; the result is then
// ~1e-308, far below anything that survives in the sums.
inline __m256d exp_nonpositive(__m256d x) {
  x = _mm256_max_pd(x, splat(-708.0));
  const __m256d n = _mm256_round_pd(_mm256_mul_pd(x, splat(1.4426950408889634074)),
                                    _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(n, splat(6.93147180369123816490e-01), x);
  r = _mm256_fnmadd_pd(n, splat(1.90821492927058770002e-10), r);
  // Taylor series to degree 13 on |r| <= ln2/2.
  __m256d p = splat(1.0 / 6227020800.0);
  p = _mm256_fmadd_pd(p, r, splat(1.0 / 479001600.0));
  p = _mm256_fmadd_pd(p, r, splat(1.0 / 39916800.0));
  p = _mm256_fmadd_pd(p, r, splat(1.0 / 3628800.0));
  p = _mm256_fmadd_pd(p, r, splat(1.0 / 362880.0));
  p = _mm256_fmadd_pd(p, r, splat(1.0 / 40320.0));
  p = _mm256_fmadd_pd(p, r, splat(1.0 / 5040.0));
  p = _mm256_fmadd_pd(p, r, splat(1.0 / 720.0));
  p = _mm256_fmadd_pd(p, r, splat(1.0 / 120.0));
  p = _mm256_fmadd_pd(p, r, splat(1.0 / 24.0));
  p = _mm256_fmadd_pd(p, r, splat(1.0 / 6.0));
  p = _mm256_fmadd_pd(p, r, splat(0.5));
  p = _mm256_fmadd_pd(p, r, splat(1.0));
  p = _mm256_fmadd_pd(p, r, splat(1.0));
  const __m256i exponent = _mm256_cvtepi32_epi64(_mm256_cvtpd_epi32(n));
  const __m256i bits = _mm256_slli_epi64(_mm256_add_epi64(exponent, _mm256_set1_epi64x(1023)), 52);
  return _mm256_mul_pd(p, _mm256_castsi256_pd(bits));
}

// log(1 + e) for e in [0, 1] through 2 atanh(e / (2 + e)); the argument is
// at most 1/3, so the odd series converges fast and keeps full relative
// accuracy for tiny e.
inline __m256d log1p_unit(__m256d e) {
  const __m256d s = _mm256_div_pd(e, _mm256_add_pd(splat(2.0), e));
  const __m256d s2 = _mm256_mul_pd(s, s);
  __m256d p = splat(1.0 / 37.0);
  for (int k = 17; k >= 0; --k) p = _mm256_fmadd_pd(p, s2, splat(1.0 / (2.0 * k + 1.0)));
  return _mm256_mul_pd(_mm256_add_pd(s, s), p);
}

struct Logistic {
  __m256d prob;
  __m256d softplus;
};

inline Logistic logistic_parts(__m256d eta) {
  const __m256d sign_mask = splat(-0.0);
  const __m256d abs_eta = _mm256_andnot_pd(sign_mask, eta);
  const __m256d e = exp_nonpositive(_mm256_sub_pd(_mm256_setzero_pd(), abs_eta));
  const __m256d inv = _mm256_div_pd(splat(1.0), _mm256_add_pd(splat(1.0), e));
  const __m256d positive = _mm256_cmp_pd(eta, _mm256_setzero_pd(), _CMP_GE_OQ);
  Logistic out;
  out.prob = _mm256_blendv_pd(_mm256_mul_pd(e, inv), inv, positive);
  out.softplus = _mm256_add_pd(_mm256_max_pd(eta, _mm256_setzero_pd()), log1p_unit(e));
  return out;
}

inline __m256d linear_block(const DesignView& d, const double* theta, std::size_t r) {
  __m256d eta = _mm256_setzero_pd();
  for (std::size_t k = 0; k < d.cols(); ++k)
    eta = _mm256_fmadd_pd(splat(theta[k]), _mm256_loadu_pd(d.columns[k] + r), eta);
  return eta;
}

inline double linear_row(const DesignView& d, const double* theta, std::size_t r) {
  double eta = 0.0;
  for (std::size_t k = 0; k < d.cols(); ++k) eta += theta[k] * d.columns[k][r];
  return eta;
}

double loglik_avx2(const DesignView& d, const double* theta, const double* response, double* score) {
  const std::size_t K = d.cols();
  if (K > kMaxColumns) return scalar_table().loglik(d, theta, response, score);
  __m256d acc[kMaxColumns];
  for (std::size_t k = 0; k < K; ++k) acc[k] = _mm256_setzero_pd();
  __m256d total = _mm256_setzero_pd();
  const std::size_t full = d.rows - d.rows % kLanes;
  for (std::size_t r = 0; r < full; r += kLanes) {
    const __m256d eta = linear_block(d, theta, r);
    const __m256d z = _mm256_loadu_pd(response + r);
    const Logistic parts = logistic_parts(eta);
    total = _mm256_add_pd(total, _mm256_sub_pd(_mm256_mul_pd(z, eta), parts.softplus));
    if (score) {
      const __m256d resid = _mm256_sub_pd(z, parts.prob);
      for (std::size_t k = 0; k < K; ++k)
        acc[k] = _mm256_fmadd_pd(resid, _mm256_loadu_pd(d.columns[k] + r), acc[k]);
    }
  }
  double sum = horizontal_sum(total);
  if (score)
    for (std::size_t k = 0; k < K; ++k) score[k] = horizontal_sum(acc[k]);
  for (std::size_t r = full; r < d.rows; ++r) {
    const double eta = linear_row(d, theta, r);
    sum += response[r] * eta - softplus(eta);
    if (score) {
      const double resid = response[r] - logistic(eta);
      for (std::size_t k = 0; k < K; ++k) score[k] += resid * d.columns[k][r];
    }
  }
  return sum;
}

void information_avx2(const DesignView& d, const double* theta, double* gram) {
  const std::size_t K = d.cols();
  if (K > kMaxColumns) return scalar_table().information(d, theta, gram);
  __m256d acc[kMaxColumns*(kMaxColumns + 1) / 2];
  const std::size_t pairs = K * (K + 1) / 2;
  for (std::size_t k = 0; k < pairs; ++k) acc[k] = _mm256_setzero_pd();
  __m256d u[kMaxColumns];
  const std::size_t full = d.rows - d.rows % kLanes;
  for (std::size_t r = 0; r < full; r += kLanes) {
    const __m256d p = logistic_parts(linear_block(d, theta, r)).prob;
    const __m256d w = _mm256_mul_pd(p, _mm256_sub_pd(splat(1.0), p));
    for (std::size_t k = 0; k < K; ++k) u[k] = _mm256_loadu_pd(d.columns[k] + r);
    std::size_t slot = 0;
    for (std::size_t a = 0; a < K; ++a) {
      const __m256d wa = _mm256_mul_pd(w, u[a]);
      for (std::size_t b = a; b < K; ++b, ++slot) acc[slot] = _mm256_fmadd_pd(wa, u[b], acc[slot]);
    }
  }
  std::size_t slot = 0;
  for (std::size_t a = 0; a < K; ++a)
    for (std::size_t b = a; b < K; ++b, ++slot) gram[a * K + b] = horizontal_sum(acc[slot]);
  for (std::size_t r = full; r < d.rows; ++r) {
    const double p = logistic(linear_row(d, theta, r));
    const double w = p * (1.0 - p);
    for (std::size_t a = 0; a < K; ++a)
      for (std::size_t b = a; b < K; ++b) gram[a * K + b] += w * d.columns[a][r] * d.columns[b][r];
  }
  for (std::size_t a = 0; a < K; ++a)
    for (std::size_t b = 0; b < a; ++b) gram[a * K + b] = gram[b * K + a];
}

void weighted_gram_avx2(const DesignView& d, const double* weights, double* gram) {
  const std::size_t K = d.cols();
  if (K > kMaxColumns) return scalar_table().weighted_gram(d, weights, gram);
  __m256d acc[kMaxColumns*(kMaxColumns + 1) / 2];
  const std::size_t pairs = K * (K + 1) / 2;
  for (std::size_t k = 0; k < pairs; ++k) acc[k] = _mm256_setzero_pd();
  __m256d u[kMaxColumns];
  const std::size_t full = d.rows - d.rows % kLanes;
  for (std::size_t r = 0; r < full; r += kLanes) {
    const __m256d w = _mm256_loadu_pd(weights + r);
    for (std::size_t k = 0; k < K; ++k) u[k] = _mm256_loadu_pd(d.columns[k] + r);
    std::size_t slot = 0;
    for (std::size_t a = 0; a < K; ++a) {
      const __m256d wa = _mm256_mul_pd(w, u[a]);
      for (std::size_t b = a; b < K; ++b, ++slot) acc[slot] = _mm256_fmadd_pd(wa, u[b], acc[slot]);
    }
  }
  std::size_t slot = 0;
  for (std::size_t a = 0; a < K; ++a)
    for (std::size_t b = a; b < K; ++b, ++slot) gram[a * K + b] = horizontal_sum(acc[slot]);
  for (std::size_t r = full; r < d.rows; ++r)
    for (std::size_t a = 0; a < K; ++a)
      for (std::size_t b = a; b < K; ++b) gram[a * K + b] += weights[r] * d.columns[a][r] * d.columns[b][r];
  for (std::size_t a = 0; a < K; ++a)
    for (std::size_t b = 0; b < a; ++b) gram[a * K + b] = gram[b * K + a];
}

void fitted_avx2(const DesignView& d, const double* theta, double* out) {
  const std::size_t full = d.rows - d.rows % kLanes;
  for (std::size_t r = 0; r < full; r += kLanes)
    _mm256_storeu_pd(out + r, logistic_parts(linear_block(d, theta, r)).prob);
  for (std::size_t r = full; r < d.rows; ++r) out[r] = logistic(linear_row(d, theta, r));
}

}  // namespace

const KernelTable& avx2_table_unchecked() {
  static const KernelTable table{"avx2", &loglik_avx2, &information_avx2, &weighted_gram_avx2, &fitted_avx2};
  return table;
}

}  // namespace autologit::kernels
