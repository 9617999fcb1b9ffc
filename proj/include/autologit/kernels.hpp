#pragma once

// Dense logistic-model kernels over a column-major design matrix. These are
// the inner loops of pseudo-likelihood evaluation, its score and the
// information matrix. A portable scalar implementation is the reference; an
// AVX2/FMA implementation is selected at runtime when the CPU supports it.

#include <cstddef>
#include <span>
#include <string_view>

namespace autologit::kernels {

// Column pointers of a rows x cols design, each column contiguous.
struct DesignView {
  std::span<const double* const> columns;
  std::size_t rows = 0;
  std::size_t cols() const { return columns.size(); }
};

struct KernelTable {
  std::string_view name;

  // Returns sum_r [ z_r * eta_r - log(1 + exp(eta_r)) ] with eta = U theta.
  // When score is non-null it receives sum_r (z_r - p_r) * U_r (length cols).
  double (*loglik)(const DesignView& design, const double* theta, const double* response, double* score);

  // gram (cols x cols, row-major, full symmetric) = sum_r p_r (1 - p_r) U_r U_r'.
  void (*information)(const DesignView& design, const double* theta, double* gram);

  // gram = sum_r w_r U_r U_r' for caller-supplied weights.
  void (*weighted_gram)(const DesignView& design, const double* weights, double* gram);

  // out_r = logistic((U theta)_r).
  void (*fitted)(const DesignView& design, const double* theta, double* out);
};

const KernelTable& scalar_table();
// nullptr when the AVX2 variant was not compiled in or the CPU lacks AVX2/FMA.
const KernelTable* avx2_table();

// The table used by the library. Defaults to the fastest supported variant;
// the environment variable AUTOLOGIT_KERNELS=scalar|avx2 overrides it.
const KernelTable& active();
// Forces a variant by name ("scalar", "avx2", "auto"); returns false if the
// requested variant is unavailable.
bool select(std::string_view name);

}  // namespace autologit::kernels
