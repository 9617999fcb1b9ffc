#include <atomic>
#include <cstdlib>
#include <string>

#include "autologit/kernels.hpp"

namespace autologit::kernels {

#ifdef AUTOLOGIT_HAVE_AVX2
const KernelTable& avx2_table_unchecked();
#endif

namespace {

bool cpu_has_avx2() {
#if defined(AUTOLOGIT_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__)) && (defined(__x86_64__) || defined(__i386__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable* best_table() {
  if (const auto* t = avx2_table()) return t;
  return &scalar_table();
}

const KernelTable* initial_table() {
  if (const char* env = std::getenv("AUTOLOGIT_KERNELS")) {
    const std::string choice(env);
    if (choice == "scalar") return &scalar_table();
    if (choice == "avx2" && avx2_table()) return avx2_table();
  }
  return best_table();
}

std::atomic<const KernelTable*>& current() {
  static std::atomic<const KernelTable*> table{initial_table()};
  return table;
}

}  // namespace

const KernelTable* avx2_table() {
#ifdef AUTOLOGIT_HAVE_AVX2
  static const bool supported = cpu_has_avx2();
  if (supported) return &avx2_table_unchecked();
#endif
  return nullptr;
}

const KernelTable& active() { return *current().load(std::memory_order_relaxed); }

bool select(std::string_view name) {
  const KernelTable* table = nullptr;
  if (name == "scalar") table = &scalar_table();
  else if (name == "avx2") table = avx2_table();
  else if (name == "auto") table = best_table();
  if (!table) return false;
  current().store(table, std::memory_order_relaxed);
  return true;
}

}  // namespace autologit::kernels
