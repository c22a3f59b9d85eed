#include "spacedec/kernels.h"

#include <atomic>
#include <cstdlib>
#include <cstring>

#include "spacedec/error.h"

namespace spacedec::kernels {
namespace {

Isa detect() {
  const char* env = std::getenv("SPACEDEC_SIMD");
  if (env && std::strcmp(env, "scalar") == 0) return Isa::Scalar;
#if defined(SPACEDEC_HAVE_AVX2)
  if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) return Isa::Avx2;
#endif
#if defined(SPACEDEC_HAVE_NEON)
  return Isa::Neon;
#endif
  return Isa::Scalar;
}

std::atomic<int> g_forced{-1};

const detail::Table& table_for(Isa isa) {
  switch (isa) {
#if defined(SPACEDEC_HAVE_AVX2)
  case Isa::Avx2: return detail::avx2_table();
#endif
#if defined(SPACEDEC_HAVE_NEON)
  case Isa::Neon: return detail::neon_table();
#endif
  default: return detail::scalar_table();
  }
}

const detail::Table& table() {
  static const Isa detected = detect();
  const int forced = g_forced.load(std::memory_order_relaxed);
  return table_for(forced >= 0 ? static_cast<Isa>(forced) : detected);
}

} // namespace

const char* isa_name(Isa isa) {
  switch (isa) {
  case Isa::Scalar: return "scalar";
  case Isa::Avx2: return "avx2";
  case Isa::Neon: return "neon";
  }
  return "unknown";
}

bool isa_available(Isa isa) {
  switch (isa) {
  case Isa::Scalar: return true;
  case Isa::Avx2:
#if defined(SPACEDEC_HAVE_AVX2)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
  case Isa::Neon:
#if defined(SPACEDEC_HAVE_NEON)
    return true;
#else
    return false;
#endif
  }
  return false;
}

Isa active_isa() {
  const int forced = g_forced.load(std::memory_order_relaxed);
  if (forced >= 0) return static_cast<Isa>(forced);
  static const Isa detected = detect();
  return detected;
}

void force_isa(Isa isa) {
  if (!isa_available(isa))
    throw Error(ErrorCode::InvalidInput, std::string("ISA not available: ") + isa_name(isa));
  g_forced.store(static_cast<int>(isa), std::memory_order_relaxed);
}

void reset_isa() { g_forced.store(-1, std::memory_order_relaxed); }

void sampled_dot(const double* L, const double* R, Index r, const std::int32_t* rows,
                 const std::int32_t* cols, Index count, double* out) {
  table().sampled_dot(L, R, r, rows, cols, count, out);
}

void row_dots(const double* A, const double* B, Index m, Index s, double* out) {
  table().row_dots(A, B, m, s, out);
}

double hadamard_residual(const double* X, const double* P, Index n, double* grad) {
  return table().hadamard_residual(X, P, n, grad);
}

void hadamard_hess(const double* X, const double* P, const double* eta, Index n, double* out) {
  table().hadamard_hess(X, P, eta, n, out);
}

} // namespace spacedec::kernels
