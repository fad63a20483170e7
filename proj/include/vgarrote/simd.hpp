#pragma once
// Data-parallel kernels used by the solvers' inner loops.
//
// Every kernel has a scalar reference implementation and, on x86-64, an
// AVX2+FMA variant. The active backend is picked once at startup from the
// CPU's feature bits and can be overridden with VGARROTE_SIMD=scalar|avx2 or
// set_backend(). Vectorized results differ from the reference only by
// floating-point reassociation.

#include <cstddef>
#include <span>
#include <string_view>

namespace vg::simd {

enum class Backend { scalar, avx2 };

struct KernelTable {
  double (*dot)(const double* a, const double* b, std::size_t n);
  // out[k] = dot(a, b[k]) for k = 0..3
  void (*dot4)(const double* a, const double* b0, const double* b1, const double* b2,
               const double* b3, std::size_t n, double* out);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // out = a * d (elementwise)
  void (*mul)(const double* a, const double* d, double* out, std::size_t n);
  double (*sum_sq)(const double* a, std::size_t n);
};

namespace scalar {
const KernelTable& table();
}
#if defined(__x86_64__) || defined(_M_X64)
namespace avx2 {
const KernelTable& table();
}
#endif

bool backend_available(Backend b);
Backend active_backend();
/// Throws std::invalid_argument if the backend is not supported on this CPU.
void set_backend(Backend b);
std::string_view backend_name(Backend b);

const KernelTable& kernels();

inline double dot(std::span<const double> a, std::span<const double> b) {
  return kernels().dot(a.data(), b.data(), a.size());
}
inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  kernels().axpy(alpha, x.data(), y.data(), x.size());
}
inline double sum_sq(std::span<const double> a) { return kernels().sum_sq(a.data(), a.size()); }

}  // namespace vg::simd
