#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "vgarrote/simd.hpp"

namespace vg::simd {
namespace {

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(_M_X64)
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Backend initial_backend() {
  if (const char* env = std::getenv("VGARROTE_SIMD")) {
    const std::string v(env);
    if (v == "scalar") return Backend::scalar;
    if (v == "avx2" && cpu_has_avx2()) return Backend::avx2;
  }
  return cpu_has_avx2() ? Backend::avx2 : Backend::scalar;
}

const KernelTable& table_for(Backend b) {
#if defined(__x86_64__) || defined(_M_X64)
  if (b == Backend::avx2) return avx2::table();
#endif
  return scalar::table();
}

std::atomic<const KernelTable*>& current() {
  static std::atomic<const KernelTable*> t{&table_for(initial_backend())};
  return t;
}

std::atomic<Backend>& current_backend() {
  static std::atomic<Backend> b{initial_backend()};
  return b;
}

}  // namespace

bool backend_available(Backend b) { return b == Backend::scalar || cpu_has_avx2(); }

Backend active_backend() { return current_backend().load(); }

void set_backend(Backend b) {
  if (!backend_available(b))
    throw std::invalid_argument("SIMD backend not supported on this CPU: " +
                                std::string(backend_name(b)));
  current_backend().store(b);
  current().store(&table_for(b));
}

std::string_view backend_name(Backend b) { return b == Backend::avx2 ? "avx2" : "scalar"; }

const KernelTable& kernels() { return *current().load(std::memory_order_relaxed); }

}  // namespace vg::simd
