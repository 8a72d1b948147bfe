#include <atomic>
#include <string>

#include "seqmine/error.hpp"
#include "seqmine/kernels.hpp"

namespace seqmine::kernels {

namespace {

constexpr KernelTable kScalar{&scalar::intersect, &scalar::s_join, &scalar::count_sids, &scalar::count_above};
#if SEQMINE_HAVE_AVX2_KERNELS
constexpr KernelTable kAvx2{&avx2::intersect, &avx2::s_join, &avx2::count_sids, &avx2::count_above};
#endif

const KernelTable* table_for(Backend b) {
#if SEQMINE_HAVE_AVX2_KERNELS
  if (b == Backend::avx2) return &kAvx2;
#endif
  (void)b;
  return &kScalar;
}

std::atomic<Backend>& current() {
  static std::atomic<Backend> backend{detect()};
  return backend;
}

}  // namespace

bool supported(Backend backend) {
  switch (backend) {
    case Backend::scalar:
      return true;
    case Backend::avx2:
#if SEQMINE_HAVE_AVX2_KERNELS
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
  }
  return false;
}

Backend detect() { return supported(Backend::avx2) ? Backend::avx2 : Backend::scalar; }

void select(Backend backend) {
  if (!supported(backend)) throw InputError("kernel backend '" + std::string(name(backend)) + "' not supported on this CPU");
  current().store(backend);
}

Backend active() { return current().load(); }

const KernelTable& table() { return *table_for(active()); }

std::string_view name(Backend backend) { return backend == Backend::avx2 ? "avx2" : "scalar"; }

Backend parse_backend(std::string_view text) {
  if (text == "auto") return detect();
  if (text == "scalar") return Backend::scalar;
  if (text == "avx2") return Backend::avx2;
  throw InputError("unknown kernel backend '" + std::string(text) + "'");
}

}  // namespace seqmine::kernels
