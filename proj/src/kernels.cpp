#include "seqglr/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>

#include "kernels_impl.hpp"

namespace seqglr::kernels {

namespace {

const Table kScalar{Isa::Scalar, "scalar", &detail::scan_scalar, &detail::mixture_scalar,
                    &detail::max_scalar};

#if defined(SEQGLR_HAVE_AVX2_TU)
const Table kAvx2{Isa::Avx2, "avx2", &detail::scan_avx2, &detail::mixture_avx2,
                  &detail::max_avx2};
#endif

const Table* initial_choice() {
  const char* env = std::getenv("SEQGLR_KERNELS");
  if (env != nullptr && std::strcmp(env, "scalar") == 0) return &kScalar;
  if (const Table* t = avx2_table()) return t;
  return &kScalar;
}

std::atomic<const Table*>& slot() {
  static std::atomic<const Table*> current{initial_choice()};
  return current;
}

}  // namespace

bool avx2_available() {
#if defined(SEQGLR_HAVE_AVX2_TU) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const Table& scalar_table() { return kScalar; }

const Table* avx2_table() {
#if defined(SEQGLR_HAVE_AVX2_TU)
  if (avx2_available()) return &kAvx2;
#endif
  return nullptr;
}

const Table& active() { return *slot().load(std::memory_order_acquire); }

void set_active(Isa isa) {
  const Table* t = &kScalar;
  if (isa == Isa::Avx2 && avx2_table() != nullptr) t = avx2_table();
  slot().store(t, std::memory_order_release);
}

}  // namespace seqglr::kernels
