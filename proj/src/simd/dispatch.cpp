#include <atomic>
#include <cstdlib>
#include <string>

#include "tables.hpp"

namespace hivmob::simd {

const KernelTable* avx2_table() {
#if defined(HIVMOB_WITH_AVX2)
  static const bool usable = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return usable ? &detail::avx2_table_impl() : nullptr;
#else
  return nullptr;
#endif
}

namespace {

const KernelTable* best_available() {
  if (const KernelTable* t = avx2_table()) return t;
  return &scalar_table();
}

const KernelTable* pick(std::string_view isa) {
  if (isa == "scalar") return &scalar_table();
  if (isa == "avx2") return avx2_table();
  if (isa == "auto" || isa.empty()) return best_available();
  return nullptr;
}

std::atomic<const KernelTable*>& selected() {
  static std::atomic<const KernelTable*> table{[] {
    const char* env = std::getenv("HIVMOB_SIMD");
    const KernelTable* t = env ? pick(env) : nullptr;
    return t ? t : best_available();
  }()};
  return table;
}

}  // namespace

const KernelTable& active() { return *selected().load(std::memory_order_relaxed); }

bool force(std::string_view isa) {
  const KernelTable* t = pick(isa);
  if (!t) return false;
  selected().store(t);
  return true;
}

}  // namespace hivmob::simd
