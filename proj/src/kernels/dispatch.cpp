#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "kernels_internal.hpp"

namespace squish::kernels {

#if !defined(SQUISH_HAVE_AVX2)
namespace avx2 {
const KernelTable* table() { return nullptr; }
}  // namespace avx2
#endif

namespace {

bool cpu_has_avx2() {
#if defined(SQUISH_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  static const bool supported = [] {
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") != 0;
  }();
  return supported;
#else
  return false;
#endif
}

Isa initial_isa() {
  if (const char* forced = std::getenv("SQUISH_KERNELS")) {
    const std::string name{forced};
    if (name == "scalar") {
      return Isa::Scalar;
    }
    if (name == "avx2" && cpu_has_avx2()) {
      return Isa::Avx2;
    }
  }
  return cpu_has_avx2() ? Isa::Avx2 : Isa::Scalar;
}

std::atomic<Isa>& current() {
  static std::atomic<Isa> isa{initial_isa()};
  return isa;
}

}  // namespace

std::string_view to_string(Isa isa) { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

const KernelTable& avx2_table() {
  const KernelTable* t = avx2::table();
  if (t == nullptr || !cpu_has_avx2()) {
    throw std::invalid_argument("AVX2 kernels are not available on this machine");
  }
  return *t;
}

bool isa_supported(Isa isa) { return isa == Isa::Scalar || (avx2::table() != nullptr && cpu_has_avx2()); }

Isa active_isa() { return current().load(std::memory_order_relaxed); }

void set_active_isa(Isa isa) {
  if (!isa_supported(isa)) {
    throw std::invalid_argument("instruction set not supported: " + std::string{to_string(isa)});
  }
  current().store(isa, std::memory_order_relaxed);
}

const KernelTable& active() { return active_isa() == Isa::Avx2 ? avx2_table() : scalar_table(); }

}  // namespace squish::kernels
