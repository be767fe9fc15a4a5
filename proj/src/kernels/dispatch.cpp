#include <atomic>
#include <cstdlib>
#include <string>

#include "vidart/error.hpp"
#include "vidart/kernels.hpp"

namespace vidart::kernels {

namespace {

#if defined(__x86_64__) || defined(_M_X64)
constexpr bool kHaveAvx2Build = true;
#else
constexpr bool kHaveAvx2Build = false;
#endif

const KernelTable* initial_table() {
  if (const char* env = std::getenv("VIDART_ISA")) {
    const std::string want(env);
    if (want == "scalar") return &scalar::table();
    if (want == "avx2" && isa_supported(Isa::Avx2)) return &table_for(Isa::Avx2);
  }
  return isa_supported(Isa::Avx2) ? &table_for(Isa::Avx2) : &scalar::table();
}

std::atomic<const KernelTable*>& slot() {
  static std::atomic<const KernelTable*> current{initial_table()};
  return current;
}

}  // namespace

std::string_view to_string(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
  }
  return "unknown";
}

bool isa_supported(Isa isa) noexcept {
  switch (isa) {
    case Isa::Scalar: return true;
    case Isa::Avx2:
#if defined(__x86_64__) || defined(_M_X64)
      return kHaveAvx2Build && __builtin_cpu_supports("avx2");
#else
      return false;
#endif
  }
  return false;
}

const KernelTable& table_for(Isa isa) {
  if (!isa_supported(isa)) throw Error(ErrorKind::Parameter, std::string(to_string(isa)) + " not supported here");
#if defined(__x86_64__) || defined(_M_X64)
  if (isa == Isa::Avx2) return avx2::table();
#endif
  return scalar::table();
}

const KernelTable& active() noexcept { return *slot().load(std::memory_order_acquire); }

void set_active(Isa isa) { slot().store(&table_for(isa), std::memory_order_release); }

}  // namespace vidart::kernels
