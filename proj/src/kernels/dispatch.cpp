#include <cstdlib>
#include <string_view>

#include "dubf/errors.hpp"
#include "dubf/kernels.hpp"

namespace dubf::kernels {

namespace {

Isa detect() noexcept {
  if (const char* forced = std::getenv("DUBF_SIMD");
      forced != nullptr && std::string_view(forced) == "scalar")
    return Isa::kScalar;
  if (isa_available(Isa::kAvx2)) return Isa::kAvx2;
  return Isa::kScalar;
}

}  // namespace

bool isa_available(Isa isa) noexcept {
  switch (isa) {
    case Isa::kScalar:
      return true;
    case Isa::kAvx2:
#if (defined(__x86_64__) || defined(_M_X64)) && (defined(__GNUC__) || defined(__clang__))
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
  }
  return false;
}

Isa active_isa() noexcept {
  static const Isa isa = detect();
  return isa;
}

std::string_view isa_name(Isa isa) noexcept {
  return isa == Isa::kAvx2 ? "avx2" : "scalar";
}

HermitianFormsFn hermitian_forms_for(Isa isa) {
  if (!isa_available(isa))
    throw InvalidArgument(std::string("ISA not available: ") + std::string(isa_name(isa)));
#if defined(__x86_64__) || defined(_M_X64)
  if (isa == Isa::kAvx2) return &hermitian_forms_avx2;
#endif
  return &hermitian_forms_scalar;
}

void hermitian_forms(std::span<const std::complex<double>> r, const PlanarBlock& a,
                     std::span<double> out) {
  static const HermitianFormsFn fn = hermitian_forms_for(active_isa());
  fn(r, a, out);
}

}  // namespace dubf::kernels
