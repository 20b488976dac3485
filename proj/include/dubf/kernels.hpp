#pragma once

// Data-parallel inner loops. Every kernel has a portable scalar reference and,
// where the CPU supports it, a vectorized variant picked once at runtime.
// Variants are equivalence-tested against the scalar path; they agree to
// rounding, not bit-for-bit (the AVX2 path contracts with FMA).

#include <complex>
#include <cstddef>
#include <span>
#include <string_view>

namespace dubf::kernels {

// A block of `count` complex N-vectors stored planar: component n of vector t
// lives at re[n * count + t] / im[n * count + t]. Steering tables use this
// layout so the scan over grid angles is the contiguous (vector) axis.
struct PlanarBlock {
  const double* re = nullptr;
  const double* im = nullptr;
  std::size_t order = 0;
  std::size_t count = 0;
};

// out[t] = real(a_t^H R a_t) for every vector a_t of the block, where R is a
// row-major Hermitian matrix of the block's order. Only the upper triangle and
// the real diagonal of R are read.
using HermitianFormsFn = void (*)(std::span<const std::complex<double>> r,
                                  const PlanarBlock& a, std::span<double> out);

void hermitian_forms_scalar(std::span<const std::complex<double>> r,
                            const PlanarBlock& a, std::span<double> out);

#if defined(__x86_64__) || defined(_M_X64)
void hermitian_forms_avx2(std::span<const std::complex<double>> r,
                          const PlanarBlock& a, std::span<double> out);
#endif

enum class Isa { kScalar, kAvx2 };

// Best ISA supported by this CPU. DUBF_SIMD=scalar in the environment forces
// the reference path.
Isa active_isa() noexcept;
std::string_view isa_name(Isa isa) noexcept;
bool isa_available(Isa isa) noexcept;

HermitianFormsFn hermitian_forms_for(Isa isa);

// Dispatches to the active ISA.
void hermitian_forms(std::span<const std::complex<double>> r, const PlanarBlock& a,
                     std::span<double> out);

}  // namespace dubf::kernels
