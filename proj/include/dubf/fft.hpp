#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "dubf/linalg.hpp"

namespace dubf::fft {

// Unnormalized real-to-complex DFT: X[k] = sum_n x[n] e^{-j 2 pi k n / size},
// k = 0..size/2.
CVector forward_real(std::span<const double> x);

// Inverse of forward_real including the 1/size factor. `spectrum` holds
// size/2 + 1 bins.
std::vector<double> inverse_real(std::span<const cdouble> spectrum, std::size_t size);

}  // namespace dubf::fft
