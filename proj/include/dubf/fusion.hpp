#pragma once

// Broadband incoherent fusion of narrowband spectra, DOA extraction and RMSE
// scoring.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "dubf/array_model.hpp"
#include "dubf/beamformers.hpp"

namespace dubf {

struct BroadbandSpectrum {
  std::vector<double> values;  // one per grid angle
  double beta = 1.0;
  BinRange bins;
  std::size_t skipped_bins = 0;  // bins with an all-zero spectrum
};

// P(theta) = sum_f P(f, theta) / (max_theta P(f, theta))^beta, accumulated in
// ascending bin order. Throws InvalidArgument for an empty input, mismatched
// grid lengths or beta outside [0, 1].
BroadbandSpectrum fuse(std::span<const NarrowbandSpectrum> spectra, double beta);

struct DoaEstimate {
  std::vector<double> angles;  // degrees, ascending
  std::vector<double> peaks;   // spectrum value at each angle
};

inline constexpr double kDefaultMinSeparation = 5.0;

// S == 1: global argmax, ties to the smallest angle. S > 1: greedy selection
// of the largest local maxima at least `min_separation_deg` apart. Throws
// DataError listing the peaks found when fewer than S qualify.
DoaEstimate locate(std::span<const double> spectrum, const DoaGrid& grid, std::size_t sources,
                   double min_separation_deg = kDefaultMinSeparation);

// Squared errors after nearest assignment: both lists sorted, paired in order.
std::vector<double> matched_squared_errors(std::span<const double> estimates,
                                           std::span<const double> truths);

// sqrt(mean squared error) over matched pairs. Throws InvalidArgument for
// empty or unequal-length inputs.
double rmse(std::span<const double> estimates, std::span<const double> truths);

// "theta_deg,power" header, one row per grid angle.
std::string spectrum_csv(std::span<const double> spectrum, const DoaGrid& grid);

}  // namespace dubf
