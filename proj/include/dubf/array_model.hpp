#pragma once

// Far-field linear array model: reference-relative sensor spacings, TDOAs and
// steering vectors, plus a precomputed steering table for the DOA scan.

#include <cstddef>
#include <span>
#include <vector>

#include "dubf/kernels.hpp"
#include "dubf/linalg.hpp"

namespace dubf {

inline constexpr double kDefaultSpeedOfSound = 343.0;

// Sensor 1 is the reference: spacings()[0] == 0.
class ArrayGeometry {
 public:
  // Throws InvalidArgument unless N >= 2, c > 0, all spacings finite and the
  // first spacing is zero.
  ArrayGeometry(std::vector<double> spacings_m, double speed_of_sound = kDefaultSpeedOfSound);

  // d_1n = (n - 1) * spacing
  static ArrayGeometry uniform_linear(std::size_t sensors, double spacing_m,
                                      double speed_of_sound = kDefaultSpeedOfSound);

  std::size_t sensors() const noexcept { return spacings_.size(); }
  std::span<const double> spacings() const noexcept { return spacings_; }
  double speed_of_sound() const noexcept { return c_; }
  double max_abs_spacing() const noexcept;

 private:
  std::vector<double> spacings_;
  double c_;
};

// Strictly increasing DOA angles in degrees, inside [-90, 90].
class DoaGrid {
 public:
  explicit DoaGrid(std::vector<double> angles_deg);
  static DoaGrid uniform(double lo_deg, double hi_deg, double step_deg);

  std::size_t size() const noexcept { return angles_.size(); }
  std::span<const double> angles() const noexcept { return angles_; }
  double operator[](std::size_t k) const { return angles_[k]; }
  // Index of the grid angle nearest to theta (first on ties).
  std::size_t nearest(double theta_deg) const noexcept;

 private:
  std::vector<double> angles_;
};

// Inclusive range of FFT bins.
struct BinRange {
  std::size_t first = 0;
  std::size_t last = 0;

  std::size_t size() const noexcept { return last - first + 1; }
  bool contains(std::size_t bin) const noexcept { return bin >= first && bin <= last; }
};

struct SteeringVector {
  CVector entries;
  std::size_t bin = 0;
  double theta_deg = 0.0;
};

// tau_1n = d_1n sin(theta) / c, seconds. Throws InvalidArgument outside
// [-90, 90] degrees.
std::vector<double> tdoa(const ArrayGeometry& geometry, double theta_deg);

// Entry n = exp(-j 2 pi bin (tau_1n fs) / L); the delay is expressed in
// samples before the bin/L phase is applied.
SteeringVector steering_vector(const ArrayGeometry& geometry, std::size_t bin,
                               std::size_t fft_size, double sample_rate, double theta_deg);

// Immutable cache of steering vectors for every (bin, angle) pair of a scan.
// Per bin the vectors are stored planar (kernels::PlanarBlock) with the angle
// as the contiguous axis.
class SteeringGrid {
 public:
  SteeringGrid(const ArrayGeometry& geometry, std::size_t fft_size, double sample_rate,
               BinRange bins, DoaGrid grid);

  std::size_t sensors() const noexcept { return sensors_; }
  const BinRange& bins() const noexcept { return bins_; }
  const DoaGrid& grid() const noexcept { return grid_; }

  kernels::PlanarBlock block(std::size_t bin) const;
  SteeringVector vector(std::size_t bin, std::size_t angle_index) const;
  // Total complex values held: N x grid size x bin count.
  std::size_t complex_count() const noexcept { return re_.size(); }

 private:
  std::size_t offset(std::size_t bin) const;

  std::size_t sensors_;
  BinRange bins_;
  DoaGrid grid_;
  std::vector<double> re_;
  std::vector<double> im_;
};

}  // namespace dubf
