#include "dubf/array_model.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "dubf/errors.hpp"

namespace dubf {

namespace {

double deg2rad(double deg) { return deg * std::numbers::pi / 180.0; }

void check_angle(double theta_deg) {
  if (!(theta_deg >= -90.0 && theta_deg <= 90.0))
    throw InvalidArgument("DOA " + std::to_string(theta_deg) +
                          " deg outside [-90, 90]; far-field linear model undefined");
}

}  // namespace

ArrayGeometry::ArrayGeometry(std::vector<double> spacings_m, double speed_of_sound)
    : spacings_(std::move(spacings_m)), c_(speed_of_sound) {
  if (spacings_.size() < 2) throw InvalidArgument("ArrayGeometry: need at least 2 sensors");
  if (!(c_ > 0.0) || !std::isfinite(c_))
    throw InvalidArgument("ArrayGeometry: propagation speed must be positive");
  for (double d : spacings_)
    if (!std::isfinite(d)) throw InvalidArgument("ArrayGeometry: non-finite spacing");
  if (spacings_[0] != 0.0)
    throw InvalidArgument("ArrayGeometry: first spacing must be 0 (reference sensor)");
}

ArrayGeometry ArrayGeometry::uniform_linear(std::size_t sensors, double spacing_m,
                                            double speed_of_sound) {
  std::vector<double> d(sensors);
  for (std::size_t n = 0; n < sensors; ++n) d[n] = static_cast<double>(n) * spacing_m;
  return ArrayGeometry(std::move(d), speed_of_sound);
}

double ArrayGeometry::max_abs_spacing() const noexcept {
  double m = 0.0;
  for (double d : spacings_) m = std::max(m, std::abs(d));
  return m;
}

DoaGrid::DoaGrid(std::vector<double> angles_deg) : angles_(std::move(angles_deg)) {
  if (angles_.size() < 2) throw InvalidArgument("DoaGrid: need at least 2 angles");
  for (std::size_t k = 0; k < angles_.size(); ++k) {
    check_angle(angles_[k]);
    if (k > 0 && !(angles_[k] > angles_[k - 1]))
      throw InvalidArgument("DoaGrid: angles must be strictly increasing");
  }
}

DoaGrid DoaGrid::uniform(double lo_deg, double hi_deg, double step_deg) {
  if (!(step_deg > 0.0)) throw InvalidArgument("DoaGrid: step must be positive");
  if (!(hi_deg > lo_deg)) throw InvalidArgument("DoaGrid: empty angle span");
  const auto count = static_cast<std::size_t>(std::floor((hi_deg - lo_deg) / step_deg + 1e-9)) + 1;
  std::vector<double> a(count);
  for (std::size_t k = 0; k < count; ++k) a[k] = lo_deg + static_cast<double>(k) * step_deg;
  return DoaGrid(std::move(a));
}

std::size_t DoaGrid::nearest(double theta_deg) const noexcept {
  std::size_t best = 0;
  for (std::size_t k = 1; k < angles_.size(); ++k)
    if (std::abs(angles_[k] - theta_deg) < std::abs(angles_[best] - theta_deg)) best = k;
  return best;
}

std::vector<double> tdoa(const ArrayGeometry& geometry, double theta_deg) {
  check_angle(theta_deg);
  const double s = std::sin(deg2rad(theta_deg));
  std::vector<double> tau(geometry.sensors());
  for (std::size_t n = 0; n < tau.size(); ++n)
    tau[n] = geometry.spacings()[n] * s / geometry.speed_of_sound();
  return tau;
}

SteeringVector steering_vector(const ArrayGeometry& geometry, std::size_t bin,
                               std::size_t fft_size, double sample_rate, double theta_deg) {
  if (fft_size == 0 || bin > fft_size / 2)
    throw InvalidArgument("steering_vector: bin " + std::to_string(bin) +
                          " outside [0, L/2]");
  const std::vector<double> tau = tdoa(geometry, theta_deg);
  SteeringVector sv{CVector(tau.size()), bin, theta_deg};
  sv.entries[0] = 1.0;
  for (std::size_t n = 1; n < tau.size(); ++n) {
    const double phase = -2.0 * std::numbers::pi * static_cast<double>(bin) *
                         (tau[n] * sample_rate) / static_cast<double>(fft_size);
    sv.entries[n] = cdouble(std::cos(phase), std::sin(phase));
  }
  return sv;
}

SteeringGrid::SteeringGrid(const ArrayGeometry& geometry, std::size_t fft_size,
                           double sample_rate, BinRange bins, DoaGrid grid)
    : sensors_(geometry.sensors()), bins_(bins), grid_(std::move(grid)) {
  if (bins.last < bins.first) throw InvalidArgument("SteeringGrid: empty bin range");
  const std::size_t g = grid_.size();
  re_.resize(sensors_ * g * bins_.size());
  im_.resize(re_.size());
  for (std::size_t b = bins_.first; b <= bins_.last; ++b) {
    const std::size_t base = offset(b);
    for (std::size_t t = 0; t < g; ++t) {
      const SteeringVector sv = steering_vector(geometry, b, fft_size, sample_rate, grid_[t]);
      for (std::size_t n = 0; n < sensors_; ++n) {
        re_[base + n * g + t] = sv.entries[n].real();
        im_[base + n * g + t] = sv.entries[n].imag();
      }
    }
  }
}

std::size_t SteeringGrid::offset(std::size_t bin) const {
  if (!bins_.contains(bin))
    throw InvalidArgument("SteeringGrid: bin " + std::to_string(bin) + " not in table");
  return (bin - bins_.first) * sensors_ * grid_.size();
}

kernels::PlanarBlock SteeringGrid::block(std::size_t bin) const {
  const std::size_t base = offset(bin);
  return {re_.data() + base, im_.data() + base, sensors_, grid_.size()};
}

SteeringVector SteeringGrid::vector(std::size_t bin, std::size_t angle_index) const {
  const std::size_t base = offset(bin);
  const std::size_t g = grid_.size();
  SteeringVector sv{CVector(sensors_), bin, grid_[angle_index]};
  for (std::size_t n = 0; n < sensors_; ++n)
    sv.entries[n] = cdouble(re_[base + n * g + angle_index], im_[base + n * g + angle_index]);
  return sv;
}

}  // namespace dubf
