#include "dubf/simulator.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "dubf/errors.hpp"
#include "dubf/fft.hpp"

namespace dubf {

namespace {

double mean_square(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return x.empty() ? 0.0 : s / static_cast<double>(x.size());
}

std::vector<double> gaussian(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist(0.0, 1.0);
  std::vector<double> x(n);
  for (double& v : x) v = dist(rng);
  return x;
}

void rescale(std::vector<double>& x, double power) {
  const double ms = mean_square(x);
  if (ms == 0.0) throw InvalidArgument("generate_source: band holds no energy");
  const double g = std::sqrt(power / ms);
  for (double& v : x) v *= g;
}

}  // namespace

SourceKind parse_source_kind(std::string_view name) {
  if (name == "sinusoid") return SourceKind::kSinusoid;
  if (name == "white_broadband") return SourceKind::kWhiteBroadband;
  if (name == "bandlimited") return SourceKind::kBandlimited;
  throw InvalidArgument("unknown source kind '" + std::string(name) +
                        "' (expected sinusoid, white_broadband, bandlimited)");
}

std::string_view source_kind_name(SourceKind k) noexcept {
  switch (k) {
    case SourceKind::kSinusoid: return "sinusoid";
    case SourceKind::kWhiteBroadband: return "white_broadband";
    case SourceKind::kBandlimited: return "bandlimited";
  }
  return "?";
}

void validate(const SourceSpec& spec) {
  if (!(spec.duration_s > 0.0)) throw InvalidArgument("source: duration must be > 0");
  if (!(spec.doa_deg >= -90.0 && spec.doa_deg <= 90.0))
    throw InvalidArgument("source: DOA must lie in [-90, 90] deg");
  if (!(spec.power > 0.0)) throw InvalidArgument("source: power must be > 0");
  if (spec.kind == SourceKind::kSinusoid && !(spec.frequency_hz > 0.0))
    throw InvalidArgument("source: sinusoid frequency must be > 0");
  if (spec.kind == SourceKind::kBandlimited &&
      !(spec.f_lo_hz >= 0.0 && spec.f_lo_hz < spec.f_hi_hz))
    throw InvalidArgument("source: bandlimited needs 0 <= f_lo < f_hi");
  if (!(spec.modulation_hz >= 0.0)) throw InvalidArgument("source: modulation must be >= 0");
}

std::vector<double> generate_source(const SourceSpec& spec, double sample_rate,
                                    std::uint64_t seed) {
  validate(spec);
  const double top = spec.kind == SourceKind::kSinusoid      ? spec.frequency_hz
                     : spec.kind == SourceKind::kBandlimited ? spec.f_hi_hz
                                                             : 0.0;
  if (!(sample_rate > 2.0 * top))
    throw InvalidArgument("generate_source: sample rate " + std::to_string(sample_rate) +
                          " Hz aliases " + std::to_string(top) + " Hz");
  const auto n = static_cast<std::size_t>(std::llround(spec.duration_s * sample_rate));
  if (n == 0) throw InvalidArgument("generate_source: duration shorter than one sample");

  switch (spec.kind) {
    case SourceKind::kSinusoid: {
      std::vector<double> x(n);
      const double amp = std::sqrt(2.0 * spec.power);
      const double w = 2.0 * std::numbers::pi * spec.frequency_hz / sample_rate;
      for (std::size_t t = 0; t < n; ++t) x[t] = amp * std::sin(w * static_cast<double>(t));
      return x;
    }
    case SourceKind::kWhiteBroadband: {
      std::vector<double> x = gaussian(n, seed);
      const double g = std::sqrt(spec.power);
      for (double& v : x) v *= g;
      return x;
    }
    case SourceKind::kBandlimited: {
      CVector spec_bins = fft::forward_real(gaussian(n, seed));
      const double hz_per_bin = sample_rate / static_cast<double>(n);
      for (std::size_t k = 0; k < spec_bins.size(); ++k) {
        const double f = static_cast<double>(k) * hz_per_bin;
        if (f < spec.f_lo_hz || f > spec.f_hi_hz) spec_bins[k] = 0.0;
      }
      std::vector<double> x = fft::inverse_real(spec_bins, n);
      if (spec.modulation_hz > 0.0) {
        const double w = 2.0 * std::numbers::pi * spec.modulation_hz / sample_rate;
        for (std::size_t t = 0; t < n; ++t)
          x[t] *= 0.5 * (1.0 - std::cos(w * static_cast<double>(t)));
      }
      rescale(x, spec.power);
      return x;
    }
  }
  throw InvalidArgument("generate_source: unknown kind");
}

std::size_t propagation_guard(const ArrayGeometry& geometry, double sample_rate) {
  return static_cast<std::size_t>(
      std::ceil(geometry.max_abs_spacing() * sample_rate / geometry.speed_of_sound() - 1e-12));
}

MultichannelSignal propagate_freefield(std::span<const double> samples,
                                       const ArrayGeometry& geometry, double theta_deg,
                                       double sample_rate) {
  if (!(sample_rate > 0.0)) throw InvalidArgument("propagate_freefield: fs must be > 0");
  const std::size_t len = samples.size();
  const std::size_t guard = propagation_guard(geometry, sample_rate);
  if (len <= 2 * guard)
    throw InvalidArgument("propagate_freefield: signal shorter than the edge guard");
  const std::vector<double> tau = tdoa(geometry, theta_deg);

  std::optional<CVector> source_bins;
  std::vector<std::vector<double>> channels;
  channels.reserve(tau.size());
  for (double t : tau) {
    const double delay = t * sample_rate;
    std::vector<double> full;
    if (delay == 0.0) {
      full.assign(samples.begin(), samples.end());
    } else {
      if (!source_bins) source_bins = fft::forward_real(samples);
      CVector shifted = *source_bins;
      for (std::size_t k = 0; k < shifted.size(); ++k) {
        const double phase = -2.0 * std::numbers::pi * static_cast<double>(k) * delay /
                             static_cast<double>(len);
        if (len % 2 == 0 && k == len / 2)
          shifted[k] *= std::cos(phase);  // Nyquist bin stays real
        else
          shifted[k] *= cdouble(std::cos(phase), std::sin(phase));
      }
      full = fft::inverse_real(shifted, len);
    }
    channels.emplace_back(full.begin() + static_cast<std::ptrdiff_t>(guard),
                          full.end() - static_cast<std::ptrdiff_t>(guard));
  }
  return MultichannelSignal(std::move(channels), sample_rate);
}

MultichannelSignal mix(std::span<const MultichannelSignal> scenes) {
  if (scenes.empty()) throw InvalidArgument("mix: no scenes");
  const MultichannelSignal& first = scenes.front();
  std::vector<std::vector<double>> sum(first.channels(), std::vector<double>(first.length()));
  for (const auto& s : scenes) {
    if (s.channels() != first.channels() || s.length() != first.length() ||
        s.sample_rate() != first.sample_rate())
      throw InvalidArgument("mix: scenes differ in channel count, length or sample rate");
    for (std::size_t ch = 0; ch < s.channels(); ++ch) {
      const auto x = s.channel(ch);
      for (std::size_t t = 0; t < x.size(); ++t) sum[ch][t] += x[t];
    }
  }
  return MultichannelSignal(std::move(sum), first.sample_rate());
}

NoisySignal add_noise(const MultichannelSignal& signal, const NoiseSpec& spec) {
  if (!spec.snr_db) return {signal, 0.0};
  const double p_ref = mean_square(signal.channel(0));
  if (!(p_ref > 0.0)) throw InvalidArgument("add_noise: reference channel has zero power");
  const double variance = p_ref / std::pow(10.0, *spec.snr_db / 10.0);
  const double sd = std::sqrt(variance);

  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> dist(0.0, 1.0);
  MultichannelSignal out = signal;
  for (std::size_t ch = 0; ch < out.channels(); ++ch)
    for (double& v : out.channel(ch)) v += sd * dist(rng);
  return {std::move(out), variance};
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) noexcept {
  // splitmix64 finalizer over (base, stream)
  std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace dubf
