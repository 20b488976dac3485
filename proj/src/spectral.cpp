#include "dubf/spectral.hpp"

#include <bit>
#include <cmath>
#include <numbers>
#include <string>

#include "dubf/errors.hpp"
#include "dubf/fft.hpp"

namespace dubf {

MultichannelSignal::MultichannelSignal(std::vector<std::vector<double>> channels,
                                       double sample_rate)
    : channels_(std::move(channels)), fs_(sample_rate) {
  if (channels_.empty()) throw InvalidArgument("MultichannelSignal: no channels");
  if (!(fs_ > 0.0)) throw InvalidArgument("MultichannelSignal: sample rate must be > 0");
  for (const auto& ch : channels_)
    if (ch.size() != channels_[0].size())
      throw InvalidArgument("MultichannelSignal: channels differ in length");
}

Window parse_window(std::string_view name) {
  if (name == "hann") return Window::kHann;
  if (name == "rectangular") return Window::kRectangular;
  throw InvalidArgument("unknown window '" + std::string(name) + "'");
}

std::string_view window_name(Window w) noexcept {
  return w == Window::kHann ? "hann" : "rectangular";
}

std::vector<double> window_coefficients(Window w, std::size_t length) {
  std::vector<double> c(length, 1.0);
  if (w == Window::kHann)
    for (std::size_t n = 0; n < length; ++n)
      c[n] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(n) /
                                  static_cast<double>(length));
  return c;
}

double window_energy(Window w, std::size_t length) {
  double e = 0.0;
  for (double v : window_coefficients(w, length)) e += v * v;
  return e;
}

SnapshotSpectra::SnapshotSpectra(std::size_t frames, std::size_t channels,
                                 std::size_t fft_size, std::size_t hop)
    : frames_(frames),
      channels_(channels),
      fft_size_(fft_size),
      hop_(hop),
      data_(frames * (fft_size / 2 + 1) * channels) {
  if (frames == 0) throw InvalidArgument("SnapshotSpectra: need at least one frame");
}

std::span<const cdouble> SnapshotSpectra::snapshot(std::size_t frame, std::size_t bin) const {
  return std::span<const cdouble>(data_).subspan((frame * bins() + bin) * channels_, channels_);
}

std::span<cdouble> SnapshotSpectra::snapshot(std::size_t frame, std::size_t bin) {
  return std::span<cdouble>(data_).subspan((frame * bins() + bin) * channels_, channels_);
}

std::size_t frame_count(std::size_t length, std::size_t fft_size, std::size_t hop) noexcept {
  if (hop == 0 || length < fft_size) return 0;
  return (length - fft_size) / hop + 1;
}

SnapshotSpectra stft(const MultichannelSignal& signal, std::size_t fft_size, std::size_t hop,
                     Window window) {
  if (fft_size < 2 || !std::has_single_bit(fft_size))
    throw InvalidArgument("stft: L must be a power of two, got " + std::to_string(fft_size));
  if (hop == 0) throw InvalidArgument("stft: hop must be >= 1");
  const std::size_t frames = frame_count(signal.length(), fft_size, hop);
  if (frames == 0)
    throw DataError("stft: signal of " + std::to_string(signal.length()) +
                    " samples is shorter than one frame of " + std::to_string(fft_size));

  SnapshotSpectra out(frames, signal.channels(), fft_size, hop);
  const std::vector<double> w = window_coefficients(window, fft_size);
  std::vector<double> buf(fft_size);
  for (std::size_t ch = 0; ch < signal.channels(); ++ch) {
    const auto x = signal.channel(ch);
    for (std::size_t k = 0; k < frames; ++k) {
      for (std::size_t n = 0; n < fft_size; ++n) buf[n] = x[k * hop + n] * w[n];
      const CVector spec = fft::forward_real(buf);
      for (std::size_t b = 0; b < spec.size(); ++b) out.snapshot(k, b)[ch] = spec[b];
    }
  }
  return out;
}

PsdTable::PsdTable(BinRange bins, std::vector<PsdMatrix> matrices)
    : bins_(bins), matrices_(std::move(matrices)) {
  if (matrices_.size() != bins_.size())
    throw InvalidArgument("PsdTable: one matrix per bin required");
}

const PsdMatrix& PsdTable::at(std::size_t bin) const {
  if (!bins_.contains(bin))
    throw InvalidArgument("PsdTable: bin " + std::to_string(bin) + " not estimated");
  return matrices_[bin - bins_.first];
}

PsdTable estimate_psd(const SnapshotSpectra& snapshots, std::size_t end_frame,
                      std::size_t snapshot_count, BinRange bins, PsdKind kind,
                      std::optional<double> noise_power) {
  if (snapshot_count == 0) throw InvalidArgument("estimate_psd: M must be >= 1");
  if (bins.last < bins.first || bins.last >= snapshots.bins())
    throw InvalidArgument("estimate_psd: bin range outside the spectra");
  if (end_frame >= snapshots.frames())
    throw DataError("estimate_psd: end frame " + std::to_string(end_frame) +
                    " beyond the last frame " + std::to_string(snapshots.frames() - 1));
  if (end_frame + 1 < snapshot_count)
    throw DataError("estimate_psd: need " + std::to_string(snapshot_count) +
                    " frames ending at frame " + std::to_string(end_frame) + ", only " +
                    std::to_string(end_frame + 1) + " available (short by " +
                    std::to_string(snapshot_count - end_frame - 1) + ")");
  if (noise_power && !(*noise_power >= 0.0))
    throw InvalidArgument("estimate_psd: noise power must be >= 0");

  const std::size_t n = snapshots.channels();
  const double inv_m = 1.0 / static_cast<double>(snapshot_count);
  std::vector<PsdMatrix> out;
  out.reserve(bins.size());
  CVector x(n);
  for (std::size_t b = bins.first; b <= bins.last; ++b) {
    ComplexMatrix acc(n, n);
    for (std::size_t p = 0; p < snapshot_count; ++p) {
      const auto s = snapshots.snapshot(end_frame - p, b);
      for (std::size_t i = 0; i < n; ++i) {
        x[i] = s[i];
        if (kind == PsdKind::kPhaseOnly) {
          const double mag = std::abs(x[i]);
          x[i] = mag < 1e-15 ? cdouble{} : x[i] / mag;
        }
      }
      for (std::size_t i = 0; i < n; ++i) {
        acc(i, i) += std::norm(x[i]);
        for (std::size_t j = i + 1; j < n; ++j) acc(i, j) += x[i] * std::conj(x[j]);
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      acc(i, i) *= inv_m;
      for (std::size_t j = i + 1; j < n; ++j) {
        acc(i, j) *= inv_m;
        acc(j, i) = std::conj(acc(i, j));
      }
    }
    out.push_back(PsdMatrix{HermitianMatrix::from(acc), snapshot_count, noise_power});
  }
  return PsdTable(bins, std::move(out));
}

BinRange bin_range(double sample_rate, std::size_t fft_size, double f_min, double f_max) {
  if (!(sample_rate > 0.0) || fft_size == 0)
    throw InvalidArgument("bin_range: invalid sample rate or FFT size");
  if (!(f_min >= 0.0 && f_min < f_max && f_max <= sample_rate / 2.0))
    throw InvalidArgument("bin_range: need 0 <= f_min < f_max <= fs/2");
  const double scale = static_cast<double>(fft_size) / sample_rate;
  const auto lo = static_cast<std::size_t>(std::ceil(f_min * scale));
  const auto hi = static_cast<std::size_t>(std::floor(f_max * scale));
  if (lo > hi)
    throw InvalidArgument("bin_range: band [" + std::to_string(f_min) + ", " +
                          std::to_string(f_max) + "] Hz contains no bin center");
  return {lo, hi};
}

}  // namespace dubf
