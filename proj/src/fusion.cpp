#include "dubf/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "dubf/csv.hpp"
#include "dubf/errors.hpp"

namespace dubf {

BroadbandSpectrum fuse(std::span<const NarrowbandSpectrum> spectra, double beta) {
  if (spectra.empty()) throw InvalidArgument("fuse: no narrowband spectra");
  if (!(beta >= 0.0 && beta <= 1.0)) throw InvalidArgument("fuse: beta must lie in [0, 1]");
  const std::size_t g = spectra.front().values.size();

  BroadbandSpectrum out;
  out.values.assign(g, 0.0);
  out.beta = beta;
  out.bins = {spectra.front().bin, spectra.back().bin};
  for (const auto& s : spectra) {
    if (s.values.size() != g) throw InvalidArgument("fuse: spectra differ in grid length");
    const double peak = *std::max_element(s.values.begin(), s.values.end());
    if (!(peak > 0.0)) {
      ++out.skipped_bins;
      continue;
    }
    const double scale = 1.0 / std::pow(peak, beta);
    for (std::size_t t = 0; t < g; ++t) out.values[t] += s.values[t] * scale;
  }
  return out;
}

DoaEstimate locate(std::span<const double> spectrum, const DoaGrid& grid, std::size_t sources,
                   double min_separation_deg) {
  const std::size_t g = grid.size();
  if (spectrum.size() != g) throw InvalidArgument("locate: spectrum/grid length mismatch");
  if (sources == 0) throw InvalidArgument("locate: source count must be >= 1");

  if (sources == 1) {
    std::size_t best = 0;
    for (std::size_t t = 1; t < g; ++t)
      if (spectrum[t] > spectrum[best]) best = t;
    return {{grid[best]}, {spectrum[best]}};
  }

  if (!(grid[g - 1] - grid[0] > static_cast<double>(sources - 1) * min_separation_deg))
    throw InvalidArgument("locate: grid span too small for the requested separation");

  // local maxima: rises from the left, does not fall short on the right; a grid edge
  // only counts when strictly above its neighbour
  std::vector<std::size_t> peaks;
  for (std::size_t t = 0; t < g; ++t) {
    const bool left = t == 0 || spectrum[t] > spectrum[t - 1];
    const bool right = t + 1 == g || (t == 0 ? spectrum[t] > spectrum[t + 1] : spectrum[t] >= spectrum[t + 1]);
    if (left && right) peaks.push_back(t);
  }
  std::stable_sort(peaks.begin(), peaks.end(),
                   [&](std::size_t a, std::size_t b) { return spectrum[a] > spectrum[b]; });

  std::vector<std::size_t> accepted;
  for (std::size_t t : peaks) {
    const bool clear = std::all_of(accepted.begin(), accepted.end(), [&](std::size_t u) {
      return std::abs(grid[t] - grid[u]) >= min_separation_deg;
    });
    if (clear) accepted.push_back(t);
    if (accepted.size() == sources) break;
  }
  if (accepted.size() < sources) {
    std::ostringstream msg;
    msg << "locate: found " << accepted.size() << " separated peaks, need " << sources << ":";
    for (std::size_t t : accepted) msg << ' ' << grid[t];
    throw DataError(msg.str());
  }
  std::sort(accepted.begin(), accepted.end());
  DoaEstimate out;
  for (std::size_t t : accepted) {
    out.angles.push_back(grid[t]);
    out.peaks.push_back(spectrum[t]);
  }
  return out;
}

std::vector<double> matched_squared_errors(std::span<const double> estimates,
                                           std::span<const double> truths) {
  if (estimates.empty() || estimates.size() != truths.size())
    throw InvalidArgument("rmse: need equal-length, non-empty estimate and truth lists");
  std::vector<double> e(estimates.begin(), estimates.end());
  std::vector<double> t(truths.begin(), truths.end());
  std::sort(e.begin(), e.end());
  std::sort(t.begin(), t.end());
  std::vector<double> sq(e.size());
  for (std::size_t k = 0; k < e.size(); ++k) sq[k] = (e[k] - t[k]) * (e[k] - t[k]);
  return sq;
}

double rmse(std::span<const double> estimates, std::span<const double> truths) {
  const std::vector<double> sq = matched_squared_errors(estimates, truths);
  return std::sqrt(std::accumulate(sq.begin(), sq.end(), 0.0) / static_cast<double>(sq.size()));
}

std::string spectrum_csv(std::span<const double> spectrum, const DoaGrid& grid) {
  if (spectrum.size() != grid.size())
    throw InvalidArgument("spectrum_csv: spectrum/grid length mismatch");
  std::string out = "theta_deg,power\n";
  for (std::size_t t = 0; t < grid.size(); ++t) {
    out += format_double(grid[t]);
    out += ',';
    out += format_double(spectrum[t]);
    out += '\n';
  }
  return out;
}

}  // namespace dubf
