#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "dubf/errors.hpp"
#include "dubf/fusion.hpp"

using namespace dubf;

namespace {

NarrowbandSpectrum spectrum(std::size_t bin, std::vector<double> v) {
  return {bin, std::move(v), Method::kDu, false};
}

std::vector<NarrowbandSpectrum> random_spectra(std::size_t bins, std::size_t g, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.1, 10.0);
  std::vector<NarrowbandSpectrum> out;
  for (std::size_t b = 0; b < bins; ++b) {
    std::vector<double> v(g);
    for (auto& x : v) x = u(rng);
    out.push_back(spectrum(10 + b, v));
  }
  return out;
}

// Gaussian bump on the 1-degree grid.
std::vector<double> bumps(const DoaGrid& grid, std::vector<std::pair<double, double>> peaks) {
  std::vector<double> v(grid.size(), 0.01);
  for (std::size_t t = 0; t < grid.size(); ++t)
    for (auto [c, h] : peaks) v[t] += h * std::exp(-0.5 * std::pow((grid[t] - c) / 3.0, 2));
  return v;
}

}  // namespace

TEST(Fuse, BetaZeroIsPlainSum) {
  const auto s = random_spectra(5, 181, 1);
  const BroadbandSpectrum f = fuse(s, 0.0);
  for (std::size_t t = 0; t < 181; ++t) {
    double sum = 0.0;
    for (const auto& n : s) sum += n.values[t];
    EXPECT_EQ(f.values[t], sum);
  }
  EXPECT_EQ(f.bins.first, 10u);
  EXPECT_EQ(f.bins.last, 14u);
}

TEST(Fuse, BetaOneBoundedByBinCount) {
  const auto s = random_spectra(9, 181, 2);
  const BroadbandSpectrum f = fuse(s, 1.0);
  EXPECT_LE(*std::max_element(f.values.begin(), f.values.end()), 9.0);
}

TEST(Fuse, SingleBinKeepsArgmax) {
  const auto s = random_spectra(1, 181, 3);
  for (double beta : {0.0, 0.3, 1.0}) {
    const auto f = fuse(s, beta).values;
    EXPECT_EQ(std::max_element(f.begin(), f.end()) - f.begin(),
              std::max_element(s[0].values.begin(), s[0].values.end()) - s[0].values.begin());
  }
}

TEST(Fuse, BetaOneInvariantToPerBinScaling) {
  auto s = random_spectra(6, 181, 4);
  const auto before = fuse(s, 1.0).values;
  for (auto& v : s[2].values) v *= 1e6;
  const auto after = fuse(s, 1.0).values;
  for (std::size_t t = 0; t < 181; ++t) EXPECT_NEAR(after[t], before[t], 1e-12 * before[t]);
}

TEST(Fuse, SkipsAllZeroBins) {
  auto s = random_spectra(3, 181, 5);
  std::fill(s[1].values.begin(), s[1].values.end(), 0.0);
  const BroadbandSpectrum f = fuse(s, 1.0);
  EXPECT_EQ(f.skipped_bins, 1u);
  std::vector<NarrowbandSpectrum> kept{s[0], s[2]};
  EXPECT_EQ(f.values, fuse(kept, 1.0).values);
}

TEST(Fuse, Errors) {
  EXPECT_THROW(fuse({}, 1.0), InvalidArgument);
  const auto s = random_spectra(2, 181, 6);
  EXPECT_THROW(fuse(s, 1.5), InvalidArgument);
  auto bad = s;
  bad[1].values.pop_back();
  EXPECT_THROW(fuse(bad, 1.0), InvalidArgument);
}

TEST(Locate, SinglePeakAndTieBreak) {
  const DoaGrid grid = DoaGrid::uniform(-90, 90, 1);
  EXPECT_EQ(locate(bumps(grid, {{-18, 1}}), grid, 1).angles, std::vector<double>{-18.0});
  EXPECT_EQ(locate(std::vector<double>(181, 2.0), grid, 1).angles, std::vector<double>{-90.0});
}

TEST(Locate, TwoPeaksAgainstExhaustiveEnumeration) {
  const DoaGrid grid = DoaGrid::uniform(-90, 90, 1);
  const auto v = bumps(grid, {{-11, 1.0}, {31, 0.8}});
  // oracle: the two largest strict interior local maxima
  std::vector<std::pair<double, double>> maxima;
  for (std::size_t t = 1; t + 1 < v.size(); ++t)
    if (v[t] > v[t - 1] && v[t] > v[t + 1]) maxima.emplace_back(v[t], grid[t]);
  std::sort(maxima.rbegin(), maxima.rend());
  ASSERT_GE(maxima.size(), 2u);
  std::vector<double> want{maxima[0].second, maxima[1].second};
  std::sort(want.begin(), want.end());

  const DoaEstimate e = locate(v, grid, 2, 5.0);
  EXPECT_EQ(e.angles, want);
  EXPECT_EQ(e.angles, (std::vector<double>{-11.0, 31.0}));
}

TEST(Locate, MinSeparationAndShortage) {
  const DoaGrid grid = DoaGrid::uniform(-90, 90, 1);
  // second bump 3 degrees away is inside the exclusion radius
  const auto v = bumps(grid, {{0, 1.0}, {40, 0.5}});
  EXPECT_EQ(locate(v, grid, 2, 5.0).angles, (std::vector<double>{0.0, 40.0}));
  const auto one = bumps(grid, {{0, 1.0}});
  try {
    locate(one, grid, 2, 5.0);
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("0"), std::string::npos);
  }
  EXPECT_THROW(locate(one, grid, 0), InvalidArgument);
  EXPECT_THROW(locate(one, grid, 3, 100.0), InvalidArgument);
}

TEST(Locate, InvariantToMonotoneTransform) {
  const DoaGrid grid = DoaGrid::uniform(-90, 90, 1);
  const auto v = bumps(grid, {{-40, 0.7}, {12, 1.0}, {60, 0.4}});
  std::vector<double> w(v.size());
  for (std::size_t t = 0; t < v.size(); ++t) w[t] = std::log(v[t]) * 3.0 + 1.0;
  for (std::size_t s : {1u, 2u, 3u})
    EXPECT_EQ(locate(v, grid, s).angles, locate(w, grid, s).angles);
}

TEST(Rmse, Examples) {
  const std::vector<double> a{-18.0};
  EXPECT_EQ(rmse(a, a), 0.0);
  EXPECT_DOUBLE_EQ(rmse(std::vector<double>{-16.0}, a), 2.0);
  EXPECT_DOUBLE_EQ(rmse(std::vector<double>{30.0, -10.0}, std::vector<double>{-11.0, 31.0}), 1.0);
  EXPECT_THROW(rmse(std::vector<double>{}, std::vector<double>{}), InvalidArgument);
  EXPECT_THROW(rmse(std::vector<double>{1.0}, std::vector<double>{1.0, 2.0}), InvalidArgument);
}

TEST(SpectrumCsv, Format) {
  const DoaGrid grid({-1.0, 0.5});
  const std::vector<double> v{0.1, 1.0 / 3.0};
  EXPECT_EQ(spectrum_csv(v, grid), "theta_deg,power\n-1,0.1\n0.5,0.3333333333333333\n");
}
