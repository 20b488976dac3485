#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "dubf/beamformers.hpp"
#include "dubf/errors.hpp"
#include "test_util.hpp"

using namespace dubf;
using namespace dubf::testing;

namespace {

constexpr std::size_t kBin = 46;

struct Scenario {
  ArrayGeometry geometry;
  SteeringGrid steering;

  explicit Scenario(std::size_t n = 8, double d = 0.07)
      : geometry(ArrayGeometry::uniform_linear(n, d)),
        steering(geometry, 2048, 44100, {kBin, kBin}, DoaGrid::uniform(-90, 90, 1)) {}

  CVector a(double theta) const { return ula_steering(geometry.sensors(), geometry.spacings()[1], theta, kBin, 2048, 44100); }
};

std::size_t argmax(const std::vector<double>& v) {
  return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

}  // namespace

TEST(Method, NamesRoundTrip) {
  for (Method m : {Method::kSrp, Method::kSrpPhat, Method::kDu, Method::kDuSigma, Method::kMvdr,
                   Method::kMusic})
    EXPECT_EQ(parse_method(method_name(m)), m);
  EXPECT_THROW(parse_method("capon"), InvalidArgument);
}

TEST(Srp, Examples) {
  const Scenario s;
  for (double v : srp_spectrum(HermitianMatrix::identity(8), s.steering, kBin).values)
    EXPECT_NEAR(v, 8.0, 1e-12);

  const HermitianMatrix phi = exact_phi(s.a(-18), 1.0, 0.0);
  const auto p = srp_spectrum(phi, s.steering, kBin).values;
  EXPECT_EQ(s.steering.grid()[argmax(p)], -18.0);
  EXPECT_NEAR(p[argmax(p)], 64.0, 1e-9);

  const auto scaled = srp_spectrum(phi.affine(3.5, 0.0), s.steering, kBin).values;
  for (std::size_t t = 0; t < p.size(); ++t) EXPECT_NEAR(scaled[t], 3.5 * p[t], 1e-9);
}

TEST(DuUnload, Examples) {
  const CVector ones(4, 1.0);
  const auto e = hermitian_eig(du_unload(HermitianMatrix::outer(ones)));
  EXPECT_NEAR(e.values[0], 4.0, 1e-12);
  EXPECT_NEAR(e.values[3], 0.0, 1e-12);

  const Scenario s;
  const HermitianMatrix noisy = exact_phi(s.a(-18), 1.0, 0.1);
  const auto en = hermitian_eig(du_unload(noisy));
  EXPECT_NEAR(en.values.back(), 0.7, 1e-9);

  const HermitianMatrix iso = HermitianMatrix::identity(8).affine(2.5, 0.0);
  const HermitianMatrix u = du_unload(iso);
  for (std::size_t i = 0; i < 8; ++i)
    for (std::size_t j = 0; j < 8; ++j)
      EXPECT_NEAR(std::abs(u(i, j) - (i == j ? 2.5 * 7 : 0.0)), 0.0, 1e-12);

  EXPECT_THROW(du_unload(HermitianMatrix::zeros(4)), InvalidArgument);
}

TEST(DuUnload, SharedEigenbasisOnRandomPsd) {
  std::mt19937_64 rng(8);
  for (std::size_t n : {4u, 8u, 16u}) {
    const HermitianMatrix phi = random_psd(n, rng);
    const auto ep = hermitian_eig(phi);
    const HermitianMatrix u = du_unload(phi);
    const double tr = trace(phi);
    for (std::size_t k = 0; k < n; ++k) {
      // u_k is an eigenvector of the unloaded matrix with eigenvalue tr - lambda_k
      const CVector uk = ep.vector(k);
      const CVector mu = mat_vec(u.matrix(), uk);
      for (std::size_t i = 0; i < n; ++i)
        EXPECT_NEAR(std::abs(mu[i] - (tr - ep.values[k]) * uk[i]), 0.0, 1e-9 * tr);
    }
  }
}

TEST(DuSpectrum, Examples) {
  const Scenario s;
  const HermitianMatrix phi = exact_phi(s.a(-18), 1.0, 0.0);
  const auto p = du_spectrum(phi, s.steering, kBin).values;
  EXPECT_EQ(s.steering.grid()[argmax(p)], -18.0);
  EXPECT_TRUE(std::isfinite(p[argmax(p)]));
  EXPECT_NEAR(p[argmax(p)], 1.0 / (1e-12 * 8.0 * 8.0), 1e-3 / (1e-12 * 64.0));

  const double c = 0.3;
  for (double v : du_spectrum(HermitianMatrix::identity(8).affine(c, 0.0), s.steering, kBin).values)
    EXPECT_NEAR(v, 1.0 / (c * 8 * 7), 1e-12);
}

TEST(DuSpectrum, TwoSourceMatchesDirectEvaluation) {
  const Scenario s(16, 0.2);
  const HermitianMatrix phi = exact_phi(s.a(-11), 1.0, 0.01) + exact_phi(s.a(31), 1.0, 0.0);
  const auto p = du_spectrum(phi, s.steering, kBin).values;
  const HermitianMatrix u = du_unload(phi);
  for (std::size_t t = 0; t < p.size(); ++t) {
    const double want = 1.0 / direct_form(u.matrix(), s.a(s.steering.grid()[t]));
    EXPECT_NEAR(p[t], want, 1e-9 * want);
  }
  // local maxima at both source directions
  for (double theta : {-11.0, 31.0}) {
    const std::size_t k = s.steering.grid().nearest(theta);
    EXPECT_GT(p[k], p[k - 1]);
    EXPECT_GT(p[k], p[k + 1]);
  }
}

TEST(DuSpectrum, NeverCallsEigensolver) {
  const Scenario s;
  std::mt19937_64 rng(4);
  const HermitianMatrix phi = random_psd(8, rng);
  const auto before = eigensolver_calls();
  du_spectrum(phi, s.steering, kBin);
  du_noise_aware_spectrum(phi, 0.01, s.steering, kBin);
  narrowband_spectrum(Method::kDu, {phi, 10, {}}, {}, s.steering, kBin);
  EXPECT_EQ(eigensolver_calls(), before);
  music_spectrum(phi, 1, s.steering, kBin);
  EXPECT_EQ(eigensolver_calls(), before + 1);
}

TEST(DuNoiseAware, Examples) {
  const Scenario s;
  const CVector a0 = s.a(-18);
  const HermitianMatrix phi = exact_phi(a0, 1.0, 0.1);
  const double reg = 8.8 - 7 * 0.1;
  const HermitianMatrix r = phi.affine(-1.0, reg);
  CVector u = a0;
  for (auto& z : u) z /= std::sqrt(8.0);
  EXPECT_LT(std::abs(quadratic_form(r, u)), 1e-9);

  std::mt19937_64 rng(2);
  const HermitianMatrix any = random_psd(8, rng);
  const auto zero = du_noise_aware_spectrum(any, 0.0, s.steering, kBin);
  EXPECT_EQ(zero.values, du_spectrum(any, s.steering, kBin).values);
  EXPECT_FALSE(zero.fallback);

  const auto over = du_noise_aware_spectrum(phi, 10.0, s.steering, kBin);
  EXPECT_TRUE(over.fallback);
  EXPECT_EQ(over.values, du_spectrum(phi, s.steering, kBin).values);

  EXPECT_THROW(du_noise_aware_spectrum(phi, -1.0, s.steering, kBin), InvalidArgument);
}

TEST(DlLoad, Examples) {
  const std::vector<double> d(8, 1.1);
  EXPECT_NEAR(dl_load(HermitianMatrix::diagonal(d), 1e-4, 2048), 4.2969e-7, 1e-11);
  EXPECT_EQ(dl_load(HermitianMatrix::zeros(3), 1e-4, 2048), 0.0);
}

TEST(Mvdr, Examples) {
  const Scenario s;
  for (double v : mvdr_dl_spectrum(HermitianMatrix::zeros(8), 1.0, s.steering, kBin).values)
    EXPECT_NEAR(v, 1.0 / 8.0, 1e-12);

  std::mt19937_64 rng(6);
  const HermitianMatrix phi = random_psd(8, rng);
  const auto p = mvdr_dl_spectrum(phi, 0.01, s.steering, kBin).values;
  const auto q = mvdr_dl_spectrum(phi.affine(4.0, 0.0), 0.04, s.steering, kBin).values;
  for (std::size_t t = 0; t < p.size(); ++t) EXPECT_NEAR(q[t], 4.0 * p[t], 1e-9 * q[t]);
  EXPECT_EQ(argmax(p), argmax(q));

  const ComplexMatrix inv = brute_inverse(phi.affine(1.0, 0.01).matrix());
  for (std::size_t t = 0; t < p.size(); t += 10) {
    const double want = 1.0 / direct_form(inv, s.a(s.steering.grid()[t]));
    EXPECT_NEAR(p[t], want, 1e-8 * want);
  }
  EXPECT_THROW(mvdr_dl_spectrum(phi, 0.0, s.steering, kBin), InvalidArgument);
}

TEST(Music, Examples) {
  const Scenario s;
  const auto p = music_spectrum(exact_phi(s.a(-18), 1.0, 0.0), 1, s.steering, kBin).values;
  EXPECT_EQ(s.steering.grid()[argmax(p)], -18.0);
  EXPECT_TRUE(std::isfinite(p[argmax(p)]));

  for (double v : music_spectrum(HermitianMatrix::identity(8), 1, s.steering, kBin).values) {
    EXPECT_TRUE(std::isfinite(v));
    EXPECT_GT(v, 0.0);
  }
  EXPECT_THROW(music_spectrum(HermitianMatrix::identity(8), 8, s.steering, kBin), InvalidArgument);
  EXPECT_THROW(music_spectrum(HermitianMatrix::identity(8), 0, s.steering, kBin), InvalidArgument);
}

TEST(Music, TwoSourcesHighSnr) {
  const Scenario s(16, 0.2);
  const double sigma2 = 0.01;  // 20 dB for the unit-power source
  const HermitianMatrix phi = exact_phi(s.a(-11), 1.0, sigma2) + exact_phi(s.a(31), 0.8, 0.0);
  const auto p = music_spectrum(phi, 2, s.steering, kBin).values;
  for (double theta : {-11.0, 31.0}) {
    const std::size_t k = s.steering.grid().nearest(theta);
    std::size_t best = k - 1;
    for (std::size_t j = k - 1; j <= k + 1; ++j)
      if (p[j] > p[best]) best = j;
    EXPECT_NEAR(s.steering.grid()[best], theta, 1.0);
  }
}

TEST(SrpPhat, Examples) {
  const Scenario s;
  const HermitianMatrix phi = exact_phi(s.a(-18), 2.0, 0.0);
  const HermitianMatrix n = phase_normalized(phi);
  const CVector a0 = s.a(-18);
  for (std::size_t i = 0; i < 8; ++i)
    for (std::size_t j = 0; j < 8; ++j)
      EXPECT_NEAR(std::abs(n(i, j) - a0[i] * std::conj(a0[j])), 0.0, 1e-12);
  const auto p = srp_phat_spectrum(phi, s.steering, kBin).values;
  EXPECT_NEAR(p[argmax(p)], 64.0, 1e-9);
  EXPECT_EQ(s.steering.grid()[argmax(p)], -18.0);

  std::mt19937_64 rng(13);
  const HermitianMatrix r = random_psd(8, rng);
  EXPECT_EQ(srp_phat_spectrum(r, s.steering, kBin).values,
            srp_phat_spectrum(r.affine(4.0, 0.0), s.steering, kBin).values);
  const HermitianMatrix rn = phase_normalized(r);
  for (std::size_t i = 0; i < 8; ++i) EXPECT_NEAR(std::abs(rn(i, i) - 1.0), 0.0, 1e-15);
}

TEST(ScaleInvariance, ArgmaxOfEveryMethod) {
  const Scenario s;
  std::mt19937_64 rng(31);
  const HermitianMatrix phi = random_psd(8, rng, 3);
  MethodParams params;
  params.noise_power = 0.01;
  for (Method m : {Method::kSrp, Method::kSrpPhat, Method::kDu, Method::kDuSigma, Method::kMvdr,
                   Method::kMusic}) {
    MethodParams scaled = params;
    scaled.noise_power = 0.01 * 7.0;
    const auto a = narrowband_spectrum(m, {phi, 3, {}}, params, s.steering, kBin).values;
    const auto b = narrowband_spectrum(m, {phi.affine(7.0, 0.0), 3, {}}, scaled, s.steering, kBin).values;
    EXPECT_EQ(argmax(a), argmax(b)) << method_name(m);
  }
}

TEST(NarrowbandSpectrum, DuSigmaNeedsNoisePower) {
  const Scenario s;
  EXPECT_THROW(narrowband_spectrum(Method::kDuSigma, {HermitianMatrix::identity(8), 1, {}}, {},
                                   s.steering, kBin),
               InvalidArgument);
  const auto r = narrowband_spectrum(Method::kDuSigma, {HermitianMatrix::identity(8), 1, 0.0}, {},
                                     s.steering, kBin);
  EXPECT_EQ(r.method, Method::kDuSigma);
}

TEST(BeamWeights, DistortionlessAcrossGrid) {
  const Scenario s;
  std::mt19937_64 rng(19);
  const HermitianMatrix phi = random_psd(8, rng);
  MethodParams params;
  for (Method m : {Method::kSrp, Method::kDu, Method::kMvdr, Method::kMusic}) {
    const BeamWeights bw = beam_weights(m, phi, params, s.steering, kBin);
    ASSERT_EQ(bw.weights.size(), 181u);
    for (std::size_t t = 0; t < 181; ++t) {
      const cdouble r = inner(bw.weights[t], s.steering.vector(kBin, t).entries);
      if (m == Method::kSrp)
        EXPECT_NEAR(std::abs(r - 1.0), 0.0, 1e-15);
      else
        EXPECT_NEAR(std::abs(r - 1.0), 0.0, 1e-6) << method_name(m) << " t=" << t;
    }
  }
  EXPECT_THROW(beam_weights(Method::kSrpPhat, phi, params, s.steering, kBin), InvalidArgument);
}

TEST(BeamWeights, SingularSteeringNamesAngle) {
  const Scenario s;
  const HermitianMatrix phi = exact_phi(s.a(-18), 1.0, 0.0);
  try {
    beam_weights(Method::kDu, phi, {}, s.steering, kBin);
    FAIL();
  } catch (const NumericalError& e) {
    EXPECT_NE(std::string(e.what()).find("-18"), std::string::npos) << e.what();
  }
}

TEST(Gains, Examples) {
  EXPECT_DOUBLE_EQ(du_gain(8, 1.0), 7.0 / 16.0);
  EXPECT_LT(du_gain(8, 1e12), 1e-12);
  EXPECT_DOUBLE_EQ(du_gain(2, 0.0), 0.5);
  EXPECT_THROW(du_gain(1, 1.0), InvalidArgument);
  EXPECT_THROW(du_gain(8, -1.0), InvalidArgument);

  const auto [g1, g2] = two_source_gains(16, 10, 10);
  EXPECT_DOUBLE_EQ(g1, g2);
  EXPECT_NEAR(g1, 175.0 / 336.0, 1e-15);
  EXPECT_LT(two_source_gains(16, 1e12, 0).first, 1e-10);
  for (double a : {0.0, 0.5, 3.0, 100.0})
    for (double b : {0.0, 1.0, 7.0}) {
      const auto [x, y] = two_source_gains(5, a, b);
      EXPECT_LE(x + y, 2.0);
    }
  EXPECT_THROW(two_source_gains(2, 1, 1), InvalidArgument);
}
