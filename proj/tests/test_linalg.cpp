#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "dubf/errors.hpp"
#include "dubf/linalg.hpp"
#include "test_util.hpp"

using namespace dubf;
using namespace dubf::testing;

namespace {

double reconstruction_error(const HermitianMatrix& m, const EigenSystem& e) {
  const HermitianMatrix back = compose(e, e.values);
  ComplexMatrix diff(m.order(), m.order());
  for (std::size_t i = 0; i < m.order(); ++i)
    for (std::size_t j = 0; j < m.order(); ++j) diff(i, j) = back(i, j) - m(i, j);
  return frobenius_norm(diff) / frobenius_norm(m.matrix());
}

}  // namespace

TEST(HermitianMatrix, RejectsNonHermitianNamingWorstPair) {
  ComplexMatrix m = ComplexMatrix::identity(3);
  m(0, 2) = {1.0, 0.0};
  m(2, 0) = {0.5, 0.0};
  try {
    HermitianMatrix::from(m);
    FAIL() << "expected rejection";
  } catch (const InvalidArgument& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("(0,2)"), std::string::npos) << what;
  }
}

TEST(HermitianMatrix, RejectsNonSquare) {
  EXPECT_THROW(HermitianMatrix::from(ComplexMatrix(2, 3)), InvalidArgument);
}

TEST(HermitianMatrix, AcceptsRoundoffAndSymmetrizes) {
  ComplexMatrix m = ComplexMatrix::identity(2);
  m(0, 1) = {0.3, 0.2};
  m(1, 0) = {0.3 + 1e-12, -0.2};
  const HermitianMatrix h = HermitianMatrix::from(m);
  EXPECT_EQ(h(0, 1), std::conj(h(1, 0)));
}

TEST(Trace, Examples) {
  EXPECT_DOUBLE_EQ(trace(HermitianMatrix::identity(8)), 8.0);
  const std::vector<double> d(8, 1.1);
  EXPECT_NEAR(trace(HermitianMatrix::diagonal(d)), 8.8, 1e-12);
  const CVector a = ula_steering(8, 0.07, 30.0, 46, 2048, 44100.0);
  EXPECT_NEAR(trace(exact_phi(a, 1.0, 0.1)), 8.8, 1e-12);
}

TEST(QuadraticForm, Examples) {
  CVector v(4);
  v[2] = 1.0;
  EXPECT_DOUBLE_EQ(quadratic_form(HermitianMatrix::identity(4), v), 1.0);

  const CVector a = ula_steering(8, 0.07, -18.0, 46, 2048, 44100.0);
  EXPECT_NEAR(quadratic_form(HermitianMatrix::outer(a), a), 64.0, 1e-10);

  // eigenvalues {0, 4, 4, 4}: 4 I - ones ones^H, signal vector = ones / 2
  const CVector ones(4, 1.0);
  const HermitianMatrix m = HermitianMatrix::outer(ones).affine(-1.0, 4.0);
  const CVector u(4, 0.5);
  EXPECT_NEAR(quadratic_form(m, u), 0.0, 1e-12);

  EXPECT_THROW(quadratic_form(m, CVector(3)), InvalidArgument);
}

TEST(QuadraticForm, MatchesEigenExpansion) {
  std::mt19937_64 rng(7);
  for (std::size_t n : {2u, 5u, 8u, 16u}) {
    const HermitianMatrix m = random_hermitian(n, rng);
    const EigenSystem e = hermitian_eig(m);
    const ComplexMatrix x = random_matrix(n, 1, rng);
    CVector v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = x(i, 0);
    double expansion = 0.0;
    for (std::size_t k = 0; k < n; ++k) expansion += e.values[k] * std::norm(inner(e.vector(k), v));
    const double q = quadratic_form(m, v);
    EXPECT_NEAR(q, expansion, 1e-9 * std::max(1.0, std::abs(q)));
    EXPECT_NEAR(q, direct_form(m.matrix(), v), 1e-9 * std::max(1.0, std::abs(q)));
  }
}

TEST(HermitianEig, IdentityOrder4) {
  const HermitianMatrix m = HermitianMatrix::identity(4);
  const EigenSystem e = hermitian_eig(m);
  for (double v : e.values) EXPECT_NEAR(v, 1.0, 1e-14);
  EXPECT_LT(reconstruction_error(m, e), 1e-12);
}

TEST(HermitianEig, RankOneAllOnesAgainstPowerIteration) {
  const CVector ones(4, 1.0);
  const HermitianMatrix m = HermitianMatrix::outer(ones);
  const EigenSystem e = hermitian_eig(m);
  const auto [lambda, v] = power_iteration(m.matrix());
  EXPECT_NEAR(e.values[0], lambda, 1e-10);
  EXPECT_NEAR(e.values[0], 4.0, 1e-12);
  for (std::size_t k = 1; k < 4; ++k) EXPECT_NEAR(e.values[k], 0.0, 1e-12);
  EXPECT_NEAR(std::abs(inner(e.vector(0), v)), 1.0, 1e-10);
  // sign convention: first component real and positive, so u1 = ones / 2 exactly
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_NEAR(e.vector(0)[i].real(), 0.5, 1e-12);
    EXPECT_NEAR(e.vector(0)[i].imag(), 0.0, 1e-12);
  }
}

TEST(HermitianEig, RandomOrder8Invariants) {
  std::mt19937_64 rng(42);
  const HermitianMatrix m = random_hermitian(8, rng);
  const EigenSystem e = hermitian_eig(m);
  EXPECT_LT(reconstruction_error(m, e), 1e-8);

  double direct_trace = 0.0;
  for (std::size_t i = 0; i < 8; ++i) direct_trace += m(i, i).real();
  double sum = 0.0;
  for (double v : e.values) sum += v;
  EXPECT_NEAR(sum, direct_trace, 1e-9 * std::max(1.0, std::abs(direct_trace)));

  for (std::size_t k = 0; k + 1 < 8; ++k) EXPECT_GE(e.values[k], e.values[k + 1]);

  const ComplexMatrix gram = e.vectors.adjoint() * e.vectors;
  for (std::size_t i = 0; i < 8; ++i)
    for (std::size_t j = 0; j < 8; ++j)
      EXPECT_NEAR(std::abs(gram(i, j) - (i == j ? 1.0 : 0.0)), 0.0, 1e-9);
}

TEST(HermitianEig, DeterministicAndSignConvention) {
  std::mt19937_64 rng(3);
  const HermitianMatrix m = random_psd(6, rng);
  const EigenSystem a = hermitian_eig(m);
  const EigenSystem b = hermitian_eig(m);
  EXPECT_EQ(a.values, b.values);
  for (std::size_t k = 0; k < 6; ++k) {
    const CVector u = a.vector(k);
    EXPECT_EQ(u, b.vector(k));
    std::size_t first = 0;
    while (std::abs(u[first]) <= 1e-10) ++first;
    EXPECT_GT(u[first].real(), 0.0);
    EXPECT_EQ(u[first].imag(), 0.0);
  }
}

TEST(HermitianEig, CountsCalls) {
  const std::uint64_t before = eigensolver_calls();
  hermitian_eig(HermitianMatrix::identity(3));
  EXPECT_EQ(eigensolver_calls(), before + 1);
}

TEST(RegularizedInverse, Examples) {
  const HermitianMatrix i2 = regularized_inverse(HermitianMatrix::identity(2), 0.0);
  EXPECT_NEAR(std::abs(i2(0, 0) - 1.0), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(i2(0, 1)), 0.0, 1e-14);

  const std::vector<double> d{3.0, 1.0};
  const HermitianMatrix r = regularized_inverse(HermitianMatrix::diagonal(d), 1.0);
  EXPECT_NEAR(r(0, 0).real(), 0.25, 1e-14);
  EXPECT_NEAR(r(1, 1).real(), 0.5, 1e-14);
}

TEST(RegularizedInverse, RankOneAgainstBruteInverse) {
  const CVector ones(4, 1.0);
  const HermitianMatrix m = HermitianMatrix::outer(ones);
  const HermitianMatrix inv = regularized_inverse(m, 1e-4);
  const EigenSystem e = hermitian_eig(inv);
  EXPECT_NEAR(e.values[0], 1e4, 1e-6);
  EXPECT_NEAR(e.values[1], 1e4, 1e-6);
  EXPECT_NEAR(e.values[2], 1e4, 1e-6);
  EXPECT_NEAR(e.values[3], 1.0 / 4.0001, 1e-10);

  const ComplexMatrix brute = brute_inverse(m.affine(1.0, 1e-4).matrix());
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) EXPECT_NEAR(std::abs(inv(i, j) - brute(i, j)), 0.0, 1e-7);
}

TEST(RegularizedInverse, ProductIsIdentityAndCommutes) {
  std::mt19937_64 rng(11);
  for (std::size_t n : {4u, 8u, 16u}) {
    const HermitianMatrix m = random_psd(n, rng);
    const double load = trace(m) * 1e-4 / 2048.0;
    const HermitianMatrix inv = regularized_inverse(m, load);
    const ComplexMatrix prod = inv.matrix() * m.affine(1.0, load).matrix();
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        EXPECT_NEAR(std::abs(prod(i, j) - (i == j ? 1.0 : 0.0)), 0.0, 1e-7);
    const ComplexMatrix ab = inv.matrix() * m.matrix();
    const ComplexMatrix ba = m.matrix() * inv.matrix();
    ComplexMatrix diff(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) diff(i, j) = ab(i, j) - ba(i, j);
    EXPECT_LT(frobenius_norm(diff), 1e-8);
  }
}

TEST(RegularizedInverse, IllConditionedNamesGap) {
  const CVector ones(4, 1.0);
  try {
    regularized_inverse(HermitianMatrix::outer(ones), 0.0);
    FAIL() << "expected ill-conditioning error";
  } catch (const NumericalError& e) {
    EXPECT_NE(std::string(e.what()).find("eigenvalue"), std::string::npos) << e.what();
  }
}

TEST(Eigensystem, TraceIdentityOnRandomInputs) {
  std::mt19937_64 rng(99);
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t n = 2 + rep % 15;
    const HermitianMatrix m = random_hermitian(n, rng);
    double sum = 0.0;
    for (double v : hermitian_eig(m).values) sum += v;
    EXPECT_NEAR(sum, trace(m), 1e-9 * std::max(1.0, frobenius_norm(m.matrix())));
  }
}
