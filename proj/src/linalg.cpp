#include "dubf/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "dubf/errors.hpp"

namespace dubf {

namespace {

constexpr int kMaxSweeps = 100;
constexpr double kConvergence = 1e-12;
constexpr double kPhaseThreshold = 1e-10;

thread_local std::uint64_t eig_calls = 0;

double off_diagonal_norm(const ComplexMatrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (i != j) s += std::norm(a(i, j));
  return std::sqrt(s);
}

double diagonal_norm(const ComplexMatrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) s += std::norm(a(i, i));
  return std::sqrt(s);
}

// One complex Jacobi rotation annihilating a(p,q). The unitary is
// G = D P with D = diag(1, conj(e)) on (p,q), e = a_pq/|a_pq|, and P the real
// symmetric rotation for the now-real pivot. a <- G^H a G, v <- v G.
void rotate(ComplexMatrix& a, ComplexMatrix& v, std::size_t p, std::size_t q) {
  const cdouble apq = a(p, q);
  const double mag = std::abs(apq);
  if (mag == 0.0) return;
  const cdouble e = apq / mag;
  const cdouble ec = std::conj(e);

  const double app = a(p, p).real();
  const double aqq = a(q, q).real();
  const double theta = (aqq - app) / (2.0 * mag);
  double t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
  if (theta < 0.0) t = -t;
  const double c = 1.0 / std::sqrt(t * t + 1.0);
  const double s = t * c;

  const std::size_t n = a.rows();
  for (std::size_t k = 0; k < n; ++k) {
    const cdouble akp = a(k, p);
    const cdouble akq = a(k, q);
    a(k, p) = c * akp - s * ec * akq;
    a(k, q) = s * akp + c * ec * akq;
  }
  for (std::size_t k = 0; k < n; ++k) {
    const cdouble apk = a(p, k);
    const cdouble aqk = a(q, k);
    a(p, k) = c * apk - s * e * aqk;
    a(q, k) = s * apk + c * e * aqk;
  }
  a(p, q) = 0.0;
  a(q, p) = 0.0;
  a(p, p) = a(p, p).real();
  a(q, q) = a(q, q).real();

  for (std::size_t k = 0; k < n; ++k) {
    const cdouble vkp = v(k, p);
    const cdouble vkq = v(k, q);
    v(k, p) = c * vkp - s * ec * vkq;
    v(k, q) = s * vkp + c * ec * vkq;
  }
}

}  // namespace

// ---------------------------------------------------------------- ComplexMatrix

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols) {
  if (rows == 0 || cols == 0)
    throw InvalidArgument("ComplexMatrix: dimensions must be at least 1x1");
}

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
  ComplexMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

ComplexMatrix ComplexMatrix::operator*(const ComplexMatrix& rhs) const {
  if (cols_ != rhs.rows_)
    throw InvalidArgument("ComplexMatrix product: inner dimensions differ");
  ComplexMatrix out(rows_, rhs.cols_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t k = 0; k < cols_; ++k) {
      const cdouble aik = (*this)(i, k);
      for (std::size_t j = 0; j < rhs.cols_; ++j) out(i, j) += aik * rhs(k, j);
    }
  return out;
}

ComplexMatrix ComplexMatrix::adjoint() const {
  ComplexMatrix out(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) out(j, i) = std::conj((*this)(i, j));
  return out;
}

double frobenius_norm(const ComplexMatrix& m) noexcept {
  double s = 0.0;
  for (const auto& z : m.data()) s += std::norm(z);
  return std::sqrt(s);
}

// -------------------------------------------------------------- HermitianMatrix

HermitianMatrix HermitianMatrix::from(const ComplexMatrix& m) {
  if (m.rows() != m.cols())
    throw InvalidArgument("HermitianMatrix: matrix is not square");
  const std::size_t n = m.rows();

  double largest = 0.0;
  for (const auto& z : m.data()) largest = std::max(largest, std::abs(z));

  double worst = 0.0;
  std::size_t wi = 0, wj = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      const double dev = std::abs(m(i, j) - std::conj(m(j, i)));
      if (dev > worst) {
        worst = dev;
        wi = i;
        wj = j;
      }
    }
  if (worst > kTolerance * largest) {
    std::ostringstream msg;
    msg << "HermitianMatrix: entries (" << wi << "," << wj << ") and (" << wj << ","
        << wi << ") are not conjugate; deviation " << worst << " exceeds "
        << kTolerance << " x largest magnitude " << largest;
    throw InvalidArgument(msg.str());
  }

  ComplexMatrix sym(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    sym(i, i) = m(i, i).real();
    for (std::size_t j = i + 1; j < n; ++j) {
      const cdouble avg = 0.5 * (m(i, j) + std::conj(m(j, i)));
      sym(i, j) = avg;
      sym(j, i) = std::conj(avg);
    }
  }
  return HermitianMatrix(std::move(sym));
}

HermitianMatrix HermitianMatrix::zeros(std::size_t n) {
  return HermitianMatrix(ComplexMatrix(n, n));
}

HermitianMatrix HermitianMatrix::identity(std::size_t n) {
  return HermitianMatrix(ComplexMatrix::identity(n));
}

HermitianMatrix HermitianMatrix::diagonal(std::span<const double> values) {
  ComplexMatrix m(values.size(), values.size());
  for (std::size_t i = 0; i < values.size(); ++i) m(i, i) = values[i];
  return HermitianMatrix(std::move(m));
}

HermitianMatrix HermitianMatrix::outer(std::span<const cdouble> v, double scale) {
  const std::size_t n = v.size();
  ComplexMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    m(i, i) = scale * std::norm(v[i]);
    for (std::size_t j = i + 1; j < n; ++j) {
      const cdouble z = scale * v[i] * std::conj(v[j]);
      m(i, j) = z;
      m(j, i) = std::conj(z);
    }
  }
  return HermitianMatrix(std::move(m));
}

HermitianMatrix HermitianMatrix::affine(double scale, double shift) const {
  ComplexMatrix out = m_;
  for (auto& z : out.data()) z *= scale;
  for (std::size_t i = 0; i < order(); ++i) out(i, i) += shift;
  return HermitianMatrix(std::move(out));
}

HermitianMatrix HermitianMatrix::operator+(const HermitianMatrix& rhs) const {
  if (order() != rhs.order())
    throw InvalidArgument("HermitianMatrix sum: orders differ");
  ComplexMatrix out = m_;
  auto dst = out.data();
  auto src = rhs.data();
  for (std::size_t k = 0; k < dst.size(); ++k) dst[k] += src[k];
  return HermitianMatrix(std::move(out));
}

// ------------------------------------------------------------------ EigenSystem

CVector EigenSystem::vector(std::size_t k) const {
  CVector v(vectors.rows());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = vectors(i, k);
  return v;
}

std::uint64_t eigensolver_calls() noexcept { return eig_calls; }

EigenSystem hermitian_eig(const HermitianMatrix& m) {
  ++eig_calls;
  const std::size_t n = m.order();
  ComplexMatrix a = m.matrix();
  ComplexMatrix v = ComplexMatrix::identity(n);

  int sweep = 0;
  for (;; ++sweep) {
    const double off = off_diagonal_norm(a);
    if (off <= kConvergence * diagonal_norm(a)) break;
    if (sweep == kMaxSweeps) {
      std::ostringstream msg;
      msg << "hermitian_eig: no convergence after " << kMaxSweeps
          << " sweeps; off-diagonal residual " << off;
      throw NumericalError(msg.str());
    }
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) rotate(a, v, p, q);
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return a(x, x).real() > a(y, y).real();
  });

  EigenSystem out{std::vector<double>(n), ComplexMatrix(n, n)};
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t src = order[k];
    out.values[k] = a(src, src).real();
    cdouble phase = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double mag = std::abs(v(i, src));
      if (mag > kPhaseThreshold) {
        phase = std::conj(v(i, src)) / mag;
        break;
      }
    }
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = v(i, src) * phase;
    // pin the reference component to an exact real so reruns compare bit-equal
    for (std::size_t i = 0; i < n; ++i) {
      if (std::abs(out.vectors(i, k)) > kPhaseThreshold) {
        out.vectors(i, k) = std::abs(out.vectors(i, k));
        break;
      }
    }
  }
  return out;
}

// ------------------------------------------------------------------- operations

double trace(const HermitianMatrix& m) noexcept {
  double s = 0.0;
  for (std::size_t i = 0; i < m.order(); ++i) s += m(i, i).real();
  return s;
}

double quadratic_form(const HermitianMatrix& m, std::span<const cdouble> v) {
  const std::size_t n = m.order();
  if (v.size() != n)
    throw InvalidArgument("quadratic_form: vector length " + std::to_string(v.size()) +
                          " does not match matrix order " + std::to_string(n));
  cdouble acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    cdouble row = 0.0;
    for (std::size_t j = 0; j < n; ++j) row += m(i, j) * v[j];
    acc += std::conj(v[i]) * row;
  }
  return acc.real();
}

HermitianMatrix compose(const EigenSystem& eig, std::span<const double> values) {
  const std::size_t n = eig.vectors.rows();
  if (values.size() != n)
    throw InvalidArgument("compose: eigenvalue count does not match order");
  ComplexMatrix out(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    if (values[k] == 0.0) continue;
    for (std::size_t i = 0; i < n; ++i) {
      const cdouble ui = eig.vectors(i, k) * values[k];
      for (std::size_t j = 0; j < n; ++j) out(i, j) += ui * std::conj(eig.vectors(j, k));
    }
  }
  return HermitianMatrix::from(out);
}

HermitianMatrix regularized_inverse(const HermitianMatrix& m, double load) {
  if (!(load >= 0.0)) throw InvalidArgument("regularized_inverse: load must be >= 0");
  const EigenSystem eig = hermitian_eig(m);
  const std::size_t n = m.order();
  std::vector<double> shifted(n);
  double largest = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    shifted[k] = eig.values[k] + load;
    largest = std::max(largest, std::abs(shifted[k]));
  }
  const double smallest = *std::min_element(shifted.begin(), shifted.end());
  if (!(smallest >= 1e-12 * largest) || largest == 0.0) {
    std::ostringstream msg;
    msg << "regularized_inverse: ill-conditioned; smallest shifted eigenvalue "
        << smallest << " vs largest " << largest << " (ratio limit 1e-12)";
    throw NumericalError(msg.str());
  }
  std::vector<double> inv(n);
  for (std::size_t k = 0; k < n; ++k) inv[k] = 1.0 / shifted[k];
  return compose(eig, inv);
}

}  // namespace dubf
