#pragma once

// Small dense complex linear algebra for array processing. Orders here are
// the sensor count (typically 2..16), so everything is O(N^3) on tiny
// matrices and written for clarity rather than blocking.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace dubf {

using cdouble = std::complex<double>;
using CVector = std::vector<cdouble>;

// Row-major dense complex matrix.
class ComplexMatrix {
 public:
  ComplexMatrix(std::size_t rows, std::size_t cols);

  static ComplexMatrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  cdouble& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const cdouble& operator()(std::size_t i, std::size_t j) const {
    return data_[i * cols_ + j];
  }

  std::span<const cdouble> data() const noexcept { return data_; }
  std::span<cdouble> data() noexcept { return data_; }

  ComplexMatrix operator*(const ComplexMatrix& rhs) const;
  ComplexMatrix adjoint() const;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<cdouble> data_;
};

// Square matrix that is exactly self-adjoint: entry(j,i) == conj(entry(i,j))
// bit-for-bit and the diagonal is real. Construction from arbitrary data goes
// through from(), which validates within tolerance and then symmetrizes.
class HermitianMatrix {
 public:
  // Relative tolerance used by from(): |a_ij - conj(a_ji)| and |Im a_ii| must
  // not exceed this times the largest entry magnitude.
  static constexpr double kTolerance = 1e-9;

  // Throws InvalidArgument naming the worst offending entry pair.
  static HermitianMatrix from(const ComplexMatrix& m);

  static HermitianMatrix zeros(std::size_t n);
  static HermitianMatrix identity(std::size_t n);
  static HermitianMatrix diagonal(std::span<const double> values);
  // scale * v v^H
  static HermitianMatrix outer(std::span<const cdouble> v, double scale = 1.0);

  std::size_t order() const noexcept { return m_.rows(); }
  cdouble operator()(std::size_t i, std::size_t j) const { return m_(i, j); }
  const ComplexMatrix& matrix() const noexcept { return m_; }
  std::span<const cdouble> data() const noexcept { return m_.data(); }

  // scale * this + shift * I
  HermitianMatrix affine(double scale, double shift) const;
  HermitianMatrix operator+(const HermitianMatrix& rhs) const;

 private:
  explicit HermitianMatrix(ComplexMatrix m) : m_(std::move(m)) {}
  ComplexMatrix m_;
};

// Eigenvalues sorted descending with orthonormal eigenvectors stored as the
// columns of `vectors`. The first component of magnitude above 1e-10 of every
// eigenvector is real and positive.
struct EigenSystem {
  std::vector<double> values;
  ComplexMatrix vectors;

  CVector vector(std::size_t k) const;
};

// Cyclic complex Jacobi. Converges when the off-diagonal Frobenius norm drops
// below 1e-12 of the diagonal norm; throws NumericalError with the residual
// after 100 sweeps.
EigenSystem hermitian_eig(const HermitianMatrix& m);

// Number of hermitian_eig calls made by the current thread. Used by tests to
// check that a code path stays eigendecomposition-free.
std::uint64_t eigensolver_calls() noexcept;

double trace(const HermitianMatrix& m) noexcept;

// real(v^H m v). Throws InvalidArgument on dimension mismatch.
double quadratic_form(const HermitianMatrix& m, std::span<const cdouble> v);

// U diag(values) U^H for the eigenbasis of `eig`.
HermitianMatrix compose(const EigenSystem& eig, std::span<const double> values);

// (m + load I)^-1 via the spectral decomposition of m. Throws NumericalError
// when the smallest shifted eigenvalue is below 1e-12 of the largest.
HermitianMatrix regularized_inverse(const HermitianMatrix& m, double load);

double frobenius_norm(const ComplexMatrix& m) noexcept;

}  // namespace dubf
