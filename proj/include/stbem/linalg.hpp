// SPDX-License-Identifier: Apache-2.0
//
// stbem -- spatial-temporal basis expansion channel estimation toolkit
//
// Deterministic complex-matrix kernels: unitary DFT transforms, partial
// inverse transforms restricted to bin sets, array steering vectors,
// rank-checked least squares and the Bessel function J0.
//
// Conventions: [F]_{pq} = exp(-j*2*pi*p*q/M)/sqrt(M), so F is unitary and
// the beams are the columns f_q of F^H. Negative directions map to bins
// q in (M/2, M) through modular index arithmetic.

#ifndef STBEM_LINALG_HPP
#define STBEM_LINALG_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "stbem/detail/fft.hpp"
#include "stbem/errors.hpp"

namespace stbem {

using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;
using cplx = std::complex<double>;

/// Ordered set of bin indices on the circular grid Z_M.
struct IndexSet {
  std::vector<int> indices;
  int M = 0;

  static IndexSet window(int start, int count, int M) {
    IndexSet s;
    s.M = M;
    s.indices.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) s.indices.push_back(((start + i) % M + M) % M);
    return s;
  }
};

/// Relative rank tolerance used by ls_solve.
inline constexpr double kRankTolerance = 1e-10;

/// Complex-multiply counter for partial_inverse_dft; thread-local so the
/// cost of the restricted transform can be asserted in tests.
inline thread_local std::uint64_t partial_dft_multiply_count = 0;

/// M x M unitary DFT matrix.
inline ComplexMatrix dft_matrix(int M) {
  if (M < 1) throw invalid_dimension("dft_matrix: M must be >= 1");
  ComplexMatrix F(M, M);
  const double scale = 1.0 / std::sqrt(static_cast<double>(M));
  for (int p = 0; p < M; ++p) {
    for (int q = 0; q < M; ++q) {
      // exponent reduced mod M to keep the argument small for large p*q
      long long e = (static_cast<long long>(p) * q) % M;
      F(p, q) = std::polar(scale, -2.0 * M_PI * static_cast<double>(e) / M);
    }
  }
  return F;
}

/// Unitary forward DFT, F*h, via FFT.
inline ComplexVector forward_dft(const ComplexVector& h) {
  const int M = static_cast<int>(h.size());
  if (M < 1) throw invalid_dimension("forward_dft: empty vector");
  ComplexVector out = h;
  detail::fft_inplace(out.data(), M, -1);
  out *= 1.0 / std::sqrt(static_cast<double>(M));
  return out;
}

/// Unitary inverse DFT, F^H * v.
inline ComplexVector inverse_dft(const ComplexVector& v) {
  const int M = static_cast<int>(v.size());
  if (M < 1) throw invalid_dimension("inverse_dft: empty vector");
  ComplexVector out = v;
  detail::fft_inplace(out.data(), M, +1);
  out *= 1.0 / std::sqrt(static_cast<double>(M));
  return out;
}

/// In-place column-wise unitary forward DFT of an M x N matrix.
inline void forward_dft_columns(ComplexMatrix& X) {
  const int M = static_cast<int>(X.rows());
  if (M < 1) throw invalid_dimension("forward_dft_columns: empty matrix");
  const double scale = 1.0 / std::sqrt(static_cast<double>(M));
  for (int c = 0; c < X.cols(); ++c) {
    detail::fft_inplace(X.col(c).data(), M, -1);
    X.col(c) *= scale;
  }
}

/// Restricted inverse transform: sum_{q in B} coeffs_q * f_q, where f_q is
/// column q of F^H. Equals zero-padding coeffs to length M followed by a
/// full inverse DFT, but touches only |B| bins (cost |B|*M multiplies,
/// tracked in partial_dft_multiply_count).
inline ComplexVector partial_inverse_dft(const ComplexVector& coeffs,
                                         const IndexSet& B, int M) {
  if (M < 1) throw invalid_dimension("partial_inverse_dft: M must be >= 1");
  if (static_cast<int>(B.indices.size()) > M)
    throw invalid_dimension("partial_inverse_dft: |B| exceeds M");
  if (coeffs.size() != static_cast<Eigen::Index>(B.indices.size()))
    throw invalid_dimension("partial_inverse_dft: coeffs/B size mismatch");
  ComplexVector out = ComplexVector::Zero(M);
  const double scale = 1.0 / std::sqrt(static_cast<double>(M));
  for (std::size_t i = 0; i < B.indices.size(); ++i) {
    int q = ((B.indices[i] % M) + M) % M;
    if (q < 0 || q >= M) throw index_error("partial_inverse_dft: bad bin");
    const cplx c = coeffs(static_cast<Eigen::Index>(i));
    // f_q element m: exp(+j*2*pi*m*q/M)/sqrt(M)
    const cplx step = std::polar(1.0, 2.0 * M_PI * q / M);
    cplx w = scale;
    for (int m = 0; m < M; ++m) {
      out(m) += c * w;
      w *= step;
    }
    partial_dft_multiply_count += static_cast<std::uint64_t>(M);
  }
  return out;
}

/// ULA steering vector: element m = exp(+j*2*pi*(d/lambda)*m*sin(theta)).
inline ComplexVector steering_vector(double theta, int M, double spacing_ratio) {
  if (M < 1) throw invalid_dimension("steering_vector: M must be >= 1");
  if (!(spacing_ratio > 0.0))
    throw domain_error("steering_vector: spacing ratio must be positive");
  if (!(theta > -M_PI / 2 && theta < M_PI / 2))
    throw domain_error("steering_vector: angle outside (-pi/2, pi/2)");
  ComplexVector a(M);
  const double phase = 2.0 * M_PI * spacing_ratio * std::sin(theta);
  for (int m = 0; m < M; ++m) a(m) = std::polar(1.0, phase * m);
  return a;
}

/// Least-squares solve min_X ||A*X - Y||_F with an SVD rank check.
/// Throws rank_error when the smallest singular value is below
/// kRankTolerance times the largest.
inline ComplexMatrix ls_solve(const ComplexMatrix& A, const ComplexMatrix& Y) {
  if (A.rows() != Y.rows())
    throw invalid_dimension("ls_solve: row count mismatch");
  if (A.cols() < 1 || A.rows() < A.cols())
    throw invalid_dimension("ls_solve: A must be square or tall");
  Eigen::JacobiSVD<ComplexMatrix> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  if (s(s.size() - 1) < kRankTolerance * s(0))
    throw rank_error("ls_solve: rank-deficient system (sigma_min/sigma_max = " +
                     std::to_string(s(s.size() - 1) / s(0)) + ")");
  return svd.solve(Y);
}

/// Moore-Penrose pseudo-inverse with the same rank check as ls_solve.
/// Accepts any shape with full row or column rank. Divide-and-conquer SVD:
/// this runs on schedule-sized matrices (up to ~10^3) inside estimator
/// constructors, where one-sided Jacobi would dominate the run time.
inline ComplexMatrix pseudo_inverse(const ComplexMatrix& A) {
  Eigen::BDCSVD<ComplexMatrix> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  if (s(s.size() - 1) < kRankTolerance * s(0))
    throw rank_error("pseudo_inverse: rank-deficient matrix");
  ComplexMatrix sinv = ComplexMatrix::Zero(s.size(), s.size());
  for (Eigen::Index i = 0; i < s.size(); ++i) sinv(i, i) = 1.0 / s(i);
  return svd.matrixV() * sinv * svd.matrixU().adjoint();
}

namespace detail {

/// Adaptive Simpson quadrature for real integrands.
template <typename F>
double adaptive_simpson(const F& f, double a, double b, double fa, double fm,
                        double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
    return left + right + delta / 15.0;
  return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

template <typename F>
double integrate(const F& f, double a, double b, double tol) {
  const double m = 0.5 * (a + b);
  const double fa = f(a), fm = f(m), fb = f(b);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 48);
}

/// J0 by quadrature of (1/pi) * int_0^pi cos(x sin t) dt, split into panels
/// that track the oscillation rate. Used as the test oracle and available
/// as a fallback implementation.
inline double bessel_j0_quadrature(double x) {
  x = std::abs(x);
  const int panels = std::max(8, static_cast<int>(std::ceil(x)));
  const double h = M_PI / panels;
  double acc = 0.0, a = 0.0;
  for (int i = 0; i < panels; ++i) {
    const double b = a + h;
    acc += integrate([x](double t) { return std::cos(x * std::sin(t)); }, a, b,
                     1e-13);
    a = b;
  }
  return acc / M_PI;
}

}  // namespace detail

/// Zero-order Bessel function of the first kind, |error| <= 1e-9 on |x| <= 1e3.
inline double bessel_j0(double x) {
  if (!std::isfinite(x)) throw domain_error("bessel_j0: non-finite argument");
  return std::cyl_bessel_j(0.0, std::abs(x));  // J0 is even
}

}  // namespace stbem

#endif  // STBEM_LINALG_HPP
