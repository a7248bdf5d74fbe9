// SPDX-License-Identifier: Apache-2.0
//
// stbem -- spatial-temporal basis expansion channel estimation toolkit
//
// Unit tests for the DFT, partial-transform, least-squares and special
// function kernels.

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "stbem/linalg.hpp"
#include "stbem/rng.hpp"

using namespace stbem;

namespace {

ComplexVector random_cvector(int n, RandomStream& rng) {
  ComplexVector v(n);
  for (int i = 0; i < n; ++i) v(i) = rng.cnormal();
  return v;
}

}  // namespace

TEST_CASE("dft matrix is unitary") {
  for (int M : {1, 2, 8, 128}) {
    const ComplexMatrix F = dft_matrix(M);
    const double dev = (F * F.adjoint() - ComplexMatrix::Identity(M, M))
                           .cwiseAbs()
                           .maxCoeff();
    CHECK(dev < 1e-12);
  }
}

TEST_CASE("dft matrix entries follow the root convention") {
  const int M = 8;
  const ComplexMatrix F = dft_matrix(M);
  for (int p = 0; p < M; ++p)
    for (int q = 0; q < M; ++q) {
      const cplx want =
          std::polar(1.0 / std::sqrt(8.0), -2.0 * M_PI * p * q / M);
      CHECK(std::abs(F(p, q) - want) < 1e-14);
    }
}

TEST_CASE("fft forward transform matches the matrix product") {
  RandomStream rng(7);
  for (int M : {1, 2, 31, 128}) {
    const ComplexVector h = random_cvector(M, rng);
    const ComplexVector via_fft = forward_dft(h);
    const ComplexVector via_mat = dft_matrix(M) * h;
    CHECK((via_fft - via_mat).norm() < 1e-10 * std::max(1.0, via_mat.norm()));
  }
}

TEST_CASE("forward and inverse transforms are mutually inverse") {
  RandomStream rng(8);
  const int M = 96;
  const ComplexVector h = random_cvector(M, rng);
  CHECK((inverse_dft(forward_dft(h)) - h).norm() < 1e-12 * h.norm());
  CHECK((forward_dft(inverse_dft(h)) - h).norm() < 1e-12 * h.norm());
}

TEST_CASE("column transform matches per-column transforms") {
  RandomStream rng(9);
  const int M = 32, N = 5;
  ComplexMatrix X(M, N);
  for (int j = 0; j < N; ++j) X.col(j) = random_cvector(M, rng);
  ComplexMatrix Y = X;
  forward_dft_columns(Y);
  for (int j = 0; j < N; ++j)
    CHECK((Y.col(j) - forward_dft(ComplexVector(X.col(j)))).norm() < 1e-12);
}

TEST_CASE("partial inverse transform equals the zero-padded oracle") {
  RandomStream rng(10);
  const int M = 64, tau = 9;
  for (int start : {0, 5, 60}) {  // includes a wrap-around window
    const IndexSet bins = IndexSet::window(start, tau, M);
    const ComplexVector coeffs = random_cvector(tau, rng);
    ComplexVector padded = ComplexVector::Zero(M);
    for (int i = 0; i < tau; ++i) padded((start + i) % M) = coeffs(i);
    const ComplexVector oracle = inverse_dft(padded);
    const ComplexVector direct = partial_inverse_dft(coeffs, bins, M);
    CHECK((direct - oracle).norm() < 1e-10 * oracle.norm());
  }
}

TEST_CASE("partial inverse transform multiply count is tau*M") {
  RandomStream rng(11);
  const int M = 64, tau = 9;
  const IndexSet bins = IndexSet::window(3, tau, M);
  const ComplexVector coeffs = random_cvector(tau, rng);
  partial_dft_multiply_count = 0;
  (void)partial_inverse_dft(coeffs, bins, M);
  CHECK(partial_dft_multiply_count ==
        static_cast<std::uint64_t>(tau) * static_cast<std::uint64_t>(M));
  CHECK(partial_dft_multiply_count <
        static_cast<std::uint64_t>(M) * static_cast<std::uint64_t>(M));
}

TEST_CASE("steering vector has unit-modulus linear phase") {
  const int M = 16;
  const double theta = 0.4, ratio = 0.5;
  const ComplexVector a = steering_vector(theta, M, ratio);
  REQUIRE(a.size() == M);
  CHECK(std::abs(a(0) - cplx(1.0, 0.0)) < 1e-15);
  const cplx step = std::polar(1.0, 2.0 * M_PI * ratio * std::sin(theta));
  for (int m = 1; m < M; ++m) CHECK(std::abs(a(m) - a(m - 1) * step) < 1e-13);
}

TEST_CASE("ls_solve recovers a constructed solution") {
  RandomStream rng(12);
  const int rows = 24, cols = 9, rhs = 3;
  ComplexMatrix A(rows, cols);
  for (int j = 0; j < cols; ++j) A.col(j) = random_cvector(rows, rng);
  ComplexMatrix X0(cols, rhs);
  for (int j = 0; j < rhs; ++j) X0.col(j) = random_cvector(cols, rng);
  const ComplexMatrix X = ls_solve(A, A * X0);
  CHECK((X - X0).norm() < 1e-8 * X0.norm());
}

TEST_CASE("ls_solve rejects rank-deficient systems") {
  RandomStream rng(13);
  ComplexMatrix A(6, 3);
  A.setZero();
  A.col(0).setOnes();
  A.col(1).setOnes();  // duplicate column
  A.col(2) = random_cvector(6, rng);
  CHECK_THROWS_AS(ls_solve(A, ComplexMatrix::Ones(6, 1)), rank_error);
  CHECK_THROWS_AS(ls_solve(ComplexMatrix::Ones(2, 3), ComplexMatrix::Ones(2, 1)),
                  invalid_dimension);
}

TEST_CASE("pseudo_inverse satisfies the Moore-Penrose identity") {
  RandomStream rng(14);
  for (auto [r, c] : {std::pair{8, 5}, std::pair{5, 8}, std::pair{6, 6}}) {
    ComplexMatrix A(r, c);
    for (int j = 0; j < c; ++j) A.col(j) = random_cvector(r, rng);
    const ComplexMatrix Ap = pseudo_inverse(A);
    CHECK((A * Ap * A - A).norm() < 1e-10 * A.norm());
    CHECK((Ap * A * Ap - Ap).norm() < 1e-10 * Ap.norm());
  }
}

TEST_CASE("pseudo_inverse of a row-orthonormal matrix is its adjoint") {
  const int M = 16;
  const ComplexMatrix F = dft_matrix(M);
  const ComplexMatrix block = F.topRows(6);
  CHECK((pseudo_inverse(block) - block.adjoint()).norm() < 1e-10);
}

TEST_CASE("bessel_j0 agrees with the quadrature oracle") {
  CHECK(bessel_j0(0.0) == Catch::Approx(1.0).margin(1e-15));
  for (double x = 0.0; x <= 20.0; x += 0.37)
    CHECK(std::abs(bessel_j0(x) - detail::bessel_j0_quadrature(x)) < 1e-9);
}

TEST_CASE("adaptive quadrature integrates a smooth function") {
  const double got =
      detail::integrate([](double x) { return std::sin(x); }, 0.0, M_PI, 1e-12);
  CHECK(std::abs(got - 2.0) < 1e-9);
}
