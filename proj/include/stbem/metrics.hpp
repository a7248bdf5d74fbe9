// SPDX-License-Identifier: Apache-2.0
//
// stbem -- spatial-temporal basis expansion channel estimation toolkit
//
// Error metrics and QPSK symbol mapping.

#ifndef STBEM_METRICS_HPP
#define STBEM_METRICS_HPP

#include <cmath>
#include <complex>
#include <cstdint>

#include "stbem/errors.hpp"
#include "stbem/linalg.hpp"

namespace stbem {

/// ||H - H_hat||_F^2 / ||H||_F^2.
inline double normalized_mse(const ComplexMatrix& truth,
                             const ComplexMatrix& estimate) {
  if (truth.rows() != estimate.rows() || truth.cols() != estimate.cols())
    throw invalid_dimension("normalized_mse: shape mismatch");
  const double denom = truth.squaredNorm();
  if (denom == 0.0) throw degenerate_input("normalized_mse: zero reference");
  return (truth - estimate).squaredNorm() / denom;
}

/// Running numerator/denominator pair for averaged normalized errors.
struct NmseAccumulator {
  double err = 0.0;
  double ref = 0.0;

  void add(const ComplexMatrix& truth, const ComplexMatrix& estimate) {
    err += (truth - estimate).squaredNorm();
    ref += truth.squaredNorm();
  }
  void add_parts(double e, double r) {
    err += e;
    ref += r;
  }
  double value() const {
    if (ref == 0.0) throw degenerate_input("NmseAccumulator: zero reference");
    return err / ref;
  }
};

/// Gray-coded unit-energy QPSK: bits (b0,b1) -> ((1-2*b0) + j*(1-2*b1))/sqrt(2).
inline cplx qpsk_map(int b0, int b1) {
  if ((b0 & ~1) || (b1 & ~1)) throw domain_error("qpsk_map: bits must be 0/1");
  const double s = 1.0 / std::sqrt(2.0);
  return cplx((1 - 2 * b0) * s, (1 - 2 * b1) * s);
}

/// Minimum-distance demapping; inverse of qpsk_map for any scaling > 0.
inline void qpsk_demap(cplx y, int& b0, int& b1) {
  b0 = y.real() < 0.0 ? 1 : 0;
  b1 = y.imag() < 0.0 ? 1 : 0;
}

/// Bit-error counter.
struct BerAccumulator {
  std::uint64_t errors = 0;
  std::uint64_t bits = 0;

  void add(int sent_b0, int sent_b1, int got_b0, int got_b1) {
    errors += static_cast<std::uint64_t>(sent_b0 != got_b0) +
              static_cast<std::uint64_t>(sent_b1 != got_b1);
    bits += 2;
  }
  void merge(const BerAccumulator& other) {
    errors += other.errors;
    bits += other.bits;
  }
  double value() const {
    if (bits == 0) throw degenerate_input("BerAccumulator: no bits");
    return static_cast<double>(errors) / static_cast<double>(bits);
  }
};

}  // namespace stbem

#endif  // STBEM_METRICS_HPP
