// SPDX-License-Identifier: Apache-2.0
//
// stbem -- spatial-temporal basis expansion channel estimation toolkit
//
// Core expansion machinery: contiguous circular spatial signatures in the
// DFT beam domain, the single-ray window-size constant and the signature
// cardinality bound, the complex-exponential temporal basis, least-squares
// temporal fits and joint spatial-temporal reconstruction.

#ifndef STBEM_MODEL_HPP
#define STBEM_MODEL_HPP

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "stbem/channel.hpp"
#include "stbem/errors.hpp"
#include "stbem/linalg.hpp"

namespace stbem {

/// Contiguous circular window of DFT bins carrying a user's power.
struct SpatialSignature {
  int start = 0;  // first bin, in Z_M
  int tau = 0;    // window length
  int M = 0;      // grid size

  void validate() const {
    if (M < 1 || tau < 1 || tau > M)
      throw invalid_dimension("SpatialSignature: need 1 <= tau <= M");
    if (start < 0 || start >= M)
      throw index_error("SpatialSignature: start outside Z_M");
  }

  IndexSet bins() const {
    validate();
    return IndexSet::window(start, tau, M);
  }

  bool contains(int q) const {
    const int d = (((q - start) % M) + M) % M;
    return d < tau;
  }
};

/// Temporal basis parameters: interval length and even expansion order.
struct CebemBasisSpec {
  int N = 1;
  int R = 0;

  void validate() const {
    if (N < 1) throw invalid_dimension("CebemBasisSpec: N must be >= 1");
    if (R < 0 || R % 2 != 0)
      throw invalid_dimension("CebemBasisSpec: R must be even and >= 0");
    if (R + 1 > N)
      throw invalid_dimension("CebemBasisSpec: need R+1 <= N");
  }
};

/// Per-user expansion coefficients: row q' holds the (R+1) temporal
/// coefficients of the q'-th bin of the signature window.
struct CebemCoeffs {
  ComplexMatrix lambda;  // tau x (R+1)
};

/// Per-bin power of the beam-domain image |F*h|^2.
inline RealVector beam_power(const ComplexVector& h) {
  return forward_dft(h).cwiseAbs2();
}

/// Power inside the circular window [start, start+tau) of a bin-power vector.
/// Summed freshly per call so equal-power ties resolve deterministically.
inline double window_power(const RealVector& p, int start, int tau) {
  const int M = static_cast<int>(p.size());
  double s = 0.0;
  for (int i = 0; i < tau; ++i) s += p((start + i) % M);
  return s;
}

/// Best-placement contiguous circular window of length tau for a bin-power
/// vector; ties broken by smallest start index.
inline SpatialSignature extract_signature_from_power(const RealVector& p, int tau) {
  const int M = static_cast<int>(p.size());
  if (tau < 1 || tau > M)
    throw invalid_dimension("extract_signature: need 1 <= tau <= M");
  if (!(p.sum() > 0.0))
    throw degenerate_input("extract_signature: zero power vector");
  int best_start = 0;
  double best = window_power(p, 0, tau);
  for (int s = 1; s < M; ++s) {
    const double w = window_power(p, s, tau);
    if (w > best) {
      best = w;
      best_start = s;
    }
  }
  return SpatialSignature{best_start, tau, M};
}

/// Best-placement window of the beam image of an antenna-domain vector.
inline SpatialSignature extract_signature(const ComplexVector& h_hat, int tau) {
  if (h_hat.size() < 1) throw invalid_dimension("extract_signature: empty vector");
  return extract_signature_from_power(beam_power(h_hat), tau);
}

/// Fraction of beam-domain power inside the signature window.
inline double signature_power_fraction(const ComplexVector& h,
                                       const SpatialSignature& sig) {
  sig.validate();
  if (static_cast<int>(h.size()) != sig.M)
    throw invalid_dimension("signature_power_fraction: dimension mismatch");
  const RealVector p = beam_power(h);
  const double total = p.sum();
  if (!(total > 0.0))
    throw degenerate_input("signature_power_fraction: zero vector");
  return window_power(p, sig.start, sig.tau) / total;
}

/// Smallest window length whose best placement captures at least eta of the
/// total power (free placement; used for window-size scans).
inline int min_power_window(const RealVector& p, double eta) {
  const int M = static_cast<int>(p.size());
  const double total = p.sum();
  if (!(total > 0.0)) throw degenerate_input("min_power_window: zero power");
  for (int L = 1; L <= M; ++L) {
    double best = 0.0;
    for (int s = 0; s < M; ++s) best = std::max(best, window_power(p, s, L));
    if (best >= eta * total) return L;
  }
  return M;
}

/// Signature cardinality bound:
/// ceil(2*M*(d/lambda)*|cos(theta_k)|*delta_theta_k + 1) + B_max.
inline int cardinality_bound(const UserGeometry& geom, const AirConfig& air,
                             int B_max) {
  geom.validate();
  air.validate();
  const double edge = 2.0 * air.M * air.spacing_ratio *
                          std::abs(std::cos(geom.theta_k)) * geom.delta_theta_k +
                      1.0;
  return static_cast<int>(std::ceil(edge - 1e-9)) + B_max;
}

/// Per-bin power profile of a single ray at continuous bin position nu,
/// normalized to unit total.
inline RealVector single_ray_beam_profile(double nu, int M) {
  RealVector p(M);
  for (int q = 0; q < M; ++q) p(q) = std::norm(dirichlet_beam_gain(nu, q, M));
  return p / p.sum();
}

/// Minimal centered window capturing at least eta of a single ray's power.
/// The window is the set of bins within a common circular distance of the
/// ray's continuous bin position nu, grown symmetrically; bins at equal
/// distance enter together (so a ray exactly between two bins admits only
/// even sizes). An on-grid ray returns 1 for any eta <= 1.
inline int min_centered_window_size(int M, double nu, double eta) {
  if (M < 1) throw invalid_dimension("min_centered_window_size: M must be >= 1");
  if (!(eta > 0.0 && eta < 1.0))
    throw domain_error("min_centered_window_size: need 0 < eta < 1");
  const RealVector p = single_ray_beam_profile(nu, M);
  std::vector<int> order(static_cast<std::size_t>(M));
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> dist(static_cast<std::size_t>(M));
  for (int q = 0; q < M; ++q)
    dist[static_cast<std::size_t>(q)] = std::abs(std::remainder(q - nu, M));
  std::sort(order.begin(), order.end(), [&dist](int a, int b) {
    const double da = dist[static_cast<std::size_t>(a)];
    const double db = dist[static_cast<std::size_t>(b)];
    return da != db ? da < db : a < b;
  });
  double captured = 0.0;
  std::size_t i = 0;
  while (i < order.size()) {
    // take the whole equal-distance group at once
    std::size_t j = i;
    const double d = dist[static_cast<std::size_t>(order[i])];
    while (j < order.size() &&
           dist[static_cast<std::size_t>(order[j])] - d < 1e-9) {
      captured += p(order[j]);
      ++j;
    }
    if (captured >= eta) return static_cast<int>(j);
    i = j;
  }
  return M;
}

/// Worst-case centered window size over a fine grid of ray directions.
/// The window size depends on the direction only through the fractional
/// part of the continuous bin position (the profile is shift-invariant),
/// so the grid spans one full bin period including the exact half-bin
/// offset, which is the worst case.
inline int single_ray_bmax(int M, double spacing_ratio, double eta) {
  if (M < 1) throw invalid_dimension("single_ray_bmax: M must be >= 1");
  if (!(spacing_ratio > 0.0))
    throw domain_error("single_ray_bmax: spacing ratio must be positive");
  if (!(eta > 0.0 && eta < 1.0))
    throw domain_error("single_ray_bmax: need 0 < eta < 1");
  const int grid = 4096;
  int worst = 1;
  for (int i = 0; i < grid; ++i) {
    const double nu = static_cast<double>(i) / grid;  // fractional bin offset
    worst = std::max(worst, min_centered_window_size(M, nu, eta));
  }
  return worst;
}

/// Temporal basis vector c_n, element r = exp(j*2*pi*(r - R/2)*n/N).
inline ComplexVector cebem_basis_vector(const CebemBasisSpec& spec, int n) {
  spec.validate();
  if (n < 0 || n >= spec.N)
    throw index_error("cebem_basis_vector: time index out of range");
  ComplexVector c(spec.R + 1);
  for (int r = 0; r <= spec.R; ++r)
    c(r) = std::polar(1.0, 2.0 * M_PI * (r - spec.R / 2) *
                               static_cast<double>(n) / spec.N);
  return c;
}

/// Basis matrix over a list of time indices: column i holds c_{n_i}.
inline ComplexMatrix cebem_basis_matrix(const CebemBasisSpec& spec,
                                        const std::vector<int>& times) {
  spec.validate();
  ComplexMatrix C(spec.R + 1, static_cast<Eigen::Index>(times.size()));
  for (std::size_t i = 0; i < times.size(); ++i)
    C.col(static_cast<Eigen::Index>(i)) = cebem_basis_vector(spec, times[i]);
  return C;
}

/// Basis matrix over the full interval 0..N-1.
inline ComplexMatrix cebem_full_basis(const CebemBasisSpec& spec) {
  spec.validate();
  std::vector<int> times(static_cast<std::size_t>(spec.N));
  std::iota(times.begin(), times.end(), 0);
  return cebem_basis_matrix(spec, times);
}

/// Least-squares temporal fit over a full interval. With the complete
/// interval observed the basis is orthogonal, so the LS solution is
/// lambda_r = (1/N) * sum_n psi(n) * conj(c_n(r)).
inline ComplexVector cebem_fit(const ComplexVector& series,
                               const CebemBasisSpec& spec) {
  spec.validate();
  if (static_cast<int>(series.size()) != spec.N)
    throw invalid_dimension("cebem_fit: series length must equal N");
  ComplexVector lambda = ComplexVector::Zero(spec.R + 1);
  for (int n = 0; n < spec.N; ++n) {
    for (int r = 0; r <= spec.R; ++r) {
      const cplx c = std::polar(1.0, 2.0 * M_PI * (r - spec.R / 2) *
                                         static_cast<double>(n) / spec.N);
      lambda(r) += series(n) * std::conj(c);
    }
  }
  return lambda / static_cast<double>(spec.N);
}

/// Joint spatial-temporal reconstruction at time n:
/// sum over window bins q of (lambda_q . c_n) * f_q.
inline ComplexVector stbem_reconstruct(const CebemCoeffs& coeffs,
                                       const SpatialSignature& sig,
                                       const CebemBasisSpec& spec, int n) {
  sig.validate();
  spec.validate();
  if (coeffs.lambda.rows() != sig.tau || coeffs.lambda.cols() != spec.R + 1)
    throw invalid_dimension("stbem_reconstruct: coefficient shape mismatch");
  const ComplexVector amplitudes = coeffs.lambda * cebem_basis_vector(spec, n);
  return partial_inverse_dft(amplitudes, sig.bins(), sig.M);
}

/// Minimum admissible even expansion order: 2*ceil(f_d*N*T_s).
inline int bem_order_rule(double f_d, int N, double T_s) {
  if (!(f_d >= 0.0)) throw domain_error("bem_order_rule: f_d must be >= 0");
  const double x = f_d * static_cast<double>(N) * T_s;
  const int r = 2 * static_cast<int>(std::ceil(x - 1e-9));
  return std::max(0, r);
}

}  // namespace stbem

#endif  // STBEM_MODEL_HPP
