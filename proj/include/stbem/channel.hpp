// SPDX-License-Identifier: Apache-2.0
//
// stbem -- spatial-temporal basis expansion channel estimation toolkit
//
// Ray-based time-selective flat-fading channel generation for a uniform
// linear array, plus the empirical space-time statistics used to validate
// the model: lagged correlations, the angular kernel and the Doppler
// band-edge check.
//
// Channel model: column n of a block is
//   h(n) = (1/sqrt(P)) * sum_p alpha_p * exp(-j*(2*pi*f_d*n*T_s*cos(varphi_p)
//          + phi_p)) * a(theta_p)
// with ray gains alpha_p i.i.d. CN(0,1), DOAs uniform in the user's angular
// interval, motion angles and initial phases uniform on [0, 2*pi).

#ifndef STBEM_CHANNEL_HPP
#define STBEM_CHANNEL_HPP

#include <cmath>
#include <complex>
#include <vector>

#include "stbem/errors.hpp"
#include "stbem/linalg.hpp"
#include "stbem/rng.hpp"

namespace stbem {

/// Mean direction, one-side angular spread and ray count of one user.
struct UserGeometry {
  double theta_k = 0.0;        // mean DOA, radians
  double delta_theta_k = 0.0;  // one-side spread, radians
  int P = 1;                   // ray count

  void validate() const {
    if (!(delta_theta_k > 0.0))
      throw domain_error("UserGeometry: spread must be positive");
    if (!(theta_k - delta_theta_k > -M_PI / 2 &&
          theta_k + delta_theta_k < M_PI / 2))
      throw domain_error("UserGeometry: DOA interval outside (-pi/2, pi/2)");
    if (P < 1) throw domain_error("UserGeometry: ray count must be >= 1");
  }
};

/// Physical parameters of one ray set realization.
struct RaySet {
  ComplexVector alpha;  // complex gains
  RealVector theta;     // DOAs, radians
  RealVector varphi;    // motion angles, radians
  RealVector phi;       // initial phases, radians

  int size() const { return static_cast<int>(theta.size()); }
};

/// Air-interface parameters of one simulation interval.
struct AirConfig {
  int M = 1;                  // antenna count
  double spacing_ratio = 0.5; // d/lambda
  double f_d = 0.0;           // maximum Doppler, Hz
  double T_s = 1e-6;          // sample period, s
  int N = 1;                  // interval length, symbols

  void validate() const {
    if (M < 1) throw domain_error("AirConfig: M must be >= 1");
    if (N < 1) throw domain_error("AirConfig: N must be >= 1");
    if (!(f_d >= 0.0)) throw domain_error("AirConfig: f_d must be >= 0");
    if (!(T_s > 0.0)) throw domain_error("AirConfig: T_s must be positive");
    if (!(spacing_ratio > 0.0))
      throw domain_error("AirConfig: spacing ratio must be positive");
  }
};

/// One user's channel over an interval; column n is h(n).
struct ChannelBlock {
  ComplexMatrix matrix;  // M x N

  int M() const { return static_cast<int>(matrix.rows()); }
  int N() const { return static_cast<int>(matrix.cols()); }
};

/// Draw one ray set: DOAs uniform in the geometry interval, motion angles
/// and phases uniform on [0, 2*pi), gains i.i.d. CN(0,1).
inline RaySet sample_rays(const UserGeometry& geom, RandomStream& rng) {
  geom.validate();
  RaySet rays;
  rays.alpha.resize(geom.P);
  rays.theta.resize(geom.P);
  rays.varphi.resize(geom.P);
  rays.phi.resize(geom.P);
  for (int p = 0; p < geom.P; ++p) {
    rays.theta(p) = rng.uniform(geom.theta_k - geom.delta_theta_k,
                                geom.theta_k + geom.delta_theta_k);
    rays.varphi(p) = rng.uniform(0.0, 2.0 * M_PI);
    rays.phi(p) = rng.uniform(0.0, 2.0 * M_PI);
    rays.alpha(p) = rng.cnormal();
  }
  return rays;
}

namespace detail {

/// P x N matrix of Doppler phasors, entry (p, n) =
/// exp(-j*2*pi*f_d*n*T_s*cos(varphi_p)), built by phase recurrence.
inline ComplexMatrix doppler_phasors(const RaySet& rays, const AirConfig& air) {
  const int P = rays.size();
  ComplexMatrix D(P, air.N);
  for (int p = 0; p < P; ++p) {
    const cplx step =
        std::polar(1.0, -2.0 * M_PI * air.f_d * air.T_s * std::cos(rays.varphi(p)));
    cplx w(1.0, 0.0);
    for (int n = 0; n < air.N; ++n) {
      D(p, n) = w;
      w *= step;
    }
  }
  return D;
}

}  // namespace detail

/// Closed-form beam response of a unit steering vector: (F * a)_q where the
/// steering vector points at continuous bin position nu = M*(d/lambda)*sin(theta).
inline cplx dirichlet_beam_gain(double nu, int q, int M) {
  if (M == 1) return cplx(1.0, 0.0);
  const double z = nu - static_cast<double>(q);
  const long long k = static_cast<long long>(std::llround(z / M));
  const double w = z - static_cast<double>(k) * M;
  double ratio;
  if (std::abs(w) < 1e-9) {
    ratio = static_cast<double>(M);
  } else {
    ratio = std::sin(M_PI * w) / std::sin(M_PI * w / M);
  }
  // sin(pi*z) = sin(pi*w)*(-1)^(k*M), sin(pi*z/M) = sin(pi*w/M)*(-1)^k
  const double sign = ((k * (M - 1)) % 2 != 0) ? -1.0 : 1.0;
  const cplx phase = std::polar(1.0, M_PI * (M - 1) * z / M);
  return phase * (sign * ratio / std::sqrt(static_cast<double>(M)));
}

/// All-bin beam response of one ray direction (length-M column of F * a).
inline ComplexVector dirichlet_beam_response(double nu, int M) {
  ComplexVector g(M);
  for (int q = 0; q < M; ++q) g(q) = dirichlet_beam_gain(nu, q, M);
  return g;
}

/// Antenna-domain channel block per the ray model.
inline ChannelBlock channel_block(const RaySet& rays, const AirConfig& air) {
  air.validate();
  const int P = rays.size();
  for (int p = 0; p < P; ++p)
    if (!(rays.theta(p) > -M_PI / 2 && rays.theta(p) < M_PI / 2))
      throw domain_error("channel_block: ray DOA outside (-pi/2, pi/2)");
  ComplexMatrix A(air.M, P);
  const double inv_sqrt_p = 1.0 / std::sqrt(static_cast<double>(P));
  for (int p = 0; p < P; ++p) {
    const cplx gain = rays.alpha(p) * std::polar(inv_sqrt_p, -rays.phi(p));
    const double phase = 2.0 * M_PI * air.spacing_ratio * std::sin(rays.theta(p));
    for (int m = 0; m < air.M; ++m) A(m, p) = gain * std::polar(1.0, phase * m);
  }
  ChannelBlock block;
  block.matrix.noalias() = A * detail::doppler_phasors(rays, air);
  return block;
}

/// Beam-domain channel block, F * h(n) per column, via the closed-form
/// Dirichlet beam response (no FFT of the antenna block needed).
inline ComplexMatrix beam_channel_block(const RaySet& rays, const AirConfig& air) {
  air.validate();
  const int P = rays.size();
  ComplexMatrix W(air.M, P);
  const double inv_sqrt_p = 1.0 / std::sqrt(static_cast<double>(P));
  for (int p = 0; p < P; ++p) {
    const double nu = air.M * air.spacing_ratio * std::sin(rays.theta(p));
    const cplx gain = rays.alpha(p) * std::polar(inv_sqrt_p, -rays.phi(p));
    for (int q = 0; q < air.M; ++q)
      W(q, p) = gain * dirichlet_beam_gain(nu, q, air.M);
  }
  ComplexMatrix G;
  G.noalias() = W * detail::doppler_phasors(rays, air);
  return G;
}

/// Sample average of h_i(n) * conj(h_l(n+m)) over time and realizations.
/// Normalized per lag: divided by the number of products actually summed.
inline cplx empirical_time_correlation(const std::vector<ChannelBlock>& blocks,
                                       int m, int i, int l) {
  if (blocks.empty())
    throw domain_error("empirical_time_correlation: no blocks");
  const int M = blocks.front().M();
  const int N = blocks.front().N();
  if (m < 0 || m >= N)
    throw domain_error("empirical_time_correlation: lag out of range");
  if (i < 0 || i >= M || l < 0 || l >= M)
    throw domain_error("empirical_time_correlation: antenna index out of range");
  cplx acc(0.0, 0.0);
  std::uint64_t count = 0;
  for (const ChannelBlock& b : blocks) {
    if (b.M() != M || b.N() != N)
      throw invalid_dimension("empirical_time_correlation: ragged blocks");
    for (int n = 0; n + m < N; ++n) {
      acc += b.matrix(i, n) * std::conj(b.matrix(l, n + m));
      ++count;
    }
  }
  return acc / static_cast<double>(count);
}

/// Angular kernel: (1/(2*delta)) * int over the DOA interval of
/// exp(-j*x*sin(y)) dy, adaptive Simpson to 1e-8.
inline cplx angular_kernel_g(double x, const UserGeometry& geom) {
  geom.validate();
  const double a = geom.theta_k - geom.delta_theta_k;
  const double b = geom.theta_k + geom.delta_theta_k;
  const double re = detail::integrate(
      [x](double y) { return std::cos(x * std::sin(y)); }, a, b, 1e-8);
  const double im = detail::integrate(
      [x](double y) { return -std::sin(x * std::sin(y)); }, a, b, 1e-8);
  return cplx(re, im) / (2.0 * geom.delta_theta_k);
}

/// Averaged Hann periodogram of per-bin time series; returns the power
/// fraction beyond the Doppler band edge. The edge is widened by the
/// window's mainlobe half-width, 2/(N*T_s), so an exact band-edge tone
/// (and the f_d = 0 limit) reads as in-band up to sidelobe leakage.
inline double doppler_bandwidth_check(const std::vector<ComplexVector>& series,
                                      double f_d, double T_s) {
  if (series.empty()) throw domain_error("doppler_bandwidth_check: no series");
  if (!(T_s > 0.0)) throw domain_error("doppler_bandwidth_check: bad T_s");
  if (f_d * T_s >= 0.5)
    throw aliasing_error("doppler_bandwidth_check: f_d*T_s >= 0.5");
  const int N = static_cast<int>(series.front().size());
  if (N < 2) throw domain_error("doppler_bandwidth_check: series too short");
  if (f_d > 0.0 && static_cast<double>(N) < 2.0 / (f_d * T_s))
    throw domain_error("doppler_bandwidth_check: series shorter than 2/(f_d*T_s)");

  std::vector<double> hann(static_cast<std::size_t>(N));
  for (int n = 0; n < N; ++n)
    hann[static_cast<std::size_t>(n)] = 0.5 - 0.5 * std::cos(2.0 * M_PI * n / N);

  std::vector<double> psd(static_cast<std::size_t>(N), 0.0);
  ComplexVector x(N);
  for (const ComplexVector& s : series) {
    if (static_cast<int>(s.size()) != N)
      throw invalid_dimension("doppler_bandwidth_check: ragged series");
    for (int n = 0; n < N; ++n) x(n) = s(n) * hann[static_cast<std::size_t>(n)];
    detail::fft_inplace(x.data(), N, -1);
    for (int k = 0; k < N; ++k) psd[static_cast<std::size_t>(k)] += std::norm(x(k));
  }

  const double band = f_d + 2.0 / (static_cast<double>(N) * T_s);
  double total = 0.0, out = 0.0;
  for (int k = 0; k < N; ++k) {
    const double f =
        (k <= N / 2 ? static_cast<double>(k) : static_cast<double>(k - N)) /
        (static_cast<double>(N) * T_s);
    total += psd[static_cast<std::size_t>(k)];
    if (std::abs(f) > band) out += psd[static_cast<std::size_t>(k)];
  }
  if (!(total > 0.0))
    throw degenerate_input("doppler_bandwidth_check: zero total power");
  return out / total;
}

}  // namespace stbem

#endif  // STBEM_CHANNEL_HPP
