// SPDX-License-Identifier: Apache-2.0
//
// stbem -- spatial-temporal basis expansion channel estimation toolkit
//
// Training protocol: preamble estimation, signature-disjoint user grouping,
// phase-shift-orthogonal pilot construction, grouped uplink least-squares
// estimation with per-user coefficient extraction, wavelength-reciprocity
// signature mapping and beam-domain downlink training.

#ifndef STBEM_TRAINING_HPP
#define STBEM_TRAINING_HPP

#include <cmath>
#include <complex>
#include <vector>

#include "stbem/channel.hpp"
#include "stbem/errors.hpp"
#include "stbem/linalg.hpp"
#include "stbem/model.hpp"
#include "stbem/rng.hpp"

namespace stbem {

/// Equispaced pilot slots plus per-group phase-ramp sequences.
struct PilotSchedule {
  int G = 0;                 // sequence count (groups, or beams downlink)
  int R = 0;                 // temporal expansion order
  int N = 0;                 // interval length
  int T = 0;                 // pilot count
  std::vector<int> indices;  // n_i = i*N/T
  ComplexMatrix sequences;   // G x T, row g holds s_g(n_i)
};

/// Partition of users into groups with pairwise signature separation.
struct GroupAssignment {
  std::vector<std::vector<int>> groups;
};

/// Time-orthogonal preamble: one dedicated unit-power symbol per user.
struct PreambleDesign {
  std::vector<double> powers;               // per-user transmit power
  std::vector<std::complex<double>> symbols;  // per-user pilot symbol

  static PreambleDesign uniform(int K, double power) {
    PreambleDesign d;
    d.powers.assign(static_cast<std::size_t>(K), power);
    d.symbols.assign(static_cast<std::size_t>(K), cplx(1.0, 0.0));
    return d;
  }
};

/// Received uplink training block.
struct UplinkObservation {
  ComplexMatrix Y;             // M x T
  double noise_var = 1.0;      // sigma_n^2
  std::vector<double> powers;  // per-user P_k^ul
};

/// Received downlink training series at one user.
struct DownlinkObservation {
  ComplexVector y;         // length T
  double noise_var = 1.0;  // sigma_n^2
  double power = 1.0;      // P^dl of this user
  double lambda_up = 1.0;  // uplink carrier wavelength
  double lambda_down = 1.0;  // downlink carrier wavelength
};

/// Equi-powered, equi-spaced, phase-shift-orthogonal pilots:
/// s_g(n_i) = sqrt(1/T) * exp(j*2*pi*i*(g-1)*(R+1)/T), n_i = i*N/T.
inline PilotSchedule make_pilots(int G, int R, int N, int T) {
  if (G < 1 || R < 0 || N < 1 || T < 1)
    throw schedule_error("make_pilots: bad dimensions");
  if (T < G * (R + 1))
    throw identifiability_error("make_pilots: need T >= G*(R+1)");
  if (N % T != 0) throw schedule_error("make_pilots: N must be divisible by T");
  PilotSchedule s;
  s.G = G;
  s.R = R;
  s.N = N;
  s.T = T;
  s.indices.resize(static_cast<std::size_t>(T));
  for (int i = 0; i < T; ++i) s.indices[static_cast<std::size_t>(i)] = i * (N / T);
  s.sequences.resize(G, T);
  const double amp = std::sqrt(1.0 / T);
  for (int g = 0; g < G; ++g)
    for (int i = 0; i < T; ++i)
      s.sequences(g, i) =
          std::polar(amp, 2.0 * M_PI * static_cast<double>(i) * g * (R + 1) / T);
  return s;
}

/// Stacked pilot matrix [C*S_1; ...; C*S_G], shape G*(R+1) x T, where C is
/// the temporal basis over the pilot slots and S_g = diag(s_g).
inline ComplexMatrix stacked_pilot_matrix(const PilotSchedule& s) {
  const CebemBasisSpec spec{s.N, s.R};
  const ComplexMatrix C = cebem_basis_matrix(spec, s.indices);  // (R+1) x T
  ComplexMatrix A(s.G * (s.R + 1), s.T);
  for (int g = 0; g < s.G; ++g)
    for (int i = 0; i < s.T; ++i)
      A.block(g * (s.R + 1), i, s.R + 1, 1) = C.col(i) * s.sequences(g, i);
  return A;
}

/// Circular intersection test of windows (s1, len1) and (s2, len2) on Z_M.
inline bool windows_intersect(int s1, int len1, int s2, int len2, int M) {
  const int d12 = (((s2 - s1) % M) + M) % M;
  const int d21 = (((s1 - s2) % M) + M) % M;
  return d12 < len1 || d21 < len2;
}

/// Deterministic first-fit grouping: user joins the first group where its
/// guard-dilated window intersects no member's guard-dilated window.
inline GroupAssignment group_users(const std::vector<SpatialSignature>& sigs,
                                   int guard) {
  GroupAssignment out;
  if (sigs.empty()) return out;
  if (guard < 0) throw domain_error("group_users: guard must be >= 0");
  const int M = sigs.front().M;
  for (const auto& sig : sigs) {
    sig.validate();
    if (sig.M != M) throw invalid_dimension("group_users: mixed grid sizes");
    if (sig.tau + 2 * guard > M)
      throw infeasibility_error("group_users: dilated window exceeds grid");
  }
  auto dilated_start = [&](const SpatialSignature& sig) {
    return (((sig.start - guard) % M) + M) % M;
  };
  for (int k = 0; k < static_cast<int>(sigs.size()); ++k) {
    const int sk = dilated_start(sigs[static_cast<std::size_t>(k)]);
    const int lk = sigs[static_cast<std::size_t>(k)].tau + 2 * guard;
    bool placed = false;
    for (auto& group : out.groups) {
      bool clash = false;
      for (int l : group) {
        const int sl = dilated_start(sigs[static_cast<std::size_t>(l)]);
        const int ll = sigs[static_cast<std::size_t>(l)].tau + 2 * guard;
        if (windows_intersect(sk, lk, sl, ll, M)) {
          clash = true;
          break;
        }
      }
      if (!clash) {
        group.push_back(k);
        placed = true;
        break;
      }
    }
    if (!placed) out.groups.push_back({k});
  }
  return out;
}

/// Simulated preamble block: column k = sqrt(P_k) * s_k * h_k + noise.
inline ComplexMatrix simulate_preamble(const std::vector<ComplexVector>& h_pre,
                                       const PreambleDesign& design,
                                       double noise_var, RandomStream& rng) {
  const int K = static_cast<int>(h_pre.size());
  if (K < 1) throw domain_error("simulate_preamble: no users");
  if (static_cast<int>(design.powers.size()) != K ||
      static_cast<int>(design.symbols.size()) != K)
    throw invalid_dimension("simulate_preamble: design size mismatch");
  const int M = static_cast<int>(h_pre.front().size());
  ComplexMatrix Y(M, K);
  const double sd = std::sqrt(noise_var);
  for (int k = 0; k < K; ++k) {
    if (static_cast<int>(h_pre[static_cast<std::size_t>(k)].size()) != M)
      throw invalid_dimension("simulate_preamble: ragged channels");
    const cplx amp = std::sqrt(design.powers[static_cast<std::size_t>(k)]) *
                     design.symbols[static_cast<std::size_t>(k)];
    for (int m = 0; m < M; ++m)
      Y(m, k) = amp * h_pre[static_cast<std::size_t>(k)](m) + sd * rng.cnormal();
  }
  return Y;
}

/// Per-user least-squares preamble estimates: h_hat_k = y_k / (sqrt(P_k)*s_k).
inline std::vector<ComplexVector> preamble_estimate(const ComplexMatrix& Y_pre,
                                                    const PreambleDesign& design) {
  const int K = static_cast<int>(Y_pre.cols());
  if (static_cast<int>(design.powers.size()) != K ||
      static_cast<int>(design.symbols.size()) != K)
    throw invalid_dimension("preamble_estimate: design size mismatch");
  std::vector<ComplexVector> out;
  out.reserve(static_cast<std::size_t>(K));
  for (int k = 0; k < K; ++k) {
    const double p = design.powers[static_cast<std::size_t>(k)];
    const cplx s = design.symbols[static_cast<std::size_t>(k)];
    if (!(p > 0.0) || std::abs(s) == 0.0)
      throw domain_error("preamble_estimate: zero pilot symbol or power");
    out.push_back(Y_pre.col(k) / (std::sqrt(p) * s));
  }
  return out;
}

/// Received uplink training block:
/// Y = sum_g sum_{k in U_g} sqrt(P_k) * [h_k(n_0..n_{T-1})] * S_g + noise.
inline UplinkObservation simulate_uplink(const std::vector<ChannelBlock>& blocks,
                                         const PilotSchedule& schedule,
                                         const GroupAssignment& assignment,
                                         const std::vector<double>& powers,
                                         double noise_var, RandomStream& rng) {
  if (blocks.empty()) throw domain_error("simulate_uplink: no users");
  if (powers.size() != blocks.size())
    throw invalid_dimension("simulate_uplink: power list size mismatch");
  const int M = blocks.front().M();
  UplinkObservation obs;
  obs.noise_var = noise_var;
  obs.powers = powers;
  obs.Y = ComplexMatrix::Zero(M, schedule.T);
  for (int g = 0; g < static_cast<int>(assignment.groups.size()); ++g) {
    if (g >= schedule.G)
      throw identifiability_error("simulate_uplink: more groups than sequences");
    for (int k : assignment.groups[static_cast<std::size_t>(g)]) {
      const ComplexMatrix& H = blocks[static_cast<std::size_t>(k)].matrix;
      const double amp = std::sqrt(powers[static_cast<std::size_t>(k)]);
      for (int i = 0; i < schedule.T; ++i)
        obs.Y.col(i) += amp * schedule.sequences(g, i) *
                        H.col(schedule.indices[static_cast<std::size_t>(i)]);
    }
  }
  const double sd = std::sqrt(noise_var);
  for (int i = 0; i < schedule.T; ++i)
    for (int m = 0; m < M; ++m) obs.Y(m, i) += sd * rng.cnormal();
  return obs;
}

/// Grouped uplink LS estimate in the beam domain:
/// Lambda_hat = F * Y * pinv([C*S_1; ...; C*S_G]), shape M x G*(R+1).
inline ComplexMatrix uplink_estimate_all(const UplinkObservation& obs,
                                         const PilotSchedule& schedule) {
  ComplexMatrix Yb = obs.Y;
  forward_dft_columns(Yb);
  const ComplexMatrix A = stacked_pilot_matrix(schedule);
  // Lambda_hat = Yb * pinv(A); computed as a least-squares solve against A^H
  const ComplexMatrix X = ls_solve(A.adjoint(), Yb.adjoint());
  return X.adjoint();
}

/// Extract one user's coefficients: rows B_k of the group-g block of
/// Lambda_hat, scaled by 1/sqrt(P_k); all other rows are implicitly zero.
inline CebemCoeffs extract_user_coeffs(const ComplexMatrix& Lambda_hat,
                                       const SpatialSignature& sig, int group,
                                       double power, int R) {
  sig.validate();
  if (sig.M != static_cast<int>(Lambda_hat.rows()))
    throw index_error("extract_user_coeffs: signature grid mismatch");
  if (group < 0 || (group + 1) * (R + 1) > static_cast<int>(Lambda_hat.cols()))
    throw index_error("extract_user_coeffs: group block out of range");
  if (!(power > 0.0)) throw domain_error("extract_user_coeffs: bad power");
  CebemCoeffs out;
  out.lambda.resize(sig.tau, R + 1);
  const double scale = 1.0 / std::sqrt(power);
  for (int i = 0; i < sig.tau; ++i) {
    const int q = (sig.start + i) % sig.M;
    out.lambda.row(i) = scale * Lambda_hat.row(q).segment(group * (R + 1), R + 1);
  }
  return out;
}

namespace detail {

/// Signed bin value in (-M/2, M/2].
inline int signed_bin(int q, int M) {
  const int w = ((q % M) + M) % M;
  return w > M / 2 ? w - M : w;
}

}  // namespace detail

/// Wavelength-reciprocity signature mapping: endpoints scaled on signed bin
/// values, q'_min = floor(r*q_min), q'_max = ceil(r*q_max) with r the
/// wavelength ratio; result is the (possibly dilated) contiguous window.
inline SpatialSignature map_signature_downlink(const SpatialSignature& sig,
                                               double lambda1, double lambda2) {
  sig.validate();
  if (!(lambda1 > 0.0) || !(lambda2 > 0.0))
    throw domain_error("map_signature_downlink: wavelengths must be positive");
  const double ratio = lambda1 / lambda2;
  const int q_min = detail::signed_bin(sig.start, sig.M);
  const int q_max = q_min + sig.tau - 1;
  if (q_max > sig.M / 2)
    throw reciprocity_error("map_signature_downlink: window wraps the grid edge");
  // snap before rounding so exact integer products stay exact
  const int qp_min = static_cast<int>(std::floor(ratio * q_min + 1e-9));
  const int qp_max = static_cast<int>(std::ceil(ratio * q_max - 1e-9));
  if (qp_min < -sig.M / 2 || qp_max > sig.M / 2)
    throw reciprocity_error("map_signature_downlink: scaled endpoint out of range");
  SpatialSignature out;
  out.M = sig.M;
  out.tau = qp_max - qp_min + 1;
  out.start = ((qp_min % sig.M) + sig.M) % sig.M;
  return out;
}

/// Recenter a window to a fixed length (trim or extend symmetrically).
inline SpatialSignature clip_signature(const SpatialSignature& sig, int tau) {
  sig.validate();
  if (tau < 1 || tau > sig.M)
    throw invalid_dimension("clip_signature: need 1 <= tau <= M");
  if (tau == sig.tau) return sig;
  const int q_min = detail::signed_bin(sig.start, sig.M);
  const double center = q_min + (sig.tau - 1) / 2.0;
  const int new_start =
      static_cast<int>(std::lround(center - (tau - 1) / 2.0));
  SpatialSignature out;
  out.M = sig.M;
  out.tau = tau;
  out.start = ((new_start % sig.M) + sig.M) % sig.M;
  return out;
}

/// Downlink training observations for one group. The base station sends,
/// on every member's mapped window, one phase-ramp sequence per beam with
/// per-beam power P_l/tau; member k's scalar observation sees its own
/// window's beams plus (negligible) leakage of the other members' beams.
/// Channel blocks are passed in the beam domain (columns F*g(n)).
inline std::vector<DownlinkObservation> simulate_downlink_training(
    const std::vector<const ComplexMatrix*>& beam_blocks,
    const std::vector<SpatialSignature>& sigs, const PilotSchedule& pilots,
    const std::vector<double>& powers, double noise_var, double lambda1,
    double lambda2, RandomStream& rng) {
  const std::size_t members = beam_blocks.size();
  if (members == 0) throw domain_error("simulate_downlink_training: no users");
  if (sigs.size() != members || powers.size() != members)
    throw invalid_dimension("simulate_downlink_training: size mismatch");
  const int tau = sigs.front().tau;
  for (const auto& s : sigs) {
    s.validate();
    if (s.tau != tau)
      throw invalid_dimension("simulate_downlink_training: mixed window sizes");
  }
  if (pilots.G != tau)
    throw invalid_dimension("simulate_downlink_training: need one sequence per beam");
  if (pilots.T < tau * (pilots.R + 1))
    throw identifiability_error("simulate_downlink_training: T < tau*(R+1)");

  std::vector<DownlinkObservation> out(members);
  for (std::size_t k = 0; k < members; ++k) {
    out[k].y = ComplexVector::Zero(pilots.T);
    out[k].noise_var = noise_var;
    out[k].power = powers[k];
    out[k].lambda_up = lambda1;
    out[k].lambda_down = lambda2;
  }
  for (int i = 0; i < pilots.T; ++i) {
    const int n = pilots.indices[static_cast<std::size_t>(i)];
    for (std::size_t k = 0; k < members; ++k) {
      cplx acc(0.0, 0.0);
      for (std::size_t l = 0; l < members; ++l) {
        const double amp = std::sqrt(powers[l] / tau);
        for (int j = 0; j < tau; ++j) {
          const int q = (sigs[l].start + j) % sigs[l].M;
          acc += amp * pilots.sequences(j, i) * (*beam_blocks[k])(q, n);
        }
      }
      out[k].y(i) = acc;
    }
  }
  const double sd = std::sqrt(noise_var);
  for (std::size_t k = 0; k < members; ++k)
    for (int i = 0; i < pilots.T; ++i) out[k].y(i) += sd * rng.cnormal();
  return out;
}

/// User-side downlink LS estimate of the tau*(R+1) stacked coefficients.
/// Needs no knowledge of the window position: coefficients come out in
/// beam-slot order and the window index is only reattached at the base
/// station after feedback.
inline CebemCoeffs downlink_estimate(const DownlinkObservation& obs,
                                     const PilotSchedule& pilots) {
  const int tau = pilots.G;
  const ComplexMatrix A = stacked_pilot_matrix(pilots);  // tau*(R+1) x T
  const ComplexMatrix phi = A.transpose();               // T x tau*(R+1)
  const ComplexVector vec =
      ls_solve(phi, obs.y) / std::sqrt(obs.power / tau);
  CebemCoeffs out;
  out.lambda.resize(tau, pilots.R + 1);
  for (int j = 0; j < tau; ++j)
    for (int r = 0; r <= pilots.R; ++r)
      out.lambda(j, r) = vec(j * (pilots.R + 1) + r);
  return out;
}

/// Precomputed uplink estimator for repeated use with one schedule.
class UplinkEstimator {
 public:
  explicit UplinkEstimator(const PilotSchedule& schedule)
      : pinv_(pseudo_inverse(stacked_pilot_matrix(schedule))) {}

  /// Estimate from a beam-domain observation (columns already F-transformed).
  ComplexMatrix estimate_beam(const ComplexMatrix& Y_beam) const {
    return Y_beam * pinv_;
  }

 private:
  ComplexMatrix pinv_;  // T x G*(R+1)
};

/// Precomputed downlink estimator for repeated use with one schedule.
class DownlinkEstimator {
 public:
  explicit DownlinkEstimator(const PilotSchedule& pilots)
      : R_(pilots.R), tau_(pilots.G),
        pinv_(pseudo_inverse(stacked_pilot_matrix(pilots).transpose())) {}

  CebemCoeffs estimate(const ComplexVector& y, double power) const {
    const ComplexVector vec = pinv_ * y / std::sqrt(power / tau_);
    CebemCoeffs out;
    out.lambda.resize(tau_, R_ + 1);
    for (int j = 0; j < tau_; ++j)
      for (int r = 0; r <= R_; ++r) out.lambda(j, r) = vec(j * (R_ + 1) + r);
    return out;
  }

 private:
  int R_;
  int tau_;
  ComplexMatrix pinv_;  // tau*(R+1) x T
};

}  // namespace stbem

#endif  // STBEM_TRAINING_HPP
