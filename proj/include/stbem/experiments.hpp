// SPDX-License-Identifier: Apache-2.0
//
// stbem -- spatial-temporal basis expansion channel estimation toolkit
//
// Monte Carlo experiment runners: beamspace sparsity demo, temporal-fit
// demo, uplink/downlink estimation error sweeps, downlink BER.
//
// The MSE runners share one channel and noise realization across the whole
// SNR grid (common random numbers): estimation error is linear in the noise,
// so for training energy P the per-trial squared error decomposes exactly as
// e0 + en/P + ex/sqrt(P), with e0 the truncation-plus-leakage part, en the
// unit-noise part and ex the cross term. Every SNR point is evaluated from
// the same decomposition, which keeps curves deterministic and smooth while
// each point retains its exact marginal statistics.

#ifndef STBEM_EXPERIMENTS_HPP
#define STBEM_EXPERIMENTS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "stbem/channel.hpp"
#include "stbem/config.hpp"
#include "stbem/linalg.hpp"
#include "stbem/metrics.hpp"
#include "stbem/model.hpp"
#include "stbem/report.hpp"
#include "stbem/rng.hpp"
#include "stbem/training.hpp"

namespace stbem {
namespace detail {

// stream-path components, one per experiment and per noise role
enum StreamId : std::uint64_t {
  kSignature = 1,
  kCebemFit = 2,
  kUplink = 3,
  kDownlink = 4,
  kBer = 5,
  kRays = 10,
  kPreambleNoise = 11,
  kTrainingNoise = 12,
  kConvNoise = 13,
  kGainRedraw = 14,
  kDataBits = 15,
  kDataNoise = 16,
  kConvFrame = 17
};

/// Per-trial squared-error decomposition; err(P) = e0 + en/P + ex/sqrt(P).
struct ErrorParts {
  double e0 = 0.0;
  double en = 0.0;
  double ex = 0.0;
  double ref = 0.0;

  double error_at(double power) const {
    return e0 + en / power + ex / std::sqrt(power);
  }
};

/// Aggregate NMSE and a per-trial-ratio spread estimate at one power level.
struct NmseSummary {
  double nmse = 0.0;
  double stderr_ratio = 0.0;
};

inline NmseSummary summarize(const std::vector<ErrorParts>& trials,
                             double power) {
  double err = 0.0, ref = 0.0, mean = 0.0, m2 = 0.0;
  int n = 0;
  for (const auto& t : trials) {
    const double e = t.error_at(power);
    err += e;
    ref += t.ref;
    const double r = e / t.ref;
    ++n;
    const double d = r - mean;
    mean += d / n;
    m2 += d * (r - mean);
  }
  NmseSummary s;
  if (ref == 0.0) throw degenerate_input("summarize: zero reference energy");
  s.nmse = err / ref;
  s.stderr_ratio = n > 1 ? std::sqrt(m2 / (n - 1) / n) : 0.0;
  return s;
}

inline double q_function(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

inline std::string format_num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", x);
  return buf;
}

/// Unit-variance complex Gaussian matrix.
inline ComplexMatrix noise_matrix(int rows, int cols, RandomStream& rng) {
  ComplexMatrix W(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) W(i, j) = rng.cnormal();
  return W;
}

inline ComplexVector noise_vector(int n, RandomStream& rng) {
  ComplexVector w(n);
  for (int i = 0; i < n; ++i) w(i) = rng.cnormal();
  return w;
}

/// Same DOAs, fresh gains and Doppler/initial phases (FDD reciprocity).
inline RaySet redraw_gains(const RaySet& rays, RandomStream& rng) {
  RaySet out = rays;
  for (int p = 0; p < rays.size(); ++p) {
    out.alpha(p) = rng.cnormal();
    out.varphi(p) = rng.uniform(0.0, 2.0 * M_PI);
    out.phi(p) = rng.uniform(0.0, 2.0 * M_PI);
  }
  return out;
}

/// Beam-domain block F * H for a ray set (closed-form beam response route).
inline ComplexMatrix beam_block(const RaySet& rays, const AirConfig& air) {
  return beam_channel_block(rays, air);
}

/// Window estimate from one noisy beam-domain snapshot.
inline SpatialSignature window_from_preamble(const ComplexVector& beam_col,
                                             double preamble_power, int tau,
                                             RandomStream& rng) {
  const int M = static_cast<int>(beam_col.size());
  RealVector p(M);
  const double amp = std::sqrt(preamble_power);
  for (int q = 0; q < M; ++q)
    p(q) = std::norm(amp * beam_col(q) + rng.cnormal());
  return extract_signature_from_power(p, tau);
}

inline std::vector<UserGeometry> scenario_geometries(const ScenarioConfig& cfg,
                                                     double spread_deg) {
  std::vector<UserGeometry> geoms;
  geoms.reserve(static_cast<std::size_t>(cfg.users));
  const double d2r = M_PI / 180.0;
  for (int k = 0; k < cfg.users; ++k) {
    UserGeometry g;
    g.theta_k = cfg.user_center_deg(k) * d2r;
    g.delta_theta_k = 0.5 * spread_deg * d2r;
    g.P = cfg.rays;
    geoms.push_back(g);
  }
  return geoms;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// beamspace sparsity demo
// ---------------------------------------------------------------------------

/// Deterministic dense-comb window size, the analytic window bound, the
/// single-ray window constant, and the window-size spread under small ray
/// placement jitter. Optionally dumps per-ray and aggregate per-bin DFT
/// power profiles to `dump`.
inline ResultTable run_signature_demo(const ScenarioConfig& cfg,
                                      std::ostream* dump = nullptr) {
  cfg.validate();
  const int M = cfg.antennas;
  const double d2r = M_PI / 180.0;
  const double theta_c = cfg.cluster_centers_deg.front() * d2r;
  const double delta = 0.5 * cfg.angular_spread_deg * d2r;
  const int P = cfg.rays;

  // equispaced coherent comb across the angular interval
  auto comb_angle = [&](int p, double lo, double hi) {
    return P == 1 ? 0.5 * (lo + hi) : lo + (hi - lo) * p / (P - 1);
  };
  auto comb_power = [&](const std::vector<double>& thetas) {
    ComplexVector h = ComplexVector::Zero(M);
    for (double th : thetas) h += steering_vector(th, M, cfg.spacing_ratio);
    const ComplexVector hb = forward_dft(h);
    RealVector p(M);
    for (int q = 0; q < M; ++q) p(q) = std::norm(hb(q));
    return p;
  };

  std::vector<double> base_angles;
  for (int p = 0; p < P; ++p)
    base_angles.push_back(comb_angle(p, theta_c - delta, theta_c + delta));
  const RealVector p_dense = comb_power(base_angles);
  const int dense_tau = min_power_window(p_dense, cfg.eta);
  const SpatialSignature dense_sig =
      extract_signature_from_power(p_dense, dense_tau);

  if (dump) {
    *dump << "bin";
    for (int p = 0; p < P; ++p) *dump << ",ray" << p;
    *dump << ",aggregate\n";
    std::vector<RealVector> per_ray;
    for (int p = 0; p < P; ++p)
      per_ray.push_back(comb_power({base_angles[static_cast<std::size_t>(p)]}));
    for (int q = 0; q < M; ++q) {
      *dump << q;
      for (int p = 0; p < P; ++p)
        *dump << ',' << detail::format_num(per_ray[static_cast<std::size_t>(p)](q));
      *dump << ',' << detail::format_num(p_dense(q)) << '\n';
    }
  }

  // analytic bound pieces
  UserGeometry geom;
  geom.theta_k = theta_c;
  geom.delta_theta_k = delta;
  geom.P = P;
  AirConfig air;
  air.M = M;
  air.spacing_ratio = cfg.spacing_ratio;
  air.N = 1;
  const int bmax = single_ray_bmax(M, cfg.spacing_ratio, cfg.eta);
  const int bound = cardinality_bound(geom, air, bmax);

  // window-size spread under per-ray placement jitter
  int size_min = dense_tau, size_max = dense_tau;
  double size_sum = 0.0;
  int in_band = 0;
  const double jit = cfg.placement_jitter_deg * d2r;
  for (int t = 0; t < cfg.trials; ++t) {
    RandomStream rng(cfg.seed, {detail::kSignature, detail::kRays,
                                static_cast<std::uint64_t>(t)});
    std::vector<double> angles = base_angles;
    for (double& a : angles) a += rng.uniform(-jit, jit);
    const int tau_t = min_power_window(comb_power(angles), cfg.eta);
    size_min = std::min(size_min, tau_t);
    size_max = std::max(size_max, tau_t);
    size_sum += tau_t;
    if (tau_t >= 13 && tau_t <= 17) ++in_band;
  }

  ResultTable table;
  auto row = [&](const std::string& method, const std::string& metric,
                 double value, int trials) {
    table.add({cfg.experiment, 0.0, method, metric, value, trials, cfg.seed});
  };
  row("dense_comb", "window_size", dense_tau, 1);
  row("dense_comb", "window_capture",
      window_power(p_dense, dense_sig.start, dense_sig.tau) / p_dense.sum(), 1);
  row("dense_comb", "cardinality_bound", bound, 1);
  row("dense_comb", "single_ray_bmax", bmax, 1);
  row("jitter", "window_size_min", size_min, cfg.trials);
  row("jitter", "window_size_max", size_max, cfg.trials);
  row("jitter", "window_size_mean", size_sum / cfg.trials, cfg.trials);
  row("jitter", "in_band_fraction", static_cast<double>(in_band) / cfg.trials,
      cfg.trials);
  return table;
}

// ---------------------------------------------------------------------------
// temporal-fit demo
// ---------------------------------------------------------------------------

/// Complex-exponential fit quality of the strongest beam trajectory for
/// orders R in {2, 4, 6}, at the configured seed and across a seed sweep,
/// plus the static-channel sanity variant.
inline ResultTable run_cebem_fit_demo(const ScenarioConfig& cfg,
                                      std::ostream* dump = nullptr) {
  cfg.validate();
  AirConfig air;
  air.M = cfg.antennas;
  air.spacing_ratio = cfg.spacing_ratio;
  air.f_d = cfg.doppler_hz;
  air.T_s = cfg.symbol_time_s;
  air.N = cfg.interval;
  const auto geoms = detail::scenario_geometries(cfg, cfg.angular_spread_deg);

  auto fit_nmse = [&](const ComplexVector& series, int R) {
    const CebemBasisSpec spec{air.N, R};
    const ComplexVector lambda = cebem_fit(series, spec);
    const ComplexVector rec = cebem_full_basis(spec).transpose() * lambda;
    return (series - rec).squaredNorm() / series.squaredNorm();
  };
  auto strongest_series = [&](const ComplexMatrix& beam) {
    int best = 0;
    double best_p = -1.0;
    for (int q = 0; q < beam.rows(); ++q) {
      const double p = beam.row(q).squaredNorm();
      if (p > best_p) {
        best_p = p;
        best = q;
      }
    }
    return std::pair<int, ComplexVector>(best, beam.row(best).transpose());
  };

  // configured-seed trajectory and fits
  RandomStream rng0(cfg.seed, {detail::kCebemFit, detail::kRays, 0});
  const RaySet rays0 = sample_rays(geoms.front(), rng0);
  const ComplexMatrix beam0 = detail::beam_block(rays0, air);
  const auto [bin0, series0] = strongest_series(beam0);
  const double n2 = fit_nmse(series0, 2);
  const double n4 = fit_nmse(series0, 4);
  const double n6 = fit_nmse(series0, 6);

  if (dump) {
    const CebemBasisSpec spec4{air.N, 4};
    const ComplexVector c4 = cebem_fit(series0, spec4);
    const ComplexVector rec4 = cebem_full_basis(spec4).transpose() * c4;
    *dump << "n,re,im,re_fit_r4,im_fit_r4\n";
    for (int n = 0; n < air.N; ++n)
      *dump << n << ',' << detail::format_num(series0(n).real()) << ','
            << detail::format_num(series0(n).imag()) << ','
            << detail::format_num(rec4(n).real()) << ','
            << detail::format_num(rec4(n).imag()) << '\n';
  }

  // static-channel variant: zero Doppler collapses to a constant trajectory
  AirConfig air_static = air;
  air_static.f_d = 0.0;
  const ComplexMatrix beam_static = detail::beam_block(rays0, air_static);
  const double n0_static = fit_nmse(strongest_series(beam_static).second, 0);

  // seed sweep
  int better = 0, tight = 0;
  for (int t = 0; t < cfg.trials; ++t) {
    RandomStream rng(cfg.seed, {detail::kCebemFit, detail::kRays,
                                static_cast<std::uint64_t>(t) + 1});
    const RaySet rays = sample_rays(geoms.front(), rng);
    const ComplexMatrix beam = detail::beam_block(rays, air);
    const auto [bin, series] = strongest_series(beam);
    const double r2 = fit_nmse(series, 2);
    const double r4 = fit_nmse(series, 4);
    if (r4 < r2) ++better;
    if (r4 < 0.05) ++tight;
  }

  ResultTable table;
  auto row = [&](const std::string& method, const std::string& metric,
                 double value, int trials) {
    table.add({cfg.experiment, 0.0, method, metric, value, trials, cfg.seed});
  };
  row("stbem", "fitted_bin", bin0, 1);
  row("stbem", "nmse_r2", n2, 1);
  row("stbem", "nmse_r4", n4, 1);
  row("stbem", "nmse_r6", n6, 1);
  row("stbem", "nmse_r0_static", n0_static, 1);
  row("seed_sweep", "frac_r4_lt_r2", static_cast<double>(better) / cfg.trials,
      cfg.trials);
  row("seed_sweep", "frac_r4_lt_0p05", static_cast<double>(tight) / cfg.trials,
      cfg.trials);
  return table;
}

// ---------------------------------------------------------------------------
// uplink estimation error sweep
// ---------------------------------------------------------------------------

/// Uplink normalized MSE vs SNR for the windowed grouped estimator and the
/// full-dimension baseline, over one or more angular spreads. Per-user
/// training energy is T_st * rho for both methods (T_st = G(R+1)).
inline ResultTable run_uplink_mse(const ScenarioConfig& cfg) {
  cfg.validate();
  std::vector<double> spreads = cfg.spread_sweep_deg;
  if (spreads.empty()) spreads = {cfg.angular_spread_deg};

  AirConfig air;
  air.M = cfg.antennas;
  air.spacing_ratio = cfg.spacing_ratio;
  air.f_d = cfg.doppler_hz;
  air.T_s = cfg.symbol_time_s;
  air.N = cfg.interval;
  air.validate();

  const int M = cfg.antennas;
  const int K = cfg.users;
  const int R = cfg.bem_order;
  const int N = cfg.interval;
  const int T_st = cfg.groups * (R + 1);
  const int T_cv = K * (R + 1);

  const PilotSchedule sched_st = make_pilots(cfg.groups, R, N, T_st);
  const PilotSchedule sched_cv = make_pilots(K, R, N, T_cv);
  const ComplexMatrix pinv_st = pseudo_inverse(stacked_pilot_matrix(sched_st));
  const ComplexMatrix pinv_cv = pseudo_inverse(stacked_pilot_matrix(sched_cv));
  const ComplexMatrix C = cebem_full_basis({N, R});

  ResultTable table;
  for (std::size_t ai = 0; ai < spreads.size(); ++ai) {
    const auto geoms = detail::scenario_geometries(cfg, spreads[ai]);
    std::vector<detail::ErrorParts> st_trials, cv_trials;
    st_trials.reserve(static_cast<std::size_t>(cfg.trials));
    cv_trials.reserve(static_cast<std::size_t>(cfg.trials));

    for (int t = 0; t < cfg.trials; ++t) {
      const std::uint64_t tid = static_cast<std::uint64_t>(t);
      RandomStream rng_rays(cfg.seed, {detail::kUplink, ai, tid, detail::kRays});
      RandomStream rng_pre(cfg.seed,
                           {detail::kUplink, ai, tid, detail::kPreambleNoise});
      RandomStream rng_tr(cfg.seed,
                          {detail::kUplink, ai, tid, detail::kTrainingNoise});
      RandomStream rng_cv(cfg.seed, {detail::kUplink, ai, tid, detail::kConvNoise});

      // channels (beam domain) and estimated windows
      std::vector<ComplexMatrix> beams;
      std::vector<SpatialSignature> sigs;
      beams.reserve(static_cast<std::size_t>(K));
      for (int k = 0; k < K; ++k) {
        const RaySet rays = sample_rays(geoms[static_cast<std::size_t>(k)], rng_rays);
        beams.push_back(detail::beam_block(rays, air));
        sigs.push_back(detail::window_from_preamble(
            beams.back().col(0), cfg.preamble_power, cfg.tau, rng_pre));
      }
      // first-fit grouping; when window jitter forces more groups than
      // sequences exist, each surplus user joins the sequence whose current
      // holders overlap its window the least, so near-coincident windows
      // never share a sequence unless no disjoint choice remains
      const GroupAssignment assign = group_users(sigs, cfg.guard);
      std::vector<int> group_of(static_cast<std::size_t>(K), -1);
      std::vector<std::vector<int>> members(
          static_cast<std::size_t>(cfg.groups));
      const auto overlap_bins = [M](const SpatialSignature& a,
                                    const SpatialSignature& b) {
        int count = 0;
        for (int i = 0; i < a.tau; ++i) {
          const int rel = (((a.start + i - b.start) % M) + M) % M;
          if (rel < b.tau) ++count;
        }
        return count;
      };
      for (int g = 0; g < static_cast<int>(assign.groups.size()); ++g) {
        for (int k : assign.groups[static_cast<std::size_t>(g)]) {
          int target = g;
          if (g >= cfg.groups) {
            int least = std::numeric_limits<int>::max();
            target = 0;
            for (int cand = 0; cand < cfg.groups; ++cand) {
              int worst = 0;
              for (int m : members[static_cast<std::size_t>(cand)])
                worst = std::max(
                    worst, overlap_bins(sigs[static_cast<std::size_t>(k)],
                                        sigs[static_cast<std::size_t>(m)]));
              if (worst < least) {
                least = worst;
                target = cand;
              }
            }
          }
          group_of[static_cast<std::size_t>(k)] = target;
          members[static_cast<std::size_t>(target)].push_back(k);
        }
      }

      // unit-power noiseless observations (common sqrt(P) factored out)
      ComplexMatrix Y0 = ComplexMatrix::Zero(M, T_st);
      for (int k = 0; k < K; ++k) {
        const int g = group_of[static_cast<std::size_t>(k)];
        for (int i = 0; i < T_st; ++i)
          Y0.col(i) += sched_st.sequences(g, i) *
                       beams[static_cast<std::size_t>(k)].col(
                           sched_st.indices[static_cast<std::size_t>(i)]);
      }
      const ComplexMatrix L0 = Y0 * pinv_st;
      const ComplexMatrix Ln = detail::noise_matrix(M, T_st, rng_tr) * pinv_st;

      ComplexMatrix Yc0 = ComplexMatrix::Zero(M, T_cv);
      for (int k = 0; k < K; ++k)
        for (int i = 0; i < T_cv; ++i)
          Yc0.col(i) += sched_cv.sequences(k, i) *
                        beams[static_cast<std::size_t>(k)].col(
                            sched_cv.indices[static_cast<std::size_t>(i)]);
      const ComplexMatrix Lc0 = Yc0 * pinv_cv;
      const ComplexMatrix Lcn = detail::noise_matrix(M, T_cv, rng_cv) * pinv_cv;

      detail::ErrorParts st, cv;
      for (int k = 0; k < K; ++k) {
        const ComplexMatrix& G = beams[static_cast<std::size_t>(k)];
        const SpatialSignature& sig = sigs[static_cast<std::size_t>(k)];
        const int g = group_of[static_cast<std::size_t>(k)];
        const double ref = G.squaredNorm();

        // windowed grouped estimator
        ComplexMatrix Gwin(sig.tau, N), l0(sig.tau, R + 1), ln(sig.tau, R + 1);
        for (int i = 0; i < sig.tau; ++i) {
          const int q = (sig.start + i) % M;
          Gwin.row(i) = G.row(q);
          l0.row(i) = L0.row(q).segment(g * (R + 1), R + 1);
          ln.row(i) = Ln.row(q).segment(g * (R + 1), R + 1);
        }
        const ComplexMatrix E0 = l0 * C - Gwin;
        const ComplexMatrix En = ln * C;
        st.e0 += E0.squaredNorm() + (ref - Gwin.squaredNorm());
        st.en += En.squaredNorm();
        st.ex += 2.0 * E0.cwiseProduct(En.conjugate()).sum().real();
        st.ref += ref;

        // full-dimension baseline
        const ComplexMatrix Ec0 =
            Lc0.middleCols(k * (R + 1), R + 1) * C - G;
        const ComplexMatrix Ecn = Lcn.middleCols(k * (R + 1), R + 1) * C;
        cv.e0 += Ec0.squaredNorm();
        cv.en += Ecn.squaredNorm();
        cv.ex += 2.0 * Ec0.cwiseProduct(Ecn.conjugate()).sum().real();
        cv.ref += ref;
      }
      st_trials.push_back(st);
      cv_trials.push_back(cv);
    }

    const std::string tag = "_as" + detail::format_num(spreads[ai]);
    for (double snr : cfg.snr_db) {
      const double rho = std::pow(10.0, snr / 10.0);
      const double energy = T_st * rho;  // per-user, both methods
      const auto s_st = detail::summarize(st_trials, energy);
      const auto s_cv = detail::summarize(cv_trials, energy);
      auto row = [&](const std::string& method, const std::string& metric,
                     double value) {
        table.add({cfg.experiment, snr, method, metric, value, cfg.trials,
                   cfg.seed});
      };
      row("stbem" + tag, "nmse", s_st.nmse);
      row("stbem" + tag, "nmse_stderr", s_st.stderr_ratio);
      row("stbem" + tag, "train_energy", energy);
      row("conv" + tag, "nmse", s_cv.nmse);
      row("conv" + tag, "nmse_stderr", s_cv.stderr_ratio);
      row("conv" + tag, "train_energy", energy);
    }
  }
  return table;
}

// ---------------------------------------------------------------------------
// downlink estimation error sweep
// ---------------------------------------------------------------------------

/// Downlink normalized MSE vs SNR for the windowed estimator at several
/// pilot budgets and the full-dimension baseline. Per-user training energy
/// is N * rho for every method and budget (single shared reference so the
/// cross-method energy equality holds exactly).
inline ResultTable run_downlink_mse(const ScenarioConfig& cfg) {
  cfg.validate();
  AirConfig air;
  air.M = cfg.antennas;
  air.spacing_ratio = cfg.spacing_ratio;
  air.f_d = cfg.doppler_hz;
  air.T_s = cfg.symbol_time_s;
  air.N = cfg.interval;
  air.validate();

  const int M = cfg.antennas;
  const int K = cfg.users;
  const int R = cfg.bem_order;
  const int N = cfg.interval;
  const int tau = cfg.tau;

  std::vector<int> budgets = cfg.pilot_budgets;
  if (budgets.empty()) budgets = {N / 8, N / 4, N / 2};

  struct Budget {
    int T;
    PilotSchedule sched;
    ComplexMatrix pinv;  // tau(R+1) x T
  };
  std::vector<Budget> plans;
  for (int T : budgets) {
    Budget b;
    b.T = T;
    b.sched = make_pilots(tau, R, N, T);
    b.pinv = pseudo_inverse(stacked_pilot_matrix(b.sched).transpose());
    plans.push_back(std::move(b));
  }
  const PilotSchedule sched_cv = make_pilots(M, R, N, M * (R + 1));
  const ComplexMatrix pinv_cv =
      pseudo_inverse(stacked_pilot_matrix(sched_cv).transpose());
  const ComplexMatrix C = cebem_full_basis({N, R});

  const auto geoms = detail::scenario_geometries(cfg, cfg.angular_spread_deg);
  AirConfig air_pre = air;
  air_pre.N = 1;

  std::vector<std::vector<detail::ErrorParts>> st_trials(plans.size());
  std::vector<detail::ErrorParts> cv_trials;
  double proj_err = 0.0, proj_ref = 0.0;

  for (int t = 0; t < cfg.trials; ++t) {
    const std::uint64_t tid = static_cast<std::uint64_t>(t);
    RandomStream rng_rays(cfg.seed, {detail::kDownlink, tid, detail::kRays});
    RandomStream rng_pre(cfg.seed, {detail::kDownlink, tid, detail::kPreambleNoise});
    RandomStream rng_gain(cfg.seed, {detail::kDownlink, tid, detail::kGainRedraw});
    RandomStream rng_tr(cfg.seed, {detail::kDownlink, tid, detail::kTrainingNoise});
    RandomStream rng_cv(cfg.seed, {detail::kDownlink, tid, detail::kConvNoise});

    // uplink snapshot fixes each window; downlink block redraws gains on the
    // same ray directions, scaled through the wavelength-reciprocity map
    std::vector<ComplexMatrix> beams;
    std::vector<SpatialSignature> sigs;
    for (int k = 0; k < K; ++k) {
      const RaySet rays_ul = sample_rays(geoms[static_cast<std::size_t>(k)], rng_rays);
      const ComplexMatrix pre = detail::beam_block(rays_ul, air_pre);
      const SpatialSignature b_ul = detail::window_from_preamble(
          pre.col(0), cfg.preamble_power, tau, rng_pre);
      sigs.push_back(clip_signature(
          map_signature_downlink(b_ul, cfg.wavelength_ratio, 1.0), tau));
      beams.push_back(detail::beam_block(detail::redraw_gains(rays_ul, rng_gain), air));
    }
    const GroupAssignment assign = group_users(sigs, cfg.guard);

    detail::ErrorParts cv;
    std::vector<detail::ErrorParts> st(plans.size());
    for (int g = 0; g < static_cast<int>(assign.groups.size()); ++g) {
      const auto& members = assign.groups[static_cast<std::size_t>(g)];
      for (int k : members) {
        const ComplexMatrix& G = beams[static_cast<std::size_t>(k)];
        const SpatialSignature& sig = sigs[static_cast<std::size_t>(k)];
        const double ref = G.squaredNorm();

        ComplexMatrix Gwin(tau, N);
        for (int j = 0; j < tau; ++j)
          Gwin.row(j) = G.row((sig.start + j) % M);
        const double win_energy = Gwin.squaredNorm();

        // independent truncation floor: window-plus-basis projection
        const ComplexMatrix proj = Gwin * C.adjoint() / N;
        proj_err += (proj * C - Gwin).squaredNorm() + (ref - win_energy);
        proj_ref += ref;

        for (std::size_t bi = 0; bi < plans.size(); ++bi) {
          const auto& plan = plans[bi];
          // unit-power noiseless observation across the member's group
          ComplexVector u = ComplexVector::Zero(plan.T);
          for (int i = 0; i < plan.T; ++i) {
            const int n = plan.sched.indices[static_cast<std::size_t>(i)];
            for (int l : members) {
              const SpatialSignature& sl = sigs[static_cast<std::size_t>(l)];
              cplx acc(0.0, 0.0);
              for (int j = 0; j < tau; ++j)
                acc += plan.sched.sequences(j, i) * G((sl.start + j) % M, n);
              u(i) += acc;
            }
          }
          const ComplexVector v0 = plan.pinv * u;
          const ComplexVector vn = plan.pinv * detail::noise_vector(plan.T, rng_tr);
          ComplexMatrix l0(tau, R + 1), ln(tau, R + 1);
          for (int j = 0; j < tau; ++j)
            for (int r = 0; r <= R; ++r) {
              l0(j, r) = v0(j * (R + 1) + r);
              ln(j, r) = vn(j * (R + 1) + r);
            }
          const ComplexMatrix E0 = l0 * C - Gwin;
          const ComplexMatrix En = ln * C;
          st[bi].e0 += E0.squaredNorm() + (ref - win_energy);
          st[bi].en += En.squaredNorm() * tau;
          st[bi].ex +=
              2.0 * std::sqrt(static_cast<double>(tau)) *
              E0.cwiseProduct(En.conjugate()).sum().real();
          st[bi].ref += ref;
        }

        // full-dimension baseline: common pilots over all M beams
        ComplexVector uc(sched_cv.T);
        for (int i = 0; i < sched_cv.T; ++i) {
          const int n = sched_cv.indices[static_cast<std::size_t>(i)];
          cplx acc(0.0, 0.0);
          for (int q = 0; q < M; ++q) acc += sched_cv.sequences(q, i) * G(q, n);
          uc(i) = acc;
        }
        const ComplexVector vc0 = pinv_cv * uc;
        const ComplexVector vcn = pinv_cv * detail::noise_vector(sched_cv.T, rng_cv);
        ComplexMatrix lc0(M, R + 1), lcn(M, R + 1);
        for (int q = 0; q < M; ++q)
          for (int r = 0; r <= R; ++r) {
            lc0(q, r) = vc0(q * (R + 1) + r);
            lcn(q, r) = vcn(q * (R + 1) + r);
          }
        const ComplexMatrix Ec0 = lc0 * C - G;
        const ComplexMatrix Ecn = lcn * C;
        cv.e0 += Ec0.squaredNorm();
        cv.en += Ecn.squaredNorm() * M;
        cv.ex += 2.0 * std::sqrt(static_cast<double>(M)) *
                 Ec0.cwiseProduct(Ecn.conjugate()).sum().real();
        cv.ref += ref;
      }
    }
    for (std::size_t bi = 0; bi < plans.size(); ++bi)
      st_trials[bi].push_back(st[bi]);
    cv_trials.push_back(cv);
  }

  ResultTable table;
  table.add({cfg.experiment, 0.0, "truth", "proj_floor", proj_err / proj_ref,
             cfg.trials, cfg.seed});
  for (double snr : cfg.snr_db) {
    const double rho = std::pow(10.0, snr / 10.0);
    const double energy = static_cast<double>(N) * rho;  // per user, all methods
    auto row = [&](const std::string& method, const std::string& metric,
                   double value) {
      table.add({cfg.experiment, snr, method, metric, value, cfg.trials,
                 cfg.seed});
    };
    for (std::size_t bi = 0; bi < plans.size(); ++bi) {
      const std::string tag = "stbem_t" + std::to_string(plans[bi].T);
      const auto s = detail::summarize(st_trials[bi], energy);
      row(tag, "nmse", s.nmse);
      row(tag, "nmse_stderr", s.stderr_ratio);
      row(tag, "train_energy", energy);
    }
    const auto s_cv = detail::summarize(cv_trials, energy);
    row("conv", "nmse", s_cv.nmse);
    row("conv", "nmse_stderr", s_cv.stderr_ratio);
    row("conv", "train_energy", energy);
  }
  return table;
}

// ---------------------------------------------------------------------------
// downlink BER
// ---------------------------------------------------------------------------

/// Gray-QPSK downlink BER through per-slot conjugate beamforming, for
/// oracle channel knowledge, the windowed estimator (frame N, T pilots),
/// and the full-dimension baseline (frame 2N, pilots on every other slot).
/// Every method spends the same time-average power: per-frame budget
/// N * rho; the estimated methods split it by train_power_fraction, the
/// oracle spends all of it on data slots. The data link is normalized by
/// the instantaneous channel norm so the oracle BER is exactly
/// Q(sqrt(P_sym)) per bit.
inline ResultTable run_ber(const ScenarioConfig& cfg) {
  cfg.validate();
  AirConfig air;
  air.M = cfg.antennas;
  air.spacing_ratio = cfg.spacing_ratio;
  air.f_d = cfg.doppler_hz;
  air.T_s = cfg.symbol_time_s;
  air.N = cfg.interval;
  air.validate();

  const int M = cfg.antennas;
  const int R = cfg.bem_order;
  const int N = cfg.interval;
  const int tau = cfg.tau;
  const int T = cfg.pilot_budgets.empty() ? tau * (R + 1) : cfg.pilot_budgets.front();

  const PilotSchedule sched_st = make_pilots(tau, R, N, T);
  const DownlinkEstimator est_st(sched_st);
  const ComplexMatrix C_st = cebem_full_basis({N, R});

  const int Nc = 2 * N;
  const int Tc = M * (R + 1);
  AirConfig air_cv = air;
  air_cv.N = Nc;
  const PilotSchedule sched_cv = make_pilots(M, R, Nc, Tc);
  const DownlinkEstimator est_cv(sched_cv);
  const ComplexMatrix C_cv = cebem_full_basis({Nc, R});

  std::vector<bool> is_pilot(static_cast<std::size_t>(N), false);
  for (int i : sched_st.indices) is_pilot[static_cast<std::size_t>(i)] = true;
  std::vector<bool> is_pilot_cv(static_cast<std::size_t>(Nc), false);
  for (int i : sched_cv.indices) is_pilot_cv[static_cast<std::size_t>(i)] = true;

  const auto geoms = detail::scenario_geometries(cfg, cfg.angular_spread_deg);
  AirConfig air_pre = air;
  air_pre.N = 1;

  ResultTable table;
  for (std::size_t si = 0; si < cfg.snr_db.size(); ++si) {
    const double snr = cfg.snr_db[si];
    const double rho = std::pow(10.0, snr / 10.0);
    const double budget = static_cast<double>(N) * rho;
    const double e_train = cfg.train_power_fraction * budget;
    const double p_data = (1.0 - cfg.train_power_fraction) * budget / (N - T);
    const double p_perfect = budget / (N - T);
    const double e_train_cv = static_cast<double>(Nc) * rho / 2.0;
    const double p_data_cv = static_cast<double>(Nc) * rho / 2.0 / (Nc - Tc);

    BerAccumulator acc_st, acc_pf, acc_cv;
    for (int t = 0; t < cfg.trials; ++t) {
      const std::uint64_t tid = static_cast<std::uint64_t>(t);
      RandomStream rng_rays(cfg.seed, {detail::kBer, si, tid, detail::kRays});
      RandomStream rng_pre(cfg.seed, {detail::kBer, si, tid, detail::kPreambleNoise});
      RandomStream rng_gain(cfg.seed, {detail::kBer, si, tid, detail::kGainRedraw});
      RandomStream rng_tr(cfg.seed, {detail::kBer, si, tid, detail::kTrainingNoise});
      RandomStream rng_bits(cfg.seed, {detail::kBer, si, tid, detail::kDataBits});
      RandomStream rng_dn(cfg.seed, {detail::kBer, si, tid, detail::kDataNoise});
      RandomStream rng_cvf(cfg.seed, {detail::kBer, si, tid, detail::kConvFrame});

      const RaySet rays_ul = sample_rays(geoms.front(), rng_rays);
      const ComplexMatrix pre = detail::beam_block(rays_ul, air_pre);
      const SpatialSignature b_ul = detail::window_from_preamble(
          pre.col(0), cfg.preamble_power, tau, rng_pre);
      const SpatialSignature sig = clip_signature(
          map_signature_downlink(b_ul, cfg.wavelength_ratio, 1.0), tau);

      const ComplexMatrix G =
          detail::beam_block(detail::redraw_gains(rays_ul, rng_gain), air);

      // windowed-estimator training on this frame
      ComplexVector y(T);
      const double amp_tr = std::sqrt(e_train / tau);
      for (int i = 0; i < T; ++i) {
        const int n = sched_st.indices[static_cast<std::size_t>(i)];
        cplx acc(0.0, 0.0);
        for (int j = 0; j < tau; ++j)
          acc += sched_st.sequences(j, i) * G((sig.start + j) % M, n);
        y(i) = amp_tr * acc + rng_tr.cnormal();
      }
      const CebemCoeffs lam = est_st.estimate(y, e_train);

      // data slots: windowed estimate and oracle share channel and noise draws
      const double a_st = std::sqrt(p_data);
      const double a_pf = std::sqrt(p_perfect);
      for (int n = 0; n < N; ++n) {
        if (is_pilot[static_cast<std::size_t>(n)]) continue;
        const double col_norm = G.col(n).norm();
        const ComplexVector ghat = lam.lambda * C_st.col(n);
        const double gn = ghat.norm();
        cplx inner(0.0, 0.0);
        if (gn > 0.0)
          for (int j = 0; j < tau; ++j)
            inner += G((sig.start + j) % M, n) * std::conj(ghat(j)) / gn;
        const double alpha_den = col_norm > 0.0 ? col_norm : 1.0;
        const cplx gain_st = inner / alpha_den;

        const int b0 = static_cast<int>(rng_bits.raw() & 1u);
        const int b1 = static_cast<int>(rng_bits.raw() & 1u);
        const cplx x = qpsk_map(b0, b1);
        const cplx v = rng_dn.cnormal();

        int d0, d1;
        qpsk_demap(a_st * gain_st * x + v, d0, d1);
        acc_st.add(b0, b1, d0, d1);
        qpsk_demap(a_pf * x + v, d0, d1);
        acc_pf.add(b0, b1, d0, d1);
      }

      // full-dimension baseline on its own frame
      const ComplexMatrix Gc =
          detail::beam_block(detail::redraw_gains(rays_ul, rng_cvf), air_cv);
      ComplexVector yc(Tc);
      const double amp_cv = std::sqrt(e_train_cv / M);
      for (int i = 0; i < Tc; ++i) {
        const int n = sched_cv.indices[static_cast<std::size_t>(i)];
        cplx acc(0.0, 0.0);
        for (int q = 0; q < M; ++q) acc += sched_cv.sequences(q, i) * Gc(q, n);
        yc(i) = amp_cv * acc + rng_cvf.cnormal();
      }
      const CebemCoeffs lam_cv = est_cv.estimate(yc, e_train_cv);
      const double a_cv = std::sqrt(p_data_cv);
      for (int n = 0; n < Nc; ++n) {
        if (is_pilot_cv[static_cast<std::size_t>(n)]) continue;
        const ComplexVector ghat = lam_cv.lambda * C_cv.col(n);
        const double gn = ghat.norm();
        const double col_norm = Gc.col(n).norm();
        cplx inner(0.0, 0.0);
        if (gn > 0.0) inner = (Gc.col(n).transpose() * ghat.conjugate())(0) / gn;
        const cplx gain_cv = inner / (col_norm > 0.0 ? col_norm : 1.0);

        const int b0 = static_cast<int>(rng_bits.raw() & 1u);
        const int b1 = static_cast<int>(rng_bits.raw() & 1u);
        const cplx x = qpsk_map(b0, b1);
        const cplx v = rng_dn.cnormal();
        int d0, d1;
        qpsk_demap(a_cv * gain_cv * x + v, d0, d1);
        acc_cv.add(b0, b1, d0, d1);
      }
    }

    auto row = [&](const std::string& method, const std::string& metric,
                   double value) {
      table.add({cfg.experiment, snr, method, metric, value, cfg.trials,
                 cfg.seed});
    };
    auto emit = [&](const std::string& method, const BerAccumulator& a) {
      const double p = a.value();
      row(method, "ber", p);
      row(method, "ber_stderr",
          std::sqrt(std::max(p * (1.0 - p), 0.0) /
                    static_cast<double>(a.bits)));
      row(method, "bits", static_cast<double>(a.bits));
    };
    emit("perfect", acc_pf);
    emit("stbem", acc_st);
    emit("conv", acc_cv);
    row("perfect", "ber_analytic", detail::q_function(std::sqrt(p_perfect)));
  }
  return table;
}

/// Dispatch by experiment name.
inline ResultTable run_experiment(const ScenarioConfig& cfg,
                                  std::ostream* dump = nullptr) {
  if (cfg.experiment == "signature") return run_signature_demo(cfg, dump);
  if (cfg.experiment == "cebem-fit") return run_cebem_fit_demo(cfg, dump);
  if (cfg.experiment == "uplink-mse") return run_uplink_mse(cfg);
  if (cfg.experiment == "downlink-mse") return run_downlink_mse(cfg);
  if (cfg.experiment == "ber") return run_ber(cfg);
  throw config_error("unknown experiment '" + cfg.experiment + "'");
}

}  // namespace stbem

#endif  // STBEM_EXPERIMENTS_HPP
