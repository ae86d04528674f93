#pragma once

//==============================================================================
// enkbf.hpp
// Ensemble Kalman-Bucy filtering of a quadratic ROM with continuously
// observed leading modes.
//
// The state is split as a = (y, z) with y the first r (observed) and z the
// remaining n-r (unobserved) components; the off-diagonal noise blocks are
// dropped, leaving
//
//     dy/dt = g1(y, z) + sigma11 dW1/dt,
//     dz/dt = g2(y, z) + sigma22 dW2/dt.
//
// The observed tendency dy_obs/dt plays the role of the measurement, so the
// gain pairs z-deviations with deviations of the observed-block drift g1 --
// the drift entering the innovation -- scaled by the observation-noise
// metric:
//
//     N = 1/(p-1) sum_l (z_l - zbar)(g1(y_obs, z_l) - g1bar)^T C^-1,
//     C = sigma11 sigma11^T + eps I,
//
// and each member evolves by Euler-Maruyama as
//
//     dz_i = [g2(y_obs, z_i) - N (g1(y_obs, z_i) - dy_obs/dt)] dt
//            + sigma22 dW_{2,i} - N sigma11 dW_{1,i}.
//
// With learned noise amplitudes of order 1e-7 the raw metric sigma11^T
// sigma11 is numerically singular, hence the ridge eps (configurable).
//==============================================================================

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>

#include "crom/basis.hpp"
#include "crom/errors.hpp"
#include "crom/library.hpp"
#include "crom/model.hpp"
#include "crom/parallel.hpp"
#include "crom/rng.hpp"

namespace crom {

struct ObservationStream {
  Eigen::VectorXd times;
  Eigen::MatrixXd y_obs;      // (r, n_times)
  Eigen::MatrixXd y_dot_obs;  // (r, n_times)

  int r() const { return static_cast<int>(y_obs.rows()); }
  int n_times() const { return static_cast<int>(y_obs.cols()); }
  double dt() const {
    if (times.size() < 2) throw InvalidInput("ObservationStream: need >= 2 samples");
    return (times[times.size() - 1] - times[0]) / (times.size() - 1);
  }
};

// Builds the stream from an observed-mode series; the tendency is obtained by
// central differences (one-sided at the ends).
inline ObservationStream make_observation_stream(const CoefficientSeries& observed) {
  ObservationStream s;
  s.times = observed.times;
  s.y_obs = observed.values;
  const long nt = observed.n_times();
  if (nt < 2) throw InvalidInput("make_observation_stream: need >= 2 samples");
  const double dt = observed.dt();
  s.y_dot_obs.resize(observed.size(), nt);
  s.y_dot_obs.col(0) = (observed.values.col(1) - observed.values.col(0)) / dt;
  for (long j = 1; j + 1 < nt; ++j)
    s.y_dot_obs.col(j) = (observed.values.col(j + 1) - observed.values.col(j - 1)) / (2.0 * dt);
  s.y_dot_obs.col(nt - 1) = (observed.values.col(nt - 1) - observed.values.col(nt - 2)) / dt;
  return s;
}

// Observed/unobserved split of a quadratic model. g1/g2 evaluate the full
// drift at (y, z) and slice, so their stack equals the model drift exactly;
// sigma11/sigma22 are the diagonal blocks of sigma (off-diagonal dropped).
struct SplitModel {
  QuadraticModel model;
  int r = 0;
  Eigen::MatrixXd sigma11;  // (r, r)
  Eigen::MatrixXd sigma22;  // (n-r, n-r)

  int n() const { return model.n; }

  void drift_full(const Eigen::Ref<const Eigen::VectorXd>& y,
                  const Eigen::Ref<const Eigen::VectorXd>& z, Eigen::VectorXd& out) const {
    Eigen::VectorXd a(model.n);
    a.head(r) = y;
    a.tail(model.n - r) = z;
    model.drift(a, out);
  }

  Eigen::VectorXd g1(const Eigen::Ref<const Eigen::VectorXd>& y,
                     const Eigen::Ref<const Eigen::VectorXd>& z) const {
    Eigen::VectorXd d(model.n);
    drift_full(y, z, d);
    return d.head(r);
  }

  Eigen::VectorXd g2(const Eigen::Ref<const Eigen::VectorXd>& y,
                     const Eigen::Ref<const Eigen::VectorXd>& z) const {
    Eigen::VectorXd d(model.n);
    drift_full(y, z, d);
    return d.tail(model.n - r);
  }
};

inline SplitModel split_model(const QuadraticModel& model, int r) {
  if (r < 1 || r >= model.n)
    throw InvalidInput("split_model: observed count must satisfy 1 <= r < n");
  SplitModel s;
  s.model = model;
  s.r = r;
  const int nz = model.n - r;
  const int d = static_cast<int>(model.noise.cols());
  // Square up sigma if a reduced-rank factor was learned, then slice blocks.
  Eigen::MatrixXd sigma = Eigen::MatrixXd::Zero(model.n, model.n);
  if (d > 0) sigma.leftCols(std::min(d, model.n)) = model.noise.leftCols(std::min(d, model.n));
  s.sigma11 = sigma.topLeftCorner(r, r);
  s.sigma22 = sigma.bottomRightCorner(nz, nz);
  return s;
}

struct EnsembleState {
  Eigen::MatrixXd members;  // (n-r, p)
  double time = 0.0;
  int p() const { return static_cast<int>(members.cols()); }
};

struct RegularizationPolicy {
  double eps_abs = 1e-12;
  double eps_rel = 1e-6;

  Eigen::MatrixXd regularized_metric(const Eigen::MatrixXd& sigma11) const {
    Eigen::MatrixXd c = sigma11 * sigma11.transpose();
    const double floor_eps =
        std::max(eps_abs, c.rows() > 0 ? eps_rel * c.diagonal().maxCoeff() : eps_abs);
    c.diagonal().array() += floor_eps;
    return c;
  }
};

// Ensemble gain at one instant. Translation of all members leaves it
// unchanged; if the observed-block drift does not depend on z it vanishes.
inline Eigen::MatrixXd enkbf_gain(const EnsembleState& ensemble, const Eigen::VectorXd& y_obs_t,
                                  const SplitModel& split,
                                  const RegularizationPolicy& reg = {}) {
  const int p = ensemble.p();
  if (p < 2) throw InvalidInput("enkbf_gain: invalid ensemble (need p >= 2)");

  Eigen::MatrixXd drift_obs(split.r, p);
  for (int l = 0; l < p; ++l)
    drift_obs.col(l) = split.g1(y_obs_t, ensemble.members.col(l));

  const Eigen::VectorXd z_mean = ensemble.members.rowwise().mean();
  const Eigen::VectorXd g_mean = drift_obs.rowwise().mean();
  const Eigen::MatrixXd dz = ensemble.members.colwise() - z_mean;
  const Eigen::MatrixXd dg = drift_obs.colwise() - g_mean;

  const Eigen::MatrixXd cross = dz * dg.transpose() / static_cast<double>(p - 1);
  const Eigen::MatrixXd c_reg = reg.regularized_metric(split.sigma11);
  Eigen::LDLT<Eigen::MatrixXd> solver(c_reg);
  const Eigen::MatrixXd gain = solver.solve(cross.transpose()).transpose();
  if (!gain.allFinite())
    throw RegularizationError("enkbf_gain: non-finite gain; increase the metric ridge");
  return gain;
}

enum class InitPolicy { zero, given };

struct AssimilationResult {
  Eigen::VectorXd times;
  Eigen::MatrixXd posterior_mean;    // (n-r, n_times)
  Eigen::MatrixXd posterior_spread;  // per-component ensemble std dev
};

// Runs the filter along the observation stream. Every member carries its own
// Brownian increments from an independently seeded sub-stream, so results do
// not depend on the thread count.
inline AssimilationResult enkbf_run(const QuadraticModel& model, const ObservationStream& obs,
                                    int r, int p, InitPolicy init, const Eigen::MatrixXd* z0,
                                    std::uint64_t seed, const RegularizationPolicy& reg = {}) {
  if (p < 2) throw InvalidInput("enkbf_run: need p >= 2");
  const SplitModel split = split_model(model, r);
  const int nz = model.n - r;
  const long nt = obs.n_times();
  const double dt = obs.dt();

  EnsembleState ens;
  ens.members.resize(nz, p);
  if (init == InitPolicy::zero) {
    ens.members.setZero();
  } else {
    if (!z0 || z0->rows() != nz || z0->cols() != p)
      throw InvalidInput("enkbf_run: z0 must be (n-r) x p for the given policy");
    ens.members = *z0;
  }

  std::vector<NormalSampler> rng;
  rng.reserve(p);
  for (int l = 0; l < p; ++l) rng.emplace_back(substream_seed(seed, l));

  const bool sigma11_zero = split.sigma11.isZero(0.0);
  const bool sigma22_zero = split.sigma22.isZero(0.0);

  AssimilationResult out;
  out.times = obs.times;
  out.posterior_mean.resize(nz, nt);
  out.posterior_spread.resize(nz, nt);

  // The gain metric is constant in time (sigma is), so factor it once.
  const Eigen::MatrixXd c_reg = reg.regularized_metric(split.sigma11);
  Eigen::LDLT<Eigen::MatrixXd> metric(c_reg);

  Eigen::MatrixXd drift_obs(r, p), drift_hid(nz, p), w1(r, p), w2(nz, p);
  const double sqrt_dt = std::sqrt(dt);
  for (long j = 0; j < nt; ++j) {
    const Eigen::VectorXd mean = ens.members.rowwise().mean();
    out.posterior_mean.col(j) = mean;
    const Eigen::MatrixXd cdev = ens.members.colwise() - mean;
    out.posterior_spread.col(j) =
        (cdev.cwiseProduct(cdev).rowwise().sum() / std::max(p - 1, 1)).cwiseSqrt();
    if (j == nt - 1) break;

    const Eigen::VectorXd y = obs.y_obs.col(j);
    const Eigen::VectorXd ydot = obs.y_dot_obs.col(j);

    parallel_for(p, [&](std::ptrdiff_t l) {
      Eigen::VectorXd full(model.n);
      split.drift_full(y, ens.members.col(l), full);
      drift_obs.col(l) = full.head(r);
      drift_hid.col(l) = full.tail(nz);
      // Per-member Brownian increments for both blocks, fixed draw order.
      for (int q = 0; q < r; ++q) w1(q, l) = rng[l]();
      for (int q = 0; q < nz; ++q) w2(q, l) = rng[l]();
    }, /*grain=*/8);

    const Eigen::VectorXd g_mean = drift_obs.rowwise().mean();
    const Eigen::MatrixXd dg = drift_obs.colwise() - g_mean;
    const Eigen::MatrixXd cross = cdev * dg.transpose() / static_cast<double>(p - 1);
    const Eigen::MatrixXd gain = metric.solve(cross.transpose()).transpose();
    if (!gain.allFinite())
      throw RegularizationError("enkbf_run: non-finite gain at t = " + std::to_string(obs.times[j]));

    // dz_i = [g2 - N (g1 - ydot)] dt + sigma22 dW2_i - N sigma11 dW1_i
    Eigen::MatrixXd innovation = drift_obs.colwise() - ydot;
    if (!sigma11_zero) innovation += sqrt_dt / dt * (split.sigma11 * w1);
    ens.members += dt * (drift_hid - gain * innovation);
    if (!sigma22_zero) ens.members += sqrt_dt * (split.sigma22 * w2);
    ens.time = obs.times[j + 1];

    const double worst = ens.members.cwiseAbs().maxCoeff();
    if (!std::isfinite(worst) || worst > 1e8)
      throw DivergenceError("enkbf_run: ensemble member diverged", ens.time);
  }
  return out;
}

}  // namespace crom
