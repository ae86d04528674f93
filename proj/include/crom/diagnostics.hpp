#pragma once

//==============================================================================
// diagnostics.hpp
// Statistics and dynamical diagnostics used to judge ROM fidelity: modal
// energy spectra, histogram PDFs, FFT-based autocorrelation, Lyapunov
// exponents by tangent-space QR, kinetic-energy extrema sweeps, and
// assimilation error metrics.
//==============================================================================

#include <Eigen/Dense>
#include <Eigen/QR>
#include <unsupported/Eigen/FFT>

#include <cmath>
#include <string>
#include <vector>

#include "crom/basis.hpp"
#include "crom/errors.hpp"
#include "crom/kse.hpp"
#include "crom/model.hpp"
#include "crom/parallel.hpp"

namespace crom {

struct SpectrumReport {
  Eigen::VectorXd energy;           // E_k = time mean of a_k^2
  std::vector<std::string> labels;  // "cos n"/"sin n" or "pod k"
  double window_start = 0.0;
  double window_end = 0.0;
};

// Time-averaged modal energies over [t_begin, t_end]. Labels follow the
// fourier ordering (cos 1..N, sin 1..N) when `fourier_labeled` is true.
inline SpectrumReport energy_spectrum(const CoefficientSeries& series, double t_begin,
                                      double t_end, bool fourier_labeled = false) {
  long lo = -1, hi = -1;
  for (long j = 0; j < series.n_times(); ++j) {
    if (series.times[j] >= t_begin - 1e-12 && series.times[j] <= t_end + 1e-12) {
      if (lo < 0) lo = j;
      hi = j;
    }
  }
  if (lo < 0) throw InvalidInput("energy_spectrum: empty averaging window");
  SpectrumReport rep;
  rep.window_start = series.times[lo];
  rep.window_end = series.times[hi];
  const auto block = series.values.middleCols(lo, hi - lo + 1);
  rep.energy = block.cwiseProduct(block).rowwise().mean();
  const int n = series.size();
  rep.labels.resize(n);
  for (int k = 0; k < n; ++k) {
    if (fourier_labeled && n % 2 == 0) {
      const int half = n / 2;
      rep.labels[k] = (k < half) ? "cos " + std::to_string(k + 1)
                                 : "sin " + std::to_string(k - half + 1);
    } else {
      rep.labels[k] = "mode " + std::to_string(k + 1);
    }
  }
  return rep;
}

struct Histogram {
  Eigen::VectorXd density;  // per-bin density, integrates to 1
  double lo = 0.0;
  double width = 0.0;

  int bins() const { return static_cast<int>(density.size()); }
  double center(int b) const { return lo + (b + 0.5) * width; }
  // Density of the bin containing x (0 outside the range).
  double value_at(double x) const {
    const int b = static_cast<int>(std::floor((x - lo) / width));
    return (b >= 0 && b < bins()) ? density[b] : 0.0;
  }
};

inline Histogram pdf_estimate(const Eigen::Ref<const Eigen::VectorXd>& samples, int bins = 100) {
  if (bins < 1) throw InvalidInput("pdf_estimate: bins must be >= 1");
  if (samples.size() < 2) throw InvalidInput("pdf_estimate: need >= 2 samples");
  const double lo = samples.minCoeff();
  const double hi = samples.maxCoeff();
  if (!(hi > lo)) throw InvalidInput("pdf_estimate: constant input has no density estimate");
  Histogram h;
  h.lo = lo;
  h.width = (hi - lo) / bins;
  Eigen::VectorXd counts = Eigen::VectorXd::Zero(bins);
  for (Eigen::Index j = 0; j < samples.size(); ++j) {
    int b = static_cast<int>((samples[j] - lo) / h.width);
    if (b == bins) b = bins - 1;  // right edge belongs to the last bin
    counts[b] += 1.0;
  }
  h.density = counts / (static_cast<double>(samples.size()) * h.width);
  return h;
}

// Normalized autocorrelation for lags 0..max_lag via zero-padded FFT
// (biased autocovariance, divided by the lag-0 value).
inline Eigen::VectorXd acf(const Eigen::Ref<const Eigen::VectorXd>& samples, int max_lag) {
  const long n = samples.size();
  if (max_lag < 0 || max_lag >= n) throw InvalidInput("acf: max_lag must be < series length");
  const double mean = samples.mean();
  long nfft = 1;
  while (nfft < 2 * n) nfft *= 2;
  Eigen::VectorXd padded = Eigen::VectorXd::Zero(nfft);
  padded.head(n) = samples.array() - mean;
  Eigen::FFT<double> fft;
  Eigen::VectorXcd spec;
  fft.fwd(spec, padded);
  spec = spec.cwiseProduct(spec.conjugate());
  Eigen::VectorXcd acov_c;
  fft.inv(acov_c, spec);
  const double var = acov_c[0].real() / n;
  if (!(var > 0.0)) throw InvalidInput("acf: zero-variance series");
  Eigen::VectorXd out(max_lag + 1);
  for (int l = 0; l <= max_lag; ++l) out[l] = acov_c[l].real() / n / var;
  return out;
}

struct LyapunovReport {
  Eigen::VectorXd exponents;  // descending, natural-log units (1/time)
  double window = 0.0;
  double dt = 0.0;
  long renorm_stride = 0;
};

// Leading k Lyapunov exponents of the deterministic drift by tangent-space
// integration: the trajectory and k tangent vectors advance together under
// coupled RK4 (tangents see the Jacobian along the RK4 stages), with QR
// re-orthonormalization every renorm_stride steps. Noise is ignored.
inline LyapunovReport lyapunov_spectrum(const QuadraticModel& model, int k, double t_window,
                                        double dt, long renorm_stride,
                                        const Eigen::VectorXd& a0, double t_burn = 0.0) {
  if (k < 1 || k > model.n) throw InvalidInput("lyapunov_spectrum: need 1 <= k <= n");
  if (!(dt > 0.0) || !(t_window > 0.0))
    throw InvalidInput("lyapunov_spectrum: dt and t_window must be positive");
  if (renorm_stride < 1) throw InvalidInput("lyapunov_spectrum: renorm_stride must be >= 1");

  const int n = model.n;
  Eigen::VectorXd a = a0;
  Eigen::MatrixXd tangent = Eigen::MatrixXd::Identity(n, k);

  Eigen::VectorXd k1(n), k2(n), k3(n), k4(n), stage(n);
  Eigen::MatrixXd j1(n, n), j2(n, n), j3(n, n), j4(n, n);
  Eigen::MatrixXd t1(n, k), t2(n, k), t3(n, k), t4(n, k);
  Eigen::VectorXd log_growth = Eigen::VectorXd::Zero(k);

  const long burn_steps = std::lround(t_burn / dt);
  const long window_steps = std::lround(t_window / dt);
  long accumulated = 0;

  auto coupled_step = [&](bool track) {
    model.drift(a, k1);
    if (track) {
      model.jacobian(a, j1);
      t1.noalias() = j1 * tangent;
    }
    stage = a + 0.5 * dt * k1;
    model.drift(stage, k2);
    if (track) {
      model.jacobian(stage, j2);
      t2.noalias() = j2 * (tangent + 0.5 * dt * t1);
    }
    stage = a + 0.5 * dt * k2;
    model.drift(stage, k3);
    if (track) {
      model.jacobian(stage, j3);
      t3.noalias() = j3 * (tangent + 0.5 * dt * t2);
    }
    stage = a + dt * k3;
    model.drift(stage, k4);
    if (track) {
      model.jacobian(stage, j4);
      t4.noalias() = j4 * (tangent + dt * t3);
    }
    a += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (track) tangent += (dt / 6.0) * (t1 + 2.0 * t2 + 2.0 * t3 + t4);
    const double amp = a.cwiseAbs().maxCoeff();
    if (!std::isfinite(amp) || amp > 1e8)
      throw BlowUpError("lyapunov_spectrum: trajectory blew up", accumulated * dt);
  };

  for (long i = 0; i < burn_steps; ++i) coupled_step(false);

  for (long i = 0; i < window_steps; ++i) {
    coupled_step(true);
    ++accumulated;
    if (accumulated % renorm_stride == 0 || i == window_steps - 1) {
      Eigen::HouseholderQR<Eigen::MatrixXd> qr(tangent);
      Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, k);
      Eigen::MatrixXd rdiag = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
      for (int c = 0; c < k; ++c) {
        double d = rdiag(c, c);
        if (d < 0.0) {
          q.col(c) = -q.col(c);
          d = -d;
        }
        log_growth[c] += std::log(std::max(d, 1e-300));
      }
      tangent = q;
    }
  }

  LyapunovReport rep;
  rep.exponents = log_growth / (window_steps * dt);
  std::sort(rep.exponents.data(), rep.exponents.data() + k, std::greater<double>());
  rep.window = t_window;
  rep.dt = dt;
  rep.renorm_stride = renorm_stride;
  return rep;
}

// Indices of strict 3-point local extrema of a series.
inline std::vector<long> local_extrema_indices(const Eigen::Ref<const Eigen::VectorXd>& series) {
  std::vector<long> idx;
  for (long j = 1; j + 1 < series.size(); ++j) {
    const bool maximum = series[j] > series[j - 1] && series[j] > series[j + 1];
    const bool minimum = series[j] < series[j - 1] && series[j] < series[j + 1];
    if (maximum || minimum) idx.push_back(j);
  }
  return idx;
}

inline std::vector<double> local_extrema(const Eigen::Ref<const Eigen::VectorXd>& series) {
  std::vector<double> vals;
  for (long j : local_extrema_indices(series)) vals.push_back(series[j]);
  return vals;
}

struct ExtremaReport {
  double nu = 0.0;
  std::vector<double> extrema;  // values of E(t) at strict local extrema
};

// Kinetic-energy extrema of the full KSE across a parameter sweep. Each entry
// simulates from u0, discards burn_in, and collects the extrema of E(t) over
// `window` time units at the saved stride.
inline std::vector<ExtremaReport> bifurcation_extrema(const std::vector<KseParams>& sweep,
                                                      const Eigen::VectorXd& u0, double burn_in,
                                                      double window, long save_stride = 10) {
  if (sweep.empty()) throw InvalidInput("bifurcation_extrema: empty sweep");
  std::vector<ExtremaReport> out(sweep.size());
  parallel_for(static_cast<std::ptrdiff_t>(sweep.size()), [&](std::ptrdiff_t s) {
    const auto field =
        simulate_kse(sweep[s], u0, burn_in + window, save_stride, burn_in);
    out[s].nu = sweep[s].nu;
    out[s].extrema = local_extrema(kinetic_energy(field));
  });
  return out;
}

// Same sweep for quadratic models (E(t) = sum a_k^2), used when the sweep is
// run against a Galerkin system instead of the PDE.
inline std::vector<ExtremaReport> bifurcation_extrema(const std::vector<QuadraticModel>& sweep,
                                                      const std::vector<double>& nus,
                                                      const Eigen::VectorXd& a0, double burn_in,
                                                      double window, double dt,
                                                      long save_stride = 10) {
  if (sweep.empty() || sweep.size() != nus.size())
    throw InvalidInput("bifurcation_extrema: sweep and nu labels must match");
  std::vector<ExtremaReport> out(sweep.size());
  parallel_for(static_cast<std::ptrdiff_t>(sweep.size()), [&](std::ptrdiff_t s) {
    const auto series =
        simulate_model(sweep[s], a0, burn_in + window, dt, /*seed=*/0, save_stride, burn_in);
    out[s].nu = nus[s];
    const Eigen::VectorXd e = series.values.colwise().squaredNorm();
    out[s].extrema = local_extrema(e);
  });
  return out;
}

// Per-mode relative L2 errors ||truth_i - estimate_i|| / ||truth_i|| over
// row-aligned trajectories.
inline Eigen::VectorXd assimilation_errors(const Eigen::Ref<const Eigen::MatrixXd>& truth,
                                           const Eigen::Ref<const Eigen::MatrixXd>& estimate) {
  if (truth.rows() != estimate.rows() || truth.cols() != estimate.cols())
    throw InvalidInput("assimilation_errors: shapes do not match");
  Eigen::VectorXd err(truth.rows());
  for (Eigen::Index i = 0; i < truth.rows(); ++i) {
    const double denom = truth.row(i).norm();
    if (denom == 0.0)
      throw InvalidInput("assimilation_errors: zero-norm truth mode " + std::to_string(i + 1));
    err[i] = (truth.row(i) - estimate.row(i)).norm() / denom;
  }
  return err;
}

}  // namespace crom
