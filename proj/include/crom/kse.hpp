#pragma once

//==============================================================================
// kse.hpp
// Pseudo-spectral solver for the 1-D Kuramoto-Sivashinsky equation
//
//     u_t = -nu u_xxxx - D u_xx - gamma u u_x,   x in [0, L), periodic.
//
// The stiff linear part is treated exactly in Fourier space and the time
// stepping is fourth-order exponential Runge-Kutta. The advection term is
// evaluated pseudo-spectrally in conservative form, -(gamma/2) d_x(u^2),
// with 2/3-rule dealiasing. Solutions are kept mean-free: the zero mode's
// tendency is forced to zero every step.
//==============================================================================

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <vector>

#include "crom/errors.hpp"
#include "crom/fft.hpp"

namespace crom {

struct KseParams {
  double nu = 8.0;         // biharmonic diffusion
  double D = 1.0;          // anti-diffusion
  double L = 20.0 * M_PI;  // domain length
  double gamma = 1.0;      // advection strength
  double dt = 0.01;        // time step
  int nx = 128;            // grid points (= Fourier-mode pairs)

  void validate() const {
    if (!(nu > 0.0) || !(D > 0.0) || !(L > 0.0) || !(gamma > 0.0) || !(dt > 0.0))
      throw InvalidInput("KseParams: nu, D, L, gamma, dt must be positive");
    if (nx < 8 || nx % 2 != 0)
      throw InvalidInput("KseParams: nx must be even and >= 8");
  }

  // Eigenvalue of -nu d_xxxx - D d_xx on the n-th cos/sin pair.
  double beta(int n) const {
    const double w = 2.0 * M_PI * n / L;
    return -nu * w * w * w * w + D * w * w;
  }
};

// Space-time snapshot matrix on a uniform periodic grid.
struct SpatioTemporalField {
  double L = 0.0;
  Eigen::VectorXd times;
  Eigen::MatrixXd values;  // (nx, n_times), column j = u(., times[j])

  int nx() const { return static_cast<int>(values.rows()); }
  int n_times() const { return static_cast<int>(values.cols()); }
  double dx() const { return L / nx(); }
  Eigen::VectorXd grid() const {
    return Eigen::VectorXd::LinSpaced(nx(), 0.0, L * (nx() - 1) / nx());
  }
};

struct Etdrk4Tables {
  Eigen::VectorXd E;   // exp(dt lambda)
  Eigen::VectorXd E2;  // exp(dt lambda / 2)
  Eigen::VectorXd f1, f2, f3, Q;
};

// ETDRK4 coefficient tables for a real (self-adjoint) Fourier symbol.
//
// The f/Q weights have removable singularities at dt*lambda = 0, so they are
// evaluated as contour averages over 32 points on the unit circle centered at
// each dt*lambda, which is accurate uniformly in |dt*lambda|.
inline Etdrk4Tables etdrk4_tables(const Eigen::VectorXcd& linear_symbol, double dt) {
  if (!(dt > 0.0)) throw InvalidInput("etdrk4_tables: dt must be positive");
  const Eigen::Index n = linear_symbol.size();
  for (Eigen::Index i = 0; i < n; ++i) {
    const std::complex<double> s = linear_symbol[i];
    if (!std::isfinite(s.real()) || !std::isfinite(s.imag()))
      throw InvalidInput("etdrk4_tables: non-finite symbol entry");
    if (s.imag() != 0.0)
      throw InvalidInput("etdrk4_tables: symbol must be real-valued");
  }

  constexpr int kContourPoints = 32;
  Etdrk4Tables t;
  t.E.resize(n);
  t.E2.resize(n);
  t.f1.resize(n);
  t.f2.resize(n);
  t.f3.resize(n);
  t.Q.resize(n);

  for (Eigen::Index i = 0; i < n; ++i) {
    const double z = dt * linear_symbol[i].real();
    t.E[i] = std::exp(z);
    t.E2[i] = std::exp(0.5 * z);

    std::complex<double> q(0, 0), f1(0, 0), f2(0, 0), f3(0, 0);
    for (int m = 0; m < kContourPoints; ++m) {
      const double theta = 2.0 * M_PI * (m + 0.5) / kContourPoints;
      const std::complex<double> zeta =
          z + std::complex<double>(std::cos(theta), std::sin(theta));
      const std::complex<double> ez = std::exp(zeta);
      const std::complex<double> z2 = zeta * zeta;
      const std::complex<double> z3 = z2 * zeta;
      q += (std::exp(0.5 * zeta) - 1.0) / zeta;
      f1 += (-4.0 - zeta + ez * (4.0 - 3.0 * zeta + z2)) / z3;
      f2 += (2.0 + zeta + ez * (-2.0 + zeta)) / z3;
      f3 += (-4.0 - 3.0 * zeta - z2 + ez * (4.0 - zeta)) / z3;
    }
    const double scale = dt / kContourPoints;
    t.Q[i] = scale * q.real();
    t.f1[i] = scale * f1.real();
    t.f2[i] = scale * f2.real();
    t.f3[i] = scale * f3.real();
  }
  return t;
}

// Advances the KSE state in spectral space one ETDRK4 step at a time.
class KseSimulator {
 public:
  static constexpr double kBlowUpLimit = 1e8;

  KseSimulator(const KseParams& params, const Eigen::VectorXd& u0)
      : params_(params), fft_(params.nx) {
    params_.validate();
    if (u0.size() != params_.nx)
      throw InvalidInput("KseSimulator: u0 length must equal nx");

    Eigen::VectorXd u = u0;
    const double mean = u.mean();
    const double rms = std::sqrt(u.squaredNorm() / u.size());
    if (std::abs(mean) > 1e-13 * std::max(rms, 1.0)) {
      mean_adjusted_ = true;
      u.array() -= mean;
    } else if (mean != 0.0) {
      u.array() -= mean;
    }
    fft_.fwd(u, state_);
    state_[0] = 0.0;

    const int ns = fft_.spectrum_size();
    Eigen::VectorXcd symbol(ns);
    wavenumber_.resize(ns);
    for (int k = 0; k < ns; ++k) {
      const double q = 2.0 * M_PI * k / params_.L;
      wavenumber_[k] = q;
      symbol[k] = -params_.nu * q * q * q * q + params_.D * q * q;
    }
    tables_ = etdrk4_tables(symbol, params_.dt);

    // 2/3 rule: quadratic products are exact for retained modes.
    dealias_cutoff_ = params_.nx / 3;

    nv_.resize(ns);
    na_.resize(ns);
    nb_.resize(ns);
    nc_.resize(ns);
    stage_a_.resize(ns);
    stage_b_.resize(ns);
    stage_c_.resize(ns);
    u_work_.resize(params_.nx);
    usq_work_.resize(params_.nx);
  }

  const KseParams& params() const { return params_; }
  double time() const { return step_count_ * params_.dt; }
  long step_count() const { return step_count_; }
  bool mean_adjusted() const { return mean_adjusted_; }

  Eigen::VectorXd snapshot() {
    Eigen::VectorXd u;
    fft_.inv(state_, u);
    return u;
  }

  void step() {
    const auto& t = tables_;
    nonlinear(state_, nv_, /*check_state=*/true);
    stage_a_ = t.E2.asDiagonal() * state_ + t.Q.asDiagonal() * nv_;
    nonlinear(stage_a_, na_, false);
    stage_b_ = t.E2.asDiagonal() * state_ + t.Q.asDiagonal() * na_;
    nonlinear(stage_b_, nb_, false);
    stage_c_ = t.E2.asDiagonal() * stage_a_ + t.Q.asDiagonal() * (2.0 * nb_ - nv_);
    nonlinear(stage_c_, nc_, false);
    state_ = t.E.asDiagonal() * state_ + t.f1.asDiagonal() * nv_ +
             t.f2.asDiagonal() * (2.0 * (na_ + nb_)) + t.f3.asDiagonal() * nc_;
    state_[0] = 0.0;
    ++step_count_;
  }

  void advance_steps(long n) {
    for (long i = 0; i < n; ++i) step();
  }

 private:
  // N(v) = -(gamma/2) i q FFT((IFFT v)^2), dealiased; zero-mode tendency zeroed.
  void nonlinear(const Eigen::VectorXcd& v, Eigen::VectorXcd& out, bool check_state) {
    fft_.inv(v, u_work_);
    if (check_state) {
      const double amp = u_work_.cwiseAbs().maxCoeff();
      if (!std::isfinite(amp) || amp > kBlowUpLimit)
        throw BlowUpError("KSE solution blew up", time());
    }
    usq_work_ = u_work_.cwiseProduct(u_work_);
    fft_.fwd(usq_work_, out);
    const std::complex<double> img(0.0, 1.0);
    const double half_gamma = 0.5 * params_.gamma;
    for (int k = 0; k < out.size(); ++k) {
      if (k > dealias_cutoff_) {
        out[k] = 0.0;
      } else {
        out[k] *= -half_gamma * img * wavenumber_[k];
      }
    }
    out[0] = 0.0;
  }

  KseParams params_;
  RealFft fft_;
  Eigen::VectorXcd state_;
  Eigen::VectorXd wavenumber_;
  Etdrk4Tables tables_;
  int dealias_cutoff_ = 0;
  long step_count_ = 0;
  bool mean_adjusted_ = false;

  Eigen::VectorXcd nv_, na_, nb_, nc_, stage_a_, stage_b_, stage_c_;
  Eigen::VectorXd u_work_, usq_work_;
};

// Runs the simulator to t_end, saving real-space snapshots every save_stride
// steps from the first step index at or after t_start_save.
inline SpatioTemporalField simulate_kse(const KseParams& params, const Eigen::VectorXd& u0,
                                        double t_end, long save_stride = 1,
                                        double t_start_save = 0.0) {
  if (!(t_end > 0.0)) throw InvalidInput("simulate_kse: t_end must be positive");
  if (save_stride < 1) throw InvalidInput("simulate_kse: save_stride must be >= 1");

  KseSimulator sim(params, u0);
  const long n_steps = std::lround(t_end / params.dt);
  long first_save = static_cast<long>(std::ceil(t_start_save / params.dt - 1e-9));
  if (first_save < 0) first_save = 0;
  if (first_save > n_steps)
    throw InvalidInput("simulate_kse: t_start_save is past t_end");
  const long n_saves = (n_steps - first_save) / save_stride + 1;

  SpatioTemporalField field;
  field.L = params.L;
  field.times.resize(n_saves);
  field.values.resize(params.nx, n_saves);

  long next_save = first_save;
  long save_idx = 0;
  for (long i = 0; i <= n_steps; ++i) {
    if (i == next_save) {
      field.times[save_idx] = i * params.dt;
      field.values.col(save_idx) = sim.snapshot();
      ++save_idx;
      next_save += save_stride;
    }
    if (i < n_steps) sim.step();
  }
  return field;
}

// E(t) = dx * sum_i u(x_i, t)^2, the rectangle rule for int u^2 dx.
inline Eigen::VectorXd kinetic_energy(const SpatioTemporalField& field) {
  if (field.n_times() == 0) throw InvalidInput("kinetic_energy: empty field");
  return field.dx() * field.values.colwise().squaredNorm().transpose();
}

}  // namespace crom
