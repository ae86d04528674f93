#pragma once

//==============================================================================
// basis.hpp
// Orthonormal spatial bases on [0, L) and the projections between physical
// fields and modal amplitude series.
//
// Every mode, analytic or empirical, is stored by its coefficients in the
// orthonormal trig family
//     sqrt(2/L) cos(2 pi n x / L),  sqrt(2/L) sin(2 pi n x / L),  n = 1..P,
// so inner products, derivatives, and Galerkin coefficients reduce to exact
// coefficient algebra. POD modes are truncated to P = 64 pairs.
//==============================================================================

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <cstring>

#include "crom/errors.hpp"
#include "crom/fft.hpp"
#include "crom/kse.hpp"

namespace crom {

enum class BasisKind { fourier, pod };

struct Basis {
  BasisKind kind = BasisKind::fourier;
  double L = 0.0;
  int n_pairs = 0;             // truncation of the stored trig representation
  Eigen::MatrixXd coef;        // (size, 2*n_pairs): [cos 1..P | sin 1..P]
  Eigen::VectorXd eigenvalues; // fourier: beta_n per mode; pod: snapshot-covariance energies
  double total_energy = 0.0;   // pod: trace of the snapshot covariance (all modes)

  int size() const { return static_cast<int>(coef.rows()); }

  // Content hash, used as the provenance link on projected series.
  std::uint64_t id() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto mix = [&h](const void* p, std::size_t bytes) {
      const unsigned char* b = static_cast<const unsigned char*>(p);
      for (std::size_t i = 0; i < bytes; ++i) {
        h ^= b[i];
        h *= 0x100000001b3ULL;
      }
    };
    const std::uint16_t k = static_cast<std::uint16_t>(kind);
    mix(&k, sizeof(k));
    mix(&L, sizeof(L));
    if (coef.size() > 0) mix(coef.data(), sizeof(double) * coef.size());
    return h;
  }

  // Samples of mode i on the uniform nx-point grid.
  Eigen::VectorXd mode_on_grid(int i, int nx) const {
    Eigen::VectorXd u = Eigen::VectorXd::Zero(nx);
    accumulate_mode(i, nx, /*derivative=*/false, u);
    return u;
  }

  // Samples of d/dx of mode i (termwise derivative of the trig series).
  Eigen::VectorXd mode_derivative_on_grid(int i, int nx) const {
    Eigen::VectorXd u = Eigen::VectorXd::Zero(nx);
    accumulate_mode(i, nx, /*derivative=*/true, u);
    return u;
  }

  // (size, nx) matrix of all modes sampled on the grid.
  Eigen::MatrixXd modes_on_grid(int nx) const {
    Eigen::MatrixXd m(size(), nx);
    for (int i = 0; i < size(); ++i) m.row(i) = mode_on_grid(i, nx).transpose();
    return m;
  }

  // Max deviation of the pairwise L2 inner products from delta_jk.
  double orthonormality_defect() const {
    const Eigen::MatrixXd gram = coef * coef.transpose();
    return (gram - Eigen::MatrixXd::Identity(size(), size())).cwiseAbs().maxCoeff();
  }

 private:
  void accumulate_mode(int i, int nx, bool derivative, Eigen::VectorXd& u) const {
    if (i < 0 || i >= size()) throw InvalidInput("Basis: mode index out of range");
    const double norm = std::sqrt(2.0 / L);
    for (int n = 1; n <= n_pairs; ++n) {
      const double pc = coef(i, n - 1);
      const double ps = coef(i, n_pairs + n - 1);
      if (pc == 0.0 && ps == 0.0) continue;
      const double w = 2.0 * M_PI * n / L;
      for (int j = 0; j < nx; ++j) {
        const double th = w * (L * j / nx);
        if (!derivative) {
          u[j] += norm * (pc * std::cos(th) + ps * std::sin(th));
        } else {
          u[j] += norm * w * (-pc * std::sin(th) + ps * std::cos(th));
        }
      }
    }
  }
};

// Modal amplitude time series a(t), the ROM state trajectory.
struct CoefficientSeries {
  Eigen::VectorXd times;
  Eigen::MatrixXd values;  // (n, n_times)
  std::uint64_t basis_id = 0;

  int size() const { return static_cast<int>(values.rows()); }
  int n_times() const { return static_cast<int>(values.cols()); }

  // Uniform sample spacing; throws if the grid is not equispaced.
  double dt() const {
    if (times.size() < 2) throw InvalidInput("CoefficientSeries: need >= 2 samples");
    const double step = (times[times.size() - 1] - times[0]) / (times.size() - 1);
    const double tol =
        1e-12 * std::max({std::abs(times[0]), std::abs(times[times.size() - 1]), 1.0});
    for (Eigen::Index j = 0; j + 1 < times.size(); ++j) {
      if (std::abs(times[j + 1] - times[j] - step) > tol)
        throw InvalidInput("CoefficientSeries: non-uniform time spacing");
    }
    return step;
  }
};

// First N cos/sin pairs of the linear operator's eigenbasis, ordered
// (cos 1..N, sin 1..N) with eigenvalues beta_n repeated per pair.
inline Basis fourier_basis(int N, const KseParams& params) {
  if (N < 1) throw InvalidInput("fourier_basis: N must be >= 1");
  params.validate();
  Basis b;
  b.kind = BasisKind::fourier;
  b.L = params.L;
  b.n_pairs = N;
  b.coef = Eigen::MatrixXd::Zero(2 * N, 2 * N);
  b.eigenvalues.resize(2 * N);
  for (int n = 1; n <= N; ++n) {
    b.coef(n - 1, n - 1) = 1.0;          // cos n
    b.coef(N + n - 1, N + n - 1) = 1.0;  // sin n
    b.eigenvalues[n - 1] = params.beta(n);
    b.eigenvalues[N + n - 1] = params.beta(n);
  }
  return b;
}

// POD by the method of snapshots: eigendecompose the (nx x nx) spatial
// covariance C = (dx / N_s) sum_j u_j u_j^T over strided snapshots, keep the
// N leading eigenvectors scaled to unit L2 norm, and truncate each mode to
// 64 Fourier pairs. Modes are sign-fixed so the largest trig coefficient
// pair has a positive cosine part (positive sine part on ties).
inline Basis pod_basis(const SpatioTemporalField& field, int N, long snapshot_stride = 10) {
  if (N < 1) throw InvalidInput("pod_basis: N must be >= 1");
  if (snapshot_stride < 1) throw InvalidInput("pod_basis: snapshot_stride must be >= 1");
  const int nx = field.nx();
  const long n_snap = (field.n_times() + snapshot_stride - 1) / snapshot_stride;
  if (n_snap < N)
    throw InvalidInput("pod_basis: fewer snapshots than requested modes after striding");

  const double dx = field.dx();
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(nx, nx);
  for (long j = 0; j < field.n_times(); j += snapshot_stride)
    cov.selfadjointView<Eigen::Lower>().rankUpdate(field.values.col(j));
  cov = cov.selfadjointView<Eigen::Lower>();
  cov *= dx / static_cast<double>(n_snap);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  if (eig.info() != Eigen::Success)
    throw NumericalError("pod_basis: eigendecomposition failed");
  // Eigen returns ascending order; we want energies descending.
  const Eigen::VectorXd all_energies = eig.eigenvalues().reverse();
  const double ev_max = std::max(all_energies[0], 0.0);
  if (N > nx || all_energies[N - 1] <= 1e-12 * ev_max)
    throw RankDeficiencyError("pod_basis: requested modes exceed the numerical rank of the snapshot set");

  const int n_pairs = std::min(64, nx / 2);
  Basis b;
  b.kind = BasisKind::pod;
  b.L = field.L;
  b.n_pairs = n_pairs;
  b.coef = Eigen::MatrixXd::Zero(N, 2 * n_pairs);
  b.eigenvalues = all_energies.head(N);
  b.total_energy = all_energies.sum();

  RealFft fft(nx);
  Eigen::VectorXcd spec;
  const double to_orthonormal = std::sqrt(field.L / 2.0);
  for (int m = 0; m < N; ++m) {
    // Unit Euclidean eigenvector -> unit L2 norm on the grid.
    Eigen::VectorXd phi = eig.eigenvectors().col(nx - 1 - m) / std::sqrt(dx);
    fft.fwd(phi, spec);
    for (int n = 1; n <= n_pairs; ++n) {
      // u_j = (1/nx) sum_k spec_k e^{2 pi i k j / nx} with conjugate symmetry.
      const double weight = (2 * n == nx) ? 1.0 : 2.0;
      b.coef(m, n - 1) = weight / nx * spec[n].real() * to_orthonormal;
      b.coef(m, n_pairs + n - 1) = -weight / nx * spec[n].imag() * to_orthonormal;
    }
    // Deterministic sign convention.
    int best = 0;
    double best_mag = -1.0;
    for (int n = 0; n < n_pairs; ++n) {
      const double mag = b.coef(m, n) * b.coef(m, n) +
                         b.coef(m, n_pairs + n) * b.coef(m, n_pairs + n);
      if (mag > best_mag) {
        best_mag = mag;
        best = n;
      }
    }
    const double pc = b.coef(m, best);
    const double ps = b.coef(m, n_pairs + best);
    if (pc < 0.0 || (pc == 0.0 && ps < 0.0)) b.coef.row(m) = -b.coef.row(m);
  }
  return b;
}

// a_k(t_j) = <u(., t_j), mode_k> by the rectangle rule.
inline CoefficientSeries project(const SpatioTemporalField& field, const Basis& basis) {
  if (basis.L != field.L)
    throw InvalidInput("project: field and basis domain lengths differ");
  CoefficientSeries s;
  s.times = field.times;
  s.basis_id = basis.id();
  s.values = field.dx() * (basis.modes_on_grid(field.nx()) * field.values);
  return s;
}

// u(x_i, t_j) = sum_k a_k(t_j) mode_k(x_i).
inline SpatioTemporalField reconstruct(const CoefficientSeries& series, const Basis& basis,
                                       int nx) {
  if (series.size() != basis.size())
    throw InvalidInput("reconstruct: series dimension must equal basis size");
  SpatioTemporalField f;
  f.L = basis.L;
  f.times = series.times;
  f.values = basis.modes_on_grid(nx).transpose() * series.values;
  return f;
}

}  // namespace crom
