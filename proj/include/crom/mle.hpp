#pragma once

//==============================================================================
// mle.hpp
// Closed-form maximum-likelihood fitting of a selected model structure.
//
// Drift: with a diagonal noise matrix the MLE of the coefficients coincides
// with ordinary least squares, so each equation is fit independently by QR on
// its selected feature columns (optionally with a constant column, optionally
// after subtracting a known vector-field part from the targets).
//
// Noise: sigma sigma^T is the quadratic-variation estimator expressed through
// the derivative-scheme residuals eps_t = da/dt(t) - Phi(a_t),
//
//     sigma sigma^T = c * mean(eps eps^T),  c = dt (forward), 2 dt (central).
//
// For forward differences this is algebraically identical to the one-step
// Euler-Maruyama MLE (1/(K dt)) sum (a_{t+1} - a_t - Phi(a_t) dt)(...)^T; the
// central form carries the scheme-consistent variance scaling. sigma is the
// Cholesky factor, falling back to a truncated eigendecomposition (d < n)
// when the residual covariance is rank deficient.
//==============================================================================

#include <Eigen/Dense>
#include <Eigen/QR>

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "crom/causation.hpp"
#include "crom/errors.hpp"
#include "crom/library.hpp"
#include "crom/model.hpp"

namespace crom {

struct FitOptions {
  bool include_constant = false;
  // Known vector-field part Q(a); its output is subtracted from the
  // derivative targets before fitting.
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> known_q;
  DiffScheme derivative_scheme = DiffScheme::central;
};

namespace detail {

inline Eigen::MatrixXd known_q_columns(const FitOptions& opts,
                                       const Eigen::Ref<const Eigen::MatrixXd>& states) {
  Eigen::MatrixXd q(states.rows(), states.cols());
  for (Eigen::Index c = 0; c < states.cols(); ++c) {
    Eigen::VectorXd qc = opts.known_q(states.col(c));
    if (qc.size() != states.rows())
      throw InvalidInput("fit_mle: known_q output dimension does not match the state");
    q.col(c) = qc;
  }
  return q;
}

}  // namespace detail

// Fit with caller-supplied derivative targets (column-aligned with `states`).
// The series path below differentiates and delegates here.
inline QuadraticModel fit_mle_with_derivatives(const ModelStructure& structure,
                                               const FeatureLibrary& lib,
                                               const Eigen::Ref<const Eigen::MatrixXd>& states,
                                               const Eigen::Ref<const Eigen::MatrixXd>& derivatives,
                                               double dt, const FitOptions& opts = {}) {
  const int n = lib.n;
  const long n_samples = states.cols();
  if (structure.mask.rows() != n || structure.mask.cols() != lib.M())
    throw InvalidInput("fit_mle: structure shape does not match library");
  if (states.rows() != n || derivatives.rows() != n || derivatives.cols() != n_samples)
    throw InvalidInput("fit_mle: state/derivative shapes do not match");

  Eigen::MatrixXd targets = derivatives;
  if (opts.known_q) targets -= detail::known_q_columns(opts, states);

  QuadraticModel model;
  model.n = n;
  model.linear = Eigen::MatrixXd::Zero(n, n);
  model.constant = Eigen::VectorXd::Zero(n);
  model.metadata = ModelTag::learned;

  std::map<std::tuple<int, int, int>, double> quad_acc;
  Eigen::MatrixXd design;
  for (int i = 0; i < n; ++i) {
    std::vector<int> selected;
    for (int m = 0; m < lib.M(); ++m)
      if (structure.mask(i, m)) selected.push_back(m);
    const int s = static_cast<int>(selected.size()) + (opts.include_constant ? 1 : 0);
    if (s == 0) continue;
    if (n_samples < s)
      throw IllPosedFitError("fit_mle: equation " + std::to_string(i + 1) +
                             " has more selected terms than samples");

    design.resize(n_samples, s);
    for (std::size_t c = 0; c < selected.size(); ++c) {
      const FeatureTerm& t = lib.terms[selected[c]];
      if (t.linear()) {
        design.col(c) = states.row(t.j).transpose();
      } else {
        design.col(c) = states.row(t.j).cwiseProduct(states.row(t.k)).transpose();
      }
    }
    if (opts.include_constant) design.col(s - 1).setOnes();

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    if (qr.rank() < s)
      throw IllPosedFitError("fit_mle: rank-deficient feature submatrix in equation " +
                             std::to_string(i + 1));
    const Eigen::VectorXd theta = qr.solve(targets.row(i).transpose());

    for (std::size_t c = 0; c < selected.size(); ++c) {
      const FeatureTerm& t = lib.terms[selected[c]];
      if (t.linear()) {
        model.linear(i, t.j) = theta[c];
      } else {
        quad_acc[{i, t.j, t.k}] = theta[c];
      }
    }
    if (opts.include_constant) model.constant[i] = theta[s - 1];
  }
  model.quadratic = detail::collect_terms(quad_acc);

  // Residuals of the fitted drift at the training samples.
  Eigen::MatrixXd residual = targets;
  Eigen::VectorXd phi(n);
  for (Eigen::Index c = 0; c < n_samples; ++c) {
    model.drift(states.col(c), phi);
    residual.col(c) -= phi;
  }
  const double qv_scale = (opts.derivative_scheme == DiffScheme::central) ? 2.0 * dt : dt;
  Eigen::MatrixXd sigma_sq =
      (qv_scale / static_cast<double>(n_samples)) * (residual * residual.transpose());

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sigma_sq);
  const double ev_max = std::max(eig.eigenvalues().maxCoeff(), 0.0);
  int rank = 0;
  for (int k = 0; k < n; ++k)
    if (eig.eigenvalues()[k] > std::max(1e-12 * ev_max, 0.0) && eig.eigenvalues()[k] > 0.0)
      ++rank;
  if (rank == n) {
    Eigen::LLT<Eigen::MatrixXd> llt(sigma_sq);
    if (llt.info() == Eigen::Success) {
      model.noise = llt.matrixL();
      return model;
    }
  }
  // Degenerate residual covariance: keep the active directions only.
  model.noise.resize(n, rank);
  for (int k = 0; k < rank; ++k) {
    const int src = n - 1 - k;  // eigenvalues ascend
    model.noise.col(k) = eig.eigenvectors().col(src) * std::sqrt(eig.eigenvalues()[src]);
  }
  return model;
}

// Fit from a coefficient series: finite-difference derivatives per the
// options' scheme, aligned to the valid sample range.
inline QuadraticModel fit_mle(const ModelStructure& structure, const FeatureLibrary& lib,
                              const CoefficientSeries& series, const FitOptions& opts = {}) {
  if (series.size() != lib.n)
    throw InvalidInput("fit_mle: series dimension does not match library");
  const DerivativeSeries deriv = finite_diff_derivatives(series, opts.derivative_scheme);
  const long cols = deriv.last - deriv.first + 1;
  return fit_mle_with_derivatives(structure, lib,
                                  series.values.middleCols(deriv.first, cols), deriv.values,
                                  series.dt(), opts);
}

struct ResidualStats {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;
  std::vector<int> constant_candidates;  // equations with |mean| > 0.1 std
};

// Mean and covariance of da/dt - Phi(a) over the series; equations whose
// residual mean is large relative to its spread are flagged as candidates
// for a constant forcing term.
inline ResidualStats residual_stats(const QuadraticModel& model, const CoefficientSeries& series,
                                    const FitOptions& opts = {}) {
  if (series.size() != model.n)
    throw InvalidInput("residual_stats: series dimension does not match model");
  const DerivativeSeries deriv = finite_diff_derivatives(series, opts.derivative_scheme);
  const long cols = deriv.last - deriv.first + 1;
  const auto states = series.values.middleCols(deriv.first, cols);

  Eigen::MatrixXd residual = deriv.values;
  Eigen::VectorXd phi(model.n);
  for (Eigen::Index c = 0; c < cols; ++c) {
    model.drift(states.col(c), phi);
    if (opts.known_q) phi += opts.known_q(states.col(c));
    residual.col(c) -= phi;
  }

  ResidualStats out;
  out.mean = residual.rowwise().mean();
  Eigen::MatrixXd centered = residual.colwise() - out.mean;
  out.covariance = centered * centered.transpose() / std::max<long>(cols - 1, 1);
  for (int i = 0; i < model.n; ++i) {
    const double sd = std::sqrt(std::max(out.covariance(i, i), 0.0));
    if (std::abs(out.mean[i]) > 0.1 * sd) out.constant_candidates.push_back(i);
  }
  return out;
}

}  // namespace crom
