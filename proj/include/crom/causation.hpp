#pragma once

//==============================================================================
// causation.hpp
// Causation entropy of every library term for every state equation, under a
// Gaussian closure, and the structure-selection strategies built on it.
//
// The causation entropy of term f_m for the derivative da_i/dt is the
// conditional mutual information I(da_i/dt ; f_m | all other terms): the
// information f_m carries about the tendency beyond what the rest of the
// library already provides. With Gaussian marginals it reduces to
//
//   C = 1/2 ( logdet R_{XY} - logdet R_Y - logdet R_{XYZ} + logdet R_{YZ} ),
//
// X = da_i/dt, Z = f_m, Y = the remaining library terms, where every R is a
// principal submatrix of one grand covariance of the stacked vector
// (features, derivatives). Entries are reported in bits and clamped at zero
// (the exact quantity is non-negative; tiny negatives are roundoff).
//==============================================================================

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "crom/errors.hpp"
#include "crom/library.hpp"
#include "crom/model.hpp"
#include "crom/parallel.hpp"

namespace crom {

struct CausationMatrix {
  Eigen::MatrixXd values;  // (n, M), bits
  static constexpr int base = 2;
  int n() const { return static_cast<int>(values.rows()); }
  int M() const { return static_cast<int>(values.cols()); }
};

enum class SelectStrategy { global_threshold, global_sparsity, per_equation_sparsity };

inline const char* strategy_name(SelectStrategy s) {
  switch (s) {
    case SelectStrategy::global_threshold: return "global_threshold";
    case SelectStrategy::global_sparsity: return "global_sparsity";
    default: return "per_equation_sparsity";
  }
}

struct ThresholdRecord {
  SelectStrategy strategy = SelectStrategy::global_threshold;
  double value = 0.0;                        // theta or sparsity fraction
  Eigen::VectorXd per_equation_thresholds;   // realized cutoffs (sparsity strategies)
};

struct ModelStructure {
  Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> mask;  // (n, M)
  ThresholdRecord threshold_record;

  int count() const { return static_cast<int>(mask.count()); }
};

namespace detail {

// Log-determinant (natural log) of the principal submatrix S(idx, idx) by
// Cholesky. On factorization failure a diagonal jitter is added, starting at
// 1e-12 of the mean diagonal and escalating tenfold up to 1e-6 of it.
inline double logdet_principal(const Eigen::MatrixXd& S, const std::vector<int>& idx,
                               const std::string& label) {
  const int d = static_cast<int>(idx.size());
  if (d == 0) return 0.0;
  Eigen::MatrixXd sub(d, d);
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c) sub(r, c) = S(idx[r], idx[c]);

  const double mean_diag = sub.trace() / d;
  double jitter = 0.0;
  for (int attempt = 0; attempt < 8; ++attempt) {
    Eigen::LLT<Eigen::MatrixXd> llt(attempt == 0
                                        ? sub
                                        : Eigen::MatrixXd(sub + jitter * Eigen::MatrixXd::Identity(d, d)));
    if (llt.info() == Eigen::Success) {
      return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
    }
    jitter = (attempt == 0) ? 1e-12 * mean_diag : jitter * 10.0;
    if (jitter > 1e-6 * mean_diag * 1.0000001) break;
  }
  throw DegenerateLibraryError("causation entropy: covariance submatrix " + label +
                               " is not positive definite after jitter escalation");
}

}  // namespace detail

// Grand sample covariance of the stacked (features, derivatives) vector with
// the mean removed (two passes; 1/(N-1) normalization). Feature rows follow
// the library order; derivative rows come after them.
inline Eigen::MatrixXd grand_covariance(const Eigen::Ref<const Eigen::MatrixXd>& features,
                                        const Eigen::Ref<const Eigen::MatrixXd>& derivatives) {
  if (features.cols() != derivatives.cols())
    throw InvalidInput("grand_covariance: sample counts differ");
  const long n_samples = features.cols();
  const int dim = static_cast<int>(features.rows() + derivatives.rows());
  if (n_samples < 2) throw InvalidInput("grand_covariance: need >= 2 samples");

  Eigen::VectorXd mean(dim);
  mean.head(features.rows()) = features.rowwise().mean();
  mean.tail(derivatives.rows()) = derivatives.rowwise().mean();

  // Accumulate centered cross products in fixed-size column blocks so the
  // result does not depend on the caller's blocking.
  constexpr long kBlock = 8192;
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(dim, dim);
  Eigen::MatrixXd block(dim, std::min(kBlock, n_samples));
  for (long c0 = 0; c0 < n_samples; c0 += kBlock) {
    const long bc = std::min(kBlock, n_samples - c0);
    block.leftCols(bc).topRows(features.rows()) = features.middleCols(c0, bc);
    block.leftCols(bc).bottomRows(derivatives.rows()) = derivatives.middleCols(c0, bc);
    block.leftCols(bc).colwise() -= mean;
    S.selfadjointView<Eigen::Lower>().rankUpdate(block.leftCols(bc));
  }
  S = S.selfadjointView<Eigen::Lower>();
  S /= static_cast<double>(n_samples - 1);
  return S;
}

namespace detail {

// Cholesky of the principal submatrix S(idx, idx) with the jitter policy of
// logdet_principal. Returns the lower factor.
inline Eigen::MatrixXd cholesky_principal(const Eigen::MatrixXd& S, const std::vector<int>& idx,
                                          const std::string& label) {
  const int d = static_cast<int>(idx.size());
  Eigen::MatrixXd sub(d, d);
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c) sub(r, c) = S(idx[r], idx[c]);
  const double mean_diag = d > 0 ? sub.trace() / d : 0.0;
  double jitter = 0.0;
  for (int attempt = 0; attempt < 8; ++attempt) {
    Eigen::LLT<Eigen::MatrixXd> llt(attempt == 0
                                        ? sub
                                        : Eigen::MatrixXd(sub + jitter * Eigen::MatrixXd::Identity(d, d)));
    if (llt.info() == Eigen::Success) return llt.matrixL();
    jitter = (attempt == 0) ? 1e-12 * mean_diag : jitter * 10.0;
    if (jitter > 1e-6 * mean_diag * 1.0000001) break;
  }
  throw DegenerateLibraryError("causation entropy: covariance submatrix " + label +
                               " is not positive definite after jitter escalation");
}

}  // namespace detail

// Causation entropy matrix from a precomputed grand covariance whose first M
// rows/columns are the features and last n are the derivatives. With the
// population covariance this is exact up to roundoff.
//
// Each entry combines the log-determinants of the four principal submatrices
// R_XY, R_Y, R_XYZ, R_YZ. Ordering the Cholesky factorizations so the
// conditioning block leads makes both differences single Schur terms,
//
//   logdet R_XY - logdet R_Y = log var(X | Y),
//
// which avoids cancelling two O(M) log-determinant sums per entry.
inline CausationMatrix causation_entropy_from_covariance(const Eigen::MatrixXd& S, int n, int M,
                                                         bool clamp_negatives = true) {
  if (S.rows() != S.cols() || S.rows() != n + M)
    throw InvalidInput("causation_entropy_from_covariance: covariance has wrong dimension");
  const double inv_ln2 = 1.0 / std::log(2.0);

  std::vector<int> all_features(M);
  for (int m = 0; m < M; ++m) all_features[m] = m;

  // logdet R_XYZ - logdet R_YZ = log var(X_i | all features), from one shared
  // factorization of R_YZ.
  const Eigen::MatrixXd l_yz = detail::cholesky_principal(S, all_features, "R_YZ (all features)");
  Eigen::VectorXd log_var_full(n);
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd cross(M);
    for (int m = 0; m < M; ++m) cross[m] = S(m, M + i);
    const Eigen::VectorXd w = l_yz.triangularView<Eigen::Lower>().solve(cross);
    const double var = S(M + i, M + i) - w.squaredNorm();
    log_var_full[i] = std::log(std::max(var, 1e-300));
  }

  CausationMatrix cem;
  cem.values.resize(n, M);
  parallel_for(M, [&](std::ptrdiff_t m) {
    std::vector<int> idx_y;
    idx_y.reserve(M - 1);
    for (int r = 0; r < M; ++r)
      if (r != m) idx_y.push_back(r);
    const Eigen::MatrixXd l_y = detail::cholesky_principal(
        S, idx_y, "R_Y (features minus " + std::to_string(m + 1) + ")");
    Eigen::VectorXd cross(M - 1), w(M - 1);
    for (int i = 0; i < n; ++i) {
      for (int r = 0; r < M - 1; ++r) cross[r] = S(idx_y[r], M + i);
      w = l_y.triangularView<Eigen::Lower>().solve(cross);
      const double var = S(M + i, M + i) - w.squaredNorm();
      double c = 0.5 * (std::log(std::max(var, 1e-300)) - log_var_full[i]) * inv_ln2;
      if (clamp_negatives && c < 0.0) c = 0.0;
      cem.values(i, m) = c;
    }
  });
  return cem;
}

// Causation entropy from sample matrices: features (M x N) and derivatives
// (n x N), column-aligned.
inline CausationMatrix causation_entropy_matrix(const Eigen::Ref<const Eigen::MatrixXd>& features,
                                                const Eigen::Ref<const Eigen::MatrixXd>& derivatives) {
  const int M = static_cast<int>(features.rows());
  const int n = static_cast<int>(derivatives.rows());
  if (features.cols() < M + n + 1)
    throw InvalidInput("causation_entropy_matrix: need at least M + n + 1 samples");
  const Eigen::MatrixXd S = grand_covariance(features, derivatives);
  return causation_entropy_from_covariance(S, n, M);
}

// Subsample a series in time (every stride-th recorded instant). A stride
// greater than one coarsens the finite-difference resolution as well, since
// differentiation happens on the subsampled grid.
inline CoefficientSeries stride_series(const CoefficientSeries& series, long stride) {
  if (stride < 1) throw InvalidInput("stride_series: stride must be >= 1");
  if (stride == 1) return series;
  const long nt = series.n_times();
  const long kept = (nt + stride - 1) / stride;
  CoefficientSeries out;
  out.basis_id = series.basis_id;
  out.times.resize(kept);
  out.values.resize(series.size(), kept);
  for (long j = 0; j < kept; ++j) {
    out.times[j] = series.times[j * stride];
    out.values.col(j) = series.values.col(j * stride);
  }
  return out;
}

// Convenience path from a coefficient series: subsamples by `stride`,
// differentiates, aligns, and streams the feature evaluation block by block
// (the full M x N feature matrix is never materialized).
inline CausationMatrix causation_entropy_matrix(const FeatureLibrary& lib,
                                                const CoefficientSeries& series,
                                                DiffScheme scheme = DiffScheme::central,
                                                long stride = 1) {
  if (series.size() != lib.n)
    throw InvalidInput("causation_entropy_matrix: series dimension does not match library");
  const CoefficientSeries used = stride_series(series, stride);
  const DerivativeSeries deriv = finite_diff_derivatives(used, scheme);
  const long n_samples = deriv.last - deriv.first + 1;
  const int M = lib.M();
  const int n = lib.n;
  const int dim = M + n;
  if (n_samples < M + n + 1)
    throw InvalidInput("causation_entropy_matrix: need at least M + n + 1 samples");

  // Pass 1: means. Pass 2: centered second moments, fixed block size.
  constexpr long kBlock = 8192;
  Eigen::MatrixXd block(dim, std::min(kBlock, n_samples));
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(dim);
  auto fill_block = [&](long s0, long bc) {
    for (long c = 0; c < bc; ++c) {
      const long col = deriv.first + s0 + c;
      const auto a = used.values.col(col);
      for (int m = 0; m < M; ++m) {
        const FeatureTerm& t = lib.terms[m];
        block(m, c) = t.linear() ? a[t.j] : a[t.j] * a[t.k];
      }
      block.col(c).tail(n) = deriv.values.col(col - deriv.first);
    }
  };
  for (long s0 = 0; s0 < n_samples; s0 += kBlock) {
    const long bc = std::min(kBlock, n_samples - s0);
    fill_block(s0, bc);
    mean += block.leftCols(bc).rowwise().sum();
  }
  mean /= static_cast<double>(n_samples);

  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(dim, dim);
  for (long s0 = 0; s0 < n_samples; s0 += kBlock) {
    const long bc = std::min(kBlock, n_samples - s0);
    fill_block(s0, bc);
    block.leftCols(bc).colwise() -= mean;
    S.selfadjointView<Eigen::Lower>().rankUpdate(block.leftCols(bc));
  }
  S = S.selfadjointView<Eigen::Lower>();
  S /= static_cast<double>(n_samples - 1);
  return causation_entropy_from_covariance(S, n, M);
}

// Structure selection. global_threshold keeps entries strictly above theta;
// the sparsity strategies keep the top ceil((1 - fraction) * slots) entries,
// globally or per equation. Ties break toward the smaller library index,
// then the smaller equation index.
inline ModelStructure select_structure(const CausationMatrix& cem, SelectStrategy strategy,
                                       double value) {
  const int n = cem.n();
  const int M = cem.M();
  ModelStructure out;
  out.mask.setConstant(n, M, false);
  out.threshold_record.strategy = strategy;
  out.threshold_record.value = value;

  struct Entry {
    double v;
    int m, i;
  };
  auto better = [](const Entry& a, const Entry& b) {
    if (a.v != b.v) return a.v > b.v;
    if (a.m != b.m) return a.m < b.m;
    return a.i < b.i;
  };

  if (strategy == SelectStrategy::global_threshold) {
    out.mask = cem.values.array() > value;
    return out;
  }
  if (!(value >= 0.0) || !(value <= 1.0))
    throw InvalidInput("select_structure: sparsity fraction must lie in [0, 1]");

  if (strategy == SelectStrategy::global_sparsity) {
    std::vector<Entry> entries;
    entries.reserve(static_cast<std::size_t>(n) * M);
    for (int i = 0; i < n; ++i)
      for (int m = 0; m < M; ++m) entries.push_back({cem.values(i, m), m, i});
    std::sort(entries.begin(), entries.end(), better);
    const long keep = std::min<long>(
        entries.size(),
        static_cast<long>(std::ceil((1.0 - value) * static_cast<double>(n) * M)));
    for (long e = 0; e < keep; ++e) out.mask(entries[e].i, entries[e].m) = true;
    if (keep > 0 && keep < static_cast<long>(entries.size())) {
      out.threshold_record.per_equation_thresholds =
          Eigen::VectorXd::Constant(1, entries[keep - 1].v);
    }
    return out;
  }

  // per-equation sparsity
  out.threshold_record.per_equation_thresholds.resize(n);
  const long keep = std::min<long>(M, static_cast<long>(std::ceil((1.0 - value) * M)));
  for (int i = 0; i < n; ++i) {
    std::vector<Entry> row;
    row.reserve(M);
    for (int m = 0; m < M; ++m) row.push_back({cem.values(i, m), m, i});
    std::sort(row.begin(), row.end(), better);
    for (long e = 0; e < keep; ++e) out.mask(i, row[e].m) = true;
    out.threshold_record.per_equation_thresholds[i] = keep > 0 ? row[keep - 1].v : 0.0;
  }
  return out;
}

// Mask of the terms present in a quadratic model's drift (the reference
// structure when the generating model is known, and the bridge that turns a
// magnitude-thresholded model into a fittable structure).
inline ModelStructure structure_of_model(const QuadraticModel& model, const FeatureLibrary& lib) {
  if (model.n != lib.n) throw InvalidInput("structure_of_model: dimension mismatch");
  ModelStructure s;
  s.mask.setConstant(lib.n, lib.M(), false);
  for (int i = 0; i < model.n; ++i)
    for (int j = 0; j < model.n; ++j)
      if (model.linear(i, j) != 0.0) s.mask(i, lib.index_of_linear(j)) = true;
  for (const auto& t : model.quadratic)
    if (t.coef != 0.0) s.mask(t.eq, lib.index_of_quadratic(t.j, t.k)) = true;
  return s;
}

}  // namespace crom
