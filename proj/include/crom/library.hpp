#pragma once

//==============================================================================
// library.hpp
// The quadratic feature library: all linear monomials a_j followed by all
// quadratic monomials a_j a_k (j <= k) in lexicographic order, M = n + n(n+1)/2
// terms in total. No constant term is included; a constant forcing vector can
// be added at the fitting stage instead.
//==============================================================================

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "crom/basis.hpp"
#include "crom/errors.hpp"

namespace crom {

struct FeatureTerm {
  int j;  // first factor (0-based state index)
  int k;  // second factor, or -1 for a linear term
  bool linear() const { return k < 0; }
};

struct FeatureLibrary {
  int n = 0;
  std::vector<FeatureTerm> terms;

  int M() const { return static_cast<int>(terms.size()); }

  int index_of_linear(int j) const { return j; }

  int index_of_quadratic(int j, int k) const {
    // pairs (0,0)..(0,n-1), (1,1)..(1,n-1), ...
    long idx = n;
    for (int r = 0; r < j; ++r) idx += n - r;
    return static_cast<int>(idx + (k - j));
  }

  std::string term_name(int m) const {
    const FeatureTerm& t = terms.at(m);
    if (t.linear()) return "a" + std::to_string(t.j + 1);
    return "a" + std::to_string(t.j + 1) + "*a" + std::to_string(t.k + 1);
  }

  double evaluate(int m, const Eigen::Ref<const Eigen::VectorXd>& a) const {
    const FeatureTerm& t = terms[m];
    return t.linear() ? a[t.j] : a[t.j] * a[t.k];
  }
};

inline FeatureLibrary build_library(int n) {
  if (n < 1) throw InvalidInput("build_library: n must be >= 1");
  FeatureLibrary lib;
  lib.n = n;
  lib.terms.reserve(n + n * (n + 1) / 2);
  for (int j = 0; j < n; ++j) lib.terms.push_back({j, -1});
  for (int j = 0; j < n; ++j)
    for (int k = j; k < n; ++k) lib.terms.push_back({j, k});
  return lib;
}

// Feature matrix with one row per library term: row m holds f_m(a(t_j)).
inline Eigen::MatrixXd evaluate_library(const FeatureLibrary& lib,
                                        const Eigen::Ref<const Eigen::MatrixXd>& states) {
  if (states.rows() != lib.n)
    throw InvalidInput("evaluate_library: state dimension does not match library");
  Eigen::MatrixXd f(lib.M(), states.cols());
  for (int m = 0; m < lib.M(); ++m) {
    const FeatureTerm& t = lib.terms[m];
    if (t.linear()) {
      f.row(m) = states.row(t.j);
    } else {
      f.row(m) = states.row(t.j).cwiseProduct(states.row(t.k));
    }
  }
  return f;
}

enum class DiffScheme { central, forward };

inline DiffScheme parse_scheme(const std::string& s) {
  if (s == "central") return DiffScheme::central;
  if (s == "forward") return DiffScheme::forward;
  throw InvalidInput("unknown derivative scheme: " + s);
}

inline const char* scheme_name(DiffScheme s) {
  return s == DiffScheme::central ? "central" : "forward";
}

// Finite-difference time derivatives plus the column range of the source
// series they are aligned with (central differences lose one sample at each
// end, forward differences lose the last).
struct DerivativeSeries {
  Eigen::MatrixXd values;  // (n, last - first + 1)
  long first = 0;          // first aligned source column
  long last = 0;           // last aligned source column (inclusive)
};

inline DerivativeSeries finite_diff_derivatives(const CoefficientSeries& series,
                                                DiffScheme scheme) {
  const long nt = series.n_times();
  const double dt = series.dt();
  DerivativeSeries d;
  if (scheme == DiffScheme::central) {
    if (nt < 3) throw InvalidInput("finite_diff_derivatives: central scheme needs >= 3 samples");
    d.first = 1;
    d.last = nt - 2;
    d.values = (series.values.rightCols(nt - 2) - series.values.leftCols(nt - 2)) / (2.0 * dt);
  } else {
    if (nt < 2) throw InvalidInput("finite_diff_derivatives: forward scheme needs >= 2 samples");
    d.first = 0;
    d.last = nt - 2;
    d.values = (series.values.rightCols(nt - 1) - series.values.leftCols(nt - 1)) / dt;
  }
  return d;
}

}  // namespace crom
