#pragma once

//==============================================================================
// model.hpp
// Stochastic quadratic ODE models
//
//     da/dt = A a + Q(a) + b + sigma dW/dt,   Q_i(a) = sum c_{i,jk} a_j a_k,
//
// their analytic (Fourier-Galerkin) and data-driven (POD-Galerkin)
// constructions, magnitude thresholding, and simulation by RK4 drift plus
// Euler-Maruyama noise.
//
// Quadratic monomials are aggregated over both argument orderings, so each
// (equation, j <= k) combination appears at most once; the same convention
// is used by the feature library so term identities align.
//==============================================================================

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>
#include <vector>

#include "crom/basis.hpp"
#include "crom/errors.hpp"
#include "crom/kse.hpp"
#include "crom/rng.hpp"

namespace crom {

enum class ModelTag { fourier_galerkin, pod_galerkin, thresholded, learned };

struct QuadTerm {
  int eq;       // equation index i
  int j, k;     // monomial a_j a_k with j <= k (0-based)
  double coef;
};

struct QuadraticModel {
  int n = 0;
  Eigen::MatrixXd linear;           // (n, n)
  std::vector<QuadTerm> quadratic;  // unique (eq, j, k), sorted
  Eigen::VectorXd constant;         // (n)
  Eigen::MatrixXd noise;            // (n, d); d may be < n or 0
  ModelTag metadata = ModelTag::learned;

  int term_count() const {
    int c = static_cast<int>(quadratic.size());
    for (int i = 0; i < linear.size(); ++i) c += (linear.data()[i] != 0.0);
    for (int i = 0; i < constant.size(); ++i) c += (constant[i] != 0.0);
    return c;
  }

  double max_abs_coef() const {
    double m = linear.size() ? linear.cwiseAbs().maxCoeff() : 0.0;
    if (constant.size()) m = std::max(m, constant.cwiseAbs().maxCoeff());
    for (const auto& t : quadratic) m = std::max(m, std::abs(t.coef));
    return m;
  }

  void drift(const Eigen::VectorXd& a, Eigen::VectorXd& out) const {
    out.noalias() = linear * a;
    out += constant;
    for (const auto& t : quadratic) out[t.eq] += t.coef * a[t.j] * a[t.k];
  }

  Eigen::VectorXd drift(const Eigen::VectorXd& a) const {
    Eigen::VectorXd out(n);
    drift(a, out);
    return out;
  }

  // Quadratic part only.
  Eigen::VectorXd quadratic_part(const Eigen::VectorXd& a) const {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
    for (const auto& t : quadratic) out[t.eq] += t.coef * a[t.j] * a[t.k];
    return out;
  }

  // Drift Jacobian: linear + symmetrized quadratic contraction.
  void jacobian(const Eigen::VectorXd& a, Eigen::MatrixXd& out) const {
    out = linear;
    for (const auto& t : quadratic) {
      out(t.eq, t.j) += t.coef * a[t.k];
      out(t.eq, t.k) += t.coef * a[t.j];
    }
  }

  void validate() const {
    if (linear.rows() != n || linear.cols() != n || constant.size() != n ||
        noise.rows() != n)
      throw InvalidInput("QuadraticModel: inconsistent shapes");
    std::map<std::tuple<int, int, int>, int> seen;
    for (const auto& t : quadratic) {
      if (t.eq < 0 || t.eq >= n || t.j < 0 || t.k < t.j || t.k >= n)
        throw InvalidInput("QuadraticModel: bad quadratic term indices");
      if (++seen[{t.eq, t.j, t.k}] > 1)
        throw InvalidInput("QuadraticModel: duplicate quadratic term");
    }
  }
};

namespace detail {

// <B(e_p^{l1}, e_q^{l2}), e_n^{l}> for the cos/sin modes, B(u,v) = -gamma u v_x.
// Nonzero only across a cos/sin mix into cos, or a matched pair into sin, at
// the sum and difference frequencies.
inline double fourier_interaction(int p, int l1, int q, int l2, int n, int l,
                                  double gamma, double L) {
  const double base = gamma * M_PI / (std::sqrt(2.0) * std::pow(L, 1.5));
  if (l == 0) {
    if (l1 == l2) return 0.0;
    const int pc = (l1 == 0) ? p : q;  // cosine-factor frequency
    const int qs = (l1 == 0) ? q : p;  // sine-factor frequency
    if (n == pc + qs) return -base * n;
    if (n == std::abs(pc - qs)) return base * (pc - qs);
    return 0.0;
  }
  if (l1 != l2) return 0.0;
  if (n == p + q) return (l1 == 0) ? base * n : -base * n;
  if (n == std::abs(p - q)) return base * n;
  return 0.0;
}

inline std::vector<QuadTerm> collect_terms(std::map<std::tuple<int, int, int>, double>& acc,
                                           double drop_below = 0.0) {
  std::vector<QuadTerm> terms;
  terms.reserve(acc.size());
  for (const auto& [key, coef] : acc) {
    if (std::abs(coef) <= drop_below) continue;
    terms.push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key), coef});
  }
  return terms;
}

}  // namespace detail

// Analytic Galerkin truncation of the KSE on the first N cos/sin pairs.
// State ordering matches fourier_basis: (cos 1..N, sin 1..N). Diagonal linear
// part beta_n; quadratic couplings at the sum/difference frequencies only.
inline QuadraticModel fourier_galerkin(int N, const KseParams& params) {
  if (N < 1) throw InvalidInput("fourier_galerkin: N must be >= 1");
  params.validate();
  const int dim = 2 * N;
  QuadraticModel m;
  m.n = dim;
  m.linear = Eigen::MatrixXd::Zero(dim, dim);
  m.constant = Eigen::VectorXd::Zero(dim);
  m.noise = Eigen::MatrixXd::Zero(dim, 0);
  m.metadata = ModelTag::fourier_galerkin;
  for (int n = 1; n <= N; ++n) {
    m.linear(n - 1, n - 1) = params.beta(n);
    m.linear(N + n - 1, N + n - 1) = params.beta(n);
  }

  auto state_index = [N](int n, int l) { return (l == 0) ? n - 1 : N + n - 1; };
  std::map<std::tuple<int, int, int>, double> acc;
  for (int n = 1; n <= N; ++n) {
    for (int l = 0; l <= 1; ++l) {
      const int eq = state_index(n, l);
      for (int p = 1; p <= N; ++p) {
        for (int l1 = 0; l1 <= 1; ++l1) {
          for (int q = 1; q <= N; ++q) {
            for (int l2 = 0; l2 <= 1; ++l2) {
              const double v =
                  detail::fourier_interaction(p, l1, q, l2, n, l, params.gamma, params.L);
              if (v == 0.0) continue;
              int j = state_index(p, l1);
              int k = state_index(q, l2);
              if (j > k) std::swap(j, k);
              acc[{eq, j, k}] += v;
            }
          }
        }
      }
    }
  }
  m.quadratic = detail::collect_terms(acc, 1e-300);
  return m;
}

// Data-driven Galerkin system on a POD basis. The linear coefficients come
// from exact coefficient algebra (the operator is diagonal on the trig
// family); the quadratic ones integrate phi_i * d_x phi_j * phi_n by the
// rectangle rule on a grid fine enough to make the quadrature exact for the
// truncated representations.
inline QuadraticModel pod_galerkin(const Basis& basis, const KseParams& params) {
  if (basis.kind != BasisKind::pod)
    throw InvalidInput("pod_galerkin: basis must be of pod kind");
  params.validate();
  if (std::abs(basis.L - params.L) > 1e-12 * params.L)
    throw InvalidInput("pod_galerkin: basis and params domain lengths differ");
  const int N = basis.size();
  const int P = basis.n_pairs;
  // Products of three degree-P trig polynomials need > 3P nodes.
  int grid = 512;
  while (grid < 3 * P + 2) grid *= 2;
  const double dx = basis.L / grid;

  QuadraticModel m;
  m.n = N;
  m.linear.resize(N, N);
  m.constant = Eigen::VectorXd::Zero(N);
  m.noise = Eigen::MatrixXd::Zero(N, 0);
  m.metadata = ModelTag::pod_galerkin;

  // A_nj = <A phi_j, phi_n> = sum_p beta_p (cos/sin coefficient products).
  Eigen::VectorXd beta(2 * P);
  for (int p = 1; p <= P; ++p) {
    beta[p - 1] = params.beta(p);
    beta[P + p - 1] = params.beta(p);
  }
  m.linear = basis.coef * beta.asDiagonal() * basis.coef.transpose();

  Eigen::MatrixXd phi(N, grid), dphi(N, grid);
  for (int i = 0; i < N; ++i) {
    phi.row(i) = basis.mode_on_grid(i, grid).transpose();
    dphi.row(i) = basis.mode_derivative_on_grid(i, grid).transpose();
  }

  std::map<std::tuple<int, int, int>, double> acc;
  Eigen::VectorXd w(grid), proj(N);
  for (int i = 0; i < N; ++i) {
    for (int j = 0; j < N; ++j) {
      w = phi.row(i).cwiseProduct(dphi.row(j));
      proj.noalias() = phi * w;
      proj *= -params.gamma * dx;  // <B(phi_i, phi_j), phi_n> for all n
      const int lo = std::min(i, j);
      const int hi = std::max(i, j);
      for (int eq = 0; eq < N; ++eq) acc[{eq, lo, hi}] += proj[eq];
    }
  }
  m.quadratic = detail::collect_terms(acc);
  return m;
}

// Library-order key of a drift term, used to break magnitude ties when
// thresholding: linear a_j first, then quadratic (j <= k) lexicographic,
// then constants.
namespace detail {
inline long term_order_key(int n, int j, int k) {
  if (k < 0) return j;  // linear
  long key = n;
  for (int r = 0; r < j; ++r) key += n - r;
  return key + (k - j);
}
}  // namespace detail

// Keeps the ceil((1 - sparsity) * n * M) largest-magnitude drift terms, where
// M = n + n(n+1)/2 counts the possible linear + quadratic slots. Ties break
// toward the smaller library index, then the smaller equation index.
// Surviving coefficients are copied unchanged; callers refit them on training
// data when a calibrated model is wanted.
inline QuadraticModel threshold_model(const QuadraticModel& model, double sparsity_fraction) {
  if (!(sparsity_fraction >= 0.0) || !(sparsity_fraction < 1.0))
    throw InvalidInput("threshold_model: sparsity fraction must lie in [0, 1)");
  if (model.term_count() < 1) throw InvalidInput("threshold_model: model has no terms");

  struct Entry {
    double mag;
    long lib_key;
    int eq;
    int j, k;  // k = -1 linear, k = -2 constant
    double coef;
  };
  std::vector<Entry> entries;
  const int n = model.n;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (model.linear(i, j) != 0.0)
        entries.push_back({std::abs(model.linear(i, j)), detail::term_order_key(n, j, -1), i,
                           j, -1, model.linear(i, j)});
  for (const auto& t : model.quadratic)
    entries.push_back({std::abs(t.coef), detail::term_order_key(n, t.j, t.k), t.eq, t.j, t.k,
                       t.coef});
  const long constant_key = n + static_cast<long>(n) * (n + 1) / 2;
  for (int i = 0; i < n; ++i)
    if (model.constant[i] != 0.0)
      entries.push_back({std::abs(model.constant[i]), constant_key, i, -1, -2,
                         model.constant[i]});

  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    if (a.mag != b.mag) return a.mag > b.mag;
    if (a.lib_key != b.lib_key) return a.lib_key < b.lib_key;
    return a.eq < b.eq;
  });

  const long slots = n + static_cast<long>(n) * (n + 1) / 2;
  const long keep = static_cast<long>(
      std::ceil((1.0 - sparsity_fraction) * static_cast<double>(n) * slots));
  const std::size_t kept = std::min<std::size_t>(entries.size(), std::max<long>(keep, 0));

  QuadraticModel out;
  out.n = n;
  out.linear = Eigen::MatrixXd::Zero(n, n);
  out.constant = Eigen::VectorXd::Zero(n);
  out.noise = model.noise;
  out.metadata = ModelTag::thresholded;
  std::map<std::tuple<int, int, int>, double> acc;
  for (std::size_t e = 0; e < kept; ++e) {
    const Entry& en = entries[e];
    if (en.k == -1) {
      out.linear(en.eq, en.j) = en.coef;
    } else if (en.k == -2) {
      out.constant[en.eq] = en.coef;
    } else {
      acc[{en.eq, en.j, en.k}] = en.coef;
    }
  }
  out.quadratic = detail::collect_terms(acc);
  return out;
}

// Equations of `model` having no drift term at all (pure noise equations).
inline std::vector<int> equations_without_terms(const QuadraticModel& model) {
  std::vector<bool> has(model.n, false);
  for (int i = 0; i < model.n; ++i)
    for (int j = 0; j < model.n; ++j)
      if (model.linear(i, j) != 0.0) has[i] = true;
  for (int i = 0; i < model.n; ++i)
    if (model.constant[i] != 0.0) has[i] = true;
  for (const auto& t : model.quadratic) has[t.eq] = true;
  std::vector<int> empty;
  for (int i = 0; i < model.n; ++i)
    if (!has[i]) empty.push_back(i);
  return empty;
}

// One RK4 drift step plus an additive Euler-Maruyama noise increment.
class ModelSimulator {
 public:
  static constexpr double kBlowUpLimit = 1e8;

  ModelSimulator(const QuadraticModel& model, const Eigen::VectorXd& a0, double dt,
                 std::uint64_t seed)
      : model_(model), state_(a0), dt_(dt), rng_(seed) {
    if (!(dt > 0.0)) throw InvalidInput("ModelSimulator: dt must be positive");
    if (a0.size() != model.n) throw InvalidInput("ModelSimulator: a0 has wrong dimension");
    has_noise_ = model_.noise.cols() > 0 && !model_.noise.isZero(0.0);
    k1_.resize(model_.n);
    k2_.resize(model_.n);
    k3_.resize(model_.n);
    k4_.resize(model_.n);
    work_.resize(model_.n);
    if (has_noise_) xi_.resize(model_.noise.cols());
  }

  const Eigen::VectorXd& state() const { return state_; }
  double time() const { return step_count_ * dt_; }
  long step_count() const { return step_count_; }

  void step() {
    const double h = dt_;
    model_.drift(state_, k1_);
    work_ = state_ + 0.5 * h * k1_;
    model_.drift(work_, k2_);
    work_ = state_ + 0.5 * h * k2_;
    model_.drift(work_, k3_);
    work_ = state_ + h * k3_;
    model_.drift(work_, k4_);
    state_ += (h / 6.0) * (k1_ + 2.0 * k2_ + 2.0 * k3_ + k4_);
    if (has_noise_) {
      for (Eigen::Index i = 0; i < xi_.size(); ++i) xi_[i] = rng_();
      state_.noalias() += std::sqrt(h) * (model_.noise * xi_);
    }
    ++step_count_;
    const double norm = state_.cwiseAbs().maxCoeff();
    if (!std::isfinite(norm) || norm > kBlowUpLimit)
      throw BlowUpError("quadratic model trajectory blew up", time());
  }

 private:
  QuadraticModel model_;
  Eigen::VectorXd state_;
  double dt_;
  NormalSampler rng_;
  bool has_noise_ = false;
  long step_count_ = 0;
  Eigen::VectorXd k1_, k2_, k3_, k4_, work_, xi_;
};

// Simulates to t_end saving every save_stride steps (including step 0 when
// t_start_save <= 0). Deterministic for a fixed seed.
inline CoefficientSeries simulate_model(const QuadraticModel& model, const Eigen::VectorXd& a0,
                                        double t_end, double dt, std::uint64_t seed,
                                        long save_stride = 1, double t_start_save = 0.0) {
  if (!(t_end > 0.0)) throw InvalidInput("simulate_model: t_end must be positive");
  if (save_stride < 1) throw InvalidInput("simulate_model: save_stride must be >= 1");
  ModelSimulator sim(model, a0, dt, seed);
  const long n_steps = std::lround(t_end / dt);
  long first_save = static_cast<long>(std::ceil(t_start_save / dt - 1e-9));
  if (first_save < 0) first_save = 0;
  if (first_save > n_steps) throw InvalidInput("simulate_model: t_start_save is past t_end");
  const long n_saves = (n_steps - first_save) / save_stride + 1;

  CoefficientSeries s;
  s.times.resize(n_saves);
  s.values.resize(model.n, n_saves);
  long next_save = first_save;
  long save_idx = 0;
  for (long i = 0; i <= n_steps; ++i) {
    if (i == next_save) {
      s.times[save_idx] = i * dt;
      s.values.col(save_idx) = sim.state();
      ++save_idx;
      next_save += save_stride;
    }
    if (i < n_steps) sim.step();
  }
  return s;
}

}  // namespace crom
