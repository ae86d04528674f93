#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <random>

#include "crom/model.hpp"

using namespace crom;
using Catch::Approx;

namespace {

// Independent quadrature oracle for <B(u, v), w> = -gamma int u v_x w dx on a
// fine grid, with each factor given as a (frequency, 0=cos/1=sin) label.
double interaction_quadrature(int p_freq, int p_kind, int q_freq, int q_kind, int n_freq,
                              int n_kind, const KseParams& par, int grid = 1024) {
  const double dx = par.L / grid;
  const double norm = std::sqrt(2.0 / par.L);
  auto eval = [&](int freq, int kind, double x, bool derivative) {
    const double w = 2.0 * M_PI * freq / par.L;
    if (!derivative) return norm * (kind == 0 ? std::cos(w * x) : std::sin(w * x));
    return norm * w * (kind == 0 ? -std::sin(w * x) : std::cos(w * x));
  };
  double acc = 0.0;
  for (int i = 0; i < grid; ++i) {
    const double x = i * dx;
    acc += eval(p_freq, p_kind, x, false) * eval(q_freq, q_kind, x, true) *
           eval(n_freq, n_kind, x, false);
  }
  return -par.gamma * acc * dx;
}

QuadraticModel dense_random_model(int n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> nd;
  QuadraticModel m;
  m.n = n;
  m.linear.resize(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m.linear(i, j) = nd(gen);
  m.constant = Eigen::VectorXd::Zero(n);
  m.noise = Eigen::MatrixXd::Zero(n, 0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = j; k < n; ++k) m.quadratic.push_back({i, j, k, nd(gen)});
  return m;
}

}  // namespace

TEST_CASE("fourier_galerkin reproduces the known sparse structure") {
  KseParams p;
  const auto m = fourier_galerkin(10, p);
  CHECK(m.n == 20);
  CHECK(m.term_count() == 295);
  CHECK(m.quadratic.size() == 275);

  // Linear part is diagonal with beta_n duplicated per cos/sin pair.
  for (int i = 0; i < 20; ++i)
    for (int j = 0; j < 20; ++j) {
      if (i == j) {
        CHECK(m.linear(i, j) == Approx(p.beta(i % 10 + 1)).margin(1e-15));
      } else {
        CHECK(m.linear(i, j) == 0.0);
      }
    }

  // Vanishing interaction classes: cos equations carry no cos*cos or sin*sin
  // monomials, sin equations carry no mixed ones.
  for (const auto& t : m.quadratic) {
    const bool eq_is_cos = t.eq < 10;
    const bool j_is_cos = t.j < 10;
    const bool k_is_cos = t.k < 10;
    if (eq_is_cos) {
      CHECK(j_is_cos != k_is_cos);
    } else {
      CHECK(j_is_cos == k_is_cos);
    }
  }
}

TEST_CASE("fourier_galerkin coefficients match the quadrature oracle") {
  KseParams p;
  const auto m = fourier_galerkin(10, p);

  // <B(e^0_1, e^1_1), e^0_2>: frozen oracle value for the reference regime.
  const double oracle = interaction_quadrature(1, 0, 1, 1, 2, 0, p);
  CHECK(oracle == Approx(-8.920620580763856e-3).epsilon(1e-10));

  // The model aggregates both argument orderings of the monomial.
  const double both = oracle + interaction_quadrature(1, 1, 1, 0, 2, 0, p);
  bool found = false;
  for (const auto& t : m.quadratic) {
    if (t.eq == 1 && t.j == 0 && t.k == 10) {
      found = true;
      CHECK(t.coef == Approx(both).epsilon(1e-10));
    }
  }
  CHECK(found);

  // Spot-check every stored coefficient against the oracle on a smaller model.
  const auto small = fourier_galerkin(4, p);
  auto label = [](int idx, int half) {
    return std::pair<int, int>{idx % half + 1, idx < half ? 0 : 1};
  };
  for (const auto& t : small.quadratic) {
    const auto [nf, nk] = label(t.eq, 4);
    const auto [jf, jk] = label(t.j, 4);
    const auto [kf, kk] = label(t.k, 4);
    double expected = interaction_quadrature(jf, jk, kf, kk, nf, nk, p);
    if (t.j != t.k) expected += interaction_quadrature(kf, kk, jf, jk, nf, nk, p);
    CHECK(t.coef == Approx(expected).margin(1e-10));
  }
}

TEST_CASE("quadratic parts conserve energy") {
  KseParams p;
  const auto fg = fourier_galerkin(10, p);
  std::mt19937_64 gen(42);
  std::normal_distribution<double> nd;
  const double max_coef = fg.max_abs_coef();
  for (int trial = 0; trial < 1000; ++trial) {
    Eigen::VectorXd a(20);
    for (int i = 0; i < 20; ++i) a[i] = nd(gen);
    const double residual = std::abs(a.dot(fg.quadratic_part(a)));
    CHECK(residual <= 1e-9 * std::pow(a.norm(), 3) * max_coef);
  }
}

TEST_CASE("pod_galerkin on a relabeled Fourier basis equals fourier_galerkin") {
  KseParams p;
  const auto fg = fourier_galerkin(10, p);
  Basis fake = fourier_basis(10, p);
  fake.kind = BasisKind::pod;
  const auto pg = pod_galerkin(fake, p);

  CHECK((pg.linear - fg.linear).cwiseAbs().maxCoeff() < 1e-8);
  std::map<std::tuple<int, int, int>, double> expected;
  for (const auto& t : fg.quadratic) expected[{t.eq, t.j, t.k}] = t.coef;
  for (const auto& t : pg.quadratic) {
    const auto it = expected.find({t.eq, t.j, t.k});
    const double want = (it == expected.end()) ? 0.0 : it->second;
    CHECK(t.coef == Approx(want).margin(1e-8));
  }

  // Energy conservation holds for the data-driven construction too.
  std::mt19937_64 gen(1);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 200; ++trial) {
    Eigen::VectorXd a(20);
    for (int i = 0; i < 20; ++i) a[i] = nd(gen);
    CHECK(std::abs(a.dot(pg.quadratic_part(a))) <=
          1e-9 * std::pow(a.norm(), 3) * pg.max_abs_coef());
  }

  CHECK_THROWS_AS(pod_galerkin(fourier_basis(10, p), p), InvalidInput);
}

TEST_CASE("threshold_model keeps the right counts") {
  // sparsity 0 keeps everything
  const auto m = dense_random_model(20, 5);
  const auto full = threshold_model(m, 0.0);
  CHECK(full.term_count() == m.term_count());

  // 20-dim model with all 4600 slots filled: 90% sparsity keeps 460
  CHECK(m.term_count() == 4600);
  const auto thr = threshold_model(m, 0.9);
  CHECK(thr.term_count() == 460);
  CHECK(thr.metadata == ModelTag::thresholded);

  // ceiling rule on a two-slot model (n = 1: terms a1, a1^2)
  QuadraticModel tiny;
  tiny.n = 1;
  tiny.linear = Eigen::MatrixXd::Constant(1, 1, 2.0);
  tiny.constant = Eigen::VectorXd::Zero(1);
  tiny.noise = Eigen::MatrixXd::Zero(1, 0);
  tiny.quadratic.push_back({0, 0, 0, 1.0});
  CHECK(tiny.term_count() == 2);
  const auto kept = threshold_model(tiny, 0.999);
  CHECK(kept.term_count() == 1);
  CHECK(kept.linear(0, 0) == 2.0);  // the larger-magnitude term survives
}

TEST_CASE("threshold_model output is a subset of the input terms") {
  const auto m = dense_random_model(8, 9);
  std::map<std::tuple<int, int, int>, double> input;
  for (const auto& t : m.quadratic) input[{t.eq, t.j, t.k}] = t.coef;
  for (double f : {0.1, 0.5, 0.93}) {
    const auto thr = threshold_model(m, f);
    for (const auto& t : thr.quadratic) {
      const auto it = input.find({t.eq, t.j, t.k});
      REQUIRE(it != input.end());
      CHECK(t.coef == it->second);
    }
    for (int i = 0; i < 8; ++i)
      for (int j = 0; j < 8; ++j)
        if (thr.linear(i, j) != 0.0) CHECK(thr.linear(i, j) == m.linear(i, j));
  }
  CHECK_THROWS_AS(threshold_model(m, 1.0), InvalidInput);
}

TEST_CASE("equations_without_terms flags pure-noise rows") {
  QuadraticModel m;
  m.n = 3;
  m.linear = Eigen::MatrixXd::Zero(3, 3);
  m.linear(0, 0) = 1.0;
  m.constant = Eigen::VectorXd::Zero(3);
  m.noise = Eigen::MatrixXd::Zero(3, 0);
  m.quadratic.push_back({2, 0, 1, 0.5});
  const auto empty = equations_without_terms(m);
  REQUIRE(empty.size() == 1);
  CHECK(empty[0] == 1);
}

TEST_CASE("simulate_model: fixed points, exponentials, determinism") {
  QuadraticModel zero;
  zero.n = 2;
  zero.linear = Eigen::MatrixXd::Zero(2, 2);
  zero.constant = Eigen::VectorXd::Zero(2);
  zero.noise = Eigen::MatrixXd::Zero(2, 0);
  Eigen::VectorXd a0(2);
  a0 << 0.3, -0.7;
  const auto flat = simulate_model(zero, a0, 1.0, 0.01, 1, 10);
  for (long j = 0; j < flat.n_times(); ++j)
    CHECK((flat.values.col(j) - a0).cwiseAbs().maxCoeff() == 0.0);

  QuadraticModel decay;
  decay.n = 1;
  decay.linear = Eigen::MatrixXd::Constant(1, 1, -1.0);
  decay.constant = Eigen::VectorXd::Zero(1);
  decay.noise = Eigen::MatrixXd::Zero(1, 0);
  const auto exp_run = simulate_model(decay, Eigen::VectorXd::Ones(1), 1.0, 0.01, 1, 100);
  CHECK(exp_run.values(0, exp_run.n_times() - 1) == Approx(std::exp(-1.0)).margin(1e-9));

  // Bit-identical deterministic trajectories, with and without noise.
  KseParams p;
  const auto fg = fourier_galerkin(5, p);
  Eigen::VectorXd b0 = Eigen::VectorXd::Constant(10, 0.4);
  const auto r1 = simulate_model(fg, b0, 10.0, 0.01, 77, 10);
  const auto r2 = simulate_model(fg, b0, 10.0, 0.01, 77, 10);
  CHECK((r1.values - r2.values).cwiseAbs().maxCoeff() == 0.0);

  QuadraticModel noisy = fg;
  noisy.noise = 0.05 * Eigen::MatrixXd::Identity(10, 10);
  const auto n1 = simulate_model(noisy, b0, 5.0, 0.01, 123, 10);
  const auto n2 = simulate_model(noisy, b0, 5.0, 0.01, 123, 10);
  const auto n3 = simulate_model(noisy, b0, 5.0, 0.01, 124, 10);
  CHECK((n1.values - n2.values).cwiseAbs().maxCoeff() == 0.0);
  CHECK((n1.values - n3.values).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("simulate_model reports blow-up with a time stamp") {
  QuadraticModel burst;
  burst.n = 1;
  burst.linear = Eigen::MatrixXd::Zero(1, 1);
  burst.constant = Eigen::VectorXd::Zero(1);
  burst.noise = Eigen::MatrixXd::Zero(1, 0);
  burst.quadratic.push_back({0, 0, 0, 1.0});  // da/dt = a^2 escapes at t = 1
  try {
    simulate_model(burst, Eigen::VectorXd::Ones(1), 5.0, 0.001, 1, 100);
    FAIL("expected BlowUpError");
  } catch (const BlowUpError& e) {
    CHECK(e.last_stable_time() > 0.5);
    CHECK(e.last_stable_time() < 1.5);
  }
}

TEST_CASE("QuadraticModel validates term bookkeeping") {
  auto m = dense_random_model(3, 2);
  CHECK_NOTHROW(m.validate());
  m.quadratic.push_back(m.quadratic.front());
  CHECK_THROWS_AS(m.validate(), InvalidInput);
  m.quadratic.pop_back();
  m.quadratic.push_back({0, 2, 1, 1.0});  // j > k
  CHECK_THROWS_AS(m.validate(), InvalidInput);
}

TEST_CASE("jacobian matches finite differences of the drift") {
  const auto m = dense_random_model(5, 31);
  Eigen::VectorXd a(5);
  a << 0.3, -1.2, 0.5, 0.9, -0.1;
  Eigen::MatrixXd jac(5, 5);
  m.jacobian(a, jac);
  const double h = 1e-7;
  for (int j = 0; j < 5; ++j) {
    Eigen::VectorXd ap = a, am = a;
    ap[j] += h;
    am[j] -= h;
    const Eigen::VectorXd col = (m.drift(ap) - m.drift(am)) / (2 * h);
    CHECK((jac.col(j) - col).cwiseAbs().maxCoeff() < 1e-6);
  }
}
