#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "crom/mle.hpp"

using namespace crom;
using Catch::Approx;

namespace {

ModelStructure mask_for(const FeatureLibrary& lib, const std::vector<std::pair<int, int>>& on) {
  ModelStructure s;
  s.mask.setConstant(lib.n, lib.M(), false);
  for (const auto& [i, m] : on) s.mask(i, m) = true;
  return s;
}

CoefficientSeries series_from(const Eigen::MatrixXd& values, double dt) {
  CoefficientSeries s;
  s.values = values;
  s.times = Eigen::VectorXd::LinSpaced(values.cols(), 0.0, dt * (values.cols() - 1));
  return s;
}

}  // namespace

TEST_CASE("fit_mle recovers a scalar linear law exactly from exact derivatives") {
  const auto lib = build_library(1);
  const long nt = 2000;
  Eigen::MatrixXd a(1, nt), adot(1, nt);
  for (long j = 0; j < nt; ++j) {
    a(0, j) = std::exp(-2.0 * 0.01 * j);
    adot(0, j) = -2.0 * a(0, j);
  }
  const auto structure = mask_for(lib, {{0, lib.index_of_linear(0)}});
  const auto m = fit_mle_with_derivatives(structure, lib, a, adot, 0.01);
  CHECK(m.linear(0, 0) == Approx(-2.0).margin(1e-8));
  const double sigma = m.noise.size() ? m.noise.cwiseAbs().maxCoeff() : 0.0;
  CHECK(sigma < 1e-10);
}

TEST_CASE("fit_mle recovers quadratic models placed inside the structure") {
  // 2-dim quadratic system, exact derivatives: coefficients to 1e-6 relative.
  QuadraticModel truth;
  truth.n = 2;
  truth.linear.resize(2, 2);
  truth.linear << -0.5, 0.2, 0.1, -0.8;
  truth.constant = Eigen::VectorXd::Zero(2);
  truth.noise = Eigen::MatrixXd::Zero(2, 0);
  truth.quadratic = {{0, 0, 1, 0.3}, {1, 0, 0, -0.4}, {1, 1, 1, 0.15}};

  const auto series = simulate_model(truth, Eigen::VectorXd::Constant(2, 0.5), 40.0, 0.01, 0, 1);
  Eigen::MatrixXd adot(2, series.n_times());
  Eigen::VectorXd phi(2);
  for (long j = 0; j < series.n_times(); ++j) {
    truth.drift(series.values.col(j), phi);
    adot.col(j) = phi;
  }
  const auto lib = build_library(2);
  const auto structure = structure_of_model(truth, lib);
  const auto fit = fit_mle_with_derivatives(structure, lib, series.values, adot, 0.01);
  CHECK(fit.linear(0, 0) == Approx(-0.5).epsilon(1e-6));
  CHECK(fit.linear(0, 1) == Approx(0.2).epsilon(1e-6));
  CHECK(fit.linear(1, 0) == Approx(0.1).epsilon(1e-6));
  CHECK(fit.linear(1, 1) == Approx(-0.8).epsilon(1e-6));
  for (const auto& t : fit.quadratic) {
    for (const auto& want : truth.quadratic)
      if (want.eq == t.eq && want.j == t.j && want.k == t.k)
        CHECK(t.coef == Approx(want.coef).epsilon(1e-6));
  }
}

TEST_CASE("fit_mle noise estimator recovers the generating amplitude") {
  // 2-dim Ornstein-Uhlenbeck by Euler-Maruyama with sigma = 0.1 I; the
  // quadratic-variation estimate must land within 5% of sigma sigma^T.
  const double dt = 0.01, sigma = 0.1;
  const long nt = 1000001;
  Eigen::MatrixXd a(2, nt);
  a.col(0) << 0.1, -0.1;
  Eigen::MatrixXd drift(2, 2);
  drift << -1.0, 0.3, -0.2, -0.7;
  NormalSampler rng(12345);
  for (long j = 1; j < nt; ++j) {
    Eigen::VectorXd xi(2);
    xi << rng(), rng();
    a.col(j) = a.col(j - 1) + dt * (drift * a.col(j - 1)) + sigma * std::sqrt(dt) * xi;
  }
  const auto series = series_from(a, dt);
  const auto lib = build_library(2);
  ModelStructure structure;
  structure.mask.setConstant(2, lib.M(), false);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) structure.mask(i, lib.index_of_linear(j)) = true;

  for (const DiffScheme scheme : {DiffScheme::forward, DiffScheme::central}) {
    FitOptions opts;
    opts.derivative_scheme = scheme;
    const auto fit = fit_mle(structure, lib, series, opts);
    const Eigen::MatrixXd cov = fit.noise * fit.noise.transpose();
    CHECK(cov(0, 0) == Approx(sigma * sigma).epsilon(0.05));
    CHECK(cov(1, 1) == Approx(sigma * sigma).epsilon(0.05));
    CHECK(std::abs(cov(0, 1)) < 0.05 * sigma * sigma);
    // Only forward differences see the drift of a diffusion path; central
    // differences average the forward and (time-reversed) backward tendencies
    // and estimate zero drift on stationary data.
    if (scheme == DiffScheme::forward)
      CHECK(fit.linear(0, 0) == Approx(-1.0).margin(0.1));
  }
}

TEST_CASE("fit_mle supports constant forcing and a known vector field") {
  QuadraticModel truth;
  truth.n = 2;
  truth.linear.resize(2, 2);
  truth.linear << -1.0, 0.0, 0.0, -0.5;
  truth.constant.resize(2);
  truth.constant << 0.7, -0.2;
  truth.noise = Eigen::MatrixXd::Zero(2, 0);
  truth.quadratic = {{0, 0, 1, 0.25}};

  const auto series = simulate_model(truth, Eigen::VectorXd::Constant(2, 0.3), 30.0, 0.01, 0, 1);
  Eigen::MatrixXd adot(2, series.n_times());
  Eigen::VectorXd phi(2);
  for (long j = 0; j < series.n_times(); ++j) {
    truth.drift(series.values.col(j), phi);
    adot.col(j) = phi;
  }
  const auto lib = build_library(2);

  SECTION("constant column recovers the forcing vector") {
    ModelStructure structure;
    structure.mask.setConstant(2, lib.M(), false);
    structure.mask(0, 0) = structure.mask(1, 1) = true;
    structure.mask(0, lib.index_of_quadratic(0, 1)) = true;
    FitOptions opts;
    opts.include_constant = true;
    const auto fit = fit_mle_with_derivatives(structure, lib, series.values, adot, 0.01, opts);
    CHECK(fit.constant[0] == Approx(0.7).margin(1e-8));
    CHECK(fit.constant[1] == Approx(-0.2).margin(1e-8));
    CHECK(fit.linear(0, 0) == Approx(-1.0).margin(1e-8));
  }

  SECTION("known_q subtracts the supplied vector-field part") {
    // Treat the quadratic term and constants as known; fit only the linears.
    ModelStructure structure;
    structure.mask.setConstant(2, lib.M(), false);
    structure.mask(0, 0) = structure.mask(1, 1) = true;
    FitOptions opts;
    opts.known_q = [&truth](const Eigen::VectorXd& x) {
      Eigen::VectorXd q = truth.constant;
      q[0] += 0.25 * x[0] * x[1];
      return q;
    };
    const auto fit = fit_mle_with_derivatives(structure, lib, series.values, adot, 0.01, opts);
    CHECK(fit.linear(0, 0) == Approx(-1.0).margin(1e-8));
    CHECK(fit.linear(1, 1) == Approx(-0.5).margin(1e-8));
  }
}

TEST_CASE("fit_mle scaling equivariance") {
  // Scaling the data by c leaves linear coefficients unchanged and scales
  // quadratic ones by 1/c.
  QuadraticModel truth;
  truth.n = 1;
  truth.linear = Eigen::MatrixXd::Constant(1, 1, -0.6);
  truth.constant = Eigen::VectorXd::Zero(1);
  truth.noise = Eigen::MatrixXd::Zero(1, 0);
  truth.quadratic = {{0, 0, 0, 0.2}};
  const auto series = simulate_model(truth, Eigen::VectorXd::Constant(1, 0.8), 20.0, 0.01, 0, 1);
  Eigen::MatrixXd adot(1, series.n_times());
  for (long j = 0; j < series.n_times(); ++j)
    adot(0, j) = truth.drift(series.values.col(j))[0];

  const auto lib = build_library(1);
  const auto structure = structure_of_model(truth, lib);
  const auto base = fit_mle_with_derivatives(structure, lib, series.values, adot, 0.01);

  const double c = 3.7;
  const auto scaled =
      fit_mle_with_derivatives(structure, lib, c * series.values, c * adot, 0.01);
  CHECK(scaled.linear(0, 0) == Approx(base.linear(0, 0)).epsilon(1e-9));
  CHECK(scaled.quadratic[0].coef == Approx(base.quadratic[0].coef / c).epsilon(1e-9));
}

TEST_CASE("fit_mle reports rank-deficient equations") {
  // a2 is an exact copy of a1, so selecting both gives a singular design.
  const long nt = 500;
  Eigen::MatrixXd a(2, nt), adot(2, nt);
  for (long j = 0; j < nt; ++j) {
    a(0, j) = std::sin(0.01 * j);
    a(1, j) = a(0, j);
    adot(0, j) = std::cos(0.01 * j);
    adot(1, j) = adot(0, j);
  }
  const auto lib = build_library(2);
  ModelStructure structure;
  structure.mask.setConstant(2, lib.M(), false);
  structure.mask(0, 0) = structure.mask(0, 1) = true;
  CHECK_THROWS_AS(fit_mle_with_derivatives(structure, lib, a, adot, 0.01), IllPosedFitError);
}

TEST_CASE("fit_mle reduces the noise dimension on degenerate residuals") {
  // Residuals confined to the first component: rank-1 noise factor.
  const long nt = 5000;
  Eigen::MatrixXd a(2, nt), adot(2, nt);
  NormalSampler rng(5);
  for (long j = 0; j < nt; ++j) {
    a(0, j) = std::sin(0.01 * j);
    a(1, j) = std::cos(0.013 * j);
    adot(0, j) = 2.0 * a(0, j) + 0.01 * rng();
    adot(1, j) = -1.0 * a(1, j);  // exactly representable
  }
  const auto lib = build_library(2);
  ModelStructure structure;
  structure.mask.setConstant(2, lib.M(), false);
  structure.mask(0, 0) = structure.mask(1, 1) = true;
  const auto fit = fit_mle_with_derivatives(structure, lib, a, adot, 0.01);
  CHECK(fit.noise.cols() == 1);
}

TEST_CASE("residual_stats flags equations needing constant forcing") {
  QuadraticModel truth;
  truth.n = 2;
  truth.linear.resize(2, 2);
  truth.linear << -1.0, 0.0, 0.0, -0.5;
  truth.constant = Eigen::VectorXd::Zero(2);
  truth.noise = Eigen::MatrixXd::Zero(2, 0);
  const auto series =
      simulate_model(truth, Eigen::VectorXd::Constant(2, 1.0), 20.0, 0.01, 0, 1);

  // The model itself: residuals are finite-difference error only.
  const auto clean = residual_stats(truth, series);
  CHECK(std::abs(clean.mean[0]) < 1e-5);
  CHECK(std::abs(clean.mean[1]) < 1e-5);
  CHECK(clean.covariance.cwiseAbs().maxCoeff() < 1e-6);

  // Offsetting equation 1's drift by +c leaves residual mean -c there.
  QuadraticModel offset = truth;
  offset.constant[0] = 0.3;
  const auto shifted = residual_stats(offset, series);
  CHECK(shifted.mean[0] == Approx(-0.3).margin(1e-4));
  REQUIRE(!shifted.constant_candidates.empty());
  CHECK(shifted.constant_candidates[0] == 0);
}

TEST_CASE("fit preconditions") {
  const auto lib = build_library(2);
  ModelStructure structure;
  structure.mask.setConstant(2, lib.M(), true);
  Eigen::MatrixXd a = Eigen::MatrixXd::Random(2, 4), adot = Eigen::MatrixXd::Random(2, 4);
  CHECK_THROWS_AS(fit_mle_with_derivatives(structure, lib, a, adot, 0.01), IllPosedFitError);
}
