#include <catch2/catch_amalgamated.hpp>

#include "crom/kse.hpp"

using namespace crom;
using Catch::Approx;

namespace {

Eigen::VectorXd cosine_state(const KseParams& p, int harmonics = 1) {
  Eigen::VectorXd u(p.nx);
  for (int i = 0; i < p.nx; ++i) u[i] = std::cos(2.0 * M_PI * harmonics * i / p.nx);
  return u;
}

}  // namespace

TEST_CASE("KseParams defaults match the reference regime and validate") {
  KseParams p;
  CHECK(p.nu == 8.0);
  CHECK(p.D == 1.0);
  CHECK(p.L == Approx(20.0 * M_PI));
  CHECK(p.gamma == 1.0);
  CHECK(p.dt == 0.01);
  CHECK(p.nx == 128);
  CHECK_NOTHROW(p.validate());

  KseParams bad = p;
  bad.nx = 127;
  CHECK_THROWS_AS(bad.validate(), InvalidInput);
  bad = p;
  bad.dt = 0.0;
  CHECK_THROWS_AS(bad.validate(), InvalidInput);
}

TEST_CASE("etdrk4_tables: zero symbol gives the identity propagator") {
  const auto t = etdrk4_tables(Eigen::VectorXcd::Zero(4), 0.7);
  for (int i = 0; i < 4; ++i) {
    CHECK(t.E[i] == Approx(1.0).margin(1e-14));
    CHECK(t.E2[i] == Approx(1.0).margin(1e-14));
    // At a zero symbol the scheme must reduce to classical RK4.
    CHECK(t.Q[i] == Approx(0.7 / 2).margin(1e-12));
    CHECK(t.f1[i] == Approx(0.7 / 6).margin(1e-12));
    CHECK(t.f2[i] == Approx(0.7 / 6).margin(1e-12));
    CHECK(t.f3[i] == Approx(0.7 / 6).margin(1e-12));
  }
}

TEST_CASE("etdrk4_tables: scalar exponentials") {
  Eigen::VectorXcd sym(1);
  sym[0] = -1.0;
  CHECK(etdrk4_tables(sym, 1.0).E[0] == Approx(std::exp(-1.0)).epsilon(1e-14));

  // Mode n = 1 of the reference regime.
  KseParams p;
  sym[0] = p.beta(1);
  CHECK(p.beta(1) == Approx(0.0092).margin(1e-15));
  CHECK(etdrk4_tables(sym, 0.01).E[0] == Approx(std::exp(0.000092)).epsilon(1e-14));
}

TEST_CASE("etdrk4_tables rejects bad symbols") {
  Eigen::VectorXcd sym(2);
  sym << 1.0, std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(etdrk4_tables(sym, 0.1), InvalidInput);
  sym << 1.0, std::complex<double>(0.0, 2.0);
  CHECK_THROWS_AS(etdrk4_tables(sym, 0.1), InvalidInput);
  sym << 1.0, 1.0;
  CHECK_THROWS_AS(etdrk4_tables(sym, -0.1), InvalidInput);
}

TEST_CASE("simulate_kse: zero initial state stays zero") {
  KseParams p;
  const auto f = simulate_kse(p, Eigen::VectorXd::Zero(p.nx), 1.0, 10);
  CHECK(f.values.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("simulate_kse preserves the zero spatial mean") {
  KseParams p;
  const auto f = simulate_kse(p, cosine_state(p), 50.0, 50);
  for (long j = 0; j < f.n_times(); ++j) {
    const auto col = f.values.col(j);
    const double rms = std::sqrt(col.squaredNorm() / p.nx);
    CHECK(std::abs(f.dx() * col.sum()) <= 1e-10 * std::max(rms, 1e-30) * p.L);
  }
}

TEST_CASE("simulate_kse subtracts a nonzero mean and reports it") {
  KseParams p;
  Eigen::VectorXd u0 = cosine_state(p);
  u0.array() += 0.5;
  KseSimulator sim(p, u0);
  CHECK(sim.mean_adjusted());
  const Eigen::VectorXd u = sim.snapshot();
  CHECK(std::abs(u.mean()) < 1e-12);
}

TEST_CASE("simulate_kse is deterministic") {
  KseParams p;
  const auto a = simulate_kse(p, cosine_state(p), 5.0, 20);
  const auto b = simulate_kse(p, cosine_state(p), 5.0, 20);
  CHECK((a.values - b.values).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a.times - b.times).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("simulate_kse converges at fourth order in dt") {
  KseParams p;
  const Eigen::VectorXd u0 = cosine_state(p);
  auto final_state = [&](double dt) {
    KseParams q = p;
    q.dt = dt;
    const auto f = simulate_kse(q, u0, 1.0, std::lround(1.0 / dt));
    return Eigen::VectorXd(f.values.col(f.n_times() - 1));
  };
  const Eigen::VectorXd ref = final_state(0.0125 / 8);
  std::vector<double> dts = {0.1, 0.05, 0.025}, errs;
  for (double dt : dts) errs.push_back((final_state(dt) - ref).norm() / ref.norm());
  // Least-squares slope of log error vs log dt.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < dts.size(); ++i) {
    const double x = std::log(dts[i]), y = std::log(errs[i]);
    sx += x; sy += y; sxx += x * x; sxy += x * y;
  }
  const double n = static_cast<double>(dts.size());
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  CHECK(slope == Approx(4.0).margin(0.3));
}

TEST_CASE("simulate_kse: doubling the grid leaves resolved dynamics unchanged") {
  KseParams p;
  const auto coarse = simulate_kse(p, cosine_state(p), 1.0, 100);
  KseParams p2 = p;
  p2.nx = 256;
  const auto fine = simulate_kse(p2, cosine_state(p2), 1.0, 100);
  // Coarse grid points coincide with every other fine point.
  double sq = 0.0;
  const auto uc = coarse.values.col(coarse.n_times() - 1);
  const auto uf = fine.values.col(fine.n_times() - 1);
  for (int i = 0; i < p.nx; ++i) sq += (uc[i] - uf[2 * i]) * (uc[i] - uf[2 * i]);
  CHECK(std::sqrt(sq / p.nx) < 1e-6);
}

TEST_CASE("simulate_kse raises a blow-up error with the last stable time") {
  KseParams p;
  p.dt = 0.25;  // far beyond the advective stability limit at this amplitude
  Eigen::VectorXd u0 = 3e7 * cosine_state(p, 3);
  try {
    simulate_kse(p, u0, 50.0, 1);
    FAIL("expected BlowUpError");
  } catch (const BlowUpError& e) {
    CHECK(e.last_stable_time() >= 0.0);
    CHECK(e.last_stable_time() <= 50.0);
  }
}

TEST_CASE("kinetic_energy: rectangle rule on known fields") {
  KseParams p;
  SpatioTemporalField f;
  f.L = p.L;
  f.times = Eigen::VectorXd::Zero(1);
  f.values = Eigen::MatrixXd::Zero(p.nx, 1);
  CHECK(kinetic_energy(f)[0] == 0.0);

  // Orthonormal mode has unit energy.
  for (int i = 0; i < p.nx; ++i)
    f.values(i, 0) = std::sqrt(2.0 / p.L) * std::cos(2.0 * M_PI * i / p.nx);
  CHECK(kinetic_energy(f)[0] == Approx(1.0).epsilon(1e-12));

  SpatioTemporalField empty;
  empty.L = p.L;
  CHECK_THROWS_AS(kinetic_energy(empty), InvalidInput);
}

TEST_CASE("simulate_kse save window handling") {
  KseParams p;
  const auto f = simulate_kse(p, cosine_state(p), 2.0, 10, 1.0);
  CHECK(f.times[0] == Approx(1.0));
  CHECK(f.times[f.n_times() - 1] == Approx(2.0));
  CHECK(f.n_times() == 11);
  CHECK_THROWS_AS(simulate_kse(p, cosine_state(p), 1.0, 1, 2.0), InvalidInput);
}
