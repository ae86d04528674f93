//==============================================================================
// crom: sparse stochastic reduced-order modeling of the Kuramoto-Sivashinsky
// equation by causation-entropy structure selection.
//
// Subcommands cover every pipeline stage (simulate, basis, project, galerkin,
// centropy, fit, rom-sim, assimilate, stats) plus canned end-to-end
// experiments (repro). Exit codes: 0 success, 1 usage, 2 I/O, 3 numerical.
//==============================================================================

#include <clocale>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "crom/crom.hpp"
#include "repro.hpp"

namespace fs = std::filesystem;
using namespace crom;

namespace {

// Shared [kse] parameter flags.
void add_kse_options(CLI::App* cmd, KseParams* p) {
  cmd->add_option("--nu", p->nu, "biharmonic diffusion");
  cmd->add_option("--D", p->D, "anti-diffusion");
  cmd->add_option("--L", p->L, "domain length");
  cmd->add_option("--gamma", p->gamma, "advection strength");
  cmd->add_option("--dt", p->dt, "time step");
  cmd->add_option("--nx", p->nx, "grid points (even)");
}

Eigen::VectorXd initial_state(const KseParams& p, const std::string& u0_spec) {
  if (u0_spec == "cos") {
    Eigen::VectorXd u0(p.nx);
    for (int i = 0; i < p.nx; ++i) u0[i] = std::cos(2.0 * M_PI * i / p.nx);
    return u0;
  }
  if (u0_spec == "zero") return Eigen::VectorXd::Zero(p.nx);
  const auto f = io::read_field(u0_spec);
  if (f.nx() != p.nx) throw InvalidInput("u0 field has wrong grid size");
  return f.values.col(f.n_times() - 1);
}

// Resolved-config echo written next to a subcommand's primary output.
void echo_config(const std::string& out_path, const RunConfig& cfg) {
  io::write_file(out_path + ".run.cfg", cfg.to_text());
}

struct CliState {
  // simulate
  KseParams kse;
  std::string u0 = "cos";
  double t_end = 100.0;
  long save_stride = 10;
  double t_start_save = 0.0;
  std::string out;
  bool csv = false;
  // basis
  std::string field_path;
  std::string kind = "pod";
  int size = 20;
  long stride = 10;
  // project / fit / centropy
  std::string basis_path, series_path, structure_path, model_path;
  std::string scheme = "central";
  double theta = -1.0, global_sparsity = -1.0, per_eq_sparsity = -1.0;
  std::string structure_out;
  // galerkin
  int fourier_pairs = 0;
  double threshold_frac = -1.0;
  std::string refit_series;
  // rom-sim
  std::string a0_series;
  long a0_col = -1;
  std::uint64_t seed = 1;
  double sim_dt = 0.01;
  // assimilate
  std::string obs_path;
  int members = 100;
  double eps_rel = 1e-6, eps_abs = 1e-12;
  // stats
  std::string out_dir = ".";
  double win_begin = 0.0, win_end = -1.0;
  int bins = 100;
  int acf_lags = 1000;
  int lyap_k = 3;
  double lyap_window = 1e4;
  long lyap_renorm = 10;
  // repro
  std::string experiment;
  bool desk = false;
  std::string reuse_dir;
};

int run_simulate(CliState& st) {
  st.kse.validate();
  const auto u0 = initial_state(st.kse, st.u0);
  KseSimulator probe(st.kse, u0);
  if (probe.mean_adjusted())
    std::cerr << "warning: initial state had nonzero mean; subtracted\n";
  const auto field = simulate_kse(st.kse, u0, st.t_end, st.save_stride, st.t_start_save);
  io::write_field(st.out, field);
  if (st.csv) io::write_field_csv(st.out + ".csv", field);
  RunConfig cfg;
  cfg.kse = st.kse;
  cfg.u0 = st.u0;
  cfg.train_start = st.t_start_save;
  cfg.train_end = st.t_end;
  cfg.pod_stride = st.save_stride;
  cfg.csv = st.csv;
  echo_config(st.out, cfg);
  std::cout << "wrote " << field.n_times() << " snapshots to " << st.out << "\n";
  return 0;
}

int run_basis(CliState& st) {
  Basis b;
  RunConfig cfg;
  cfg.kse = st.kse;
  cfg.basis_kind = st.kind;
  cfg.basis_size = st.size;
  cfg.pod_stride = st.stride;
  if (st.kind == "pod") {
    if (st.field_path.empty()) throw CLI::ValidationError("--field is required for pod kind");
    const auto field = io::read_field(st.field_path);
    b = pod_basis(field, st.size, st.stride);
  } else if (st.kind == "fourier") {
    if (st.size % 2 != 0) throw CLI::ValidationError("fourier basis size must be even");
    b = fourier_basis(st.size / 2, st.kse);
  } else {
    throw CLI::ValidationError("--kind must be pod or fourier");
  }
  io::write_basis(st.out, b);
  echo_config(st.out, cfg);
  std::cout << "wrote " << b.size() << "-mode " << st.kind << " basis to " << st.out << "\n";
  return 0;
}

int run_project(CliState& st) {
  const auto field = io::read_field(st.field_path);
  const auto basis = io::read_basis(st.basis_path);
  const auto series = project(field, basis);
  io::write_series(st.out, series);
  if (st.csv) io::write_series_csv(st.out + ".csv", series);
  std::cout << "wrote " << series.n_times() << " samples of " << series.size()
            << " amplitudes to " << st.out << "\n";
  return 0;
}

int run_galerkin(CliState& st) {
  st.kse.validate();
  QuadraticModel model;
  RunConfig cfg;
  cfg.kse = st.kse;
  if (st.fourier_pairs > 0) {
    model = fourier_galerkin(st.fourier_pairs, st.kse);
    cfg.basis_kind = "fourier";
    cfg.basis_size = 2 * st.fourier_pairs;
  } else {
    if (st.basis_path.empty())
      throw CLI::ValidationError("need --fourier-pairs or --basis");
    const auto basis = io::read_basis(st.basis_path);
    model = pod_galerkin(basis, st.kse);
    cfg.basis_kind = "pod";
    cfg.basis_size = basis.size();
  }
  if (st.threshold_frac >= 0.0) {
    model = threshold_model(model, st.threshold_frac);
    const auto empty_eqs = equations_without_terms(model);
    if (!empty_eqs.empty()) {
      std::cerr << "warning: thresholding left equation(s) with no drift terms:";
      for (int e : empty_eqs) std::cerr << ' ' << e + 1;
      std::cerr << " (pure noise)\n";
    }
    if (!st.refit_series.empty()) {
      const auto series = io::read_series(st.refit_series);
      const auto lib = build_library(model.n);
      FitOptions opts;
      opts.derivative_scheme = parse_scheme(st.scheme);
      auto refit = fit_mle(structure_of_model(model, lib), lib, series, opts);
      refit.metadata = ModelTag::thresholded;
      model = refit;
    }
    cfg.strategy = "magnitude_threshold";
    cfg.strategy_value = st.threshold_frac;
  }
  io::write_model(st.out, model);
  if (st.csv) io::write_model_csv(st.out + ".csv", model);
  echo_config(st.out, cfg);
  std::cout << "wrote model with " << model.term_count() << " terms to " << st.out << "\n";
  return 0;
}

int run_centropy(CliState& st) {
  const auto series = io::read_series(st.series_path);
  const auto lib = build_library(series.size());
  const auto cem =
      causation_entropy_matrix(lib, series, parse_scheme(st.scheme), st.stride);
  io::write_matrix(st.out, cem.values);
  io::write_matrix_csv(st.out + ".csv", cem.values);

  RunConfig cfg;
  cfg.derivative_scheme = st.scheme;
  cfg.centropy_stride = st.stride;
  int strategies = (st.theta >= 0.0) + (st.global_sparsity >= 0.0) + (st.per_eq_sparsity >= 0.0);
  if (strategies > 1) throw CLI::ValidationError("choose at most one selection strategy");
  if (strategies == 1) {
    ModelStructure sel;
    if (st.theta >= 0.0) {
      sel = select_structure(cem, SelectStrategy::global_threshold, st.theta);
      cfg.strategy = "global_threshold";
      cfg.strategy_value = st.theta;
    } else if (st.global_sparsity >= 0.0) {
      sel = select_structure(cem, SelectStrategy::global_sparsity, st.global_sparsity);
      cfg.strategy = "global_sparsity";
      cfg.strategy_value = st.global_sparsity;
    } else {
      sel = select_structure(cem, SelectStrategy::per_equation_sparsity, st.per_eq_sparsity);
      cfg.strategy = "per_equation_sparsity";
      cfg.strategy_value = st.per_eq_sparsity;
    }
    const std::string sp = st.structure_out.empty() ? st.out + ".structure.crom" : st.structure_out;
    io::write_matrix(sp, sel.mask.cast<double>().matrix());
    std::cout << "selected " << sel.count() << " terms -> " << sp << "\n";
  }
  echo_config(st.out, cfg);
  std::cout << "wrote " << cem.n() << "x" << cem.M() << " causation matrix to " << st.out
            << " (+.csv)\n";
  return 0;
}

int run_rom_sim(CliState& st) {
  const auto model = io::read_model(st.model_path);
  Eigen::VectorXd a0 = Eigen::VectorXd::Zero(model.n);
  if (!st.a0_series.empty()) {
    const auto s = io::read_series(st.a0_series);
    if (s.size() != model.n) throw InvalidInput("a0 series dimension does not match model");
    const long col = st.a0_col < 0 ? s.n_times() - 1 : st.a0_col;
    if (col >= s.n_times()) throw InvalidInput("a0 column out of range");
    a0 = s.values.col(col);
  }
  const auto series =
      simulate_model(model, a0, st.t_end, st.sim_dt, st.seed, st.save_stride, st.t_start_save);
  io::write_series(st.out, series);
  if (st.csv) io::write_series_csv(st.out + ".csv", series);
  RunConfig cfg;
  cfg.seed_sim = st.seed;
  echo_config(st.out, cfg);
  std::cout << "wrote " << series.n_times() << " samples to " << st.out << "\n";
  return 0;
}

int run_assimilate(CliState& st) {
  const auto model = io::read_model(st.model_path);
  const auto observed = io::read_series(st.obs_path);
  const int r = observed.size();
  const auto obs = make_observation_stream(observed);
  RegularizationPolicy reg;
  reg.eps_rel = st.eps_rel;
  reg.eps_abs = st.eps_abs;
  const auto result =
      enkbf_run(model, obs, r, st.members, InitPolicy::zero, nullptr, st.seed, reg);
  fs::create_directories(st.out_dir);
  CoefficientSeries mean_series;
  mean_series.times = result.times;
  mean_series.values = result.posterior_mean;
  io::write_series_csv((fs::path(st.out_dir) / "posterior_mean.csv").string(), mean_series);
  mean_series.values = result.posterior_spread;
  io::write_series_csv((fs::path(st.out_dir) / "posterior_spread.csv").string(), mean_series);
  io::write_series((fs::path(st.out_dir) / "posterior_mean.crom").string(),
                   [&] {
                     CoefficientSeries s;
                     s.times = result.times;
                     s.values = result.posterior_mean;
                     return s;
                   }());
  RunConfig cfg;
  cfg.da_r = r;
  cfg.da_p = st.members;
  cfg.da_eps_rel = st.eps_rel;
  cfg.da_eps_abs = st.eps_abs;
  cfg.seed_da = st.seed;
  cfg.out_dir = st.out_dir;
  io::write_file((fs::path(st.out_dir) / "config.cfg").string(), cfg.to_text());
  std::cout << "assimilated " << model.n - r << " hidden modes over "
            << result.times[result.times.size() - 1] << " time units -> " << st.out_dir << "\n";
  return 0;
}

int run_stats(CliState& st) {
  fs::create_directories(st.out_dir);
  const fs::path dir(st.out_dir);
  CoefficientSeries series;
  Eigen::VectorXd energy;
  Eigen::VectorXd times;
  if (!st.series_path.empty()) {
    series = io::read_series(st.series_path);
    energy = series.values.colwise().squaredNorm();
    times = series.times;
  } else if (!st.field_path.empty()) {
    const auto field = io::read_field(st.field_path);
    energy = kinetic_energy(field);
    times = field.times;
  } else {
    throw CLI::ValidationError("stats needs --series or --field");
  }
  const double t0 = st.win_begin;
  const double t1 = st.win_end < 0 ? times[times.size() - 1] : st.win_end;

  // Windowed kinetic-energy diagnostics.
  std::vector<long> keep;
  for (long j = 0; j < times.size(); ++j)
    if (times[j] >= t0 - 1e-12 && times[j] <= t1 + 1e-12) keep.push_back(j);
  if (keep.size() < 3) throw InvalidInput("stats: window selects fewer than 3 samples");
  Eigen::VectorXd e_win(keep.size()), t_win(keep.size());
  for (std::size_t j = 0; j < keep.size(); ++j) {
    e_win[j] = energy[keep[j]];
    t_win[j] = times[keep[j]];
  }

  const auto hist = pdf_estimate(e_win, st.bins);
  Eigen::MatrixXd pdf_csv(hist.bins(), 2);
  for (int b = 0; b < hist.bins(); ++b) {
    pdf_csv(b, 0) = hist.center(b);
    pdf_csv(b, 1) = hist.density[b];
  }
  io::write_matrix_csv((dir / "energy_pdf.csv").string(), pdf_csv, {"E", "density"});
  SvgPlot pdf_plot("Kinetic energy PDF", "E", "density");
  pdf_plot.add_line(pdf_csv.col(0), pdf_csv.col(1), "#1f77b4");
  pdf_plot.save((dir / "energy_pdf.svg").string());

  const int lags = std::min<long>(st.acf_lags, e_win.size() - 1);
  const Eigen::VectorXd correlation = acf(e_win, lags);
  Eigen::MatrixXd acf_csv(lags + 1, 2);
  const double dt_est = (t_win[t_win.size() - 1] - t_win[0]) / (t_win.size() - 1);
  for (int l = 0; l <= lags; ++l) {
    acf_csv(l, 0) = l * dt_est;
    acf_csv(l, 1) = correlation[l];
  }
  io::write_matrix_csv((dir / "energy_acf.csv").string(), acf_csv, {"lag", "acf"});
  SvgPlot acf_plot("Kinetic energy ACF", "lag", "acf");
  acf_plot.add_line(acf_csv.col(0), acf_csv.col(1), "#1f77b4");
  acf_plot.save((dir / "energy_acf.svg").string());

  const auto extrema = local_extrema(e_win);
  Eigen::MatrixXd ext_csv(extrema.size(), 1);
  for (std::size_t j = 0; j < extrema.size(); ++j) ext_csv(j, 0) = extrema[j];
  io::write_matrix_csv((dir / "energy_extrema.csv").string(), ext_csv, {"E"});

  if (!st.series_path.empty()) {
    const auto spec = energy_spectrum(series, t0, t1, series.size() % 2 == 0);
    Eigen::MatrixXd spec_csv(spec.energy.size(), 2);
    for (int k = 0; k < spec.energy.size(); ++k) {
      spec_csv(k, 0) = k + 1;
      spec_csv(k, 1) = spec.energy[k];
    }
    io::write_matrix_csv((dir / "spectrum.csv").string(), spec_csv, {"mode", "E_k"});
    SvgPlot spec_plot("Modal energy spectrum", "mode", "E_k");
    spec_plot.set_log_y(true);
    spec_plot.add_line(spec_csv.col(0), spec_csv.col(1), "#1f77b4");
    spec_plot.save((dir / "spectrum.svg").string());
  }

  if (!st.model_path.empty()) {
    const auto model = io::read_model(st.model_path);
    Eigen::VectorXd a0;
    if (!st.series_path.empty() && series.size() == model.n) {
      a0 = series.values.col(series.n_times() - 1);
    } else {
      a0 = Eigen::VectorXd::Constant(model.n, 1e-3);
    }
    const auto rep = lyapunov_spectrum(model, st.lyap_k, st.lyap_window, st.sim_dt,
                                       st.lyap_renorm, a0, 1e3);
    Eigen::MatrixXd lyap_csv(rep.exponents.size(), 1);
    lyap_csv.col(0) = rep.exponents;
    io::write_matrix_csv((dir / "lyapunov.csv").string(), lyap_csv, {"exponent"});
    std::cout << "leading exponents:";
    for (int k = 0; k < rep.exponents.size(); ++k) std::cout << ' ' << rep.exponents[k];
    std::cout << "\n";
  }
  std::cout << "stats written to " << st.out_dir << "\n";
  return 0;
}

int run_repro(CliState& st) {
  RunConfig cfg = repro::profile(st.experiment, st.desk, st.seed, st.out_dir, st.csv);
  if (st.experiment == "fourier-recovery") {
    repro::fourier_recovery(cfg);
  } else if (st.experiment == "pod-hierarchy") {
    repro::pod_hierarchy(cfg);
  } else {
    repro::da_partial(cfg, st.reuse_dir);
  }
  std::ifstream summary(fs::path(st.out_dir) / "summary.txt");
  std::cout << summary.rdbuf();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  std::setlocale(LC_ALL, "C");
  CLI::App app{"sparse causation-entropy reduced-order modeling of the Kuramoto-Sivashinsky equation"};
  app.require_subcommand(1);
  CliState st;

  auto* sim = app.add_subcommand("simulate", "solve the KSE and write a field file");
  add_kse_options(sim, &st.kse);
  sim->add_option("--u0", st.u0, "initial state: cos, zero, or a field file");
  sim->add_option("--t-end", st.t_end, "final time")->required();
  sim->add_option("--save-stride", st.save_stride, "steps between saved snapshots");
  sim->add_option("--t-start-save", st.t_start_save, "first saved time");
  sim->add_option("-o,--out", st.out, "output field file")->required();
  sim->add_flag("--csv", st.csv, "also write a CSV mirror");

  auto* bas = app.add_subcommand("basis", "build a Fourier or POD basis");
  add_kse_options(bas, &st.kse);
  bas->add_option("--field", st.field_path, "snapshot field file (pod)");
  bas->add_option("--kind", st.kind, "pod | fourier");
  bas->add_option("--size", st.size, "number of modes");
  bas->add_option("--stride", st.stride, "snapshot stride for the POD covariance");
  bas->add_option("-o,--out", st.out, "output basis file")->required();

  auto* proj = app.add_subcommand("project", "project a field onto a basis");
  proj->add_option("--field", st.field_path)->required();
  proj->add_option("--basis", st.basis_path)->required();
  proj->add_option("-o,--out", st.out, "output series file")->required();
  proj->add_flag("--csv", st.csv);

  auto* gal = app.add_subcommand("galerkin", "construct a Galerkin model");
  add_kse_options(gal, &st.kse);
  gal->add_option("--fourier-pairs", st.fourier_pairs, "cos/sin pairs (analytic model)");
  gal->add_option("--basis", st.basis_path, "POD basis file (data-driven model)");
  gal->add_option("--threshold", st.threshold_frac,
                  "drop smallest-coefficient terms to this sparsity fraction");
  gal->add_option("--refit-series", st.refit_series,
                  "training series; re-estimate surviving coefficients by MLE");
  gal->add_option("--scheme", st.scheme, "derivative scheme for the refit");
  gal->add_option("-o,--out", st.out, "output model file")->required();
  gal->add_flag("--csv", st.csv);

  auto* cen = app.add_subcommand("centropy", "causation-entropy matrix and structure selection");
  cen->add_option("--series", st.series_path)->required();
  cen->add_option("--scheme", st.scheme, "central | forward");
  cen->add_option("--stride", st.stride, "training subsampling stride");
  cen->add_option("--theta", st.theta, "global threshold (bits)");
  cen->add_option("--global-sparsity", st.global_sparsity, "global sparsity fraction");
  cen->add_option("--per-eq-sparsity", st.per_eq_sparsity, "per-equation sparsity fraction");
  cen->add_option("--structure-out", st.structure_out, "selected-structure output file");
  cen->add_option("-o,--out", st.out, "output causation-matrix file")->required();

  auto* fit = app.add_subcommand("fit", "maximum-likelihood fit of a selected structure");
  fit->add_option("--series", st.series_path)->required();
  fit->add_option("--structure", st.structure_path)->required();
  fit->add_option("--scheme", st.scheme, "central | forward");
  fit->add_option("--stride", st.stride, "training subsampling stride");
  fit->add_option("-o,--out", st.out, "output model file")->required();
  fit->add_flag("--csv", st.csv);
  bool fit_constant = false;
  fit->add_flag("--constant", fit_constant, "include a constant forcing column");

  auto* rs = app.add_subcommand("rom-sim", "simulate a quadratic model");
  rs->add_option("--model", st.model_path)->required();
  rs->add_option("--a0-series", st.a0_series, "series file supplying the initial state");
  rs->add_option("--a0-col", st.a0_col, "column of --a0-series (default: last)");
  rs->add_option("--t-end", st.t_end)->required();
  rs->add_option("--dt", st.sim_dt);
  rs->add_option("--seed", st.seed);
  rs->add_option("--save-stride", st.save_stride);
  rs->add_option("--t-start-save", st.t_start_save);
  rs->add_option("-o,--out", st.out, "output series file")->required();
  rs->add_flag("--csv", st.csv);

  auto* as = app.add_subcommand("assimilate", "ensemble Kalman-Bucy filtering of hidden modes");
  as->add_option("--model", st.model_path)->required();
  as->add_option("--obs", st.obs_path, "observed-mode series file")->required();
  as->add_option("--members", st.members, "ensemble size");
  as->add_option("--seed", st.seed);
  as->add_option("--eps-rel", st.eps_rel, "relative ridge on the gain metric");
  as->add_option("--eps-abs", st.eps_abs, "absolute ridge on the gain metric");
  as->add_option("--out", st.out_dir, "output directory")->required();

  auto* stat = app.add_subcommand("stats", "spectra, PDFs, ACFs, extrema, Lyapunov exponents");
  stat->add_option("--series", st.series_path);
  stat->add_option("--field", st.field_path);
  stat->add_option("--model", st.model_path, "model for Lyapunov exponents");
  stat->add_option("--window-begin", st.win_begin);
  stat->add_option("--window-end", st.win_end);
  stat->add_option("--bins", st.bins);
  stat->add_option("--acf-lags", st.acf_lags);
  stat->add_option("--lyapunov-k", st.lyap_k);
  stat->add_option("--lyapunov-window", st.lyap_window);
  stat->add_option("--lyapunov-renorm", st.lyap_renorm);
  stat->add_option("--dt", st.sim_dt);
  stat->add_option("--out", st.out_dir, "output directory")->required();

  auto* rep = app.add_subcommand("repro", "canned end-to-end experiments");
  rep->add_option("experiment", st.experiment, "fourier-recovery | pod-hierarchy | da-partial")
      ->required();
  rep->add_flag("--desk", st.desk, "desk-scale profile (smaller windows and ensembles)");
  rep->add_option("--seed", st.seed);
  rep->add_option("--out", st.out_dir, "output directory")->required();
  rep->add_option("--reuse-dir", st.reuse_dir, "pod-hierarchy outputs to reuse (da-partial)");
  rep->add_flag("--csv", st.csv);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (sim->parsed()) return run_simulate(st);
    if (bas->parsed()) return run_basis(st);
    if (proj->parsed()) return run_project(st);
    if (gal->parsed()) return run_galerkin(st);
    if (cen->parsed()) return run_centropy(st);
    if (fit->parsed()) {
      // flag captured locally above
      const auto series = io::read_series(st.series_path);
      const auto lib = build_library(series.size());
      const Eigen::MatrixXd mask_matrix = io::read_matrix(st.structure_path);
      if (mask_matrix.rows() != lib.n || mask_matrix.cols() != lib.M())
        throw InvalidInput("structure mask has wrong shape for this series");
      ModelStructure structure;
      structure.mask = mask_matrix.array() != 0.0;
      FitOptions opts;
      opts.derivative_scheme = parse_scheme(st.scheme);
      opts.include_constant = fit_constant;
      const auto model = fit_mle(structure, lib, stride_series(series, st.stride), opts);
      io::write_model(st.out, model);
      if (st.csv) io::write_model_csv(st.out + ".csv", model);
      RunConfig cfg;
      cfg.derivative_scheme = st.scheme;
      cfg.train_stride = st.stride;
      cfg.fit_constant = fit_constant;
      echo_config(st.out, cfg);
      std::cout << "wrote fitted model (" << model.term_count() << " terms, noise dim "
                << model.noise.cols() << ") to " << st.out << "\n";
      return 0;
    }
    if (rs->parsed()) return run_rom_sim(st);
    if (as->parsed()) return run_assimilate(st);
    if (stat->parsed()) return run_stats(st);
    if (rep->parsed()) return run_repro(st);
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return 2;
  } catch (const InvalidInput& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
