#pragma once

//==============================================================================
// config.hpp
// Flat `key = value` run configuration with [section] headers. Every pipeline
// run serializes its fully resolved configuration next to its outputs, and a
// run restarted from that file reproduces the outputs bit for bit.
//==============================================================================

#include <cmath>
#include <cstdint>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "crom/errors.hpp"
#include "crom/io.hpp"
#include "crom/kse.hpp"

namespace crom {

struct RunConfig {
  // [kse]
  KseParams kse;
  std::string u0 = "cos";  // "cos" or a field-file path holding the start state

  // [basis]
  std::string basis_kind = "fourier";  // fourier | pod
  int basis_size = 20;                 // modes (fourier: 2N with N pairs)
  long pod_stride = 10;                // snapshot stride for the POD covariance

  // [training]
  double train_start = 1e4;
  double train_end = 5e4;
  long train_stride = 1;    // subsampling for fitting
  long centropy_stride = 10;  // subsampling for the causation-entropy pass

  // [library]
  std::string derivative_scheme = "central";

  // [selection]
  std::string strategy = "global_threshold";  // | global_sparsity | per_equation_sparsity
  double strategy_value = 0.65;

  // [fit]
  bool fit_constant = false;

  // [da]
  int da_r = 3;
  int da_p = 500;
  double da_window = 2000.0;
  double da_eps_abs = 1e-12;
  double da_eps_rel = 1e-6;

  // [seeds]
  std::uint64_t seed_sim = 1;
  std::uint64_t seed_da = 2;

  // [output]
  std::string out_dir = ".";
  bool csv = false;

  std::string to_text() const {
    std::ostringstream os;
    auto num = [](double v) { return io::format_double(v); };
    os << "[kse]\n";
    os << "nu = " << num(kse.nu) << "\n";
    os << "D = " << num(kse.D) << "\n";
    os << "L = " << num(kse.L) << "\n";
    os << "gamma = " << num(kse.gamma) << "\n";
    os << "dt = " << num(kse.dt) << "\n";
    os << "nx = " << kse.nx << "\n";
    os << "u0 = " << u0 << "\n";
    os << "\n[basis]\n";
    os << "kind = " << basis_kind << "\n";
    os << "size = " << basis_size << "\n";
    os << "pod_stride = " << pod_stride << "\n";
    os << "\n[training]\n";
    os << "start = " << num(train_start) << "\n";
    os << "end = " << num(train_end) << "\n";
    os << "stride = " << train_stride << "\n";
    os << "centropy_stride = " << centropy_stride << "\n";
    os << "\n[library]\n";
    os << "derivative_scheme = " << derivative_scheme << "\n";
    os << "\n[selection]\n";
    os << "strategy = " << strategy << "\n";
    os << "value = " << num(strategy_value) << "\n";
    os << "\n[fit]\n";
    os << "constant = " << (fit_constant ? "true" : "false") << "\n";
    os << "\n[da]\n";
    os << "r = " << da_r << "\n";
    os << "p = " << da_p << "\n";
    os << "window = " << num(da_window) << "\n";
    os << "eps_abs = " << num(da_eps_abs) << "\n";
    os << "eps_rel = " << num(da_eps_rel) << "\n";
    os << "\n[seeds]\n";
    os << "sim = " << seed_sim << "\n";
    os << "da = " << seed_da << "\n";
    os << "\n[output]\n";
    os << "dir = " << out_dir << "\n";
    os << "csv = " << (csv ? "true" : "false") << "\n";
    return os.str();
  }

  static RunConfig from_text(const std::string& text) {
    RunConfig c;
    std::istringstream is(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(is, line)) {
      ++lineno;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      auto trim = [](std::string s) {
        const auto b = s.find_first_not_of(" \t\r");
        if (b == std::string::npos) return std::string();
        const auto e = s.find_last_not_of(" \t\r");
        return s.substr(b, e - b + 1);
      };
      line = trim(line);
      if (line.empty()) continue;
      if (line.front() == '[') {
        if (line.back() != ']')
          throw IoError("config line " + std::to_string(lineno) + ": malformed section");
        section = line.substr(1, line.size() - 2);
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string::npos)
        throw IoError("config line " + std::to_string(lineno) + ": expected key = value");
      const std::string key = trim(line.substr(0, eq));
      const std::string value = trim(line.substr(eq + 1));
      if (!c.apply(section, key, value))
        throw IoError("config line " + std::to_string(lineno) + ": unknown key [" + section +
                      "] " + key);
    }
    return c;
  }

 private:
  bool apply(const std::string& section, const std::string& key, const std::string& value) {
    auto d = [&value]() { return std::stod(value); };
    auto i = [&value]() { return std::stol(value); };
    auto u = [&value]() { return std::stoull(value); };
    auto b = [&value]() { return value == "true" || value == "1"; };
    if (section == "kse") {
      if (key == "nu") { kse.nu = d(); return true; }
      if (key == "D") { kse.D = d(); return true; }
      if (key == "L") { kse.L = d(); return true; }
      if (key == "gamma") { kse.gamma = d(); return true; }
      if (key == "dt") { kse.dt = d(); return true; }
      if (key == "nx") { kse.nx = static_cast<int>(i()); return true; }
      if (key == "u0") { u0 = value; return true; }
    } else if (section == "basis") {
      if (key == "kind") { basis_kind = value; return true; }
      if (key == "size") { basis_size = static_cast<int>(i()); return true; }
      if (key == "pod_stride") { pod_stride = i(); return true; }
    } else if (section == "training") {
      if (key == "start") { train_start = d(); return true; }
      if (key == "end") { train_end = d(); return true; }
      if (key == "stride") { train_stride = i(); return true; }
      if (key == "centropy_stride") { centropy_stride = i(); return true; }
    } else if (section == "library") {
      if (key == "derivative_scheme") { derivative_scheme = value; return true; }
    } else if (section == "selection") {
      if (key == "strategy") { strategy = value; return true; }
      if (key == "value") { strategy_value = d(); return true; }
    } else if (section == "fit") {
      if (key == "constant") { fit_constant = b(); return true; }
    } else if (section == "da") {
      if (key == "r") { da_r = static_cast<int>(i()); return true; }
      if (key == "p") { da_p = static_cast<int>(i()); return true; }
      if (key == "window") { da_window = d(); return true; }
      if (key == "eps_abs") { da_eps_abs = d(); return true; }
      if (key == "eps_rel") { da_eps_rel = d(); return true; }
    } else if (section == "seeds") {
      if (key == "sim") { seed_sim = u(); return true; }
      if (key == "da") { seed_da = u(); return true; }
    } else if (section == "output") {
      if (key == "dir") { out_dir = value; return true; }
      if (key == "csv") { csv = b(); return true; }
    }
    return false;
  }
};

}  // namespace crom
