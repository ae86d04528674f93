#pragma once

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>

namespace crom {

// Real <-> half-spectrum transform of a fixed length with a cached plan.
// Not thread safe; use one instance per thread.
class RealFft {
 public:
  explicit RealFft(int n) : n_(n) { fft_.SetFlag(Eigen::FFT<double>::HalfSpectrum); }

  int size() const { return n_; }
  int spectrum_size() const { return n_ / 2 + 1; }

  void fwd(const Eigen::VectorXd& u, Eigen::VectorXcd& spectrum) {
    fft_.fwd(spectrum, u);
  }

  void inv(const Eigen::VectorXcd& spectrum, Eigen::VectorXd& u) {
    fft_.inv(u, spectrum, n_);
  }

 private:
  int n_;
  Eigen::FFT<double> fft_;
};

}  // namespace crom
