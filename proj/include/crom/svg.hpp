#pragma once

//==============================================================================
// svg.hpp
// Minimal deterministic SVG line/scatter charts for the stats and repro
// outputs. No external plotting dependency.
//==============================================================================

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "crom/errors.hpp"
#include "crom/io.hpp"

namespace crom {

class SvgPlot {
 public:
  SvgPlot(std::string title, std::string x_label, std::string y_label, int width = 900,
          int height = 540)
      : title_(std::move(title)),
        x_label_(std::move(x_label)),
        y_label_(std::move(y_label)),
        width_(width),
        height_(height) {}

  void set_log_y(bool on) { log_y_ = on; }

  void add_line(const Eigen::VectorXd& x, const Eigen::VectorXd& y, const std::string& color,
                const std::string& label = "") {
    add(x, y, color, label, false);
  }

  void add_scatter(const Eigen::VectorXd& x, const Eigen::VectorXd& y, const std::string& color,
                   const std::string& label = "") {
    add(x, y, color, label, true);
  }

  // Horizontal reference line (threshold markers).
  void add_hline(double y, const std::string& color, const std::string& label = "") {
    hlines_.push_back({y, color, label});
  }

  void save(const std::string& path) const { io::write_file(path, render()); }

  std::string render() const {
    const double ml = 70, mr = 20, mt = 40, mb = 55;
    const double pw = width_ - ml - mr, ph = height_ - mt - mb;

    double x_lo = 0, x_hi = 1, y_lo = 0, y_hi = 1;
    bool any = false;
    auto widen = [&](double x, double y) {
      if (log_y_ && !(y > 0.0)) return;
      const double ty = log_y_ ? std::log10(y) : y;
      if (!std::isfinite(x) || !std::isfinite(ty)) return;
      if (!any) {
        x_lo = x_hi = x;
        y_lo = y_hi = ty;
        any = true;
      } else {
        x_lo = std::min(x_lo, x);
        x_hi = std::max(x_hi, x);
        y_lo = std::min(y_lo, ty);
        y_hi = std::max(y_hi, ty);
      }
    };
    for (const auto& s : series_)
      for (Eigen::Index i = 0; i < s.x.size(); ++i) widen(s.x[i], s.y[i]);
    for (const auto& h : hlines_) widen(any ? x_lo : 0.0, h.y);
    if (!any) {
      x_lo = y_lo = 0;
      x_hi = y_hi = 1;
    }
    if (x_hi <= x_lo) x_hi = x_lo + 1;
    if (y_hi <= y_lo) y_hi = y_lo + (log_y_ ? 1.0 : std::max(1.0, std::abs(y_lo)));
    const double x_pad = 0.02 * (x_hi - x_lo), y_pad = 0.05 * (y_hi - y_lo);
    x_lo -= x_pad; x_hi += x_pad; y_lo -= y_pad; y_hi += y_pad;

    auto px = [&](double x) { return ml + (x - x_lo) / (x_hi - x_lo) * pw; };
    auto py = [&](double y) {
      const double ty = log_y_ ? std::log10(std::max(y, 1e-300)) : y;
      return mt + ph - (ty - y_lo) / (y_hi - y_lo) * ph;
    };
    auto fmt = [](double v) {
      char b[32];
      std::snprintf(b, sizeof(b), "%.4g", v);
      return std::string(b);
    };

    std::ostringstream os;
    os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << width_ << "' height='" << height_
       << "' viewBox='0 0 " << width_ << " " << height_ << "'>\n";
    os << "<rect width='100%' height='100%' fill='white'/>\n";
    os << "<text x='" << width_ / 2 << "' y='24' text-anchor='middle' font-size='16' "
          "font-family='sans-serif'>" << title_ << "</text>\n";

    // axes + ticks
    os << "<rect x='" << ml << "' y='" << mt << "' width='" << pw << "' height='" << ph
       << "' fill='none' stroke='black'/>\n";
    const int n_ticks = 6;
    for (int t = 0; t <= n_ticks; ++t) {
      const double fx = x_lo + (x_hi - x_lo) * t / n_ticks;
      const double fy = y_lo + (y_hi - y_lo) * t / n_ticks;
      os << "<line x1='" << px(fx) << "' y1='" << mt + ph << "' x2='" << px(fx) << "' y2='"
         << mt + ph + 5 << "' stroke='black'/>\n";
      os << "<text x='" << px(fx) << "' y='" << mt + ph + 20
         << "' text-anchor='middle' font-size='11' font-family='sans-serif'>" << fmt(fx)
         << "</text>\n";
      const double yv = log_y_ ? std::pow(10.0, fy) : fy;
      os << "<line x1='" << ml - 5 << "' y1='" << mt + ph - ph * t / n_ticks << "' x2='" << ml
         << "' y2='" << mt + ph - ph * t / n_ticks << "' stroke='black'/>\n";
      os << "<text x='" << ml - 8 << "' y='" << mt + ph - ph * t / n_ticks + 4
         << "' text-anchor='end' font-size='11' font-family='sans-serif'>" << fmt(yv)
         << "</text>\n";
    }
    os << "<text x='" << ml + pw / 2 << "' y='" << height_ - 12
       << "' text-anchor='middle' font-size='13' font-family='sans-serif'>" << x_label_
       << "</text>\n";
    os << "<text x='16' y='" << mt + ph / 2
       << "' text-anchor='middle' font-size='13' font-family='sans-serif' transform='rotate(-90 16 "
       << mt + ph / 2 << ")'>" << y_label_ << "</text>\n";

    for (const auto& h : hlines_) {
      os << "<line x1='" << ml << "' y1='" << py(h.y) << "' x2='" << ml + pw << "' y2='"
         << py(h.y) << "' stroke='" << h.color << "' stroke-dasharray='6,4'/>\n";
    }

    double legend_y = mt + 14;
    for (const auto& s : series_) {
      if (s.scatter) {
        for (Eigen::Index i = 0; i < s.x.size(); ++i) {
          if (log_y_ && !(s.y[i] > 0.0)) continue;
          os << "<circle cx='" << px(s.x[i]) << "' cy='" << py(s.y[i])
             << "' r='1.6' fill='" << s.color << "'/>\n";
        }
      } else {
        os << "<polyline fill='none' stroke='" << s.color << "' stroke-width='1.2' points='";
        for (Eigen::Index i = 0; i < s.x.size(); ++i) {
          if (log_y_ && !(s.y[i] > 0.0)) continue;
          os << px(s.x[i]) << ',' << py(s.y[i]) << ' ';
        }
        os << "'/>\n";
      }
      if (!s.label.empty()) {
        os << "<rect x='" << ml + pw - 160 << "' y='" << legend_y - 9 << "' width='12' height='4' fill='"
           << s.color << "'/>\n";
        os << "<text x='" << ml + pw - 144 << "' y='" << legend_y
           << "' font-size='12' font-family='sans-serif'>" << s.label << "</text>\n";
        legend_y += 16;
      }
    }
    os << "</svg>\n";
    return os.str();
  }

 private:
  struct Series {
    Eigen::VectorXd x, y;
    std::string color, label;
    bool scatter;
  };
  struct HLine {
    double y;
    std::string color, label;
  };

  void add(const Eigen::VectorXd& x, const Eigen::VectorXd& y, const std::string& color,
           const std::string& label, bool scatter) {
    if (x.size() != y.size()) throw InvalidInput("SvgPlot: x/y size mismatch");
    series_.push_back({x, y, color, label, scatter});
  }

  std::string title_, x_label_, y_label_;
  int width_, height_;
  bool log_y_ = false;
  std::vector<Series> series_;
  std::vector<HLine> hlines_;
};

}  // namespace crom
