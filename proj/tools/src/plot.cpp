// Copyright 2026 The mfpma Authors.
// SPDX-License-Identifier: Apache-2.0

#include "mfpma_tools/plot.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "mfpma/errors.hpp"
#include "mfpma/sim.hpp"
#include "mfpma_tools/io.hpp"

namespace mfpma::tools {
namespace {

constexpr double kWidth = 640, kHeight = 420;
constexpr double kLeft = 70, kRight = 20, kTop = 30, kBottom = 50;

int first_column(const CsvTable& t, std::initializer_list<const char*> names) {
  for (const char* n : names) {
    const int c = t.column(n);
    if (c >= 0) return c;
  }
  return -1;
}

std::string fmt(double v, int precision = 6) {
  std::ostringstream os;
  os.precision(precision);
  os << v;
  return os.str();
}

}  // namespace

PlotSeries plot_series(const std::string& csv_path, PlotKind kind) {
  const CsvTable t = read_csv(csv_path);
  PlotSeries s;
  if (kind == PlotKind::kConvergence) {
    const int cx = first_column(t, {"t", "epoch"});
    const int cy = first_column(t, {"residual", "dist_to_exact"});
    if (cx < 0 || cy < 0) {
      throw ValidationError(csv_path +
                            ": convergence plot needs columns t|epoch and "
                            "residual|dist_to_exact");
    }
    // Average rows sharing an x value (one row per seed in learning runs).
    std::map<double, std::pair<double, int>> acc;
    for (const auto& r : t.rows) {
      if (!std::isfinite(r[cx]) || !std::isfinite(r[cy]) || r[cy] <= 0.0) {
        continue;
      }
      auto& a = acc[r[cx]];
      a.first += r[cy];
      ++a.second;
    }
    for (const auto& [x, a] : acc) {
      s.x.push_back(x);
      s.y.push_back(a.first / a.second);
    }
    if (s.x.empty()) throw ValidationError(csv_path + ": no plottable rows");
    return s;
  }

  const int cx = t.column("N");
  const int cy = t.column("mean");
  if (cx < 0 || cy < 0) {
    throw ValidationError(csv_path + ": bias_scaling plot needs columns N, mean");
  }
  std::vector<double> lx, ly;
  for (const auto& r : t.rows) {
    if (!(r[cx] > 0.0) || !(r[cy] > 0.0)) continue;
    s.x.push_back(r[cx]);
    s.y.push_back(r[cy]);
    lx.push_back(std::log(r[cx]));
    ly.push_back(std::log(r[cy]));
  }
  if (s.x.size() < 2) {
    throw ValidationError(csv_path + ": need at least two positive rows");
  }
  s.slope = fit_slope(lx, ly);
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  s.intercept = (my - s.slope * mx) / static_cast<double>(lx.size());
  return s;
}

std::string render_svg(const PlotSeries& s, PlotKind kind) {
  const bool logx = kind == PlotKind::kBiasScaling;
  auto tx = [&](double x) { return logx ? std::log10(x) : x; };
  auto ty = [](double y) { return std::log10(y); };

  double x0 = tx(s.x.front()), x1 = x0, y0 = ty(s.y.front()), y1 = y0;
  for (std::size_t i = 0; i < s.x.size(); ++i) {
    x0 = std::min(x0, tx(s.x[i]));
    x1 = std::max(x1, tx(s.x[i]));
    y0 = std::min(y0, ty(s.y[i]));
    y1 = std::max(y1, ty(s.y[i]));
  }
  if (x1 == x0) x1 = x0 + 1;
  y0 = std::floor(y0);
  y1 = std::ceil(y1);
  if (y1 == y0) y1 = y0 + 1;
  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (tx(x) - x0) / (x1 - x0) * pw; };
  auto py = [&](double y) {
    return kTop + (1.0 - (ty(y) - y0) / (y1 - y0)) * ph;
  };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
    << "\" height=\"" << kHeight << "\" font-family=\"sans-serif\" "
    << "font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw
    << "\" height=\"" << ph << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int d = static_cast<int>(y0); d <= static_cast<int>(y1); ++d) {
    const double y = kTop + (1.0 - (d - y0) / (y1 - y0)) * ph;
    o << "<line x1=\"" << kLeft - 4 << "\" x2=\"" << kLeft << "\" y1=\"" << y
      << "\" y2=\"" << y << "\" stroke=\"black\"/>\n";
    o << "<text x=\"" << kLeft - 8 << "\" y=\"" << y + 4
      << "\" text-anchor=\"end\">1e" << d << "</text>\n";
  }
  o << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kHeight - 12
    << "\" text-anchor=\"middle\">"
    << (kind == PlotKind::kConvergence ? "iteration" : "N (log scale)")
    << "</text>\n";
  for (double x : {s.x.front(), s.x.back()}) {
    o << "<text x=\"" << px(x) << "\" y=\"" << kTop + ph + 16
      << "\" text-anchor=\"middle\">" << fmt(x) << "</text>\n";
  }
  o << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"2\" "
       "points=\"";
  for (std::size_t i = 0; i < s.x.size(); ++i) {
    o << (i ? " " : "") << px(s.x[i]) << ',' << py(s.y[i]);
  }
  o << "\"/>\n";
  if (kind == PlotKind::kBiasScaling) {
    auto fit = [&](double x) {
      return std::exp(s.intercept + s.slope * std::log(x));
    };
    o << "<line x1=\"" << px(s.x.front()) << "\" y1=\"" << py(fit(s.x.front()))
      << "\" x2=\"" << px(s.x.back()) << "\" y2=\"" << py(fit(s.x.back()))
      << "\" stroke=\"#d62728\" stroke-dasharray=\"6 4\"/>\n";
    std::ostringstream slope;
    slope.setf(std::ios::fixed);
    slope.precision(3);
    slope << s.slope;
    o << "<text x=\"" << kWidth - kRight - 8 << "\" y=\"" << kTop + 18
      << "\" text-anchor=\"end\">slope = " << slope.str() << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

void write_plot(const std::string& csv_path, PlotKind kind,
                const std::string& out) {
  const PlotSeries s = plot_series(csv_path, kind);
  std::ostringstream data;
  data.precision(17);
  if (kind == PlotKind::kConvergence) {
    data << "x,y\n";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      data << s.x[i] << ',' << s.y[i] << '\n';
    }
  } else {
    data << "N,mean,fitted,slope\n";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      data << s.x[i] << ',' << s.y[i] << ','
           << std::exp(s.intercept + s.slope * std::log(s.x[i])) << ','
           << s.slope << '\n';
    }
  }
  atomic_write(out + ".csv", data.str());
  atomic_write(out, render_svg(s, kind));
}

}  // namespace mfpma::tools
