// Copyright 2026 The mfpma Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

namespace mfpma::tools {

enum class PlotKind { kConvergence, kBiasScaling };

struct PlotSeries {
  std::vector<double> x, y;
  double slope = 0.0;  // bias_scaling only
  double intercept = 0.0;
};

// Reads the series a plot of the given kind would draw.
//   convergence:  x = t | epoch, y = residual | dist_to_exact (mean per x)
//   bias_scaling: x = N, y = mean, with a least-squares log-log fit
// Throws ValidationError on schema mismatch or when no usable row remains.
PlotSeries plot_series(const std::string& csv_path, PlotKind kind);

// Writes the SVG to `out` and the plotted data to `out + ".csv"`.
void write_plot(const std::string& csv_path, PlotKind kind,
                const std::string& out);

std::string render_svg(const PlotSeries& s, PlotKind kind);

}  // namespace mfpma::tools
