#pragma once

// Self-contained SVG line and scatter plots.

#include <filesystem>
#include <string>
#include <vector>

#include "qxfer/experiment.hpp"

namespace qxfer {

struct PlotStyle {
  std::string title;
  std::string x_label = "t";
  std::string y_label;
  std::vector<std::string> columns;  // series columns to draw, one polyline each
  int width = 720;
  int height = 480;
};

/// SVG document for the chosen series columns. Throws std::invalid_argument
/// when there is nothing to draw.
std::string render_series_svg(const TimeSeries& ts, const PlotStyle& style);

/// T_target against 1/c² with the fitted line.
std::string render_sweep_svg(const SweepResult& sweep, const PlotStyle& style);

/// Renders and writes. No file is created if rendering fails.
void emit_plot(const TimeSeries& ts, const PlotStyle& style, const std::filesystem::path& path);
void emit_plot(const SweepResult& sweep, const PlotStyle& style,
               const std::filesystem::path& path);

PlotStyle decay_plot_style();
PlotStyle mi_plot_style();
PlotStyle sweep_plot_style(double target);

}  // namespace qxfer
