#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "driveclone/models/artifact.hpp"
#include "driveclone/pipeline.hpp"

namespace driveclone::eval {

/// Predicted and true (a_x, a_y) over frame index for one segment.
struct PlotSeries {
  std::vector<std::int64_t> frame;
  std::vector<double> pred_x, true_x, pred_y, true_y;

  std::size_t size() const { return frame.size(); }
  /// Throws ValidationError when the columns differ in length.
  void validate() const;
};

struct PlotSpec {
  std::string title;
  double y_min = -2.0;
  double y_max = 2.0;
  int width = 800;
  int panel_height = 240;
};

struct PlotOutput {
  std::string svg;
  std::string csv;
};

/// Two stacked panels (a_x over a_y). Values outside [y_min, y_max] are drawn
/// on the boundary with a triangle marker; the CSV keeps them unclamped.
std::string render_svg(const PlotSeries& series, const PlotSpec& spec);
/// frame,pred_x,true_x,pred_y,true_y with shortest round-trip reals.
std::string plot_csv(const PlotSeries& series);
PlotSeries parse_plot_csv(const std::string& text);
PlotOutput render_plot(const PlotSeries& series, const PlotSpec& spec);

/// One point per window of `segment_id`: the first horizon step, placed at
/// the frame it predicts. Windows are raw (unnormalized).
PlotSeries segment_series(const models::Predictor& predictor,
                          std::span<const pipeline::WindowSample> windows,
                          const std::string& segment_id);

}  // namespace driveclone::eval
