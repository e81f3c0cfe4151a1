#pragma once
// Fingerprint profile plots: standalone SVG and long-format CSV.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lexfp/fingerprint.hpp"

namespace lexfp {

struct PlotSpec {
  std::vector<Fingerprint> fingerprints;
  std::vector<std::string> axis_terms;
  std::string axis_id;
  std::size_t width_px = 1200;
  std::size_t height_px = 520;
  std::size_t label_every = 1;
  /// nullopt means AUTO (fit to the data). The default keeps plots comparable.
  std::optional<std::pair<double, double>> y_range = std::pair{-1.0, 1.0};

  static PlotSpec from(std::span<const Fingerprint> fingerprints, const LabelAxis& axis);
};

/// Plot area geometry shared by the renderer and by tests that read coordinates back.
struct PlotFrame {
  double left, top, width, height, y_min, y_max;
  double x(std::size_t position, std::size_t count) const;
  double y(double value) const;
};
PlotFrame plot_frame(const PlotSpec& spec);

std::string render_svg(const PlotSpec& spec);
/// term,position,cluster,nmi rows, one per fingerprint per axis position.
std::string export_plot_csv(const PlotSpec& spec);

}  // namespace lexfp
