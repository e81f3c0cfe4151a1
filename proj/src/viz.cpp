#include "lexfp/viz.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "lexfp/error.hpp"
#include "lexfp/labeling.hpp"

namespace lexfp {
namespace {

constexpr double kMarginLeft = 60.0;
constexpr double kMarginRight = 220.0;  // legend column
constexpr double kMarginTop = 20.0;
constexpr double kMarginBottom = 140.0;  // rotated tick labels

constexpr const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
constexpr std::size_t kPaletteSize = sizeof kPalette / sizeof kPalette[0];
constexpr const char* kDashes[] = {"", "6,3", "2,2", "8,3,2,3"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

void validate(const PlotSpec& spec) {
  if (spec.axis_terms.empty()) throw ValidationError("plot: empty label axis");
  if (spec.fingerprints.empty()) throw ValidationError("plot: no fingerprints");
  if (spec.label_every == 0) throw ValidationError("plot: label_every must be at least 1");
  if (spec.width_px == 0 || spec.height_px == 0) throw ValidationError("plot: dimensions must be positive");
  for (const auto& fp : spec.fingerprints) {
    if (fp.axis_id != spec.axis_id || fp.values.size() != spec.axis_terms.size()) {
      throw ValidationError("plot: fingerprint '" + fp.ref() + "' is on a different axis");
    }
  }
  if (spec.y_range && !(spec.y_range->first < spec.y_range->second)) {
    throw ValidationError("plot: y range must be increasing");
  }
}

}  // namespace

PlotSpec PlotSpec::from(std::span<const Fingerprint> fingerprints, const LabelAxis& axis) {
  PlotSpec spec;
  spec.fingerprints.assign(fingerprints.begin(), fingerprints.end());
  spec.axis_terms = axis.order;
  spec.axis_id = axis.id();
  return spec;
}

double PlotFrame::x(std::size_t position, std::size_t count) const {
  if (count <= 1) return left + width / 2.0;
  return left + width * static_cast<double>(position) / static_cast<double>(count - 1);
}

double PlotFrame::y(double value) const { return top + height * (y_max - value) / (y_max - y_min); }

PlotFrame plot_frame(const PlotSpec& spec) {
  PlotFrame f{};
  f.left = kMarginLeft;
  f.top = kMarginTop;
  f.width = std::max(1.0, static_cast<double>(spec.width_px) - kMarginLeft - kMarginRight);
  f.height = std::max(1.0, static_cast<double>(spec.height_px) - kMarginTop - kMarginBottom);
  if (spec.y_range) {
    f.y_min = spec.y_range->first;
    f.y_max = spec.y_range->second;
  } else {
    f.y_min = 0.0;
    f.y_max = 0.0;
    for (const auto& fp : spec.fingerprints) {
      for (double v : fp.values) {
        f.y_min = std::min(f.y_min, v);
        f.y_max = std::max(f.y_max, v);
      }
    }
    if (f.y_max - f.y_min < 1e-9) {
      f.y_min -= 1.0;
      f.y_max += 1.0;
    }
  }
  return f;
}

std::string render_svg(const PlotSpec& spec) {
  validate(spec);
  const PlotFrame f = plot_frame(spec);
  const std::size_t n = spec.axis_terms.size();
  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"yes\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << spec.width_px << "\" height=\""
      << spec.height_px << "\" viewBox=\"0 0 " << spec.width_px << ' ' << spec.height_px << "\">\n"
      << "<rect x=\"0\" y=\"0\" width=\"" << spec.width_px << "\" height=\"" << spec.height_px
      << "\" fill=\"white\"/>\n";

  // Frame, zero line and y ticks.
  out << "<g font-family=\"sans-serif\" font-size=\"10\" fill=\"black\">\n";
  out << "<rect x=\"" << num(f.left) << "\" y=\"" << num(f.top) << "\" width=\"" << num(f.width) << "\" height=\""
      << num(f.height) << "\" fill=\"none\" stroke=\"#444\" stroke-width=\"1\"/>\n";
  if (f.y_min <= 0.0 && f.y_max >= 0.0) {
    out << "<line class=\"zero\" x1=\"" << num(f.left) << "\" y1=\"" << num(f.y(0.0)) << "\" x2=\""
        << num(f.left + f.width) << "\" y2=\"" << num(f.y(0.0)) << "\" stroke=\"#999\" stroke-dasharray=\"4,2\"/>\n";
  }
  for (int i = 0; i <= 4; ++i) {
    const double v = f.y_min + (f.y_max - f.y_min) * i / 4.0;
    out << "<text x=\"" << num(f.left - 6) << "\" y=\"" << num(f.y(v) + 3) << "\" text-anchor=\"end\">"
        << num(v) << "</text>\n";
  }
  for (std::size_t p = 0; p < n; p += spec.label_every) {
    const double x = f.x(p, n);
    const double y = f.top + f.height + 8;
    out << "<text x=\"" << num(x) << "\" y=\"" << num(y) << "\" text-anchor=\"end\" transform=\"rotate(-60 "
        << num(x) << ' ' << num(y) << ")\">" << xml_escape(spec.axis_terms[p]) << "</text>\n";
  }
  out << "</g>\n";

  for (std::size_t i = 0; i < spec.fingerprints.size(); ++i) {
    const auto& fp = spec.fingerprints[i];
    out << "<polyline fill=\"none\" stroke=\"" << kPalette[i % kPaletteSize] << "\" stroke-width=\"1.5\"";
    if (const char* dash = kDashes[(i / kPaletteSize) % 4]; *dash) out << " stroke-dasharray=\"" << dash << '"';
    out << " data-cluster=\"" << xml_escape(fp.ref()) << "\" points=\"";
    for (std::size_t p = 0; p < n; ++p) out << (p ? " " : "") << num(f.x(p, n)) << ',' << num(f.y(fp.values[p]));
    out << "\"/>\n";
  }

  out << "<g font-family=\"sans-serif\" font-size=\"11\">\n";
  const double lx = f.left + f.width + 16;
  for (std::size_t i = 0; i < spec.fingerprints.size(); ++i) {
    const double ly = f.top + 14.0 * static_cast<double>(i) + 8;
    out << "<line x1=\"" << num(lx) << "\" y1=\"" << num(ly) << "\" x2=\"" << num(lx + 20) << "\" y2=\"" << num(ly)
        << "\" stroke=\"" << kPalette[i % kPaletteSize] << "\" stroke-width=\"2\"";
    if (const char* dash = kDashes[(i / kPaletteSize) % 4]; *dash) out << " stroke-dasharray=\"" << dash << '"';
    out << "/>\n";
    out << "<text x=\"" << num(lx + 26) << "\" y=\"" << num(ly + 4) << "\">"
        << xml_escape(spec.fingerprints[i].ref()) << "</text>\n";
  }
  out << "</g>\n</svg>\n";
  return out.str();
}

std::string export_plot_csv(const PlotSpec& spec) {
  validate(spec);
  std::ostringstream out;
  out << "term,position,cluster,nmi\n";
  for (const auto& fp : spec.fingerprints) {
    for (std::size_t p = 0; p < spec.axis_terms.size(); ++p) {
      out << csv_field(spec.axis_terms[p]) << ',' << p << ',' << csv_field(fp.ref()) << ','
          << format_score(fp.values[p]) << '\n';
    }
  }
  return out.str();
}

}  // namespace lexfp
