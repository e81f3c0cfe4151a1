#include <doctest.h>

#include <algorithm>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include "lexfp/error.hpp"
#include "lexfp/viz.hpp"

using namespace lexfp;

namespace {

LabelAxis axis_n(std::size_t n) {
  LabelAxis a;
  for (std::size_t i = 0; i < n; ++i) a.order.push_back("term " + std::to_string(i));
  return a;
}

Fingerprint fp(const LabelAxis& a, std::string cluster, std::vector<double> v) {
  return Fingerprint{"sol", std::move(cluster), std::move(v), a.id()};
}

// Every opened element is closed in order; attribute values are quoted.
bool well_formed(const std::string& xml) {
  std::vector<std::string> stack;
  std::size_t i = 0;
  if (xml.rfind("<?xml", 0) == 0) i = xml.find("?>") + 2;
  bool root_seen = false;
  while ((i = xml.find('<', i)) != std::string::npos) {
    const std::size_t end = xml.find('>', i);
    if (end == std::string::npos) return false;
    std::string tag = xml.substr(i + 1, end - i - 1);
    i = end + 1;
    if (tag.empty()) return false;
    if (tag[0] == '/') {
      if (stack.empty() || stack.back() != tag.substr(1)) return false;
      stack.pop_back();
      continue;
    }
    const bool self = tag.back() == '/';
    const std::string name = tag.substr(0, tag.find_first_of(" /"));
    if (std::count(tag.begin(), tag.end(), '"') % 2 != 0) return false;
    if (stack.empty()) {
      if (root_seen) return false;
      root_seen = true;
    }
    if (!self) stack.push_back(name);
  }
  return root_seen && stack.empty();
}

std::vector<std::pair<double, double>> polyline_points(const std::string& svg, std::size_t which) {
  const std::regex re("<polyline[^>]* points=\"([^\"]*)\"");
  auto it = std::sregex_iterator(svg.begin(), svg.end(), re);
  for (std::size_t k = 0; k < which; ++k) ++it;
  std::vector<std::pair<double, double>> pts;
  std::istringstream in((*it)[1].str());
  std::string tok;
  while (in >> tok) {
    const auto comma = tok.find(',');
    pts.emplace_back(std::stod(tok.substr(0, comma)), std::stod(tok.substr(comma + 1)));
  }
  return pts;
}

std::size_t count_of(const std::string& s, const std::string& what) {
  std::size_t n = 0;
  for (std::size_t p = s.find(what); p != std::string::npos; p = s.find(what, p + 1)) ++n;
  return n;
}

}  // namespace

TEST_CASE("all-zero fingerprint is a flat line on the zero gridline") {
  const auto a = axis_n(6);
  const std::vector<Fingerprint> fps{fp(a, "z", std::vector<double>(6, 0.0))};
  const auto spec = PlotSpec::from(fps, a);
  const auto svg = render_svg(spec);
  CHECK(well_formed(svg));
  const auto pts = polyline_points(svg, 0);
  REQUIRE(pts.size() == 6);
  const double y0 = plot_frame(spec).y(0.0);
  for (const auto& [x, y] : pts) CHECK(y == doctest::Approx(y0).epsilon(1e-3));
  CHECK(svg.find("class=\"zero\"") != std::string::npos);
}

TEST_CASE("identical fingerprints overlay and both appear in the legend") {
  const auto a = axis_n(4);
  const std::vector<double> v{0.1, 0.5, -0.3, 0.0};
  const std::vector<Fingerprint> fps{fp(a, "one", v), fp(a, "two", v)};
  const auto svg = render_svg(PlotSpec::from(fps, a));
  CHECK(polyline_points(svg, 0) == polyline_points(svg, 1));
  CHECK(count_of(svg, ">sol:one</text>") == 1);
  CHECK(count_of(svg, ">sol:two</text>") == 1);
  CHECK(count_of(svg, "<polyline") == 2);
}

TEST_CASE("a single peak sits at its axis position") {
  const auto a = axis_n(10);
  std::vector<double> v(10, 0.05);
  v[3] = 0.9;
  const std::vector<Fingerprint> fps{fp(a, "p", v)};
  const auto spec = PlotSpec::from(fps, a);
  const auto pts = polyline_points(render_svg(spec), 0);
  REQUIRE(pts.size() == 10);
  // SVG y grows downwards: the maximum value has the smallest y.
  std::size_t arg = 0;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    if (pts[i].second < pts[arg].second) arg = i;
  }
  CHECK(arg == 3);
  const auto f = plot_frame(spec);
  CHECK(pts[3].first == doctest::Approx(f.left + f.width * 3.0 / 9.0).epsilon(1e-3));
  CHECK(pts[3].second == doctest::Approx(f.top + f.height * (1.0 - 0.9) / 2.0).epsilon(1e-3));
}

TEST_CASE("tick thinning, escaping and auto range") {
  LabelAxis a = axis_n(9);
  a.order[0] = "a<b & \"c\"";
  const std::vector<Fingerprint> fps{fp(a, "x&y", std::vector<double>(9, 0.2))};
  auto spec = PlotSpec::from(fps, a);
  spec.label_every = 4;
  const auto svg = render_svg(spec);
  CHECK(well_formed(svg));
  CHECK(count_of(svg, "rotate(-60") == 3);  // positions 0, 4, 8
  CHECK(svg.find("a&lt;b &amp; &quot;c&quot;") != std::string::npos);
  CHECK(svg.find("sol:x&amp;y") != std::string::npos);
  spec.y_range.reset();
  const auto f = plot_frame(spec);
  CHECK(f.y_min == 0.0);
  CHECK(f.y_max == doctest::Approx(0.2));
  CHECK(render_svg(spec) == render_svg(spec));
}

TEST_CASE("plot CSV shape and rounding") {
  const auto a = axis_n(5);
  const std::vector<Fingerprint> fps{fp(a, "1", {0.1234567, 0, 0, 0, -1}), fp(a, "2", {1, 1, 1, 1, 1})};
  const auto csv = export_plot_csv(PlotSpec::from(fps, a));
  CHECK(count_of(csv, "\n") == 11);
  CHECK(csv.rfind("term,position,cluster,nmi\nterm 0,0,sol:1,0.123457\n", 0) == 0);
  CHECK(csv.find("term 4,4,sol:1,-1.000000") != std::string::npos);
}

TEST_CASE("validation") {
  const auto a = axis_n(3);
  const std::vector<Fingerprint> fps{fp(a, "1", {0, 0, 0})};
  auto spec = PlotSpec::from(fps, a);
  auto empty_axis = spec;
  empty_axis.axis_terms.clear();
  CHECK_THROWS_AS(export_plot_csv(empty_axis), ValidationError);
  auto mismatch = spec;
  mismatch.fingerprints[0].axis_id = "elsewhere";
  CHECK_THROWS_AS(render_svg(mismatch), ValidationError);
  auto zero_every = spec;
  zero_every.label_every = 0;
  CHECK_THROWS_AS(render_svg(zero_every), ValidationError);
  auto none = spec;
  none.fingerprints.clear();
  CHECK_THROWS_AS(render_svg(none), ValidationError);
}
