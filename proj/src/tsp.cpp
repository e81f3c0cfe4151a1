#include "lexfp/tsp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>

#include "lexfp/error.hpp"
#include "lexfp/parallel.hpp"
#include "lexfp/simd.hpp"

namespace lexfp {
namespace {

constexpr double kImprovementEps = 1e-12;

double clamp_distance(double d) { return std::clamp(d, 0.0, 2.0); }

std::vector<std::string> canonical_orientation(std::vector<std::string> order) {
  std::vector<std::string> reversed(order.rbegin(), order.rend());
  return reversed < order ? reversed : order;
}

LabelAxis make_axis(std::span<const std::string> labels, const DistanceMatrix& d, const Tour& tour,
                    OrderMethod method, std::uint64_t seed) {
  std::vector<std::string> order;
  order.reserve(tour.order.size());
  for (std::size_t i : tour.order) order.push_back(labels[i]);
  order = canonical_orientation(std::move(order));
  // Recompute along the returned orientation so tour_cost matches the listed order exactly.
  std::vector<std::size_t> idx;
  idx.reserve(order.size());
  for (const auto& term : order) {
    idx.push_back(static_cast<std::size_t>(std::find(labels.begin(), labels.end(), term) - labels.begin()));
  }
  return LabelAxis{std::move(order), path_cost(d, idx), method, seed};
}

void require_distinct(std::span<const std::string> labels) {
  std::vector<std::string> sorted(labels.begin(), labels.end());
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw ValidationError("label list contains duplicates");
  }
}

// --- chained local search on a cycle that includes a zero-distance depot ---

class CycleSearch {
 public:
  explicit CycleSearch(const DistanceMatrix& d) : d_(d), depot_(d.size()) {}

  double dist(std::size_t a, std::size_t b) const { return (a == depot_ || b == depot_) ? 0.0 : d_(a, b); }

  double cost(const std::vector<std::size_t>& t) const {
    double c = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) c += dist(t[i], t[(i + 1) % t.size()]);
    return c;
  }

  void optimise(std::vector<std::size_t>& t) const {
    bool improved = true;
    while (improved) {
      improved = two_opt(t);
      improved = or_opt(t) || improved;
    }
  }

 private:
  bool two_opt(std::vector<std::size_t>& t) const {
    const std::size_t n = t.size();
    if (n < 4) return false;
    bool any = false;
    bool improved = true;
    while (improved) {
      improved = false;
      for (std::size_t i = 0; i + 2 < n; ++i) {
        for (std::size_t j = i + 2; j < n; ++j) {
          if (i == 0 && j == n - 1) continue;  // edges share a node
          const std::size_t a = t[i], b = t[i + 1], c = t[j], e = t[(j + 1) % n];
          const double delta = dist(a, c) + dist(b, e) - dist(a, b) - dist(c, e);
          if (delta < -kImprovementEps) {
            std::reverse(t.begin() + static_cast<std::ptrdiff_t>(i + 1), t.begin() + static_cast<std::ptrdiff_t>(j + 1));
            improved = any = true;
          }
        }
      }
    }
    return any;
  }

  // Moves a segment of 1..3 consecutive nodes to another edge, optionally reversed.
  bool or_opt(std::vector<std::size_t>& t) const {
    const std::size_t n = t.size();
    bool any = false;
    for (std::size_t len = 1; len <= 3; ++len) {
      if (n < len + 3) break;
      bool improved = true;
      while (improved) {
        improved = false;
        for (std::size_t i = 0; i < n && !improved; ++i) {
          const std::size_t first = t[i];
          const std::size_t last = t[(i + len - 1) % n];
          const std::size_t prev = t[(i + n - 1) % n];
          const std::size_t next = t[(i + len) % n];
          const double removed = dist(prev, first) + dist(last, next) - dist(prev, next);
          // Candidate edges (t[p], t[p+1]) lying fully outside the segment, excluding (prev, first).
          for (std::size_t off = len; off + 1 < n; ++off) {
            const std::size_t p = (i + off) % n;
            const std::size_t e = t[p], f = t[(p + 1) % n];
            const double keep = dist(e, first) + dist(last, f);
            const double flip = dist(e, last) + dist(first, f);
            const double added = std::min(keep, flip) - dist(e, f);
            if (added - removed < -kImprovementEps) {
              move_segment(t, i, len, p, flip < keep);
              improved = any = true;
              break;
            }
          }
        }
      }
    }
    return any;
  }

  static void move_segment(std::vector<std::size_t>& t, std::size_t i, std::size_t len, std::size_t p, bool reversed) {
    const std::size_t n = t.size();
    std::vector<std::size_t> seg(len);
    for (std::size_t k = 0; k < len; ++k) seg[k] = t[(i + k) % n];
    if (reversed) std::reverse(seg.begin(), seg.end());
    std::vector<std::size_t> out;
    out.reserve(n);
    // Walk the rest of the cycle starting right after the segment.
    for (std::size_t off = len; off < n; ++off) {
      const std::size_t pos = (i + off) % n;
      out.push_back(t[pos]);
      if (pos == p) out.insert(out.end(), seg.begin(), seg.end());
    }
    t = std::move(out);
  }

  const DistanceMatrix& d_;
  std::size_t depot_;
};

std::vector<std::size_t> nearest_neighbour_path(const DistanceMatrix& d, std::size_t start) {
  const std::size_t n = d.size();
  std::vector<bool> used(n, false);
  std::vector<std::size_t> path{start};
  used[start] = true;
  while (path.size() < n) {
    const std::size_t cur = path.back();
    std::size_t best = n;
    for (std::size_t j = 0; j < n; ++j) {
      if (!used[j] && (best == n || d(cur, j) < d(cur, best))) best = j;
    }
    used[best] = true;
    path.push_back(best);
  }
  return path;
}

std::vector<std::size_t> double_bridge(const std::vector<std::size_t>& t, std::mt19937_64& rng) {
  const std::size_t n = t.size();
  // Three distinct cut points in [1, n-1].
  std::size_t cuts[3];
  std::size_t picked = 0;
  while (picked < 3) {
    const std::size_t c = 1 + static_cast<std::size_t>(rng() % (n - 1));
    if (std::find(cuts, cuts + picked, c) == cuts + picked) cuts[picked++] = c;
  }
  std::sort(cuts, cuts + 3);
  const auto at = [&](std::size_t k) { return t.begin() + static_cast<std::ptrdiff_t>(k); };
  std::vector<std::size_t> out;
  out.reserve(n);
  out.insert(out.end(), t.begin(), at(cuts[0]));
  out.insert(out.end(), at(cuts[1]), at(cuts[2]));
  out.insert(out.end(), at(cuts[0]), at(cuts[1]));
  out.insert(out.end(), at(cuts[2]), t.end());
  return out;
}

std::vector<std::size_t> cycle_to_path(const std::vector<std::size_t>& cycle, std::size_t depot) {
  const auto it = std::find(cycle.begin(), cycle.end(), depot);
  std::vector<std::size_t> path;
  path.reserve(cycle.size() - 1);
  path.insert(path.end(), it + 1, cycle.end());
  path.insert(path.end(), cycle.begin(), it);
  return path;
}

}  // namespace

double cosine_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ValidationError("vector length mismatch");
  const double aa = simd::dot(a, a);
  const double bb = simd::dot(b, b);
  if (aa == 0.0 || bb == 0.0) throw ValidationError("cosine distance of a zero vector");
  return clamp_distance(1.0 - simd::dot(a, b) / std::sqrt(aa * bb));
}

TermVectorSpace TermVectorSpace::from_incidence(const Corpus& corpus, std::span<const std::string> labels) {
  TermVectorSpace s;
  s.dim_ = corpus.n_docs();
  s.provenance_ = VectorProvenance::DocIncidence;
  for (const auto& label : labels) {
    const auto t = corpus.find_term(label);
    if (!t) throw ValidationError("label '" + label + "' does not occur in the corpus");
    if (corpus.doc_frequency(*t) == 0) throw ValidationError("label '" + label + "' has a zero vector");
    if (!s.index_.emplace(label, s.terms_.size()).second) throw ValidationError("duplicate label '" + label + "'");
    s.terms_.push_back(label);
    s.incidence_.push_back(corpus.incidence_set(*t));
    s.popcounts_.push_back(corpus.doc_frequency(*t));
  }
  return s;
}

TermVectorSpace TermVectorSpace::from_dense(std::vector<std::string> terms, std::vector<std::vector<double>> vectors) {
  if (terms.size() != vectors.size()) throw ValidationError("term and vector counts differ");
  TermVectorSpace s;
  s.provenance_ = VectorProvenance::External;
  s.dim_ = vectors.empty() ? 0 : vectors.front().size();
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (vectors[i].size() != s.dim_ || s.dim_ == 0) {
      throw ValidationError("vector for '" + terms[i] + "' has dimension " + std::to_string(vectors[i].size()) +
                            ", expected " + std::to_string(s.dim_));
    }
    for (double v : vectors[i]) {
      if (!std::isfinite(v)) throw ValidationError("non-finite component in vector for '" + terms[i] + "'");
    }
    const double sq = simd::dot(vectors[i], vectors[i]);
    if (sq == 0.0) throw ValidationError("zero vector for '" + terms[i] + "'");
    if (!s.index_.emplace(terms[i], i).second) throw ValidationError("duplicate vector for '" + terms[i] + "'");
    s.sq_norms_.push_back(sq);
  }
  s.terms_ = std::move(terms);
  s.dense_ = std::move(vectors);
  return s;
}

std::optional<std::size_t> TermVectorSpace::find(const std::string& term) const {
  auto it = index_.find(term);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

double TermVectorSpace::distance(std::size_t i, std::size_t j) const {
  if (i == j) return 0.0;
  if (provenance_ == VectorProvenance::DocIncidence) {
    const double inter = static_cast<double>(incidence_[i].intersection_count(incidence_[j]));
    const double norm = std::sqrt(static_cast<double>(popcounts_[i]) * static_cast<double>(popcounts_[j]));
    return clamp_distance(1.0 - inter / norm);
  }
  return clamp_distance(1.0 - simd::dot(dense_[i], dense_[j]) / std::sqrt(sq_norms_[i] * sq_norms_[j]));
}

std::vector<double> TermVectorSpace::dense_vector(std::size_t i) const {
  if (provenance_ == VectorProvenance::External) return dense_.at(i);
  std::vector<double> v(dim_, 0.0);
  for (DocIndex d : incidence_.at(i).members()) v[d] = 1.0;
  return v;
}

TermVectorSpace TermVectorSpace::restrict_to(std::span<const std::string> labels) const {
  TermVectorSpace s;
  s.dim_ = dim_;
  s.provenance_ = provenance_;
  for (const auto& label : labels) {
    const auto i = find(label);
    if (!i) throw ValidationError("no vector for label '" + label + "'");
    if (!s.index_.emplace(label, s.terms_.size()).second) throw ValidationError("duplicate label '" + label + "'");
    s.terms_.push_back(label);
    if (provenance_ == VectorProvenance::DocIncidence) {
      s.incidence_.push_back(incidence_[*i]);
      s.popcounts_.push_back(popcounts_[*i]);
    } else {
      s.dense_.push_back(dense_[*i]);
      s.sq_norms_.push_back(sq_norms_[*i]);
    }
  }
  return s;
}

TermVectorSpace load_external_vectors(std::istream& in) {
  std::vector<std::string> terms;
  std::vector<std::vector<double>> vectors;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw ValidationError("vectors line " + std::to_string(line_no) + ": no components");
    terms.push_back(normalize_term(line.substr(0, tab)));
    std::vector<double> v;
    std::istringstream fields(line.substr(tab + 1));
    std::string field;
    while (std::getline(fields, field, '\t')) {
      try {
        std::size_t used = 0;
        v.push_back(std::stod(field, &used));
        if (used != field.size()) throw std::invalid_argument("trailing characters");
      } catch (const std::exception&) {
        throw ValidationError("vectors line " + std::to_string(line_no) + ": bad component '" + field + "'");
      }
    }
    vectors.push_back(std::move(v));
  }
  return TermVectorSpace::from_dense(std::move(terms), std::move(vectors));
}

DistanceMatrix pairwise_distances(const TermVectorSpace& space) {
  DistanceMatrix d(space.size());
  parallel_for(space.size(), [&](std::size_t i) {
    for (std::size_t j = i + 1; j < space.size(); ++j) {
      const double v = space.distance(i, j);
      d.at(i, j) = v;
      d.at(j, i) = v;
    }
  });
  return d;
}

double path_cost(const DistanceMatrix& d, std::span<const std::size_t> order) {
  double c = 0.0;
  for (std::size_t i = 1; i < order.size(); ++i) c += d(order[i - 1], order[i]);
  return c;
}

Tour solve_exact(const DistanceMatrix& d) {
  const std::size_t n = d.size();
  if (n == 0) return {};
  if (n > 20) throw ValidationError("exact ordering supports at most 20 nodes");
  const std::size_t full = (std::size_t{1} << n) - 1;
  constexpr double inf = std::numeric_limits<double>::infinity();
  // cost[mask * n + j]: cheapest path covering `mask` and ending at j.
  std::vector<double> cost((full + 1) * n, inf);
  std::vector<std::uint8_t> parent((full + 1) * n, 0xff);
  for (std::size_t j = 0; j < n; ++j) cost[(std::size_t{1} << j) * n + j] = 0.0;
  for (std::size_t mask = 1; mask <= full; ++mask) {
    for (std::size_t j = 0; j < n; ++j) {
      if (!(mask >> j & 1u)) continue;
      const std::size_t prev_mask = mask ^ (std::size_t{1} << j);
      if (prev_mask == 0) continue;
      double best = inf;
      std::uint8_t arg = 0xff;
      for (std::size_t i = 0; i < n; ++i) {
        if (!(prev_mask >> i & 1u)) continue;
        const double c = cost[prev_mask * n + i] + d(i, j);
        if (c < best) {
          best = c;
          arg = static_cast<std::uint8_t>(i);
        }
      }
      cost[mask * n + j] = best;
      parent[mask * n + j] = arg;
    }
  }
  std::size_t end = 0;
  for (std::size_t j = 1; j < n; ++j) {
    if (cost[full * n + j] < cost[full * n + end]) end = j;
  }
  Tour tour;
  std::size_t mask = full;
  std::size_t cur = end;
  while (true) {
    tour.order.push_back(cur);
    const std::uint8_t p = parent[mask * n + cur];
    mask ^= std::size_t{1} << cur;
    if (p == 0xff) break;
    cur = p;
  }
  std::reverse(tour.order.begin(), tour.order.end());
  tour.cost = path_cost(d, tour.order);
  return tour;
}

ChainedLkResult solve_chained_lk(const DistanceMatrix& d, std::uint64_t seed, std::size_t kicks) {
  const std::size_t n = d.size();
  if (n < 2) throw ValidationError("ordering needs at least two labels");
  std::mt19937_64 rng(seed);
  ChainedLkResult result;

  const auto start = static_cast<std::size_t>(rng() % n);
  const std::vector<std::size_t> nn = nearest_neighbour_path(d, start);
  result.nearest_neighbour_cost = path_cost(d, nn);

  const CycleSearch search(d);
  std::vector<std::size_t> current = nn;
  current.push_back(n);  // depot closes the path into a cycle
  search.optimise(current);
  double current_cost = search.cost(current);
  result.local_search_cost = current_cost;

  std::vector<std::size_t> best = current;
  double best_cost = current_cost;
  if (current.size() >= 4) {
    for (std::size_t k = 0; k < kicks; ++k) {
      std::vector<std::size_t> candidate = double_bridge(current, rng);
      search.optimise(candidate);
      const double c = search.cost(candidate);
      if (c <= current_cost) {
        current = std::move(candidate);
        current_cost = c;
        if (c < best_cost - kImprovementEps) {
          best = current;
          best_cost = c;
        }
      }
    }
  }
  result.best.order = cycle_to_path(best, n);
  result.best.cost = path_cost(d, result.best.order);
  return result;
}

std::string_view to_string(OrderMethod m) { return m == OrderMethod::Exact ? "EXACT" : "CHAINED_LK"; }

std::string axis_id(std::span<const std::string> order) {
  // FNV-1a over the newline-joined terms.
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (const auto& term : order) {
    for (unsigned char c : term) {
      h ^= c;
      h *= 0x100000001b3ull;
    }
    h ^= '\n';
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string LabelAxis::id() const { return axis_id(order); }

LabelAxis order_exact(std::span<const std::string> labels, const TermVectorSpace& space) {
  if (labels.size() < 2 || labels.size() > kMaxExactLabels) {
    throw ValidationError("exact ordering needs 2.." + std::to_string(kMaxExactLabels) + " labels, got " +
                          std::to_string(labels.size()));
  }
  require_distinct(labels);
  const DistanceMatrix d = pairwise_distances(space.restrict_to(labels));
  return make_axis(labels, d, solve_exact(d), OrderMethod::Exact, 0);
}

LabelAxis order_chained_lk(std::span<const std::string> labels, const TermVectorSpace& space, std::uint64_t seed,
                           std::size_t kicks) {
  if (labels.size() < 2) throw ValidationError("ordering needs at least two labels");
  require_distinct(labels);
  const DistanceMatrix d = pairwise_distances(space.restrict_to(labels));
  return make_axis(labels, d, solve_chained_lk(d, seed, kicks).best, OrderMethod::ChainedLk, seed);
}

LabelAxis order_chained_lk_best(std::span<const std::string> labels, const TermVectorSpace& space,
                                std::span<const std::uint64_t> seeds, std::size_t kicks) {
  if (seeds.empty()) throw ValidationError("at least one seed is required");
  if (labels.size() < 2) throw ValidationError("ordering needs at least two labels");
  require_distinct(labels);
  const DistanceMatrix d = pairwise_distances(space.restrict_to(labels));
  std::vector<LabelAxis> runs(seeds.size());
  parallel_for(seeds.size(), [&](std::size_t i) {
    runs[i] = make_axis(labels, d, solve_chained_lk(d, seeds[i], kicks).best, OrderMethod::ChainedLk, seeds[i]);
  });
  return *std::min_element(runs.begin(), runs.end(), [](const LabelAxis& a, const LabelAxis& b) {
    return a.tour_cost != b.tour_cost ? a.tour_cost < b.tour_cost : a.seed < b.seed;
  });
}

LabelAxis order_labels(std::span<const std::string> labels, const TermVectorSpace& space, std::uint64_t seed,
                       std::size_t kicks, bool force_heuristic, std::size_t restarts) {
  if (!force_heuristic && labels.size() <= kMaxExactLabels) {
    LabelAxis axis = order_exact(labels, space);
    axis.seed = seed;
    return axis;
  }
  std::vector<std::uint64_t> seeds;
  for (std::size_t r = 0; r < std::max<std::size_t>(1, restarts); ++r) seeds.push_back(seed + r);
  return order_chained_lk_best(labels, space, seeds, kicks);
}

void write_axis(std::ostream& out, const LabelAxis& axis) {
  char cost[64];
  std::snprintf(cost, sizeof cost, "%.17g", axis.tour_cost);
  out << "# tour_cost=" << cost << " method=" << to_string(axis.method) << " seed=" << axis.seed << '\n';
  for (std::size_t i = 0; i < axis.order.size(); ++i) out << i << '\t' << axis.order[i] << '\n';
}

LabelAxis read_axis(std::istream& in) {
  LabelAxis axis;
  std::string line;
  bool header = false;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream fields(line.substr(1));
      std::string kv;
      while (fields >> kv) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = kv.substr(0, eq), value = kv.substr(eq + 1);
        if (key == "tour_cost") axis.tour_cost = std::stod(value);
        if (key == "seed") axis.seed = std::stoull(value);
        if (key == "method") {
          if (value == "EXACT") axis.method = OrderMethod::Exact;
          else if (value == "CHAINED_LK") axis.method = OrderMethod::ChainedLk;
          else throw ValidationError("axis: unknown method '" + value + "'");
        }
      }
      header = true;
      continue;
    }
    const auto tab = line.find('\t');
    if (tab == std::string::npos || std::stoull(line.substr(0, tab)) != axis.order.size()) {
      throw ValidationError("axis line " + std::to_string(line_no) + ": expected position<TAB>term in order");
    }
    axis.order.push_back(line.substr(tab + 1));
  }
  if (!header) throw ValidationError("axis: missing '# tour_cost=...' header");
  if (axis.order.empty()) throw ValidationError("axis: no labels");
  return axis;
}

}  // namespace lexfp
