#include "lexfp/meta_cluster.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <ostream>

#include "lexfp/error.hpp"
#include "lexfp/labeling.hpp"
#include "lexfp/parallel.hpp"
#include "lexfp/simd.hpp"

namespace lexfp {
namespace {

// Messages are linear in S, so rescaling leaves every exemplar decision intact
// while keeping a(i,k) + s(i,k) away from overflow.
constexpr double kOverflowGuard = 1e100;

// Exact duplicates keep the messages perfectly symmetric: either none of them or
// all of them end up as exemplars. A fixed perturbation this far below any real
// similarity difference breaks such ties, and the same matrix always gets the
// same perturbation.
constexpr double kTieBreak = 1e-12;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Uniform in [-0.5, 0.5), a fixed function of the cell position.
double tie_noise(std::size_t i, std::size_t k, std::size_t n) {
  const std::uint64_t bits = splitmix64(static_cast<std::uint64_t>(i) * n + k) >> 11;
  return static_cast<double>(bits) * 0x1.0p-53 - 0.5;
}

std::vector<bool> exemplar_flags(const SquareMatrix& r, const SquareMatrix& a) {
  std::vector<bool> e(r.size());
  for (std::size_t k = 0; k < r.size(); ++k) e[k] = r(k, k) + a(k, k) > 0.0;
  return e;
}

void update_responsibilities(const SquareMatrix& s, const SquareMatrix& a, SquareMatrix& r, double damping) {
  const std::size_t n = s.size();
  parallel_for(n, [&](std::size_t i) {
    std::vector<double> sum(n);
    simd::add(a.row(i), s.row(i), sum);
    std::size_t arg = 0;
    double first = -std::numeric_limits<double>::infinity();
    double second = first;
    for (std::size_t k = 0; k < n; ++k) {
      if (sum[k] > first) {
        second = first;
        first = sum[k];
        arg = k;
      } else if (sum[k] > second) {
        second = sum[k];
      }
    }
    for (std::size_t k = 0; k < n; ++k) sum[k] = s(i, k) - (k == arg ? second : first);
    simd::damp(r.row(i), sum, damping);
  });
}

void update_availabilities(const SquareMatrix& r, SquareMatrix& a, double damping) {
  const std::size_t n = r.size();
  // col[k] = r(k,k) + sum_{i != k} max(0, r(i,k)), accumulated in fixed row order.
  std::vector<double> col(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) simd::accumulate_relu(col, r.row(i));
  for (std::size_t k = 0; k < n; ++k) col[k] += r(k, k) - std::max(r(k, k), 0.0);
  parallel_for(n, [&](std::size_t i) {
    std::vector<double> next(n);
    for (std::size_t k = 0; k < n; ++k) {
      if (k == i) {
        next[k] = col[k] - r(k, k);
      } else {
        next[k] = std::min(0.0, col[k] - std::max(r(i, k), 0.0));
      }
    }
    simd::damp(a.row(i), next, damping);
  });
}

std::vector<std::size_t> assign(const SquareMatrix& s, const std::vector<std::size_t>& exemplars) {
  std::vector<std::size_t> membership(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (std::binary_search(exemplars.begin(), exemplars.end(), i)) {
      membership[i] = i;
      continue;
    }
    std::size_t best = exemplars.front();
    for (std::size_t e : exemplars) {
      if (s(i, e) > s(i, best)) best = e;
    }
    membership[i] = best;
  }
  return membership;
}

std::vector<std::size_t> indices_of(const std::vector<bool>& flags) {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < flags.size(); ++k) {
    if (flags[k]) out.push_back(k);
  }
  return out;
}

double quantile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

}  // namespace

void ApConfig::validate() const {
  if (!(damping >= 0.5 && damping < 1.0)) throw ValidationError("damping must be in [0.5, 1)");
  if (max_iter == 0 || convergence_iter == 0) throw ValidationError("iteration counts must be positive");
  if (convergence_iter > max_iter) throw ValidationError("convergence_iter must not exceed max_iter");
  if (preference && !std::isfinite(*preference)) throw ValidationError("preference must be finite");
}

std::size_t MetaClustering::group_of(std::size_t i) const {
  const auto it = std::lower_bound(exemplars.begin(), exemplars.end(), membership.at(i));
  return static_cast<std::size_t>(it - exemplars.begin());
}

double median_off_diagonal(const SquareMatrix& s) {
  const std::size_t n = s.size();
  if (n < 2) return n == 1 ? s(0, 0) : 0.0;
  std::vector<double> v;
  v.reserve(n * (n - 1));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j) v.push_back(s(i, j));
    }
  }
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double upper = v[mid];
  if (v.size() % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return (lower + upper) / 2.0;
}

MetaClustering affinity_propagation(SquareMatrix s, const ApConfig& config) {
  config.validate();
  const std::size_t n = s.size();
  if (n == 0) throw ValidationError("affinity propagation needs at least one point");
  for (std::size_t i = 0; i < n; ++i) {
    for (double v : s.row(i)) {
      if (!std::isfinite(v)) throw ValidationError("similarity matrix contains NaN or Inf");
    }
  }
  MetaClustering out;
  out.preference = config.preference.value_or(median_off_diagonal(s));
  if (n == 1) {
    out.exemplars = {0};
    out.membership = {0};
    out.converged = true;
    return out;
  }
  for (std::size_t i = 0; i < n; ++i) s(i, i) = out.preference;

  double max_abs = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (double v : s.row(i)) max_abs = std::max(max_abs, std::abs(v));
  }
  if (max_abs > kOverflowGuard) {
    for (std::size_t i = 0; i < n; ++i) {
      for (double& v : s.row(i)) v /= max_abs;
    }
  }

  // Messages run on a perturbed copy; assignment uses the similarities as given.
  SquareMatrix msg = s;
  const double scale = max_abs > kOverflowGuard ? 1.0 : (max_abs > 0.0 ? max_abs : 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) msg(i, k) += kTieBreak * scale * tie_noise(i, k, n);
  }

  SquareMatrix r(n);
  SquareMatrix a(n);
  std::vector<bool> previous;
  std::vector<bool> last_nonempty;
  std::size_t stable = 0;
  for (std::size_t it = 0; it < config.max_iter; ++it) {
    update_responsibilities(msg, a, r, config.damping);
    update_availabilities(r, a, config.damping);
    out.iterations_run = it + 1;

    std::vector<bool> e = exemplar_flags(r, a);
    stable = (e == previous) ? stable + 1 : 1;
    const bool nonempty = std::find(e.begin(), e.end(), true) != e.end();
    if (nonempty) last_nonempty = e;
    previous = std::move(e);
    if (nonempty && stable >= config.convergence_iter) {
      out.converged = true;
      break;
    }
  }

  if (!last_nonempty.empty()) {
    out.exemplars = indices_of(out.converged ? previous : last_nonempty);
  } else {
    // No point ever became an exemplar: fall back to the strongest self-evidence.
    std::size_t best = 0;
    for (std::size_t k = 1; k < n; ++k) {
      if (r(k, k) + a(k, k) > r(best, best) + a(best, best)) best = k;
    }
    out.exemplars = {best};
  }
  out.membership = assign(s, out.exemplars);
  return out;
}

SquareMatrix similarity_matrix(std::span<const Fingerprint> fingerprints, SimilarityKind kind) {
  const std::size_t n = fingerprints.size();
  SquareMatrix s(n);
  parallel_for(n, [&](std::size_t i) {
    for (std::size_t j = 0; j < n; ++j) s(i, j) = fingerprint_similarity(fingerprints[i], fingerprints[j], kind);
  });
  return s;
}

GroupReport group_report(const MetaClustering& meta, std::span<const Fingerprint> fingerprints,
                         std::span<const DocSet> doc_sets, std::span<const std::string> axis_terms,
                         double peak_quantile) {
  if (fingerprints.empty()) throw ValidationError("group report needs at least one fingerprint");
  if (meta.membership.size() != fingerprints.size()) {
    throw ValidationError("meta-clustering and fingerprint list sizes differ");
  }
  if (!doc_sets.empty() && doc_sets.size() != fingerprints.size()) {
    throw ValidationError("document sets must be parallel to the fingerprints");
  }
  if (!(peak_quantile >= 0.0 && peak_quantile <= 1.0)) throw ValidationError("peak quantile must be in [0, 1]");
  GroupReport report;
  report.peak_quantile = peak_quantile;
  for (std::size_t g = 0; g < meta.exemplars.size(); ++g) {
    report.groups.push_back(MetaGroup{g, meta.exemplars[g], {}, std::nullopt, {}});
  }
  for (std::size_t i = 0; i < fingerprints.size(); ++i) report.groups[meta.group_of(i)].members.push_back(i);

  for (auto& group : report.groups) {
    if (!doc_sets.empty() && group.members.size() >= 2) {
      std::vector<DocSet> sets;
      for (std::size_t i : group.members) sets.push_back(doc_sets[i]);
      group.average_jaccard = group_average_jaccard(sets);
    }
    const std::size_t dims = fingerprints[group.members.front()].values.size();
    if (!axis_terms.empty() && axis_terms.size() != dims) {
      throw ValidationError("axis terms do not match fingerprint length");
    }
    std::vector<double> thresholds;
    for (std::size_t i : group.members) thresholds.push_back(quantile(fingerprints[i].values, peak_quantile));
    for (std::size_t pos = 0; pos < dims; ++pos) {
      bool shared = true;
      for (std::size_t m = 0; m < group.members.size() && shared; ++m) {
        const double v = fingerprints[group.members[m]].values[pos];
        shared = v > 0.0 && v >= thresholds[m];
      }
      if (shared) group.shared_peaks.push_back(axis_terms.empty() ? std::to_string(pos) : axis_terms[pos]);
    }
  }
  return report;
}

nlohmann::json report_to_json(const GroupReport& report, const MetaClustering& meta,
                              std::span<const Fingerprint> fingerprints, SimilarityKind kind, const ApConfig& config) {
  nlohmann::json j;
  j["similarity"] = std::string(to_string(kind));
  j["affinity_propagation"] = {{"damping", config.damping},
                               {"max_iter", config.max_iter},
                               {"convergence_iter", config.convergence_iter},
                               {"preference", meta.preference},
                               {"preference_source", config.preference ? "explicit" : "median"}};
  j["converged"] = meta.converged;
  j["iterations"] = meta.iterations_run;
  j["peak_quantile"] = report.peak_quantile;
  j["groups"] = nlohmann::json::array();
  for (const auto& g : report.groups) {
    nlohmann::json members = nlohmann::json::array();
    for (std::size_t i : g.members) members.push_back(fingerprints[i].ref());
    j["groups"].push_back({{"group_id", g.id},
                           {"exemplar", fingerprints[g.exemplar].ref()},
                           {"size", g.members.size()},
                           {"members", members},
                           {"average_jaccard", g.average_jaccard ? nlohmann::json(*g.average_jaccard) : nullptr},
                           {"shared_peaks", g.shared_peaks}});
  }
  return j;
}

void write_meta_tsv(std::ostream& out, const MetaClustering& meta, std::span<const Fingerprint> fingerprints) {
  if (meta.membership.size() != fingerprints.size()) {
    throw ValidationError("meta-clustering and fingerprint list sizes differ");
  }
  out << "cluster\tgroup_id\tis_exemplar\n";
  for (std::size_t i = 0; i < fingerprints.size(); ++i) {
    out << fingerprints[i].ref() << '\t' << meta.group_of(i) << '\t' << (meta.membership[i] == i ? 1 : 0) << '\n';
  }
}

}  // namespace lexfp
