#include "lexfp/fingerprint.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>

#include "lexfp/error.hpp"
#include "lexfp/labeling.hpp"
#include "lexfp/nmi.hpp"
#include "lexfp/parallel.hpp"
#include "lexfp/simd.hpp"

namespace lexfp {
namespace {

std::vector<TermId> resolve_axis(const Corpus& corpus, const LabelAxis& axis) {
  if (axis.order.empty()) throw ValidationError("label axis is empty");
  std::vector<TermId> ids;
  ids.reserve(axis.order.size());
  for (const auto& term : axis.order) {
    const auto t = corpus.find_term(term);
    if (!t) throw ValidationError("axis label '" + term + "' does not occur in the corpus");
    ids.push_back(*t);
  }
  return ids;
}

std::vector<double> fingerprint_values(const Corpus& corpus, const ClusteringSolution& solution, std::size_t k,
                                       std::span<const TermId> ids, UniverseMode mode) {
  std::vector<double> values(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    values[i] = term_cluster_nmi(cluster_cell(corpus, ids[i], solution, k, mode)).value;
  }
  return values;
}

void require_same_axis(const Fingerprint& a, const Fingerprint& b) {
  if (a.axis_id != b.axis_id || a.values.size() != b.values.size()) {
    throw ValidationError("fingerprints '" + a.ref() + "' and '" + b.ref() + "' use different label axes");
  }
}

}  // namespace

Fingerprint make_fingerprint(const Corpus& corpus, const ClusteringSolution& solution, std::string_view cluster_id,
                             const LabelAxis& axis, UniverseMode mode) {
  const std::size_t k = solution.cluster_index(cluster_id);
  const auto ids = resolve_axis(corpus, axis);
  return Fingerprint{solution.name(), solution.cluster_id(k), fingerprint_values(corpus, solution, k, ids, mode),
                     axis.id()};
}

std::vector<Fingerprint> make_fingerprints(const Corpus& corpus, std::span<const ClusteringSolution> solutions,
                                           const LabelAxis& axis, UniverseMode mode) {
  const auto ids = resolve_axis(corpus, axis);
  const std::string id = axis.id();
  std::vector<std::pair<std::size_t, std::size_t>> refs;
  for (std::size_t s = 0; s < solutions.size(); ++s) {
    for (std::size_t k = 0; k < solutions[s].n_clusters(); ++k) refs.emplace_back(s, k);
  }
  std::vector<Fingerprint> out(refs.size());
  parallel_for(refs.size(), [&](std::size_t i) {
    const auto& sol = solutions[refs[i].first];
    const std::size_t k = refs[i].second;
    out[i] = Fingerprint{sol.name(), sol.cluster_id(k), fingerprint_values(corpus, sol, k, ids, mode), id};
  });
  return out;
}

std::string_view to_string(SimilarityKind k) { return k == SimilarityKind::Cosine ? "cosine" : "negsqeuclid"; }

SimilarityKind parse_similarity_kind(std::string_view s) {
  if (s == "cosine") return SimilarityKind::Cosine;
  if (s == "negsqeuclid") return SimilarityKind::NegSquaredEuclidean;
  throw ValidationError("unknown similarity '" + std::string(s) + "' (expected cosine|negsqeuclid)");
}

double fingerprint_similarity(const Fingerprint& a, const Fingerprint& b) {
  require_same_axis(a, b);
  const double aa = simd::dot(a.values, a.values);
  const double bb = simd::dot(b.values, b.values);
  if (aa == 0.0 || bb == 0.0) return 0.0;
  return std::clamp(simd::dot(a.values, b.values) / std::sqrt(aa * bb), -1.0, 1.0);
}

double fingerprint_neg_sq_distance(const Fingerprint& a, const Fingerprint& b) {
  require_same_axis(a, b);
  double sum = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    const double diff = a.values[i] - b.values[i];
    sum += diff * diff;
  }
  return -sum;
}

double fingerprint_similarity(const Fingerprint& a, const Fingerprint& b, SimilarityKind kind) {
  return kind == SimilarityKind::Cosine ? fingerprint_similarity(a, b) : fingerprint_neg_sq_distance(a, b);
}

double jaccard(std::span<const DocIndex> a, std::span<const DocIndex> b) {
  std::size_t inter = 0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (*ia < *ib) {
      ++ia;
    } else if (*ib < *ia) {
      ++ib;
    } else {
      ++inter;
      ++ia;
      ++ib;
    }
  }
  const std::size_t uni = a.size() + b.size() - inter;
  return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

double group_average_jaccard(std::span<const DocSet> sets) {
  if (sets.size() < 2) throw ValidationError("average Jaccard needs at least two clusters");
  double sum = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    for (std::size_t j = i + 1; j < sets.size(); ++j) {
      sum += jaccard(sets[i], sets[j]);
      ++pairs;
    }
  }
  return sum / static_cast<double>(pairs);
}

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::vector<std::string> parse_csv_line(std::string_view line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else {
      fields.back() += c;
    }
  }
  if (quoted) throw ValidationError("unterminated quoted CSV field");
  return fields;
}

void write_fingerprint_csv(std::ostream& out, std::span<const Fingerprint> fingerprints, const LabelAxis& axis) {
  const std::string id = axis.id();
  out << "cluster";
  for (const auto& term : axis.order) out << ',' << csv_field(term);
  out << '\n';
  for (const auto& fp : fingerprints) {
    if (fp.axis_id != id || fp.values.size() != axis.size()) {
      throw ValidationError("fingerprint '" + fp.ref() + "' was computed on a different axis");
    }
    out << csv_field(fp.ref());
    for (double v : fp.values) out << ',' << format_score(v);
    out << '\n';
  }
}

FingerprintTable read_fingerprint_csv(std::istream& in) {
  FingerprintTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = parse_csv_line(line);
    if (table.axis.order.empty()) {
      if (fields.size() < 2 || fields[0] != "cluster") {
        throw ValidationError("fingerprint CSV: header must be cluster,<terms...>");
      }
      table.axis.order.assign(fields.begin() + 1, fields.end());
      continue;
    }
    if (fields.size() != table.axis.size() + 1) {
      throw ValidationError("fingerprint CSV line " + std::to_string(line_no) + ": wrong number of columns");
    }
    Fingerprint fp;
    const auto colon = fields[0].find(':');
    if (colon == std::string::npos) {
      throw ValidationError("fingerprint CSV line " + std::to_string(line_no) + ": expected solution:cluster");
    }
    fp.solution = fields[0].substr(0, colon);
    fp.cluster = fields[0].substr(colon + 1);
    for (std::size_t i = 1; i < fields.size(); ++i) {
      try {
        fp.values.push_back(std::stod(fields[i]));
      } catch (const std::exception&) {
        throw ValidationError("fingerprint CSV line " + std::to_string(line_no) + ": bad value '" + fields[i] + "'");
      }
    }
    table.fingerprints.push_back(std::move(fp));
  }
  if (table.axis.order.empty()) throw ValidationError("fingerprint CSV: empty input");
  const std::string id = table.axis.id();
  for (auto& fp : table.fingerprints) fp.axis_id = id;
  return table;
}

}  // namespace lexfp
