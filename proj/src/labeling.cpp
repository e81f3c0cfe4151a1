#include "lexfp/labeling.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <set>
#include <unordered_map>

#include "lexfp/error.hpp"
#include "lexfp/parallel.hpp"

namespace lexfp {
namespace {

// Scores are compared on a 1e-12 grid. Different tables can have mathematically
// equal scores that differ in the last bits; snapping turns those into ties that
// the term order resolves.
double rank_key(const SignedNmiScore& s, RankBy rank) {
  const double v = rank == RankBy::Signed ? s.value : std::abs(s.value);
  return std::nearbyint(v * 1e12);
}

/// Top-k of `scores` (indexed by term id) under the (key desc, term asc) order.
std::vector<LabelEntry> top_k(const Corpus& corpus, std::span<const SignedNmiScore> scores, std::size_t k,
                              RankBy rank) {
  std::vector<TermId> order(scores.size());
  for (std::size_t t = 0; t < order.size(); ++t) order[t] = static_cast<TermId>(t);
  const std::size_t keep = std::min(k, order.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(keep), order.end(),
                    [&](TermId a, TermId b) {
                      const double ka = rank_key(scores[a], rank);
                      const double kb = rank_key(scores[b], rank);
                      if (ka != kb) return ka > kb;
                      return corpus.term(a) < corpus.term(b);
                    });
  std::vector<LabelEntry> out;
  out.reserve(keep);
  for (std::size_t i = 0; i < keep; ++i) out.push_back(LabelEntry{corpus.term(order[i]), scores[order[i]]});
  return out;
}

void require_k(std::size_t k) {
  if (k == 0) throw ValidationError("k must be at least 1");
}

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto tab = line.find('\t', start);
    out.push_back(line.substr(start, tab == std::string::npos ? std::string::npos : tab - start));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  return out;
}

}  // namespace

RankBy parse_rank_by(std::string_view s) {
  if (s == "signed") return RankBy::Signed;
  if (s == "magnitude") return RankBy::Magnitude;
  throw ValidationError("unknown ranking '" + std::string(s) + "' (expected signed|magnitude)");
}

std::string cluster_ref(const ClusteringSolution& solution, std::size_t k) {
  return solution.name() + ":" + solution.cluster_id(k);
}

LabelList label_cluster(const Corpus& corpus, const ClusteringSolution& solution, std::string_view cluster_id,
                        std::size_t k, UniverseMode mode, RankBy rank) {
  require_k(k);
  const std::size_t cluster = solution.cluster_index(cluster_id);
  std::vector<SignedNmiScore> scores(corpus.n_terms());
  parallel_for(scores.size(), [&](std::size_t t) {
    scores[t] = term_cluster_nmi(cluster_cell(corpus, static_cast<TermId>(t), solution, cluster, mode));
  });
  return LabelList{cluster_ref(solution, cluster), solution.members(cluster).size(), k,
                   top_k(corpus, scores, k, rank)};
}

std::vector<LabelList> label_clusters(const Corpus& corpus, const ClusteringSolution& solution, std::size_t k,
                                      UniverseMode mode, RankBy rank) {
  require_k(k);
  if (solution.n_docs() != corpus.n_docs()) throw ValidationError("solution does not match corpus");
  const std::size_t m = solution.n_clusters();
  const std::size_t n_terms = corpus.n_terms();
  const std::uint64_t n_total = mode == UniverseMode::All ? corpus.n_docs() : solution.n_covered();
  // scores[k * n_terms + t]
  std::vector<SignedNmiScore> scores(m * n_terms);
  parallel_for(n_terms, [&](std::size_t t) {
    std::vector<std::uint64_t> in_cluster(m, 0);
    std::uint64_t n_term = 0;
    for (DocIndex d : corpus.incidence(static_cast<TermId>(t))) {
      const std::int32_t c = solution.cluster_of(d);
      if (c >= 0) ++in_cluster[static_cast<std::size_t>(c)];
      if (c >= 0 || mode == UniverseMode::All) ++n_term;
    }
    for (std::size_t c = 0; c < m; ++c) {
      scores[c * n_terms + t] = term_cluster_nmi(make_cell(in_cluster[c], n_term, solution.members(c).size(), n_total));
    }
  });
  std::vector<LabelList> out(m);
  parallel_for(m, [&](std::size_t c) {
    out[c] = LabelList{cluster_ref(solution, c), solution.members(c).size(), k,
                       top_k(corpus, std::span(scores).subspan(c * n_terms, n_terms), k, rank)};
  });
  return out;
}

LabelList label_solution(const Corpus& corpus, const ClusteringSolution& solution, std::size_t k) {
  require_k(k);
  std::vector<SignedNmiScore> scores(corpus.n_terms());
  parallel_for(scores.size(), [&](std::size_t t) {
    scores[t] = term_solution_nmi(corpus, static_cast<TermId>(t), solution);
  });
  return LabelList{solution.name(), solution.n_covered(), k, top_k(corpus, scores, k, RankBy::Signed)};
}

CommonLabelSet common_labels(std::span<const LabelList> lists, std::size_t min_occurrence,
                             std::size_t per_solution_k) {
  if (lists.size() < 2) throw ValidationError("common labels need at least two solution label lists");
  if (per_solution_k == 0) throw ValidationError("per-solution k must be at least 1");
  CommonLabelSet set;
  set.per_solution_k = per_solution_k;
  set.min_occurrence = min_occurrence;
  std::map<std::string, std::size_t> counts;
  for (const auto& list : lists) {
    std::set<std::string> seen;
    const std::size_t depth = std::min(per_solution_k, list.entries.size());
    for (std::size_t i = 0; i < depth; ++i) seen.insert(list.entries[i].term);
    for (const auto& term : seen) ++counts[term];
  }
  for (const auto& [term, n] : counts) {
    if (n >= min_occurrence) {
      set.labels.push_back(term);
      set.source_count.emplace(term, n);
    }
  }
  return set;
}

std::string format_score(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

void write_label_tsv(std::ostream& out, std::span<const LabelList> lists) {
  out << "owner\trank\tterm\tnmi\n";
  for (const auto& list : lists) {
    for (std::size_t i = 0; i < list.entries.size(); ++i) {
      out << list.owner << '\t' << (i + 1) << '\t' << list.entries[i].term << '\t'
          << format_score(list.entries[i].score.value) << '\n';
    }
  }
}

void write_label_table(std::ostream& out, std::span<const LabelList> lists) {
  out << "owner\tsize\tlabels\n";
  for (const auto& list : lists) {
    out << list.owner << '\t' << list.owner_size << '\t';
    for (std::size_t i = 0; i < list.entries.size(); ++i) out << (i ? ", " : "") << list.entries[i].term;
    out << '\n';
  }
}

std::vector<LabelList> read_label_tsv(std::istream& in) {
  std::vector<LabelList> lists;
  std::unordered_map<std::string, std::size_t> by_owner;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#' || (line_no == 1 && line.rfind("owner\t", 0) == 0)) continue;
    const auto fields = split_tabs(line);
    if (fields.size() != 4) {
      throw ValidationError("label table line " + std::to_string(line_no) + ": expected owner, rank, term, nmi");
    }
    auto [it, inserted] = by_owner.emplace(fields[0], lists.size());
    if (inserted) lists.push_back(LabelList{fields[0], 0, 0, {}});
    SignedNmiScore score;
    try {
      score.value = std::stod(fields[3]);
    } catch (const std::exception&) {
      throw ValidationError("label table line " + std::to_string(line_no) + ": bad nmi value");
    }
    score.sign_negative = score.value < 0.0;
    auto& list = lists[it->second];
    list.entries.push_back(LabelEntry{fields[2], score});
    list.k = list.entries.size();
  }
  return lists;
}

void write_common_labels(std::ostream& out, const CommonLabelSet& set) {
  out << "term\tsource_count\n";
  for (const auto& term : set.labels) out << term << '\t' << set.source_count.at(term) << '\n';
}

std::vector<std::string> read_label_terms(std::istream& in) {
  std::vector<std::string> terms;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#' || (line_no == 1 && line.rfind("term\t", 0) == 0)) continue;
    terms.push_back(line.substr(0, line.find('\t')));
  }
  return terms;
}

}  // namespace lexfp
