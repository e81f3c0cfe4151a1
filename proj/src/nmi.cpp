#include "lexfp/nmi.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "lexfp/error.hpp"

namespace lexfp {
namespace {

// joint/N * log2(joint * N / (row * col)); zero joint contributes nothing.
double mi_term(std::uint64_t joint, std::uint64_t row, std::uint64_t col, std::uint64_t n) {
  if (joint == 0) return 0.0;
  const double j = static_cast<double>(joint);
  const double total = static_cast<double>(n);
  const double ratio = (j * total) / (static_cast<double>(row) * static_cast<double>(col));
  return (j / total) * std::log2(ratio);
}

// Sums in ascending order, so tables that are permutations of each other (swapped
// margins, complemented events, relabelled clusters) give bit-identical results
// and rank as exact ties.
template <class Terms>
double canonical_sum(Terms terms) {
  std::sort(terms.begin(), terms.end());
  double s = 0.0;
  for (double t : terms) s += t;
  return s;
}

// -(c/n) log2(c/n), from counts.
double plogp(std::uint64_t c, std::uint64_t n) {
  if (c == 0 || c == n) return 0.0;
  const double p = static_cast<double>(c) / static_cast<double>(n);
  return -p * std::log2(p);
}

double entropy_counts(std::uint64_t c, std::uint64_t n) { return plogp(c, n) + plogp(n - c, n); }

double clamp_mi(double mi) { return (mi < 0.0 && mi > -kMiClampThreshold) ? 0.0 : mi; }

double normalise(double mi, double h_sum) {
  if (h_sum <= 0.0) return 0.0;
  return std::min(1.0, 2.0 * mi / h_sum);
}

}  // namespace

double entropy_binary(double p) {
  double h = 0.0;
  if (p > 0.0) h -= p * std::log2(p);
  if (p < 1.0) h -= (1.0 - p) * std::log2(1.0 - p);
  return h;
}

double term_cluster_mi(const ContingencyCell& c) {
  if (c.n_total == 0) throw ValidationError("mutual information over an empty universe");
  const std::uint64_t t1 = c.n11 + c.n10;
  const std::uint64_t t0 = c.n01 + c.n00;
  const std::uint64_t u1 = c.n11 + c.n01;
  const std::uint64_t u0 = c.n10 + c.n00;
  return clamp_mi(canonical_sum(std::array{mi_term(c.n11, t1, u1, c.n_total), mi_term(c.n10, t1, u0, c.n_total),
                                 mi_term(c.n01, t0, u1, c.n_total), mi_term(c.n00, t0, u0, c.n_total)}));
}

SignedNmiScore term_cluster_nmi(const ContingencyCell& c) {
  SignedNmiScore s;
  s.raw_mi = term_cluster_mi(c);
  s.value = normalise(s.raw_mi, entropy_counts(c.term_count(), c.n_total) + entropy_counts(c.cluster_count(), c.n_total));
  // Observed n11 below expectation term_count * cluster_count / n_total, compared exactly.
  const auto observed = static_cast<unsigned __int128>(c.n11) * c.n_total;
  const auto expected = static_cast<unsigned __int128>(c.term_count()) * c.cluster_count();
  s.sign_negative = observed < expected;
  if (s.sign_negative && s.value != 0.0) s.value = -s.value;
  return s;
}

SolutionTermCounts solution_term_counts(const Corpus& corpus, TermId term, const ClusteringSolution& solution) {
  if (solution.n_docs() != corpus.n_docs()) throw ValidationError("solution does not match corpus");
  SolutionTermCounts counts;
  counts.in_cluster.assign(solution.n_clusters(), 0);
  counts.cluster_size.resize(solution.n_clusters());
  for (std::size_t k = 0; k < solution.n_clusters(); ++k) counts.cluster_size[k] = solution.members(k).size();
  for (DocIndex d : corpus.incidence(term)) {
    const std::int32_t k = solution.cluster_of(d);
    if (k < 0) continue;
    ++counts.in_cluster[static_cast<std::size_t>(k)];
    ++counts.term_covered;
  }
  counts.n_covered = solution.n_covered();
  return counts;
}

double term_solution_mi(const SolutionTermCounts& c) {
  if (c.n_covered == 0) throw ValidationError("solution covers zero documents");
  const std::uint64_t t1 = c.term_covered;
  const std::uint64_t t0 = c.n_covered - t1;
  std::vector<double> terms;
  terms.reserve(2 * c.in_cluster.size());
  for (std::size_t k = 0; k < c.in_cluster.size(); ++k) {
    const std::uint64_t present = c.in_cluster[k];
    const std::uint64_t absent = c.cluster_size[k] - present;
    terms.push_back(mi_term(present, t1, c.cluster_size[k], c.n_covered));
    terms.push_back(mi_term(absent, t0, c.cluster_size[k], c.n_covered));
  }
  return clamp_mi(canonical_sum(std::move(terms)));
}

double term_solution_mi(const Corpus& corpus, TermId term, const ClusteringSolution& solution) {
  return term_solution_mi(solution_term_counts(corpus, term, solution));
}

SignedNmiScore term_solution_nmi(const SolutionTermCounts& c) {
  SignedNmiScore s;
  s.raw_mi = term_solution_mi(c);
  std::vector<double> h;
  for (std::uint64_t size : c.cluster_size) h.push_back(plogp(size, c.n_covered));
  s.value = normalise(s.raw_mi, entropy_counts(c.term_covered, c.n_covered) + canonical_sum(std::move(h)));
  return s;
}

SignedNmiScore term_solution_nmi(const Corpus& corpus, TermId term, const ClusteringSolution& solution) {
  return term_solution_nmi(solution_term_counts(corpus, term, solution));
}

ContingencyCell cluster_cell(const Corpus& corpus, TermId term, const ClusteringSolution& solution, std::size_t k,
                             UniverseMode mode) {
  if (solution.n_docs() != corpus.n_docs()) throw ValidationError("solution does not match corpus");
  const auto target = static_cast<std::int32_t>(k);
  std::uint64_t n11 = 0;
  std::uint64_t n_term = 0;
  for (DocIndex d : corpus.incidence(term)) {
    const std::int32_t c = solution.cluster_of(d);
    if (mode == UniverseMode::Covered && c < 0) continue;
    ++n_term;
    n11 += c == target ? 1 : 0;
  }
  const std::uint64_t n_total = mode == UniverseMode::All ? corpus.n_docs() : solution.n_covered();
  return make_cell(n11, n_term, solution.members(k).size(), n_total);
}

}  // namespace lexfp
