#pragma once
// Mutual information and normalised mutual information between a term and a
// cluster (2x2 table) or a whole clustering solution (2 x m table). Base-2 logs.

#include <cstdint>
#include <span>
#include <vector>

#include "lexfp/corpus.hpp"

namespace lexfp {

/// Normalised MI carrying a sign: negative when the term occurs in the
/// cluster less often than its corpus share predicts.
struct SignedNmiScore {
  double value = 0.0;   // in [-1, 1]
  double raw_mi = 0.0;  // bits, >= 0
  bool sign_negative = false;

  friend bool operator==(const SignedNmiScore&, const SignedNmiScore&) = default;
};

/// Rounding noise below this magnitude is clamped to zero MI.
inline constexpr double kMiClampThreshold = 1e-12;

/// H(p) = -p log2 p - (1-p) log2 (1-p), with 0 log 0 = 0.
double entropy_binary(double p);

double term_cluster_mi(const ContingencyCell& cell);
SignedNmiScore term_cluster_nmi(const ContingencyCell& cell);

/// Per-cluster occurrence counts of one term, restricted to covered documents.
struct SolutionTermCounts {
  std::vector<std::uint64_t> in_cluster;    // |incidence ∩ c_k|
  std::vector<std::uint64_t> cluster_size;  // |c_k|
  std::uint64_t term_covered = 0;           // sum of in_cluster
  std::uint64_t n_covered = 0;
};

SolutionTermCounts solution_term_counts(const Corpus& corpus, TermId term, const ClusteringSolution& solution);

/// I(t, C) over the covered documents.
double term_solution_mi(const SolutionTermCounts& counts);
double term_solution_mi(const Corpus& corpus, TermId term, const ClusteringSolution& solution);

/// Solution-level NMI is reported unsigned: a term can be over-represented in
/// one cluster and under-represented in another, and both inform the solution.
SignedNmiScore term_solution_nmi(const SolutionTermCounts& counts);
SignedNmiScore term_solution_nmi(const Corpus& corpus, TermId term, const ClusteringSolution& solution);

/// Contingency of `term` against cluster k of `solution` under a universe mode,
/// computed from the solution's document→cluster map.
ContingencyCell cluster_cell(const Corpus& corpus, TermId term, const ClusteringSolution& solution, std::size_t k,
                             UniverseMode mode);

}  // namespace lexfp
