#pragma once
// Term vectors, cosine distances and open-path orderings of a label set that
// minimise the summed distance between neighbouring labels.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "lexfp/corpus.hpp"
#include "lexfp/docset.hpp"

namespace lexfp {

enum class VectorProvenance { DocIncidence, External };

/// Cosine distance 1 - a·b / (|a||b|), in [0, 2]. Throws on zero vectors or length mismatch.
double cosine_distance(std::span<const double> a, std::span<const double> b);

class TermVectorSpace {
 public:
  /// Each label's document-incidence indicator over the corpus (dim = n_docs).
  /// Throws ValidationError for labels missing from the corpus.
  static TermVectorSpace from_incidence(const Corpus& corpus, std::span<const std::string> labels);
  /// Precomputed vectors. Throws ValidationError on ragged dims, zero vectors or duplicate terms.
  static TermVectorSpace from_dense(std::vector<std::string> terms, std::vector<std::vector<double>> vectors);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return terms_.size(); }
  VectorProvenance provenance() const { return provenance_; }
  const std::vector<std::string>& terms() const { return terms_; }
  std::optional<std::size_t> find(const std::string& term) const;

  /// Cosine distance between the i-th and j-th vectors; exactly 0 when i == j.
  double distance(std::size_t i, std::size_t j) const;
  std::vector<double> dense_vector(std::size_t i) const;

  /// Sub-space holding exactly `labels`, in that order.
  TermVectorSpace restrict_to(std::span<const std::string> labels) const;

 private:
  std::size_t dim_ = 0;
  VectorProvenance provenance_ = VectorProvenance::DocIncidence;
  std::vector<std::string> terms_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<DocSet> incidence_;         // DocIncidence
  std::vector<std::uint64_t> popcounts_;  // DocIncidence
  std::vector<std::vector<double>> dense_;  // External
  std::vector<double> sq_norms_;            // External
};

/// TSV term<TAB>v1<TAB>...<TAB>vdim. Terms are normalized like corpus terms.
TermVectorSpace load_external_vectors(std::istream& in);

class DistanceMatrix {
 public:
  explicit DistanceMatrix(std::size_t n) : n_(n), d_(n * n, 0.0) {}
  std::size_t size() const { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return d_[i * n_ + j]; }
  double& at(std::size_t i, std::size_t j) { return d_[i * n_ + j]; }

 private:
  std::size_t n_;
  std::vector<double> d_;
};

/// Symmetric distance matrix over the whole space; rows computed in parallel.
DistanceMatrix pairwise_distances(const TermVectorSpace& space);

/// Sum of distances between consecutive entries of an open path.
double path_cost(const DistanceMatrix& d, std::span<const std::size_t> order);

struct Tour {
  std::vector<std::size_t> order;
  double cost = 0.0;
};

/// Globally optimal open path (Held-Karp dynamic programme). Ties resolve to
/// the lowest indices. Supports up to 20 nodes.
Tour solve_exact(const DistanceMatrix& d);

struct ChainedLkResult {
  Tour best;
  double nearest_neighbour_cost = 0.0;  // the seeded construction
  double local_search_cost = 0.0;       // after the first local search, before any kick
};

/// Nearest-neighbour start from a seeded random node, 2-opt + Or-opt (segments
/// of 1-3) to a local optimum, then `kicks` double-bridge perturbations each
/// followed by re-optimisation, keeping the best tour. Internally the open path
/// is a cycle through a depot at distance 0 from every node.
ChainedLkResult solve_chained_lk(const DistanceMatrix& d, std::uint64_t seed, std::size_t kicks);

enum class OrderMethod { Exact, ChainedLk };
std::string_view to_string(OrderMethod m);

inline constexpr std::size_t kMaxExactLabels = 12;

/// Ordered common labels: the shared one-dimensional coordinate system.
struct LabelAxis {
  std::vector<std::string> order;
  double tour_cost = 0.0;
  OrderMethod method = OrderMethod::Exact;
  std::uint64_t seed = 0;

  std::size_t size() const { return order.size(); }
  /// Stable identifier derived from the term order.
  std::string id() const;
};

std::string axis_id(std::span<const std::string> order);

/// Exhaustively optimal ordering for 2..12 labels. Of a path and its reverse the
/// lexicographically smaller term sequence is returned.
LabelAxis order_exact(std::span<const std::string> labels, const TermVectorSpace& space);

LabelAxis order_chained_lk(std::span<const std::string> labels, const TermVectorSpace& space, std::uint64_t seed,
                           std::size_t kicks);

/// Runs order_chained_lk for every seed (in parallel) and keeps the lowest
/// (cost, seed).
LabelAxis order_chained_lk_best(std::span<const std::string> labels, const TermVectorSpace& space,
                                std::span<const std::uint64_t> seeds, std::size_t kicks);

/// Exact for at most kMaxExactLabels labels unless force_heuristic.
LabelAxis order_labels(std::span<const std::string> labels, const TermVectorSpace& space, std::uint64_t seed,
                       std::size_t kicks, bool force_heuristic = false, std::size_t restarts = 1);

/// "# tour_cost=... method=... seed=..." then position<TAB>term rows (0-based).
void write_axis(std::ostream& out, const LabelAxis& axis);
LabelAxis read_axis(std::istream& in);

}  // namespace lexfp
