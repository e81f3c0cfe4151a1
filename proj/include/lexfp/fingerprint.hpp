#pragma once
// Per-cluster vectors of signed NMI against the ordered label axis, plus the
// similarity and overlap measures used to compare clusters.

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "lexfp/corpus.hpp"
#include "lexfp/docset.hpp"
#include "lexfp/tsp.hpp"

namespace lexfp {

struct Fingerprint {
  std::string solution;
  std::string cluster;
  std::vector<double> values;  // indexed by axis position, each in [-1, 1]
  std::string axis_id;

  std::string ref() const { return solution + ":" + cluster; }
};

Fingerprint make_fingerprint(const Corpus& corpus, const ClusteringSolution& solution, std::string_view cluster_id,
                             const LabelAxis& axis, UniverseMode mode = UniverseMode::All);

/// Fingerprints of every cluster of every solution, solutions in order, clusters in solution order.
std::vector<Fingerprint> make_fingerprints(const Corpus& corpus, std::span<const ClusteringSolution> solutions,
                                           const LabelAxis& axis, UniverseMode mode = UniverseMode::All);

enum class SimilarityKind { Cosine, NegSquaredEuclidean };
std::string_view to_string(SimilarityKind k);
SimilarityKind parse_similarity_kind(std::string_view s);

/// Cosine of the value vectors; 0 when either is all-zero. Throws on axis mismatch.
double fingerprint_similarity(const Fingerprint& a, const Fingerprint& b);
/// -|a - b|^2. Throws on axis mismatch.
double fingerprint_neg_sq_distance(const Fingerprint& a, const Fingerprint& b);
double fingerprint_similarity(const Fingerprint& a, const Fingerprint& b, SimilarityKind kind);

double jaccard(std::span<const DocIndex> a, std::span<const DocIndex> b);
/// Mean Jaccard over all unordered pairs; needs at least two sets.
double group_average_jaccard(std::span<const DocSet> sets);

/// Header row `cluster,<axis terms...>`, then `solution:cluster,v1,...,vn` at six decimals.
void write_fingerprint_csv(std::ostream& out, std::span<const Fingerprint> fingerprints, const LabelAxis& axis);

struct FingerprintTable {
  LabelAxis axis;  // order only; cost and method are not stored in the CSV
  std::vector<Fingerprint> fingerprints;
};
FingerprintTable read_fingerprint_csv(std::istream& in);

/// RFC 4180 quoting when the field holds a comma, quote or newline.
std::string csv_field(std::string_view s);
std::vector<std::string> parse_csv_line(std::string_view line);

}  // namespace lexfp
