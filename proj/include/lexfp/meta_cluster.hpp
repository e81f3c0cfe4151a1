#pragma once
// Affinity Propagation over cluster fingerprints ("clusters of clusters").

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "lexfp/docset.hpp"
#include "lexfp/fingerprint.hpp"

namespace lexfp {

class SquareMatrix {
 public:
  SquareMatrix() = default;
  explicit SquareMatrix(std::size_t n, double fill = 0.0) : n_(n), data_(n * n, fill) {}

  std::size_t size() const { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
  std::span<double> row(std::size_t i) { return std::span(data_).subspan(i * n_, n_); }
  std::span<const double> row(std::size_t i) const { return std::span(data_).subspan(i * n_, n_); }

 private:
  std::size_t n_ = 0;
  std::vector<double> data_;
};

/// Defaults follow the common library defaults: damping 0.5, 200 iterations,
/// 15-iteration stability window, preference = median similarity.
struct ApConfig {
  double damping = 0.5;
  std::size_t max_iter = 200;
  std::size_t convergence_iter = 15;
  std::optional<double> preference;  // nullopt: median of the off-diagonal similarities

  /// Throws ValidationError when out of range.
  void validate() const;
};

struct MetaClustering {
  std::vector<std::size_t> exemplars;   // ascending point indices
  std::vector<std::size_t> membership;  // point -> its exemplar's point index
  bool converged = false;
  std::size_t iterations_run = 0;
  double preference = 0.0;

  /// Position of i's exemplar in `exemplars`.
  std::size_t group_of(std::size_t i) const;
};

double median_off_diagonal(const SquareMatrix& s);

/// Message passing with damped responsibility/availability updates. Stops when
/// the exemplar set has been unchanged for convergence_iter iterations, or at
/// max_iter with converged = false and the last non-empty exemplar set.
/// The diagonal of `similarity` is replaced by the preference.
MetaClustering affinity_propagation(SquareMatrix similarity, const ApConfig& config = {});

SquareMatrix similarity_matrix(std::span<const Fingerprint> fingerprints, SimilarityKind kind);

struct MetaGroup {
  std::size_t id = 0;
  std::size_t exemplar = 0;
  std::vector<std::size_t> members;
  std::optional<double> average_jaccard;  // needs document sets and >= 2 members
  std::vector<std::string> shared_peaks;  // axis labels where every member is at or above its quantile
};

struct GroupReport {
  std::vector<MetaGroup> groups;
  double peak_quantile = 0.9;
};

/// `doc_sets` is either empty or parallel to `fingerprints`.
GroupReport group_report(const MetaClustering& meta, std::span<const Fingerprint> fingerprints,
                         std::span<const DocSet> doc_sets, std::span<const std::string> axis_terms,
                         double peak_quantile = 0.9);

nlohmann::json report_to_json(const GroupReport& report, const MetaClustering& meta,
                              std::span<const Fingerprint> fingerprints, SimilarityKind kind, const ApConfig& config);

/// solution:cluster<TAB>group_id<TAB>is_exemplar with a header row.
void write_meta_tsv(std::ostream& out, const MetaClustering& meta, std::span<const Fingerprint> fingerprints);

}  // namespace lexfp
