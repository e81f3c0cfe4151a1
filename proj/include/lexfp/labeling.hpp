#pragma once
// Top-k labels per cluster and per solution, and the cross-solution common label set.

#include <cstddef>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "lexfp/corpus.hpp"
#include "lexfp/nmi.hpp"

namespace lexfp {

enum class RankBy { Signed, Magnitude };
RankBy parse_rank_by(std::string_view s);

struct LabelEntry {
  std::string term;
  SignedNmiScore score;
};

/// Entries sorted by ranking key descending, ties by ascending term string.
struct LabelList {
  std::string owner;           // "solution:cluster" or the solution name
  std::size_t owner_size = 0;  // cluster size, or covered documents for a solution
  std::size_t k = 0;
  std::vector<LabelEntry> entries;
};

std::string cluster_ref(const ClusteringSolution& solution, std::size_t k);

LabelList label_cluster(const Corpus& corpus, const ClusteringSolution& solution, std::string_view cluster_id,
                        std::size_t k, UniverseMode mode = UniverseMode::All, RankBy rank = RankBy::Signed);

/// label_cluster for every cluster of the solution, one term sweep for all of them.
std::vector<LabelList> label_clusters(const Corpus& corpus, const ClusteringSolution& solution, std::size_t k,
                                      UniverseMode mode = UniverseMode::All, RankBy rank = RankBy::Signed);

/// Top-k terms by solution-level NMI over the covered documents.
LabelList label_solution(const Corpus& corpus, const ClusteringSolution& solution, std::size_t k);

struct CommonLabelSet {
  std::vector<std::string> labels;  // ascending
  std::map<std::string, std::size_t> source_count;
  std::size_t per_solution_k = 50;
  std::size_t min_occurrence = 2;
};

/// Terms found in the top per_solution_k of at least min_occurrence lists.
CommonLabelSet common_labels(std::span<const LabelList> lists, std::size_t min_occurrence = 2,
                             std::size_t per_solution_k = 50);

/// Fixed six-decimal rendering used by every text output.
std::string format_score(double v);

/// owner<TAB>rank<TAB>term<TAB>nmi with a header row; rank starts at 1.
void write_label_tsv(std::ostream& out, std::span<const LabelList> lists);
/// owner<TAB>size<TAB>comma-joined labels.
void write_label_table(std::ostream& out, std::span<const LabelList> lists);
/// Reads write_label_tsv output back, grouped by owner in first-seen order.
std::vector<LabelList> read_label_tsv(std::istream& in);

/// term<TAB>source_count with a header row.
void write_common_labels(std::ostream& out, const CommonLabelSet& set);
/// Accepts write_common_labels output or a bare one-term-per-line list.
std::vector<std::string> read_label_terms(std::istream& in);

}  // namespace lexfp
