#pragma once
// Document–term corpus, clustering solutions and the 2x2 contingency counts
// every NMI computation starts from.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "lexfp/docset.hpp"

namespace lexfp {

using TermId = std::uint32_t;

/// Which documents probabilities are estimated over: the whole corpus, or only
/// the documents a solution assigns to some cluster.
enum class UniverseMode { All, Covered };

std::string_view to_string(UniverseMode m);
UniverseMode parse_universe_mode(std::string_view s);

/// Lowercase (ASCII) and collapse runs of whitespace to one space, trimming both ends.
std::string normalize_term(std::string_view raw);

struct DocumentRecord {
  std::string id;
  std::vector<std::string> terms;
};

/// Binary document–term incidence. Immutable once built.
class Corpus {
 public:
  /// Builds from records in document order. Terms are normalized and
  /// deduplicated per document; term ids follow first appearance.
  /// Throws ValidationError on duplicate document ids or empty terms.
  static Corpus from_records(std::span<const DocumentRecord> records);

  std::size_t n_docs() const { return doc_ids_.size(); }
  std::size_t n_terms() const { return terms_.size(); }

  const std::vector<std::string>& doc_ids() const { return doc_ids_; }
  const std::string& doc_id(DocIndex d) const { return doc_ids_.at(d); }
  std::optional<DocIndex> find_doc(std::string_view id) const;

  const std::string& term(TermId t) const { return terms_.at(t); }
  const std::vector<std::string>& terms() const { return terms_; }
  /// Looks up a term after normalizing `raw`.
  std::optional<TermId> find_term(std::string_view raw) const;

  /// Sorted, deduplicated indices of the documents containing term `t`.
  std::span<const DocIndex> incidence(TermId t) const { return incidence_.at(t); }
  std::size_t doc_frequency(TermId t) const { return incidence_.at(t).size(); }
  DocSet incidence_set(TermId t) const;

  friend bool operator==(const Corpus& a, const Corpus& b) {
    return a.doc_ids_ == b.doc_ids_ && a.terms_ == b.terms_ && a.incidence_ == b.incidence_;
  }

 private:
  std::vector<std::string> doc_ids_;
  std::unordered_map<std::string, DocIndex> doc_index_;
  std::vector<std::string> terms_;
  std::unordered_map<std::string, TermId> term_index_;
  std::vector<std::vector<DocIndex>> incidence_;

  friend Corpus load_corpus_cache(std::istream& in);
};

/// JSON lines: {"id": "...", "terms": ["...", ...]} per line.
Corpus load_corpus_jsonl(std::istream& in);
/// TSV: doc_id<TAB>term, one pair per line, aggregated per document.
Corpus load_corpus_tsv(std::istream& in);
/// Picks the format from the extension (.tsv/.txt = TSV, .cache = snapshot,
/// anything else JSON lines).
Corpus load_corpus(const std::filesystem::path& path);

void save_corpus_cache(const Corpus& corpus, std::ostream& out);
Corpus load_corpus_cache(std::istream& in);

/// Hard partition of a (possibly proper) subset of the corpus documents.
class ClusteringSolution {
 public:
  /// cluster_of[d] is an index into cluster_ids, or -1 when d is uncovered.
  /// Throws ValidationError for empty clusters or when nothing is covered.
  ClusteringSolution(std::string name, std::vector<std::string> cluster_ids,
                     std::vector<std::int32_t> cluster_of, std::size_t duplicate_assignments = 0);

  const std::string& name() const { return name_; }
  std::size_t n_docs() const { return cluster_of_.size(); }
  std::size_t n_clusters() const { return cluster_ids_.size(); }
  std::size_t n_covered() const { return n_covered_; }

  const std::vector<std::string>& cluster_ids() const { return cluster_ids_; }
  const std::string& cluster_id(std::size_t k) const { return cluster_ids_.at(k); }
  std::optional<std::size_t> find_cluster(std::string_view id) const;
  /// Throws ValidationError naming the id when it is unknown.
  std::size_t cluster_index(std::string_view id) const;

  std::span<const DocIndex> members(std::size_t k) const { return members_.at(k); }
  const DocSet& member_set(std::size_t k) const { return member_sets_.at(k); }
  const DocSet& covered() const { return covered_; }
  std::int32_t cluster_of(DocIndex d) const { return cluster_of_.at(d); }
  std::span<const std::int32_t> assignment() const { return cluster_of_; }

  /// Records that assigned the same document to the same cluster again.
  std::size_t duplicate_assignments() const { return duplicate_assignments_; }

 private:
  std::string name_;
  std::vector<std::string> cluster_ids_;
  std::vector<std::int32_t> cluster_of_;
  std::vector<std::vector<DocIndex>> members_;
  std::vector<DocSet> member_sets_;
  DocSet covered_;
  std::size_t n_covered_ = 0;
  std::size_t duplicate_assignments_ = 0;
};

/// Builds a solution from (document id, cluster id) pairs in stream order.
ClusteringSolution make_solution(const Corpus& corpus, std::string name,
                                 std::span<const std::pair<std::string, std::string>> assignments);
/// TSV doc_id<TAB>cluster_id; '#' lines and blank lines are ignored.
ClusteringSolution load_solution(const Corpus& corpus, std::istream& in, std::string name);
/// `spec` is either a path (name = file stem) or NAME=PATH.
ClusteringSolution load_solution(const Corpus& corpus, std::string_view spec);

struct ContingencyCell {
  std::uint64_t n11 = 0;  // term present, in cluster
  std::uint64_t n10 = 0;  // term present, not in cluster
  std::uint64_t n01 = 0;  // term absent, in cluster
  std::uint64_t n00 = 0;  // neither
  std::uint64_t n_total = 0;

  std::uint64_t term_count() const { return n11 + n10; }
  std::uint64_t cluster_count() const { return n11 + n01; }

  friend bool operator==(const ContingencyCell&, const ContingencyCell&) = default;
};

/// Cell from marginals. Throws ValidationError if they are inconsistent.
ContingencyCell make_cell(std::uint64_t n11, std::uint64_t term_count, std::uint64_t cluster_count,
                          std::uint64_t n_total);

/// Counts over all corpus documents.
ContingencyCell contingency(const Corpus& corpus, TermId term, const DocSet& doc_set);
/// Counts over `universe`; doc_set must be a subset of it and it must be non-empty.
ContingencyCell contingency(const Corpus& corpus, TermId term, const DocSet& doc_set, const DocSet& universe);

}  // namespace lexfp
