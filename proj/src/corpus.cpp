#include "lexfp/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "lexfp/error.hpp"

namespace lexfp {
namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

std::string_view trim_cr(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

bool skippable(std::string_view line) {
  return line.empty() || line.front() == '#' ||
         std::all_of(line.begin(), line.end(), [](char c) { return is_space(c); });
}

std::string at_line(std::size_t line_no) { return "line " + std::to_string(line_no) + ": "; }

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return in;
}

}  // namespace

std::string_view to_string(UniverseMode m) { return m == UniverseMode::All ? "all" : "covered"; }

UniverseMode parse_universe_mode(std::string_view s) {
  if (s == "all") return UniverseMode::All;
  if (s == "covered") return UniverseMode::Covered;
  throw ValidationError("unknown universe mode '" + std::string(s) + "' (expected all|covered)");
}

std::string normalize_term(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  bool pending_space = false;
  for (char c : raw) {
    if (is_space(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    out.push_back(c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a') : c);
  }
  return out;
}

Corpus Corpus::from_records(std::span<const DocumentRecord> records) {
  Corpus c;
  c.doc_ids_.reserve(records.size());
  for (const auto& rec : records) {
    const auto doc = static_cast<DocIndex>(c.doc_ids_.size());
    if (!c.doc_index_.emplace(rec.id, doc).second) {
      throw ValidationError("duplicate document id '" + rec.id + "'");
    }
    c.doc_ids_.push_back(rec.id);
    for (const auto& raw : rec.terms) {
      std::string term = normalize_term(raw);
      if (term.empty()) throw ValidationError("document '" + rec.id + "' has an empty term");
      auto [it, inserted] = c.term_index_.emplace(term, static_cast<TermId>(c.terms_.size()));
      if (inserted) {
        c.terms_.push_back(std::move(term));
        c.incidence_.emplace_back();
      }
      auto& inc = c.incidence_[it->second];
      // Documents arrive in increasing index order, so a repeat is always at the back.
      if (inc.empty() || inc.back() != doc) inc.push_back(doc);
    }
  }
  return c;
}

std::optional<DocIndex> Corpus::find_doc(std::string_view id) const {
  auto it = doc_index_.find(std::string(id));
  if (it == doc_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<TermId> Corpus::find_term(std::string_view raw) const {
  auto it = term_index_.find(normalize_term(raw));
  if (it == term_index_.end()) return std::nullopt;
  return it->second;
}

DocSet Corpus::incidence_set(TermId t) const { return DocSet(n_docs(), incidence(t)); }

Corpus load_corpus_jsonl(std::istream& in) {
  std::vector<DocumentRecord> records;
  std::unordered_map<std::string, std::size_t> first_line;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view view = trim_cr(line);
    if (std::all_of(view.begin(), view.end(), [](char c) { return is_space(c); })) continue;
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(view);
    } catch (const nlohmann::json::parse_error& e) {
      throw ValidationError(at_line(line_no) + "malformed JSON record: " + e.what());
    }
    if (!obj.is_object() || !obj.contains("id") || !obj["id"].is_string() || !obj.contains("terms") ||
        !obj["terms"].is_array()) {
      throw ValidationError(at_line(line_no) + "record needs a string \"id\" and an array \"terms\"");
    }
    DocumentRecord rec;
    rec.id = obj["id"].get<std::string>();
    for (const auto& t : obj["terms"]) {
      if (!t.is_string()) throw ValidationError(at_line(line_no) + "non-string term in \"terms\"");
      rec.terms.push_back(t.get<std::string>());
    }
    if (auto [it, fresh] = first_line.emplace(rec.id, line_no); !fresh) {
      throw ValidationError(at_line(line_no) + "duplicate document id '" + rec.id + "' (first seen on line " +
                            std::to_string(it->second) + ")");
    }
    records.push_back(std::move(rec));
  }
  return Corpus::from_records(records);
}

Corpus load_corpus_tsv(std::istream& in) {
  std::vector<DocumentRecord> records;
  std::unordered_map<std::string, std::size_t> by_id;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view view = trim_cr(line);
    if (skippable(view)) continue;
    const auto tab = view.find('\t');
    if (tab == std::string_view::npos || tab == 0 || view.find('\t', tab + 1) != std::string_view::npos) {
      throw ValidationError(at_line(line_no) + "expected doc_id<TAB>term");
    }
    std::string id(view.substr(0, tab));
    auto [it, inserted] = by_id.emplace(id, records.size());
    if (inserted) records.push_back(DocumentRecord{id, {}});
    records[it->second].terms.emplace_back(view.substr(tab + 1));
  }
  return Corpus::from_records(records);
}

Corpus load_corpus(const std::filesystem::path& path) {
  auto in = open_input(path);
  const auto ext = path.extension().string();
  try {
    if (ext == ".tsv" || ext == ".txt") return load_corpus_tsv(in);
    if (ext == ".cache") return load_corpus_cache(in);
    return load_corpus_jsonl(in);
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

// Snapshot layout: a magic line, then JSON-quoted document ids and terms with
// their incidence lists. Text keeps it diffable; JSON quoting keeps ids with
// tabs or newlines intact.
void save_corpus_cache(const Corpus& corpus, std::ostream& out) {
  out << "lexfp-corpus 1\n";
  out << "docs " << corpus.n_docs() << '\n';
  for (const auto& id : corpus.doc_ids()) out << nlohmann::json(id).dump() << '\n';
  out << "terms " << corpus.n_terms() << '\n';
  for (TermId t = 0; t < corpus.n_terms(); ++t) {
    out << nlohmann::json(corpus.term(t)).dump();
    for (DocIndex d : corpus.incidence(t)) out << ' ' << d;
    out << '\n';
  }
  if (!out) throw IoError("failed writing corpus cache");
}

Corpus load_corpus_cache(std::istream& in) {
  auto fail = [](const std::string& what) { return ValidationError("corpus cache: " + what); };
  std::string line;
  if (!std::getline(in, line) || line != "lexfp-corpus 1") throw fail("bad header");

  auto read_count = [&](std::string_view key) {
    if (!std::getline(in, line) || line.rfind(std::string(key) + ' ', 0) != 0) {
      throw fail("expected '" + std::string(key) + "' section");
    }
    return static_cast<std::size_t>(std::stoull(line.substr(key.size() + 1)));
  };

  Corpus c;
  const std::size_t n_docs = read_count("docs");
  for (std::size_t i = 0; i < n_docs; ++i) {
    if (!std::getline(in, line)) throw fail("truncated document list");
    auto id = nlohmann::json::parse(line).get<std::string>();
    if (!c.doc_index_.emplace(id, static_cast<DocIndex>(i)).second) throw fail("duplicate document id");
    c.doc_ids_.push_back(std::move(id));
  }
  const std::size_t n_terms = read_count("terms");
  for (std::size_t t = 0; t < n_terms; ++t) {
    if (!std::getline(in, line)) throw fail("truncated term list");
    // The quoted term ends at the first unescaped closing quote.
    std::size_t end = 1;
    while (end < line.size() && line[end] != '"') end += line[end] == '\\' ? 2 : 1;
    if (line.empty() || line[0] != '"' || end >= line.size()) throw fail("malformed term line");
    auto term = nlohmann::json::parse(line.substr(0, end + 1)).get<std::string>();
    std::vector<DocIndex> inc;
    std::istringstream rest(line.substr(end + 1));
    unsigned long long d = 0;
    while (rest >> d) {
      if (d >= n_docs || (!inc.empty() && d <= inc.back())) throw fail("invalid incidence list");
      inc.push_back(static_cast<DocIndex>(d));
    }
    if (!c.term_index_.emplace(term, static_cast<TermId>(t)).second) throw fail("duplicate term");
    c.terms_.push_back(std::move(term));
    c.incidence_.push_back(std::move(inc));
  }
  return c;
}

ClusteringSolution::ClusteringSolution(std::string name, std::vector<std::string> cluster_ids,
                                       std::vector<std::int32_t> cluster_of, std::size_t duplicate_assignments)
    : name_(std::move(name)),
      cluster_ids_(std::move(cluster_ids)),
      cluster_of_(std::move(cluster_of)),
      members_(cluster_ids_.size()),
      covered_(cluster_of_.size()),
      duplicate_assignments_(duplicate_assignments) {
  const auto m = static_cast<std::int32_t>(cluster_ids_.size());
  for (std::size_t d = 0; d < cluster_of_.size(); ++d) {
    const std::int32_t k = cluster_of_[d];
    if (k < 0) continue;
    if (k >= m) throw ValidationError("solution '" + name_ + "': cluster index out of range");
    members_[static_cast<std::size_t>(k)].push_back(static_cast<DocIndex>(d));
    covered_.insert(static_cast<DocIndex>(d));
    ++n_covered_;
  }
  if (n_covered_ == 0) throw ValidationError("solution covers zero documents ('" + name_ + "')");
  member_sets_.reserve(members_.size());
  for (std::size_t k = 0; k < members_.size(); ++k) {
    if (members_[k].empty()) {
      throw ValidationError("solution '" + name_ + "': cluster '" + cluster_ids_[k] + "' is empty");
    }
    member_sets_.emplace_back(cluster_of_.size(), members_[k]);
  }
}

std::optional<std::size_t> ClusteringSolution::find_cluster(std::string_view id) const {
  auto it = std::find(cluster_ids_.begin(), cluster_ids_.end(), id);
  if (it == cluster_ids_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - cluster_ids_.begin());
}

std::size_t ClusteringSolution::cluster_index(std::string_view id) const {
  if (auto k = find_cluster(id)) return *k;
  throw ValidationError("solution '" + name_ + "' has no cluster '" + std::string(id) + "'");
}

ClusteringSolution make_solution(const Corpus& corpus, std::string name,
                                 std::span<const std::pair<std::string, std::string>> assignments) {
  std::vector<std::string> ids;
  std::unordered_map<std::string, std::int32_t> id_index;
  std::vector<std::int32_t> cluster_of(corpus.n_docs(), -1);
  std::size_t duplicates = 0;
  for (const auto& [doc_id, cluster] : assignments) {
    const auto doc = corpus.find_doc(doc_id);
    if (!doc) throw ValidationError("solution '" + name + "': unknown document id '" + doc_id + "'");
    auto [it, inserted] = id_index.emplace(cluster, static_cast<std::int32_t>(ids.size()));
    if (inserted) ids.push_back(cluster);
    std::int32_t& slot = cluster_of[*doc];
    if (slot == it->second) {
      ++duplicates;
    } else if (slot >= 0) {
      throw ValidationError("solution '" + name + "': document '" + doc_id + "' assigned to both '" +
                            ids[static_cast<std::size_t>(slot)] + "' and '" + cluster + "'");
    } else {
      slot = it->second;
    }
  }
  return ClusteringSolution(std::move(name), std::move(ids), std::move(cluster_of), duplicates);
}

ClusteringSolution load_solution(const Corpus& corpus, std::istream& in, std::string name) {
  std::vector<std::pair<std::string, std::string>> pairs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view view = trim_cr(line);
    if (skippable(view)) continue;
    const auto tab = view.find('\t');
    if (tab == std::string_view::npos || tab == 0 || tab + 1 == view.size() ||
        view.find('\t', tab + 1) != std::string_view::npos) {
      throw ValidationError("solution '" + name + "' " + at_line(line_no) + "expected doc_id<TAB>cluster_id");
    }
    pairs.emplace_back(std::string(view.substr(0, tab)), std::string(view.substr(tab + 1)));
  }
  return make_solution(corpus, std::move(name), pairs);
}

ClusteringSolution load_solution(const Corpus& corpus, std::string_view spec) {
  std::string name;
  std::filesystem::path path;
  if (const auto eq = spec.find('='); eq != std::string_view::npos && eq > 0) {
    name = std::string(spec.substr(0, eq));
    path = std::string(spec.substr(eq + 1));
  } else {
    path = std::string(spec);
    name = path.stem().string();
  }
  auto in = open_input(path);
  return load_solution(corpus, in, std::move(name));
}

ContingencyCell make_cell(std::uint64_t n11, std::uint64_t term_count, std::uint64_t cluster_count,
                          std::uint64_t n_total) {
  if (n11 > term_count || n11 > cluster_count || term_count > n_total || cluster_count > n_total ||
      term_count + cluster_count - n11 > n_total) {
    throw ValidationError("inconsistent contingency marginals");
  }
  return ContingencyCell{n11, term_count - n11, cluster_count - n11, n_total - term_count - cluster_count + n11,
                         n_total};
}

ContingencyCell contingency(const Corpus& corpus, TermId term, const DocSet& doc_set) {
  if (corpus.n_docs() == 0) throw ValidationError("contingency over an empty universe");
  if (doc_set.universe_size() != corpus.n_docs()) throw ValidationError("document set does not match corpus");
  std::uint64_t n11 = 0;
  for (DocIndex d : corpus.incidence(term)) n11 += doc_set.contains(d) ? 1 : 0;
  return make_cell(n11, corpus.doc_frequency(term), doc_set.count(), corpus.n_docs());
}

ContingencyCell contingency(const Corpus& corpus, TermId term, const DocSet& doc_set, const DocSet& universe) {
  if (universe.universe_size() != corpus.n_docs() || doc_set.universe_size() != corpus.n_docs()) {
    throw ValidationError("document set does not match corpus");
  }
  const std::size_t n_total = universe.count();
  if (n_total == 0) throw ValidationError("contingency over an empty universe");
  if (!doc_set.is_subset_of(universe)) throw ValidationError("document set is not inside the universe");
  std::uint64_t n11 = 0;
  std::uint64_t n_term = 0;
  for (DocIndex d : corpus.incidence(term)) {
    if (!universe.contains(d)) continue;
    ++n_term;
    n11 += doc_set.contains(d) ? 1 : 0;
  }
  return make_cell(n11, n_term, doc_set.count(), n_total);
}

}  // namespace lexfp
