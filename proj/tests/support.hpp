#pragma once
// Small builders shared by the unit tests and the acceptance run.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "lexfp/corpus.hpp"

namespace testsupport {

inline lexfp::Corpus corpus_of(std::vector<std::vector<std::string>> docs) {
  std::vector<lexfp::DocumentRecord> recs;
  for (std::size_t i = 0; i < docs.size(); ++i) recs.push_back({"d" + std::to_string(i), std::move(docs[i])});
  return lexfp::Corpus::from_records(recs);
}

// labels[d] = cluster name, or "" for an uncovered document.
inline lexfp::ClusteringSolution solution_of(const lexfp::Corpus& corpus, const std::string& name,
                                             const std::vector<std::string>& labels) {
  std::vector<std::pair<std::string, std::string>> pairs;
  for (std::size_t d = 0; d < labels.size(); ++d) {
    if (!labels[d].empty()) pairs.emplace_back(corpus.doc_id(static_cast<lexfp::DocIndex>(d)), labels[d]);
  }
  return lexfp::make_solution(corpus, name, pairs);
}

inline std::size_t uniform(std::mt19937_64& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

inline bool coin(std::mt19937_64& rng, double p) { return std::bernoulli_distribution(p)(rng); }

// Planted corpus: `n_clusters` blocks of documents; term j has a home cluster
// (j % n_clusters) and occurs there with probability p_in, elsewhere p_out.
struct Planted {
  lexfp::Corpus corpus;
  std::vector<std::string> cluster_of;  // "c0", "c1", ...
};

inline Planted planted(std::size_t n_docs, std::size_t n_clusters, std::size_t n_terms, std::uint64_t seed,
                       double p_in = 0.6, double p_out = 0.08) {
  std::mt19937_64 rng(seed);
  std::vector<std::vector<std::string>> docs(n_docs);
  std::vector<std::string> cl(n_docs);
  for (std::size_t d = 0; d < n_docs; ++d) cl[d] = "c" + std::to_string(d * n_clusters / n_docs);
  for (std::size_t d = 0; d < n_docs; ++d) {
    const std::size_t home = d * n_clusters / n_docs;
    for (std::size_t j = 0; j < n_terms; ++j) {
      // Skew grows with the term index so scores spread out.
      const double pin = p_in * (0.4 + 0.6 * static_cast<double>(j % 7) / 6.0);
      if (coin(rng, j % n_clusters == home ? pin : p_out)) docs[d].push_back("t" + std::to_string(j));
    }
  }
  return {corpus_of(std::move(docs)), std::move(cl)};
}

struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path = std::filesystem::temp_directory_path() / ("lexfp_" + tag + "_" + std::to_string(rd()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
};

}  // namespace testsupport
