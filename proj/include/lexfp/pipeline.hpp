#pragma once
// End-to-end run: labels, common label axis, fingerprints, meta-clusters and plots.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "lexfp/corpus.hpp"
#include "lexfp/fingerprint.hpp"
#include "lexfp/labeling.hpp"
#include "lexfp/manifest.hpp"
#include "lexfp/meta_cluster.hpp"

namespace lexfp {

struct PipelineConfig {
  std::filesystem::path corpus;
  std::vector<std::string> solutions;  // PATH or NAME=PATH
  std::filesystem::path out_dir = "out";

  std::size_t k = 10;
  UniverseMode label_universe = UniverseMode::All;
  RankBy rank = RankBy::Signed;

  std::size_t per_solution_k = 50;
  std::size_t min_occurrence = 2;

  std::uint64_t seed = 42;
  std::size_t kicks = 20;
  std::size_t restarts = 1;
  bool force_heuristic = false;
  std::optional<std::filesystem::path> vectors;

  UniverseMode fingerprint_universe = UniverseMode::All;
  SimilarityKind similarity = SimilarityKind::Cosine;
  ApConfig ap;
  double peak_quantile = 0.9;
  std::size_t label_every = 1;
};

/// Failure inside one pipeline stage; what() starts with the stage name.
class StageError : public std::runtime_error {
 public:
  StageError(std::string stage, const std::string& message)
      : std::runtime_error("stage " + stage + ": " + message), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

struct PipelineResult {
  std::vector<std::filesystem::path> files;
  std::size_t n_fingerprints = 0;
  std::size_t n_groups = 0;
  std::size_t n_common_labels = 0;
};

RunManifest pipeline_manifest(const PipelineConfig& config);

/// Runs every stage, then writes all outputs. On any error nothing is left behind
/// in out_dir from this run. With a single solution only the per-cluster labels
/// are produced.
PipelineResult run_pipeline(const PipelineConfig& config);

}  // namespace lexfp
