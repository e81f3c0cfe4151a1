#include "lexfp/pipeline.hpp"

#include <fstream>
#include <functional>
#include <sstream>

#include "lexfp/error.hpp"
#include "lexfp/tsp.hpp"
#include "lexfp/viz.hpp"

namespace lexfp {
namespace {

template <class F>
auto stage(const std::string& name, F&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(name, e.what());
  }
}

}  // namespace

RunManifest pipeline_manifest(const PipelineConfig& c) {
  RunManifest m;
  m.command = "pipeline";
  m.add_input(c.corpus);
  for (const auto& spec : c.solutions) {
    const auto eq = spec.find('=');
    m.add_input(eq == std::string::npos || eq == 0 ? spec : spec.substr(eq + 1));
  }
  if (c.vectors) m.add_input(*c.vectors);
  m.parameters = {{"k", c.k},
                  {"label_universe", std::string(to_string(c.label_universe))},
                  {"rank", c.rank == RankBy::Signed ? "signed" : "magnitude"},
                  {"per_solution_k", c.per_solution_k},
                  {"min_occurrence", c.min_occurrence},
                  {"seed", c.seed},
                  {"kicks", c.kicks},
                  {"restarts", c.restarts},
                  {"force_heuristic", c.force_heuristic},
                  {"vectors", c.vectors ? "external" : "doc_incidence"},
                  {"fingerprint_universe", std::string(to_string(c.fingerprint_universe))},
                  {"similarity", std::string(to_string(c.similarity))},
                  {"ap_damping", c.ap.damping},
                  {"ap_max_iter", c.ap.max_iter},
                  {"ap_convergence_iter", c.ap.convergence_iter},
                  {"ap_preference", c.ap.preference ? nlohmann::json(*c.ap.preference) : nlohmann::json("median")},
                  {"peak_quantile", c.peak_quantile},
                  {"label_every", c.label_every}};
  m.notes = {{"solution_nmi_sign", "unsigned"}, {"distance", "cosine"}};
  return m;
}

PipelineResult run_pipeline(const PipelineConfig& c) {
  if (c.solutions.empty()) throw StageError("load", "at least one solution is required");
  const RunManifest manifest = stage("load", [&] { return pipeline_manifest(c); });

  const Corpus corpus = stage("load", [&] { return load_corpus(c.corpus); });
  const std::vector<ClusteringSolution> solutions = stage("load", [&] {
    std::vector<ClusteringSolution> out;
    for (const auto& spec : c.solutions) out.push_back(load_solution(corpus, spec));
    for (std::size_t i = 0; i < out.size(); ++i) {
      for (std::size_t j = 0; j < i; ++j) {
        if (out[i].name() == out[j].name()) throw ValidationError("duplicate solution name '" + out[i].name() + "'");
      }
    }
    return out;
  });

  std::vector<std::pair<std::string, std::string>> outputs;
  PipelineResult result;

  stage("label", [&] {
    std::vector<LabelList> lists;
    for (const auto& sol : solutions) {
      auto per = label_clusters(corpus, sol, c.k, c.label_universe, c.rank);
      lists.insert(lists.end(), per.begin(), per.end());
    }
    std::ostringstream tsv, table;
    write_label_tsv(tsv, lists);
    write_label_table(table, lists);
    outputs.emplace_back("labels.tsv", tsv.str());
    outputs.emplace_back("labels_table.tsv", table.str());
  });

  if (solutions.size() >= 2) {
    const CommonLabelSet common = stage("common-labels", [&] {
      std::vector<LabelList> lists;
      for (const auto& sol : solutions) lists.push_back(label_solution(corpus, sol, c.per_solution_k));
      std::ostringstream tsv;
      write_label_tsv(tsv, lists);
      outputs.emplace_back("solution_labels.tsv", tsv.str());
      auto set = common_labels(lists, c.min_occurrence, c.per_solution_k);
      std::ostringstream common_tsv;
      write_common_labels(common_tsv, set);
      outputs.emplace_back("common_labels.tsv", common_tsv.str());
      return set;
    });
    result.n_common_labels = common.labels.size();

    const LabelAxis axis = stage("order", [&] {
      if (common.labels.size() < 2) {
        throw ValidationError("only " + std::to_string(common.labels.size()) +
                              " common label(s); ordering needs at least two");
      }
      const TermVectorSpace space = [&] {
        if (!c.vectors) return TermVectorSpace::from_incidence(corpus, common.labels);
        std::ifstream in(*c.vectors);
        if (!in) throw IoError("cannot open " + c.vectors->string());
        return load_external_vectors(in).restrict_to(common.labels);
      }();
      auto ax = order_labels(common.labels, space, c.seed, c.kicks, c.force_heuristic, c.restarts);
      std::ostringstream out;
      write_axis(out, ax);
      outputs.emplace_back("axis.tsv", out.str());
      return ax;
    });

    const std::vector<Fingerprint> fingerprints = stage("fingerprint", [&] {
      auto fps = make_fingerprints(corpus, solutions, axis, c.fingerprint_universe);
      std::ostringstream out;
      write_fingerprint_csv(out, fps, axis);
      outputs.emplace_back("fingerprints.csv", out.str());
      return fps;
    });
    result.n_fingerprints = fingerprints.size();

    const auto [meta, report] = stage("metacluster", [&] {
      auto mc = affinity_propagation(similarity_matrix(fingerprints, c.similarity), c.ap);
      std::vector<DocSet> sets;
      for (const auto& sol : solutions) {
        for (std::size_t k = 0; k < sol.n_clusters(); ++k) sets.push_back(sol.member_set(k));
      }
      auto rep = group_report(mc, fingerprints, sets, axis.order, c.peak_quantile);
      std::ostringstream tsv;
      write_meta_tsv(tsv, mc, fingerprints);
      outputs.emplace_back("metaclusters.tsv", tsv.str());
      outputs.emplace_back("metaclusters.json",
                           report_to_json(rep, mc, fingerprints, c.similarity, c.ap).dump(2) + "\n");
      return std::pair{mc, rep};
    });
    result.n_groups = meta.exemplars.size();

    stage("plot", [&] {
      PlotSpec spec = PlotSpec::from(fingerprints, axis);
      spec.label_every = c.label_every;
      outputs.emplace_back("fingerprints.svg", render_svg(spec));
      outputs.emplace_back("fingerprints_plot.csv", export_plot_csv(spec));
      for (const auto& group : report.groups) {
        if (group.members.size() < 2) continue;
        std::vector<Fingerprint> members;
        for (std::size_t i : group.members) members.push_back(fingerprints[i]);
        PlotSpec gspec = PlotSpec::from(members, axis);
        gspec.label_every = c.label_every;
        outputs.emplace_back("group_" + std::to_string(group.id) + ".svg", render_svg(gspec));
      }
    });
  }

  OutputWriter writer(c.out_dir, manifest);
  try {
    for (const auto& [name, content] : outputs) writer.write(name, content);
  } catch (const std::exception& e) {
    writer.rollback();
    throw StageError("write", e.what());
  }
  result.files = writer.written();
  return result;
}

}  // namespace lexfp
