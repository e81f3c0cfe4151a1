// lexfp: label clusters by signed NMI, build lexical fingerprints on a common
// label axis and group clusters across clustering solutions.
//
// Exit codes: 0 success, 1 runtime or I/O error, 2 usage error.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "lexfp/corpus.hpp"
#include "lexfp/error.hpp"
#include "lexfp/fingerprint.hpp"
#include "lexfp/labeling.hpp"
#include "lexfp/manifest.hpp"
#include "lexfp/meta_cluster.hpp"
#include "lexfp/parallel.hpp"
#include "lexfp/pipeline.hpp"
#include "lexfp/simd.hpp"
#include "lexfp/tsp.hpp"
#include "lexfp/viz.hpp"

namespace {

using namespace lexfp;

struct Common {
  std::uint64_t seed = 42;
  unsigned threads = 0;
  std::string out_dir;
};

std::ifstream open_or_throw(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  return in;
}

std::string solution_path(const std::string& spec) {
  const auto eq = spec.find('=');
  return eq == std::string::npos || eq == 0 ? spec : spec.substr(eq + 1);
}

/// Sends one output to --out, to <out-dir>/<default_name>, or to stdout.
void emit(const std::string& content, const std::string& out, const Common& common, const std::string& default_name,
          const RunManifest& manifest) {
  if (!out.empty()) {
    write_with_manifest(out, content, manifest);
  } else if (!common.out_dir.empty()) {
    OutputWriter(common.out_dir, manifest).write(default_name, content);
  } else {
    std::cout << content;
  }
}

std::vector<ClusteringSolution> load_solutions(const Corpus& corpus, const std::vector<std::string>& specs) {
  std::vector<ClusteringSolution> out;
  for (const auto& s : specs) out.push_back(load_solution(corpus, s));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cluster labelling and comparison by signed normalised mutual information"};
  app.require_subcommand(1);
  app.fallthrough();
  Common common;
  app.add_option("--seed", common.seed, "Random seed for the heuristic ordering")->capture_default_str();
  app.add_option("--threads", common.threads, "Worker threads (0 = all cores)")->capture_default_str();
  app.add_option("--out-dir", common.out_dir, "Directory for output files (with manifest sidecars)");
  std::string simd_backend;
  app.add_option("--simd", simd_backend, "Kernel backend override")->check(CLI::IsMember({"scalar", "avx2", "neon"}));

  const std::map<std::string, std::string> universes{{"all", "all"}, {"covered", "covered"}};

  // label
  auto* label = app.add_subcommand("label", "Top-k labels for every cluster of a solution");
  std::string l_corpus, l_solution, l_universe = "all", l_rank = "signed", l_format = "tsv", l_out;
  std::size_t l_k = 10;
  label->add_option("--corpus", l_corpus, "Corpus (JSON lines or TSV)")->required();
  label->add_option("--solution", l_solution, "Solution TSV, PATH or NAME=PATH")->required();
  label->add_option("--k", l_k, "Labels per cluster")->check(CLI::PositiveNumber)->capture_default_str();
  label->add_option("--universe", l_universe, "Probability universe")
      ->check(CLI::IsMember({"all", "covered"}))->capture_default_str();
  label->add_option("--rank", l_rank, "Ranking key")->check(CLI::IsMember({"signed", "magnitude"}))->capture_default_str();
  label->add_option("--format", l_format, "tsv or table")->check(CLI::IsMember({"tsv", "table"}))->capture_default_str();
  label->add_option("--out", l_out, "Output file (default stdout)");

  // solution-labels
  auto* sol_labels = app.add_subcommand("solution-labels", "Most informative terms per solution");
  std::string s_corpus, s_out;
  std::vector<std::string> s_solutions;
  std::size_t s_k = 50;
  sol_labels->add_option("--corpus", s_corpus)->required();
  sol_labels->add_option("--solution", s_solutions, "Solution TSVs")->required();
  sol_labels->add_option("--k", s_k)->check(CLI::PositiveNumber)->capture_default_str();
  sol_labels->add_option("--out", s_out);

  // common-labels
  auto* common_cmd = app.add_subcommand("common-labels", "Terms shared by the top lists of several solutions");
  std::string c_labels, c_out;
  std::size_t c_min = 2, c_depth = 50;
  common_cmd->add_option("--labels", c_labels, "solution-labels TSV")->required();
  common_cmd->add_option("--min-occurrence", c_min)->check(CLI::PositiveNumber)->capture_default_str();
  common_cmd->add_option("--per-solution-k", c_depth)->check(CLI::PositiveNumber)->capture_default_str();
  common_cmd->add_option("--out", c_out);

  // order
  auto* order = app.add_subcommand("order", "Order labels along a minimum-length path");
  std::string o_corpus, o_labels, o_vectors, o_out;
  std::size_t o_kicks = 20, o_restarts = 1;
  bool o_force = false;
  order->add_option("--corpus", o_corpus, "Corpus, for document-incidence vectors");
  order->add_option("--labels", o_labels, "common-labels TSV or one term per line")->required();
  order->add_option("--vectors", o_vectors, "External vectors TSV (term<TAB>v1...)");
  order->add_option("--kicks", o_kicks)->capture_default_str();
  order->add_option("--restarts", o_restarts, "Seeds tried: seed, seed+1, ...")->check(CLI::PositiveNumber)
      ->capture_default_str();
  order->add_flag("--force-heuristic", o_force, "Use the chained local search even for small label sets");
  order->add_option("--out", o_out);

  // fingerprint
  auto* fp_cmd = app.add_subcommand("fingerprint", "Signed NMI fingerprints on a label axis");
  std::string f_corpus, f_axis, f_universe = "all", f_out;
  std::vector<std::string> f_solutions;
  fp_cmd->add_option("--corpus", f_corpus)->required();
  fp_cmd->add_option("--solution", f_solutions)->required();
  fp_cmd->add_option("--axis", f_axis, "Axis TSV from `order`")->required();
  fp_cmd->add_option("--universe", f_universe)->check(CLI::IsMember({"all", "covered"}))->capture_default_str();
  fp_cmd->add_option("--out", f_out);

  // metacluster
  auto* meta_cmd = app.add_subcommand("metacluster", "Affinity Propagation over fingerprints");
  std::string m_fps, m_similarity = "cosine", m_corpus, m_out, m_report;
  std::vector<std::string> m_solutions;
  ApConfig m_ap;
  std::optional<double> m_pref;
  double m_quantile = 0.9;
  meta_cmd->add_option("--fingerprints", m_fps, "Fingerprint CSV")->required();
  meta_cmd->add_option("--similarity", m_similarity)->check(CLI::IsMember({"cosine", "negsqeuclid"}))
      ->capture_default_str();
  meta_cmd->add_option("--damping", m_ap.damping)->check(CLI::Range(0.5, 0.999999))->capture_default_str();
  meta_cmd->add_option("--max-iter", m_ap.max_iter)->check(CLI::PositiveNumber)->capture_default_str();
  meta_cmd->add_option("--convergence-iter", m_ap.convergence_iter)->check(CLI::PositiveNumber)->capture_default_str();
  meta_cmd->add_option("--preference", m_pref, "Default: median similarity");
  meta_cmd->add_option("--peak-quantile", m_quantile)->check(CLI::Range(0.0, 1.0))->capture_default_str();
  meta_cmd->add_option("--corpus", m_corpus, "With --solution, adds group Jaccard overlap to the report");
  meta_cmd->add_option("--solution", m_solutions);
  meta_cmd->add_option("--out", m_out, "Membership TSV (default stdout)");
  meta_cmd->add_option("--report", m_report, "JSON group report");

  // plot
  auto* plot = app.add_subcommand("plot", "SVG profile plot of fingerprints");
  std::string p_fps, p_out, p_csv, p_yrange = "fixed";
  std::vector<std::string> p_select;
  std::size_t p_width = 1200, p_height = 520, p_every = 1;
  plot->add_option("--fingerprints", p_fps)->required();
  plot->add_option("--select", p_select, "solution:cluster refs to draw (default all)");
  plot->add_option("--width", p_width)->check(CLI::PositiveNumber)->capture_default_str();
  plot->add_option("--height", p_height)->check(CLI::PositiveNumber)->capture_default_str();
  plot->add_option("--label-every", p_every)->check(CLI::PositiveNumber)->capture_default_str();
  plot->add_option("--y-range", p_yrange)->check(CLI::IsMember({"fixed", "auto"}))->capture_default_str();
  plot->add_option("--out", p_out, "SVG file (default stdout)");
  plot->add_option("--csv", p_csv, "Long-format CSV file");

  // pipeline
  auto* pipe = app.add_subcommand("pipeline", "Run every stage end to end");
  PipelineConfig pc;
  std::string pc_corpus, pc_vectors, pc_label_universe = "all", pc_fp_universe = "all", pc_rank = "signed",
                                     pc_similarity = "cosine";
  std::optional<double> pc_pref;
  pipe->add_option("--corpus", pc_corpus)->required();
  pipe->add_option("--solution", pc.solutions, "Solution TSVs, PATH or NAME=PATH")->required();
  pipe->add_option("--k", pc.k, "Labels per cluster")->check(CLI::PositiveNumber)->capture_default_str();
  pipe->add_option("--label-universe", pc_label_universe)->check(CLI::IsMember({"all", "covered"}))
      ->capture_default_str();
  pipe->add_option("--rank", pc_rank)->check(CLI::IsMember({"signed", "magnitude"}))->capture_default_str();
  pipe->add_option("--per-solution-k", pc.per_solution_k)->check(CLI::PositiveNumber)->capture_default_str();
  pipe->add_option("--min-occurrence", pc.min_occurrence)->check(CLI::PositiveNumber)->capture_default_str();
  pipe->add_option("--kicks", pc.kicks)->capture_default_str();
  pipe->add_option("--restarts", pc.restarts)->check(CLI::PositiveNumber)->capture_default_str();
  pipe->add_flag("--force-heuristic", pc.force_heuristic);
  pipe->add_option("--vectors", pc_vectors, "External term vectors TSV");
  pipe->add_option("--fingerprint-universe", pc_fp_universe)->check(CLI::IsMember({"all", "covered"}))
      ->capture_default_str();
  pipe->add_option("--similarity", pc_similarity)->check(CLI::IsMember({"cosine", "negsqeuclid"}))
      ->capture_default_str();
  pipe->add_option("--damping", pc.ap.damping)->check(CLI::Range(0.5, 0.999999))->capture_default_str();
  pipe->add_option("--max-iter", pc.ap.max_iter)->check(CLI::PositiveNumber)->capture_default_str();
  pipe->add_option("--convergence-iter", pc.ap.convergence_iter)->check(CLI::PositiveNumber)->capture_default_str();
  pipe->add_option("--preference", pc_pref);
  pipe->add_option("--peak-quantile", pc.peak_quantile)->check(CLI::Range(0.0, 1.0))->capture_default_str();
  pipe->add_option("--label-every", pc.label_every)->check(CLI::PositiveNumber)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    set_thread_count(common.threads);
    if (!simd_backend.empty()) {
      for (auto b : {simd::Backend::Scalar, simd::Backend::Avx2, simd::Backend::Neon}) {
        if (simd::backend_name(b) == simd_backend) simd::set_backend(b);
      }
    }

    if (label->parsed()) {
      RunManifest m;
      m.command = "label";
      m.add_input(l_corpus);
      m.add_input(solution_path(l_solution));
      m.parameters = {{"k", l_k}, {"universe", l_universe}, {"rank", l_rank}, {"format", l_format}};
      const Corpus corpus = load_corpus(l_corpus);
      const ClusteringSolution sol = load_solution(corpus, l_solution);
      if (sol.duplicate_assignments() > 0) {
        std::cerr << "warning: " << sol.duplicate_assignments() << " repeated assignment(s) in " << l_solution << '\n';
      }
      const auto lists = label_clusters(corpus, sol, l_k, parse_universe_mode(l_universe), parse_rank_by(l_rank));
      std::ostringstream out;
      if (l_format == "tsv") {
        write_label_tsv(out, lists);
      } else {
        write_label_table(out, lists);
      }
      emit(out.str(), l_out, common, l_format == "tsv" ? "labels.tsv" : "labels_table.tsv", m);
    } else if (sol_labels->parsed()) {
      RunManifest m;
      m.command = "solution-labels";
      m.add_input(s_corpus);
      for (const auto& s : s_solutions) m.add_input(solution_path(s));
      m.parameters = {{"k", s_k}};
      m.notes = {{"solution_nmi_sign", "unsigned"}};
      const Corpus corpus = load_corpus(s_corpus);
      std::vector<LabelList> lists;
      for (const auto& sol : load_solutions(corpus, s_solutions)) lists.push_back(label_solution(corpus, sol, s_k));
      std::ostringstream out;
      write_label_tsv(out, lists);
      emit(out.str(), s_out, common, "solution_labels.tsv", m);
    } else if (common_cmd->parsed()) {
      RunManifest m;
      m.command = "common-labels";
      m.add_input(c_labels);
      m.parameters = {{"min_occurrence", c_min}, {"per_solution_k", c_depth}};
      auto in = open_or_throw(c_labels);
      const auto lists = read_label_tsv(in);
      std::ostringstream out;
      write_common_labels(out, common_labels(lists, c_min, c_depth));
      emit(out.str(), c_out, common, "common_labels.tsv", m);
    } else if (order->parsed()) {
      if (o_corpus.empty() == o_vectors.empty()) {
        std::cerr << "order: give exactly one of --corpus or --vectors\n";
        return 2;
      }
      RunManifest m;
      m.command = "order";
      m.add_input(o_labels);
      m.add_input(o_corpus.empty() ? o_vectors : o_corpus);
      m.parameters = {{"seed", common.seed}, {"kicks", o_kicks}, {"restarts", o_restarts}, {"force_heuristic", o_force},
                      {"vectors", o_corpus.empty() ? "external" : "doc_incidence"}};
      auto labels_in = open_or_throw(o_labels);
      std::vector<std::string> labels;
      for (const auto& t : read_label_terms(labels_in)) labels.push_back(normalize_term(t));
      const TermVectorSpace space = [&] {
        if (!o_corpus.empty()) return TermVectorSpace::from_incidence(load_corpus(o_corpus), labels);
        auto vin = open_or_throw(o_vectors);
        return load_external_vectors(vin).restrict_to(labels);
      }();
      const LabelAxis axis = order_labels(labels, space, common.seed, o_kicks, o_force, o_restarts);
      std::ostringstream out;
      write_axis(out, axis);
      emit(out.str(), o_out, common, "axis.tsv", m);
    } else if (fp_cmd->parsed()) {
      RunManifest m;
      m.command = "fingerprint";
      m.add_input(f_corpus);
      for (const auto& s : f_solutions) m.add_input(solution_path(s));
      m.add_input(f_axis);
      m.parameters = {{"universe", f_universe}};
      const Corpus corpus = load_corpus(f_corpus);
      const auto solutions = load_solutions(corpus, f_solutions);
      auto ain = open_or_throw(f_axis);
      const LabelAxis axis = read_axis(ain);
      const auto fps = make_fingerprints(corpus, solutions, axis, parse_universe_mode(f_universe));
      std::ostringstream out;
      write_fingerprint_csv(out, fps, axis);
      emit(out.str(), f_out, common, "fingerprints.csv", m);
    } else if (meta_cmd->parsed()) {
      m_ap.preference = m_pref;
      RunManifest m;
      m.command = "metacluster";
      m.add_input(m_fps);
      if (!m_corpus.empty()) m.add_input(m_corpus);
      for (const auto& s : m_solutions) m.add_input(solution_path(s));
      m.parameters = {{"similarity", m_similarity},
                      {"damping", m_ap.damping},
                      {"max_iter", m_ap.max_iter},
                      {"convergence_iter", m_ap.convergence_iter},
                      {"preference", m_pref ? nlohmann::json(*m_pref) : nlohmann::json("median")},
                      {"peak_quantile", m_quantile}};
      auto fin = open_or_throw(m_fps);
      const FingerprintTable table = read_fingerprint_csv(fin);
      const SimilarityKind kind = parse_similarity_kind(m_similarity);
      const MetaClustering meta = affinity_propagation(similarity_matrix(table.fingerprints, kind), m_ap);

      std::vector<DocSet> sets;
      if (!m_corpus.empty()) {
        const Corpus corpus = load_corpus(m_corpus);
        const auto solutions = load_solutions(corpus, m_solutions);
        for (const auto& fp : table.fingerprints) {
          const ClusteringSolution* owner = nullptr;
          for (const auto& s : solutions) {
            if (s.name() == fp.solution) owner = &s;
          }
          if (!owner) throw ValidationError("no solution named '" + fp.solution + "' was given");
          sets.push_back(owner->member_set(owner->cluster_index(fp.cluster)));
        }
      }
      const GroupReport report = group_report(meta, table.fingerprints, sets, table.axis.order, m_quantile);
      std::ostringstream tsv;
      write_meta_tsv(tsv, meta, table.fingerprints);
      const std::string json = report_to_json(report, meta, table.fingerprints, kind, m_ap).dump(2) + "\n";
      emit(tsv.str(), m_out, common, "metaclusters.tsv", m);
      if (!m_report.empty()) {
        write_with_manifest(m_report, json, m);
      } else if (!common.out_dir.empty()) {
        OutputWriter(common.out_dir, m).write("metaclusters.json", json);
      }
    } else if (plot->parsed()) {
      RunManifest m;
      m.command = "plot";
      m.add_input(p_fps);
      m.parameters = {{"width", p_width}, {"height", p_height}, {"label_every", p_every}, {"y_range", p_yrange},
                      {"select", p_select}};
      auto fin = open_or_throw(p_fps);
      const FingerprintTable table = read_fingerprint_csv(fin);
      std::vector<Fingerprint> chosen;
      if (p_select.empty()) {
        chosen = table.fingerprints;
      } else {
        for (const auto& ref : p_select) {
          bool found = false;
          for (const auto& fp : table.fingerprints) {
            if (fp.ref() == ref) {
              chosen.push_back(fp);
              found = true;
            }
          }
          if (!found) throw ValidationError("no fingerprint '" + ref + "'");
        }
      }
      PlotSpec spec = PlotSpec::from(chosen, table.axis);
      spec.width_px = p_width;
      spec.height_px = p_height;
      spec.label_every = p_every;
      if (p_yrange == "auto") spec.y_range.reset();
      emit(render_svg(spec), p_out, common, "fingerprints.svg", m);
      if (!p_csv.empty()) write_with_manifest(p_csv, export_plot_csv(spec), m);
    } else if (pipe->parsed()) {
      pc.corpus = pc_corpus;
      pc.seed = common.seed;
      pc.out_dir = common.out_dir.empty() ? "out" : common.out_dir;
      if (!pc_vectors.empty()) pc.vectors = pc_vectors;
      pc.label_universe = parse_universe_mode(pc_label_universe);
      pc.fingerprint_universe = parse_universe_mode(pc_fp_universe);
      pc.rank = parse_rank_by(pc_rank);
      pc.similarity = parse_similarity_kind(pc_similarity);
      pc.ap.preference = pc_pref;
      const PipelineResult r = run_pipeline(pc);
      std::cerr << "wrote " << r.files.size() / 2 << " outputs to " << pc.out_dir.string() << " ("
                << r.n_common_labels << " common labels, " << r.n_fingerprints << " fingerprints, " << r.n_groups
                << " groups)\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
