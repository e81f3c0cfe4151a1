#include <doctest.h>

#include <cmath>
#include <sstream>

#include "lexfp/error.hpp"
#include "lexfp/fingerprint.hpp"
#include "lexfp/nmi.hpp"
#include "oracle.hpp"
#include "support.hpp"

using namespace lexfp;
using testsupport::corpus_of;
using testsupport::solution_of;

namespace {

LabelAxis axis_of(std::vector<std::string> terms) {
  LabelAxis a;
  a.order = std::move(terms);
  return a;
}

Fingerprint fp(std::vector<double> v, std::string axis = "A") {
  return Fingerprint{"s", "c", std::move(v), std::move(axis)};
}

}  // namespace

TEST_CASE("fingerprint entries are per-term signed NMI over all documents") {
  const auto c = corpus_of({{"x", "w"}, {"x"}, {"y"}, {"y", "w"}, {"z"}, {}});
  const auto s = solution_of(c, "s", {"A", "A", "B", "B", "", ""});
  const auto axis = axis_of({"y", "x", "w", "z", "zz_missing"});
  CHECK_THROWS_WITH_AS(make_fingerprint(c, s, "A", axis), doctest::Contains("zz_missing"), ValidationError);

  const auto axis5 = axis_of({"y", "x", "w", "z"});
  const auto f = make_fingerprint(c, s, "A", axis5);
  CHECK(f.values.size() == 4);
  CHECK(f.axis_id == axis5.id());
  CHECK(f.ref() == "s:A");
  // Decomposition: each entry is one term_cluster_nmi call.
  for (std::size_t i = 0; i < axis5.size(); ++i) {
    const auto cell = cluster_cell(c, *c.find_term(axis5.order[i]), s, s.cluster_index("A"), UniverseMode::All);
    CHECK(f.values[i] == term_cluster_nmi(cell).value);
  }
  // x occurs exactly in A (2 of 6 docs).
  CHECK(f.values[1] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(f.values[0] < 0);
  CHECK_THROWS_AS(make_fingerprint(c, s, "Q", axis5), ValidationError);
  CHECK_THROWS_AS(make_fingerprint(c, s, "A", axis_of({})), ValidationError);
}

TEST_CASE("planted three-cluster fingerprints equal the entry-wise oracle") {
  auto p = testsupport::planted(90, 3, 12, 44);
  const auto s = solution_of(p.corpus, "s", p.cluster_of);
  std::vector<std::string> terms;
  for (TermId t = 0; t < p.corpus.n_terms(); ++t) terms.push_back(p.corpus.term(t));
  const auto axis = axis_of(terms);
  const std::vector<ClusteringSolution> sols{s};
  const auto fps = make_fingerprints(p.corpus, sols, axis);
  REQUIRE(fps.size() == 3);
  for (const auto& f : fps) {
    for (std::size_t i = 0; i < terms.size(); ++i) {
      std::uint64_t a = 0, b = 0, cc = 0, d = 0;
      const DocSet inc = p.corpus.incidence_set(*p.corpus.find_term(terms[i]));
      for (DocIndex doc = 0; doc < 90; ++doc) {
        const bool t = inc.contains(doc), in = p.cluster_of[doc] == f.cluster;
        (t && in ? a : t ? b : in ? cc : d)++;
      }
      CHECK(std::abs(f.values[i] - static_cast<double>(oracle::term_cluster(a, b, cc, d).value)) < 1e-12);
    }
  }
}

TEST_CASE("covered universe mode changes the counts") {
  const auto c = corpus_of({{"x"}, {}, {"x"}, {"x"}});
  const auto s = solution_of(c, "s", {"A", "B", "", ""});
  const auto axis = axis_of({"x"});
  CHECK(make_fingerprint(c, s, "A", axis, UniverseMode::Covered).values[0] == doctest::Approx(1.0));
  CHECK(make_fingerprint(c, s, "A", axis, UniverseMode::All).values[0] < 1.0);
}

TEST_CASE("fingerprint similarity") {
  const auto a = fp({0.5, -0.2, 0.1});
  const auto neg = fp({-0.5, 0.2, -0.1});
  CHECK(fingerprint_similarity(a, a) == doctest::Approx(1.0));
  CHECK(fingerprint_similarity(a, neg) == doctest::Approx(-1.0));
  CHECK(fingerprint_similarity(a, fp({0, 0, 0})) == 0.0);
  CHECK(fingerprint_similarity(fp({0, 0, 0}), fp({0, 0, 0})) == 0.0);
  CHECK_THROWS_AS(fingerprint_similarity(a, fp({0.5, -0.2, 0.1}, "B")), ValidationError);
  CHECK(fingerprint_neg_sq_distance(a, fp({0.5, 0.8, 0.1})) == doctest::Approx(-1.0));
  CHECK(fingerprint_similarity(a, a, SimilarityKind::NegSquaredEuclidean) == 0.0);
  CHECK(parse_similarity_kind("negsqeuclid") == SimilarityKind::NegSquaredEuclidean);
  CHECK_THROWS_AS(parse_similarity_kind("dot"), ValidationError);
}

TEST_CASE("jaccard") {
  const std::vector<DocIndex> a{1, 2, 3}, b{2, 3, 4}, e{}, one{1};
  CHECK(jaccard(a, b) == 0.5);
  CHECK(jaccard(a, a) == 1.0);
  CHECK(jaccard(e, one) == 0.0);
  CHECK(jaccard(e, e) == 0.0);
  CHECK(jaccard(b, a) == jaccard(a, b));
  CHECK(jaccard(DocSet(8, a), DocSet(8, b)) == 0.5);
  CHECK(jaccard(DocSet(8), DocSet(8)) == 0.0);
}

TEST_CASE("group average jaccard") {
  const std::vector<DocIndex> s12{1, 2}, s23{2, 3}, s31{1, 3}, s45{4, 5};
  const std::vector<DocSet> same{DocSet(6, s12), DocSet(6, s12)};
  CHECK(group_average_jaccard(same) == 1.0);
  const std::vector<DocSet> ring{DocSet(6, s12), DocSet(6, s23), DocSet(6, s31)};
  CHECK(group_average_jaccard(ring) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  const std::vector<DocSet> disjoint{DocSet(6, s12), DocSet(6, s45)};
  CHECK(group_average_jaccard(disjoint) == 0.0);
  CHECK_THROWS_AS(group_average_jaccard(std::span(ring).first(1)), ValidationError);
}

TEST_CASE("planted grb-like clusters share one dominant peak") {
  // Docs 0..19 carry "grb"; two solutions each pick a near-duplicate of them.
  std::vector<std::vector<std::string>> docs(100);
  for (std::size_t d = 0; d < 100; ++d) {
    if (d < 20) docs[d].push_back("grb");
    docs[d].push_back("bg" + std::to_string(d % 5));
    if (d % 3 == 0) docs[d].push_back("common");
  }
  const auto c = corpus_of(docs);
  std::vector<std::string> l1(100), l2(100);
  for (std::size_t d = 0; d < 100; ++d) {
    l1[d] = (d < 18 || d == 50) ? "g" : "o" + std::to_string(d % 3);
    l2[d] = (d >= 2 && d < 21) ? "g" : "p" + std::to_string(d % 4);
  }
  const auto s1 = solution_of(c, "s1", l1);
  const auto s2 = solution_of(c, "s2", l2);
  const auto axis = axis_of({"bg0", "bg1", "bg2", "grb", "bg3", "bg4", "common"});
  const auto f1 = make_fingerprint(c, s1, "g", axis);
  const auto f2 = make_fingerprint(c, s2, "g", axis);
  CHECK(fingerprint_similarity(f1, f2) > 0.9);
}

TEST_CASE("fingerprint CSV round trip") {
  const auto axis = axis_of({"plain", "with,comma", "q\"uote"});
  std::vector<Fingerprint> fps{Fingerprint{"km", "3", {0.25, -1.0, 0.0}, axis.id()},
                               Fingerprint{"lv", "x", {1.0 / 3.0, 0.5, -0.125}, axis.id()}};
  std::stringstream buf;
  write_fingerprint_csv(buf, fps, axis);
  CHECK(buf.str().rfind("cluster,plain,\"with,comma\",\"q\"\"uote\"\nkm:3,0.250000,-1.000000,0.000000\n", 0) == 0);
  const auto table = read_fingerprint_csv(buf);
  CHECK(table.axis.order == axis.order);
  REQUIRE(table.fingerprints.size() == 2);
  CHECK(table.fingerprints[1].ref() == "lv:x");
  CHECK(table.fingerprints[1].values[0] == 0.333333);
  CHECK(table.fingerprints[0].axis_id == axis.id());
  fps[0].axis_id = "other";
  CHECK_THROWS_AS(write_fingerprint_csv(buf, fps, axis), ValidationError);
  std::istringstream bad("cluster,a\nnocolon,1\n");
  CHECK_THROWS_AS(read_fingerprint_csv(bad), ValidationError);
}
