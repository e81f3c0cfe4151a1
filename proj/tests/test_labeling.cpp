#include <doctest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "lexfp/error.hpp"
#include "lexfp/labeling.hpp"
#include "lexfp/parallel.hpp"
#include "oracle.hpp"
#include "support.hpp"

using namespace lexfp;
using testsupport::corpus_of;
using testsupport::solution_of;

namespace {

std::vector<std::string> terms_of(const LabelList& l) {
  std::vector<std::string> out;
  for (const auto& e : l.entries) out.push_back(e.term);
  return out;
}

// Oracle ranking of every term against cluster `name` of a labelling vector, universe = all docs.
std::vector<oracle::Scored> oracle_cluster_top(const Corpus& c, const std::vector<std::string>& labels,
                                               const std::string& name, std::size_t k) {
  std::vector<oracle::Scored> all;
  for (TermId t = 0; t < c.n_terms(); ++t) {
    std::uint64_t a = 0, b = 0, cc = 0, d = 0;
    const DocSet inc = c.incidence_set(t);
    for (DocIndex doc = 0; doc < c.n_docs(); ++doc) {
      const bool in_t = inc.contains(doc), in_c = labels[doc] == name;
      (in_t && in_c ? a : in_t ? b : in_c ? cc : d)++;
    }
    all.push_back({c.term(t), oracle::term_cluster(a, b, cc, d).value});
  }
  return oracle::rank(all, k);
}

std::vector<oracle::Scored> oracle_solution_top(const Corpus& c, const std::vector<std::string>& labels,
                                                std::size_t k) {
  std::vector<std::string> names;
  for (const auto& l : labels) {
    if (!l.empty() && std::find(names.begin(), names.end(), l) == names.end()) names.push_back(l);
  }
  std::vector<oracle::Scored> all;
  for (TermId t = 0; t < c.n_terms(); ++t) {
    std::vector<std::uint64_t> in(names.size(), 0), sizes(names.size(), 0);
    const DocSet inc = c.incidence_set(t);
    for (DocIndex doc = 0; doc < c.n_docs(); ++doc) {
      if (labels[doc].empty()) continue;
      const std::size_t k2 = static_cast<std::size_t>(std::find(names.begin(), names.end(), labels[doc]) - names.begin());
      ++sizes[k2];
      in[k2] += inc.contains(doc);
    }
    all.push_back({c.term(t), oracle::term_solution(in, sizes).value});
  }
  return oracle::rank(all, k);
}

}  // namespace

TEST_CASE("a term matching a half-corpus cluster ranks first with value 1") {
  const auto c = corpus_of({{"x", "y"}, {"x"}, {"y"}, {}});
  const auto s = solution_of(c, "s", {"A", "A", "B", "B"});
  const auto l = label_cluster(c, s, "A", 10);
  REQUIRE(!l.entries.empty());
  CHECK(l.entries[0].term == "x");
  CHECK(l.entries[0].score.value == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(l.owner == "s:A");
  CHECK(l.owner_size == 2);
}

TEST_CASE("k beyond the vocabulary returns every term") {
  const auto c = corpus_of({{"a", "b"}, {"c"}, {}});
  const auto s = solution_of(c, "s", {"A", "B", "B"});
  CHECK(label_cluster(c, s, "A", 100).entries.size() == 3);
  CHECK(label_solution(c, s, 100).entries.size() == 3);
}

TEST_CASE("unknown cluster and zero k are rejected") {
  const auto c = corpus_of({{"a"}, {}});
  const auto s = solution_of(c, "s", {"A", "B"});
  CHECK_THROWS_AS(label_cluster(c, s, "Z", 3), ValidationError);
  CHECK_THROWS_AS(label_cluster(c, s, "A", 0), ValidationError);
  CHECK_THROWS_AS(label_solution(c, s, 0), ValidationError);
}

TEST_CASE("8-doc two-cluster ranking equals the exhaustive oracle") {
  const auto c = corpus_of({{"p", "q", "r"}, {"p", "q"}, {"p", "s"}, {"q", "t"},
                            {"s", "t"}, {"t", "r"}, {"t"}, {"u"}});
  const std::vector<std::string> labels{"A", "A", "A", "A", "B", "B", "B", "B"};
  const auto s = solution_of(c, "s", labels);
  for (const std::string name : {"A", "B"}) {
    const auto got = label_cluster(c, s, name, 6);
    const auto want = oracle_cluster_top(c, labels, name, 6);
    REQUIRE(got.entries.size() == want.size());
    for (std::size_t i = 0; i < want.size(); ++i) {
      CHECK(got.entries[i].term == want[i].term);
      CHECK(got.entries[i].score.value == doctest::Approx(static_cast<double>(want[i].value)).epsilon(1e-12));
    }
  }
}

TEST_CASE("label_clusters equals label_cluster per cluster, in both universes and rankings") {
  auto p = testsupport::planted(90, 4, 30, 21);
  auto labels = p.cluster_of;
  for (std::size_t d = 0; d < labels.size(); d += 7) labels[d] = "";  // partial coverage
  const auto s = solution_of(p.corpus, "s", labels);
  for (auto mode : {UniverseMode::All, UniverseMode::Covered}) {
    for (auto rank : {RankBy::Signed, RankBy::Magnitude}) {
      const auto all = label_clusters(p.corpus, s, 8, mode, rank);
      REQUIRE(all.size() == s.n_clusters());
      for (std::size_t k = 0; k < s.n_clusters(); ++k) {
        const auto one = label_cluster(p.corpus, s, s.cluster_id(k), 8, mode, rank);
        CHECK(terms_of(all[k]) == terms_of(one));
        for (std::size_t i = 0; i < one.entries.size(); ++i) CHECK(all[k].entries[i].score == one.entries[i].score);
      }
    }
  }
}

TEST_CASE("ranking ties resolve by term string; magnitude ranking is available") {
  // b and a have identical incidence, z is strongly under-represented in A.
  const auto c = corpus_of({{"b", "a"}, {"a", "b"}, {}, {"z"}, {"z"}, {"z"}});
  const auto s = solution_of(c, "s", {"A", "A", "A", "B", "B", "B"});
  const auto signed_list = label_cluster(c, s, "A", 3);
  CHECK(terms_of(signed_list) == std::vector<std::string>{"a", "b", "z"});
  CHECK(signed_list.entries[2].score.value < 0);
  const auto mag = label_cluster(c, s, "A", 3, UniverseMode::All, RankBy::Magnitude);
  CHECK(std::abs(mag.entries[0].score.value) >= std::abs(mag.entries[1].score.value));
  CHECK(mag.entries[0].term == "z");
}

TEST_CASE("solution labels: single cluster gives lexicographic zeros") {
  const auto c = corpus_of({{"d", "c"}, {"b"}, {"a", "e"}});
  const auto s = solution_of(c, "s", {"A", "A", "A"});
  const auto l = label_solution(c, s, 3);
  CHECK(terms_of(l) == std::vector<std::string>{"a", "b", "c"});
  for (const auto& e : l.entries) CHECK(e.score.value == 0.0);
}

TEST_CASE("solution labels: a perfectly splitting term ranks first") {
  const auto c = corpus_of({{"g", "n"}, {"g"}, {"n"}, {"n"}});
  const auto s = solution_of(c, "s", {"X", "X", "Y", "Y"});
  const auto l = label_solution(c, s, 2);
  CHECK(l.entries[0].term == "g");
  CHECK(l.entries[0].score.value == doctest::Approx(1.0));
}

TEST_CASE("random 12-doc three-cluster instances match the term-solution oracle") {
  std::mt19937_64 rng(12);
  for (int rep = 0; rep < 30; ++rep) {
    std::vector<std::vector<std::string>> docs(12);
    std::vector<std::string> labels(12);
    for (std::size_t d = 0; d < 12; ++d) {
      labels[d] = d < 3 ? std::string(1, char('A' + d)) : (testsupport::coin(rng, 0.15) ? "" : std::string(1, char('A' + testsupport::uniform(rng, 3))));
      for (int t = 0; t < 8; ++t) {
        if (testsupport::coin(rng, 0.35)) docs[d].push_back("w" + std::to_string(t));
      }
    }
    const auto c = corpus_of(docs);
    const auto s = solution_of(c, "s", labels);
    const auto got = label_solution(c, s, 5);
    const auto want = oracle_solution_top(c, labels, 5);
    for (std::size_t i = 0; i < want.size(); ++i) {
      INFO(i, " ", want[i].term, " ", double(want[i].value), " got ", got.entries[i].term, " ", got.entries[i].score.value, " d=", got.entries[i].score.value - double(want[i].value), " next=", (i + 1 < got.entries.size() ? got.entries[i].score.value - got.entries[i + 1].score.value : 0.0));
      CHECK(got.entries[i].term == want[i].term);
    }
    CHECK(terms_of(got) == [&] {
      std::vector<std::string> w;
      for (const auto& x : want) w.push_back(x.term);
      return w;
    }());
  }
}

TEST_CASE("top label is positive whenever some term is over-represented") {
  auto p = testsupport::planted(100, 5, 40, 8);
  const auto s = solution_of(p.corpus, "s", p.cluster_of);
  for (const auto& l : label_clusters(p.corpus, s, 1)) CHECK(l.entries[0].score.value > 0);
}

TEST_CASE("common labels") {
  auto list = [](std::vector<std::string> terms) {
    LabelList l;
    for (auto& t : terms) l.entries.push_back({t, {}});
    return l;
  };
  std::vector<LabelList> three{list({"a", "b", "c"}), list({"b", "c", "d"}), list({"c", "e", "f"})};
  const auto set = common_labels(three);
  CHECK(set.labels == std::vector<std::string>{"b", "c"});
  CHECK(set.source_count.at("c") == 3);
  CHECK(set.source_count.at("b") == 2);

  std::vector<LabelList> same{list({"x", "y"}), list({"x", "y"})};
  CHECK(common_labels(same).labels == std::vector<std::string>{"x", "y"});

  CHECK_THROWS_AS(common_labels(std::span(three).first(1)), ValidationError);

  // Invariant under permuting the inputs.
  std::vector<LabelList> perm{three[2], three[0], three[1]};
  CHECK(common_labels(perm).labels == set.labels);
  // Depth cuts lists before counting.
  CHECK(common_labels(three, 3, 2).labels.empty());
  CHECK(common_labels(three, 2, 1).labels.empty());
}

TEST_CASE("common labels over seven constructed solutions") {
  // Solution i lists terms i..i+4 of a ring of 10; depth 3 keeps i..i+2.
  std::vector<LabelList> lists;
  for (int i = 0; i < 7; ++i) {
    LabelList l;
    for (int j = 0; j < 5; ++j) l.entries.push_back({"r" + std::to_string((i + j) % 10), {}});
    lists.push_back(l);
  }
  // Depth 3: ri appears in lists max(0,i-2)..min(6,i) -> r0:1, r1:2, r2..r6:3, r7:2, r8:1 -> 7 labels.
  CHECK(common_labels(lists, 2, 3).labels.size() == 7);
  // Three occurrences needed: r2..r6.
  CHECK(common_labels(lists, 3, 3).labels == std::vector<std::string>{"r2", "r3", "r4", "r5", "r6"});
}

TEST_CASE("label TSV and table formats") {
  const auto c = corpus_of({{"x", "y"}, {"x"}, {"y"}, {}});
  const auto s = solution_of(c, "s", {"A", "A", "B", "B"});
  const auto lists = label_clusters(c, s, 2);
  std::ostringstream tsv;
  write_label_tsv(tsv, lists);
  CHECK(tsv.str().rfind("owner\trank\tterm\tnmi\ns:A\t1\tx\t1.000000\n", 0) == 0);
  std::istringstream back(tsv.str());
  const auto read = read_label_tsv(back);
  REQUIRE(read.size() == 2);
  CHECK(read[0].owner == "s:A");
  CHECK(terms_of(read[1]) == terms_of(lists[1]));

  std::ostringstream table;
  write_label_table(table, lists);
  CHECK(table.str().find("s:A\t2\tx, ") != std::string::npos);

  CHECK(format_score(-0.5) == "-0.500000");
  CHECK(format_score(1.0 / 3.0) == "0.333333");
}

TEST_CASE("label lists do not depend on the thread count") {
  auto p = testsupport::planted(150, 5, 60, 4);
  const auto s = solution_of(p.corpus, "s", p.cluster_of);
  std::ostringstream one, four;
  set_thread_count(1);
  write_label_tsv(one, label_clusters(p.corpus, s, 10));
  set_thread_count(4);
  write_label_tsv(four, label_clusters(p.corpus, s, 10));
  set_thread_count(0);
  CHECK(one.str() == four.str());
}
