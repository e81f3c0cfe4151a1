#include <doctest.h>

#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "lexfp/corpus.hpp"
#include "lexfp/error.hpp"
#include "support.hpp"

using namespace lexfp;
using testsupport::corpus_of;
using testsupport::solution_of;

namespace {

std::vector<DocIndex> inc(const Corpus& c, const std::string& term) {
  auto t = c.find_term(term);
  REQUIRE(t);
  auto s = c.incidence(*t);
  return {s.begin(), s.end()};
}

std::string message_of(auto&& fn) {
  try {
    fn();
  } catch (const std::exception& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("load_corpus: three records with an empty term list") {
  std::istringstream in(R"({"id":"d1","terms":["a","b"]}
{"id":"d2","terms":["b"]}
{"id":"d3","terms":[]}
)");
  const Corpus c = load_corpus_jsonl(in);
  CHECK(c.n_docs() == 3);
  CHECK(inc(c, "a") == std::vector<DocIndex>{0});
  CHECK(inc(c, "b") == std::vector<DocIndex>{0, 1});
  CHECK(c.doc_ids() == std::vector<std::string>{"d1", "d2", "d3"});
}

TEST_CASE("terms are lowercased and whitespace-collapsed") {
  CHECK(normalize_term("Black  Hole") == "black hole");
  CHECK(normalize_term("  Seyfert\t1 ") == "seyfert 1");
  const Corpus c = corpus_of({{"Black  Hole", "black hole"}, {"BLACK HOLE"}});
  CHECK(c.n_terms() == 1);
  CHECK(c.term(0) == "black hole");
  CHECK(inc(c, "Black Hole") == std::vector<DocIndex>{0, 1});
}

TEST_CASE("duplicate document ids are rejected by name") {
  std::istringstream in("{\"id\":\"d1\",\"terms\":[\"a\"]}\n{\"id\":\"d1\",\"terms\":[]}\n");
  const std::string msg = message_of([&] { load_corpus_jsonl(in); });
  CHECK(msg.find("d1") != std::string::npos);
  CHECK(msg.find("line 2") != std::string::npos);
}

TEST_CASE("malformed records report their line number") {
  std::istringstream bad_json("{\"id\":\"d1\",\"terms\":[]}\n\n{\"id\": oops}\n");
  CHECK(message_of([&] { load_corpus_jsonl(bad_json); }).find("line 3") != std::string::npos);
  std::istringstream missing("{\"terms\":[]}\n");
  CHECK(message_of([&] { load_corpus_jsonl(missing); }).find("line 1") != std::string::npos);
  std::istringstream bad_tsv("d1\ta\nd2 no tab\n");
  CHECK(message_of([&] { load_corpus_tsv(bad_tsv); }).find("line 2") != std::string::npos);
}

TEST_CASE("TSV corpus aggregates terms per document and drops repeats") {
  std::istringstream in("d1\tA\nd2\tb\nd1\ta\nd1\tc\n");
  const Corpus c = load_corpus_tsv(in);
  CHECK(c.n_docs() == 2);
  CHECK(inc(c, "a") == std::vector<DocIndex>{0});
  CHECK(inc(c, "c") == std::vector<DocIndex>{0});
  CHECK(inc(c, "b") == std::vector<DocIndex>{1});
}

TEST_CASE("corpus cache round-trips exactly") {
  auto p = testsupport::planted(80, 3, 25, 11);
  // Awkward strings survive the text snapshot.
  std::vector<DocumentRecord> recs{{"x \"quoted\"", {"tab\tterm", "a,b"}}, {"y\\z", {"ünïcode"}}, {"empty", {}}};
  for (const Corpus& c : {p.corpus, Corpus::from_records(recs)}) {
    std::stringstream buf;
    save_corpus_cache(c, buf);
    const Corpus back = load_corpus_cache(buf);
    CHECK(back == c);
    for (TermId t = 0; t < c.n_terms(); ++t) CHECK(back.find_term(c.term(t)) == t);
  }
}

TEST_CASE("load_solution: partial coverage") {
  const Corpus c = corpus_of({{"a"}, {"b"}, {"c"}, {"d"}});
  std::istringstream in("# header comment\nd0\tA\nd1\tA\n\nd2\tB\n");
  const ClusteringSolution s = load_solution(c, in, "s");
  CHECK(s.n_covered() == 3);
  CHECK(s.n_clusters() == 2);
  CHECK(std::vector<DocIndex>(s.members(s.cluster_index("A")).begin(), s.members(s.cluster_index("A")).end()) ==
        std::vector<DocIndex>{0, 1});
  CHECK(s.members(s.cluster_index("B")).size() == 1);
  CHECK(s.cluster_of(3) == -1);
  CHECK(!s.covered().contains(3));
}

TEST_CASE("load_solution: conflicts, unknown ids, repeats and empty input") {
  const Corpus c = corpus_of({{"a"}, {"b"}});
  std::istringstream conflict("d0\tA\nd0\tB\n");
  CHECK_THROWS_AS(load_solution(c, conflict, "s"), ValidationError);
  std::istringstream unknown("d9\tA\n");
  CHECK(message_of([&] { load_solution(c, unknown, "s"); }).find("d9") != std::string::npos);
  std::istringstream repeat("d0\tA\nd0\tA\nd1\tB\n");
  CHECK(load_solution(c, repeat, "s").duplicate_assignments() == 1);
  std::istringstream empty("# nothing\n");
  CHECK(message_of([&] { load_solution(c, empty, "s"); }).find("solution covers zero documents") !=
        std::string::npos);
  // Empty clusters cannot be constructed directly either.
  CHECK_THROWS_AS(ClusteringSolution("s", {"A", "B"}, {0, 0}), ValidationError);
}

TEST_CASE("solution spec NAME=PATH and the file stem") {
  testsupport::TempDir dir("sol");
  const Corpus c = corpus_of({{"a"}, {"b"}});
  const auto path = dir.path / "kmeans.tsv";
  std::ofstream(path) << "d0\tA\nd1\tB\n";
  CHECK(load_solution(c, path.string()).name() == "kmeans");
  CHECK(load_solution(c, "km=" + path.string()).name() == "km");
  CHECK_THROWS_AS(load_solution(c, (dir.path / "missing.tsv").string()), IoError);
}

TEST_CASE("contingency examples") {
  // term in {0,1}, doc_set {1,2}, 4 docs.
  const Corpus c = corpus_of({{"t"}, {"t"}, {}, {}});
  const TermId t = *c.find_term("t");
  const std::vector<DocIndex> ds{1, 2};
  CHECK(contingency(c, t, DocSet(4, ds)) == ContingencyCell{1, 1, 1, 1, 4});

  const Corpus c2 = corpus_of({{"u"}, {}, {}});
  const std::vector<DocIndex> d0{0};
  // Term absent from the documents of interest.
  const Corpus c3 = corpus_of({{"x"}, {}, {}, {"x"}});
  const std::vector<DocIndex> mid{1, 2};
  const auto absent = contingency(c3, *c3.find_term("x"), DocSet(4, mid), DocSet(4, mid));
  CHECK(absent.n11 == 0);
  CHECK(absent.n10 == 0);
  // Singleton universe.
  CHECK(contingency(c2, *c2.find_term("u"), DocSet(3, d0), DocSet(3, d0)) == ContingencyCell{1, 0, 0, 0, 1});
}

TEST_CASE("contingency validation") {
  const Corpus c = corpus_of({{"t"}, {}, {}});
  const TermId t = 0;
  const std::vector<DocIndex> a{0, 1}, b{0};
  CHECK_THROWS_AS(contingency(c, t, DocSet(3, a), DocSet(3, b)), ValidationError);
  CHECK_THROWS_AS(contingency(c, t, DocSet(3), DocSet(3)), ValidationError);
  CHECK_THROWS_AS(contingency(c, t, DocSet(5)), ValidationError);
  CHECK_THROWS_AS(make_cell(3, 2, 2, 4), ValidationError);
  CHECK_THROWS_AS(make_cell(1, 3, 3, 4), ValidationError);
  CHECK(make_cell(1, 2, 2, 4) == ContingencyCell{1, 1, 1, 1, 4});
}

TEST_CASE("contingency marginals match independent counts") {
  auto p = testsupport::planted(60, 3, 15, 5);
  std::mt19937_64 rng(3);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<DocIndex> ds, uni;
    for (DocIndex d = 0; d < 60; ++d) {
      const bool in_u = testsupport::coin(rng, 0.7);
      if (in_u) uni.push_back(d);
      if (in_u && testsupport::coin(rng, 0.4)) ds.push_back(d);
    }
    if (uni.empty()) continue;
    const TermId t = static_cast<TermId>(testsupport::uniform(rng, p.corpus.n_terms()));
    const DocSet dset(60, ds), uset(60, uni);
    const auto cell = contingency(p.corpus, t, dset, uset);
    std::size_t term_in_u = 0;
    for (DocIndex d : p.corpus.incidence(t)) term_in_u += uset.contains(d);
    CHECK(cell.n11 + cell.n10 == term_in_u);
    CHECK(cell.n11 + cell.n01 == ds.size());
    CHECK(cell.n_total == uni.size());
    CHECK(cell.n11 + cell.n10 + cell.n01 + cell.n00 == cell.n_total);
    CHECK(contingency(p.corpus, t, dset, uset) == cell);
  }
}
