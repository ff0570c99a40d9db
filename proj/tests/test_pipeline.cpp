#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qdg/pipeline.hpp"

using namespace qdg;

namespace {

const Lexicon& lex() {
  static Lexicon lexicon = Lexicon::default_lexicon();
  return lexicon;
}

std::vector<CorpusExample> small_corpus() {
  return {
      {"c1", "metal cubes in the box?", "return cubes; return #1 that are metal"},
      {"c2", "what is the head coach of the team?",
       "return team; return the head coach of #1"},
      {"c3",
       "Which group from the census is smaller: Pacific islander or African "
       "American?",
       "return census groups ;return #1 that is Pacific islander ;"
       "return #1 that is African American ;return size of #2 ;"
       "return size of #3 ;return which is lowest of #4 ,  #5"},
      {"bad", "a question", "return #1 of things"},  // malformed reference
      {"c4", "how many cubes are metal?",
       "return cubes; return #1 that are metal; return number of #2"},
  };
}

bool same_results(const std::vector<ExampleResult>& a,
                  const std::vector<ExampleResult>& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i].id != b[i].id || a[i].converted != b[i].converted ||
        a[i].round_trip != b[i].round_trip || a[i].error != b[i].error ||
        a[i].lf != b[i].lf || a[i].dg != b[i].dg ||
        a[i].tokens != b[i].tokens) {
      return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("corpus run tolerates bad examples") {
  auto results = run_corpus_serial(small_corpus(), lex(), {});
  REQUIRE(results.size() == 5);
  CHECK(results[3].converted == false);
  CHECK(results[3].error.find("MalformedReference") != std::string::npos);
  auto stats = summarize(results);
  CHECK(stats.total == 5);
  CHECK(stats.converted == 4);
  CHECK(stats.round_trip == 4);
}

TEST_CASE("parallel runner matches the serial reference") {
  auto corpus = small_corpus();
  auto serial = run_corpus_serial(corpus, lex(), {});
  auto parallel2 = run_corpus_parallel(corpus, lex(), {}, 2);
  auto parallel4 = run_corpus_parallel(corpus, lex(), {}, 4);
  CHECK(same_results(serial, parallel2));
  CHECK(same_results(serial, parallel4));
}

TEST_CASE("repeated runs are deterministic") {
  auto corpus = small_corpus();
  auto a = run_corpus_parallel(corpus, lex(), {}, 2);
  auto b = run_corpus_parallel(corpus, lex(), {}, 2);
  CHECK(same_results(a, b));
}

TEST_CASE("lf-only mode skips graph construction") {
  PipelineConfig config;
  config.build_graph = false;
  auto results = run_corpus_serial(small_corpus(), lex(), config);
  CHECK(results[0].converted);
  CHECK(results[0].lf.has_value());
  CHECK_FALSE(results[0].dg.has_value());
}
