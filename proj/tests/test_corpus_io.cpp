#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "qdg/corpus_io.hpp"
#include "qdg/errors.hpp"

using namespace qdg;

namespace {

std::string temp_path(const std::string& name) {
  return std::string("/tmp/qdg_io_") + name;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("csv: well-formed rows") {
  std::istringstream in(
      "question_id,question_text,decomposition\n"
      "q1,\"How many, exactly?\",\"return cubes ;return number of #1\"\n"
      "q2,plain question,return dogs\n");
  auto rows = read_break_csv(in);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].id == "q1");
  CHECK(rows[0].question == "How many, exactly?");
  CHECK(rows[0].decomposition == "return cubes ;return number of #1");
  CHECK(rows[1].question == "plain question");
}

TEST_CASE("csv: missing column") {
  std::istringstream in("question_id,question_text\nq1,hello\n");
  CHECK_THROWS_AS(read_break_csv(in), QdgError);
}

TEST_CASE("csv: malformed rows") {
  std::istringstream in(
      "question_id,question_text,decomposition\nq1,only-two-fields\n");
  CHECK_THROWS_AS(read_break_csv(in), QdgError);
  std::istringstream unterminated(
      "question_id,question_text,decomposition\nq1,\"broken,row\n");
  CHECK_THROWS_AS(read_break_csv(unterminated), QdgError);
}

TEST_CASE("csv: quoted semicolons survive") {
  std::istringstream in(
      "question_id,question_text,decomposition\n"
      "census,\"Which group from the census is smaller: Pacific islander or "
      "African American?\",\"return census groups ;return #1 that is Pacific "
      "islander ;return #1 that is African American ;return size of #2 ;"
      "return size of #3 ;return which is lowest of #4 ,  #5\"\n");
  auto rows = read_break_csv(in);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].decomposition.find(";return which is lowest") !=
        std::string::npos);
}

TEST_CASE("lf jsonl round trip") {
  LogicalFormStep step;
  step.op = Operator::Filter;
  step.args = {{ArgName::Sub, {ArgToken::ref(1)}},
               {ArgName::Cond, {ArgToken::word("from"), ArgToken::word("toronto")}}};
  std::vector<LfRecord> records = {{"e1", LogicalForm{{step}}}};
  auto path = temp_path("lf.jsonl");
  write_lf_jsonl(path, records);
  auto again = read_lf_jsonl(path);
  REQUIRE(again.size() == 1);
  CHECK(again[0].id == "e1");
  CHECK(again[0].lf == records[0].lf);

  // Byte-identical re-serialization.
  auto path2 = temp_path("lf2.jsonl");
  write_lf_jsonl(path2, again);
  CHECK(slurp(path) == slurp(path2));
}

TEST_CASE("alignment jsonl round trip") {
  AlignmentRecord rec;
  rec.id = "e1";
  rec.alignment.pairs = {{0, 0, 0}, {4, 1, 2}};
  auto path = temp_path("align.jsonl");
  write_alignment_jsonl(path, {rec});
  auto again = read_alignment_jsonl(path);
  REQUIRE(again.size() == 1);
  CHECK(again[0].alignment.pairs == rec.alignment.pairs);
}

TEST_CASE("dg jsonl round trip") {
  DgRecord rec;
  rec.id = "e1";
  rec.tokens = {"metal", "cubes", "[SEP]"};
  rec.dg.token_count = 3;
  rec.dg.edges = {{0, 1, EdgeTag::span()},
                  {1, 2, EdgeTag::semantic(Operator::Filter, {}, ArgName::Sub)}};
  auto path = temp_path("dg.jsonl");
  write_dg_jsonl(path, {rec});
  auto again = read_dg_jsonl(path);
  REQUIRE(again.size() == 1);
  CHECK(again[0].dg == rec.dg);
  CHECK(again[0].tokens == rec.tokens);
}

TEST_CASE("probs jsonl: base64 payload is bit exact") {
  auto t = ProbTensor::zeros(2, {"span", "filter-sub"});
  t.id = "e1";
  t.prob(0, 1, 0) = 0.125f;
  t.prob(1, 0, 1) = 0.33333333f;
  auto path = temp_path("probs.jsonl");
  write_probs_jsonl(path, {t});
  auto again = read_probs_jsonl(path);
  REQUIRE(again.size() == 1);
  CHECK(again[0].data == t.data);  // exact float equality
  CHECK(again[0].tags == t.tags);

  auto path_dbg = temp_path("probs_debug.jsonl");
  write_probs_jsonl(path_dbg, {t}, /*debug_arrays=*/true);
  auto dbg = read_probs_jsonl(path_dbg);
  REQUIRE(dbg.size() == 1);
  CHECK(dbg[0].data == t.data);  // 9 significant digits cover float32
}

TEST_CASE("probs payload truncation is a parse error") {
  auto t = ProbTensor::zeros(2, {"span"});
  t.id = "e1";
  auto path = temp_path("probs_trunc.jsonl");
  write_probs_jsonl(path, {t});
  auto text = slurp(path);
  text = text.substr(0, text.size() - 12);
  std::ofstream(path, std::ios::binary) << text;
  CHECK_THROWS_AS(read_probs_jsonl(path), QdgError);
}

TEST_CASE("schema header is checked") {
  auto path = temp_path("schema.jsonl");
  std::ofstream(path) << "{\"schema\":\"qdg.dg\",\"version\":1}\n";
  CHECK_THROWS_AS(read_lf_jsonl(path), QdgError);
  std::ofstream(path) << "{\"schema\":\"qdg.lf\",\"version\":99}\n";
  CHECK_THROWS_AS(read_lf_jsonl(path), QdgError);
}

TEST_CASE("base64 round trip") {
  std::string data = "any carnal pleasure.";
  auto enc = base64_encode(
      reinterpret_cast<const unsigned char*>(data.data()), data.size());
  auto dec = base64_decode(enc);
  CHECK(std::string(dec.begin(), dec.end()) == data);
  CHECK_THROWS_AS(base64_decode("@@@@"), QdgError);
}

TEST_CASE("write then read is stable across repetition") {
  LogicalFormStep step;
  step.op = Operator::Select;
  step.args = {{ArgName::Sub, {ArgToken::word("cubes")}}};
  std::vector<LfRecord> records = {{"a", LogicalForm{{step}}},
                                   {"b", LogicalForm{{step}}}};
  auto p1 = temp_path("stable1.jsonl");
  auto p2 = temp_path("stable2.jsonl");
  write_lf_jsonl(p1, records);
  write_lf_jsonl(p2, records);
  CHECK(slurp(p1) == slurp(p2));
}
