#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "qdg/edge_tag.hpp"
#include "qdg/errors.hpp"
#include "qdg/lexicon.hpp"
#include "qdg/logical_form.hpp"
#include "qdg/qdmr.hpp"
#include "qdg/question.hpp"
#include "qdg/text.hpp"

using namespace qdg;

TEST_CASE("tokenize lowercases and splits punctuation") {
  auto toks = tokenize("Which group, from #2 (the census)?");
  CHECK(toks == std::vector<std::string>{"which", "group", ",", "from", "#2",
                                         "(", "the", "census", ")", "?"});
  CHECK(tokenize("is 3.5 more") ==
        std::vector<std::string>{"is", "3.5", "more"});
}

TEST_CASE("reference token helpers") {
  CHECK(is_reference_token("#1"));
  CHECK(is_reference_token("#12"));
  CHECK_FALSE(is_reference_token("#"));
  CHECK_FALSE(is_reference_token("#x"));
  CHECK(reference_index("#12") == 12);
}

TEST_CASE("qdmr parsing: single step") {
  auto q = parse_qdmr_text("return cubes");
  REQUIRE(q.size() == 1);
  CHECK(q.steps[0].tokens == std::vector<std::string>{"cubes"});
}

TEST_CASE("qdmr parsing: self reference is malformed") {
  CHECK_THROWS_WITH_AS(parse_qdmr_text("return #1 ;"),
                       doctest::Contains("MalformedReference"), QdgError);
  CHECK_THROWS_AS(parse_qdmr_text("return cubes; return #2 of #1"), QdgError);
  CHECK_THROWS_AS(parse_qdmr_text("   "), QdgError);
}

TEST_CASE("qdmr parsing: six step decomposition") {
  auto q = parse_qdmr_text(
      "return census groups ;return #1 that is Pacific islander ;"
      "return #1 that is African American ;return size of #2 ;"
      "return size of #3 ;return which is lowest of #4 ,  #5");
  REQUIRE(q.size() == 6);
  CHECK(q.steps[5].references() == std::vector<int>{4, 5});
  CHECK(q.steps[1].references() == std::vector<int>{1});
}

TEST_CASE("render_lf_step canonical forms") {
  LogicalFormStep select{Operator::Select, {}, {{ArgName::Sub,
      {ArgToken::word("cubes")}}}};
  CHECK(render_lf_step(select) == "SELECT[](sub=cubes)");

  LogicalFormStep agg{Operator::Aggregate, {"max"},
                      {{ArgName::Arg, {ArgToken::ref(1)}}}};
  CHECK(render_lf_step(agg) == "AGGREGATE[max](arg=#1)");

  LogicalFormStep uni{Operator::Union, {},
                      {{ArgName::Sub, {ArgToken::ref(2)}},
                       {ArgName::Sub, {ArgToken::ref(1)}}}};
  CHECK(render_lf_step(uni) == "UNION[](sub=#1, sub=#2)");
}

TEST_CASE("edge tag rendering") {
  CHECK(render_edge_tag(EdgeTag::semantic(Operator::Filter, {}, ArgName::Sub)) ==
        "filter-sub");
  CHECK(render_edge_tag(EdgeTag::span()) == "span");
  CHECK(render_edge_tag(EdgeTag::semantic(Operator::Arithmetic, {"diff"},
                                          ArgName::Left)) ==
        "arithmetic-left[diff]");
  CHECK(render_edge_tag(EdgeTag::semantic(Operator::Comparative, {"more"},
                                          ArgName::Condition)) ==
        "comparative-condition[more]");
}

TEST_CASE("edge tag render/parse round trip") {
  std::vector<EdgeTag> tags = {
      EdgeTag::span(),
      EdgeTag::duplicate(),
      EdgeTag::semantic(Operator::Filter, {}, ArgName::Sub),
      EdgeTag::semantic(Operator::Comparative, {"more-than-1"}, ArgName::Sub),
      EdgeTag::semantic(Operator::Comparison, {"min"}, ArgName::Arg),
      EdgeTag::semantic(Operator::Boolean, {"if-exists"}, ArgName::Condition),
  };
  for (const auto& tag : tags) {
    CHECK(parse_edge_tag(render_edge_tag(tag)) == tag);
  }
  CHECK_THROWS_AS(parse_edge_tag("bogus"), QdgError);
  CHECK_THROWS_AS(parse_edge_tag("filter-banana"), QdgError);
}

TEST_CASE("lexicon loads and classes partition") {
  Lexicon lex = Lexicon::default_lexicon();
  CHECK(lex.is_aux("the"));
  CHECK(lex.is_store("size"));

  std::set<std::string> seen;
  for (const auto& cls : lex.equivalence_classes()) {
    bool rep_in_class = false;
    for (const auto& m : cls.members) {
      CHECK(seen.insert(m).second);  // pairwise disjoint after merging
      if (m == cls.representative) rep_in_class = true;
    }
    CHECK(rep_in_class);
  }
}

TEST_CASE("lexicon equivalence and representatives") {
  Lexicon lex = Lexicon::default_lexicon();
  CHECK(lex.equivalent("groups", "group"));      // inflection
  CHECK(lex.equivalent("census", "census"));     // identity
  CHECK(lex.equivalent("smaller", "lowest"));    // operational class
  CHECK(lex.equivalent("biggest", "longest"));
  CHECK_FALSE(lex.equivalent("census", "size"));
  CHECK(lex.representative("countries") == "country");
  CHECK(lex.representative("lowest") == lex.representative("smaller"));
  CHECK(lex.same_class("height", "elevation"));
}

TEST_CASE("lexicon json round trip preserves matching behavior") {
  Lexicon lex = Lexicon::default_lexicon();
  Lexicon again = Lexicon::load_json(lex.to_json());
  CHECK(again.equivalent("smaller", "lowest"));
  CHECK(again.is_aux("of"));
  CHECK(again.store_words() == lex.store_words());
  CHECK(again.equivalence_classes().size() == lex.equivalence_classes().size());
}

TEST_CASE("question requires content") {
  CHECK_THROWS_AS(Question::from_text(""), QdgError);
  auto q = Question::from_text("How many cubes?");
  CHECK(q.size() == 4);
}
