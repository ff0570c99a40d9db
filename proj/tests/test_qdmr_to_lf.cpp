#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qdg/errors.hpp"
#include "qdg/lexicon.hpp"
#include "qdg/qdmr_to_lf.hpp"

using namespace qdg;

namespace {

const Lexicon& lex() {
  static Lexicon lexicon = Lexicon::default_lexicon();
  return lexicon;
}

std::string convert_step(const std::string& step_text) {
  Qdmr q = parse_qdmr_text(step_text);
  LogicalForm lf = qdmr_to_lf(q, lex());
  return render_lf_step(lf.steps.back());
}

}  // namespace

// The fourteen operator templates, one example per operator. Inputs are
// lowercased at ingestion, so argument text renders lowercase.
TEST_CASE("operator template fixtures") {
  CHECK(convert_step("return cubes") == "SELECT[](sub=cubes)");
  CHECK(convert_step("return cubes; return #1 from Toronto") ==
        "FILTER[](sub=#1, cond=from toronto)");
  CHECK(convert_step("return teams; return the head coach of #1") ==
        "PROJECT[](sub=#1, projection=the head coach of)");
  CHECK(convert_step("return points; return maximal number of #1") ==
        "AGGREGATE[max](arg=#1)");
  CHECK(convert_step(
            "return people; return cars; return the number of #2 for each #1") ==
        "GROUP[count](key=#1, value=#2)");
  CHECK(convert_step(
            "return players; return #1 that scored; return points of #2; "
            "return #2 where #3 is the lowest") ==
        "SUPERLATIVE[min](sub=#2, attribute=#3)");
  CHECK(convert_step("return towers; return heights of #1; "
                     "return #1 where #2 is more than 100") ==
        "COMPARATIVE[more](sub=#1, attribute=#2, condition=100)");
  CHECK(convert_step("return cats; return dogs; return which is higher of "
                     "#1, #2") == "COMPARISON[max](arg=#1, arg=#2)");
  CHECK(convert_step("return cats; return dogs; return #1 , #2") ==
        "UNION[](sub=#1, sub=#2)");
  CHECK(convert_step("return parties; return #1 of texas; return #1 of ohio; "
                     "return parties in both #2 and #3") ==
        "INTERSECTION[](intersect=#2, intersect=#3, projection=parties)");
  CHECK(convert_step("return cubes; return spheres; return #1 besides #2") ==
        "DISCARD[](sub=#1, exclude=#2)");
  CHECK(convert_step("return players; return #1 ordered by name") ==
        "SORT[](sub=#1, order=name)");
  CHECK(convert_step("return cats; return dogs; "
                     "return if #1 is the same as #2") ==
        "BOOLEAN[equals](sub=#1, condition=#2)");
  CHECK(convert_step("return wins; return losses; return points of #1; "
                     "return points of #2; return the difference of #3 and #4") ==
        "ARITHMETIC[diff](left=#3, right=#4)");
}

TEST_CASE("operator detection basics") {
  Qdmr q = parse_qdmr_text("return cubes; return #1 from Toronto");
  CHECK(detect_operator(q.steps[0], 1, lex()) == Operator::Select);
  CHECK(detect_operator(q.steps[1], 2, lex()) == Operator::Filter);

  Qdmr arith = parse_qdmr_text(
      "return a; return b; return c of #1; return c of #2; "
      "return the difference of #3 and #4");
  CHECK(detect_operator(arith.steps[4], 5, lex()) == Operator::Arithmetic);
}

TEST_CASE("property detection precedence") {
  Qdmr q = parse_qdmr_text("return points; return maximal number of #1");
  DetectionTrace trace;
  auto props =
      detect_properties(q.steps[1], Operator::Aggregate, lex(), &trace);
  CHECK(props == std::vector<std::string>{"max"});

  // "total number of" must fire count once, not count and sum.
  Qdmr q2 = parse_qdmr_text("return points; return total number of #1");
  auto props2 = detect_properties(q2.steps[1], Operator::Aggregate, lex());
  CHECK(props2 == std::vector<std::string>{"count"});

  Qdmr q3 = parse_qdmr_text("return cubes; return spheres; "
                            "return #1 where #2 is more than 1");
  auto lf3 = qdmr_to_lf(q3, lex());
  CHECK(lf3.steps[2].properties == std::vector<std::string>{"more-than-1"});

  Qdmr q4 = parse_qdmr_text("return cubes");
  auto props4 = detect_properties(q4.steps[0], Operator::Select, lex());
  CHECK(props4.empty());
}

TEST_CASE("conflicting aggregate properties fail") {
  Qdmr q = parse_qdmr_text("return points; return maximal minimal of #1");
  CHECK_THROWS_AS(
      detect_properties(q.steps[1], Operator::Aggregate, lex()),
      QdgError);
}

TEST_CASE("trigger conservation: consumed tokens never reach arguments") {
  Qdmr q = parse_qdmr_text("return points; return maximal number of #1");
  auto lf = qdmr_to_lf(q, lex());
  const auto& step = lf.steps[1];
  REQUIRE(step.args.size() == 1);
  REQUIRE(step.args[0].second.size() == 1);
  CHECK(step.args[0].second[0].is_ref());
}

TEST_CASE("superlative without attribute reference fails") {
  Qdmr q = parse_qdmr_text("return players; return #1 where is the lowest");
  CHECK_THROWS_AS(qdmr_to_lf(q, lex()), QdgError);
}

TEST_CASE("six step decomposition converts end to end") {
  Qdmr q = parse_qdmr_text(
      "return census groups ;return #1 that is Pacific islander ;"
      "return #1 that is African American ;return size of #2 ;"
      "return size of #3 ;return which is lowest of #4 ,  #5");
  LogicalForm lf = qdmr_to_lf(q, lex());
  REQUIRE(lf.steps.size() == 6);
  CHECK(lf.steps[0].op == Operator::Select);
  CHECK(lf.steps[1].op == Operator::Filter);
  CHECK(lf.steps[2].op == Operator::Filter);
  CHECK(lf.steps[3].op == Operator::Project);
  CHECK(lf.steps[4].op == Operator::Project);
  CHECK(lf.steps[5].op == Operator::Comparison);
  CHECK(lf.steps[5].properties == std::vector<std::string>{"min"});
  CHECK(render_lf_step(lf.steps[5]) == "COMPARISON[min](arg=#4, arg=#5)");
  CHECK(render_lf_step(lf.steps[3]) == "PROJECT[](sub=#2, projection=size of)");
}

TEST_CASE("determinism: same input and lexicon give identical forms") {
  Qdmr ok = parse_qdmr_text(
      "return census groups; return size of #1; return #1 where #2 is more "
      "than 10");
  auto a = qdmr_to_lf(ok, lex());
  auto b = qdmr_to_lf(ok, lex());
  CHECK(a == b);
}

TEST_CASE("boolean variants") {
  CHECK(convert_step("return cubes; return if there are any #1") ==
        "BOOLEAN[if-exists](sub=#1)");
  CHECK(convert_step("return cubes; return spheres; "
                     "return if both #1 and #2 are true") ==
        "BOOLEAN[and-true](sub=#1, sub=#2)");
  CHECK(convert_step("return cubes; return number of #1; "
                     "return if #2 is more than 1") ==
        "BOOLEAN[more-than-1](sub=#2)");
}

TEST_CASE("group with plain aggregate trigger") {
  CHECK(convert_step("return students; return grades of #1; "
                     "return the average of #2 for each #1") ==
        "GROUP[avg](key=#1, value=#2)");
}

TEST_CASE("sum arithmetic uses symmetric arguments") {
  CHECK(convert_step("return a; return b; return c of #1; return c of #2; "
                     "return the sum of #3 and #4") ==
        "ARITHMETIC[sum](arg=#3, arg=#4)");
}
