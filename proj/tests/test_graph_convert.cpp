#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <random>

#include "decode_oracle.hpp"
#include "qdg/errors.hpp"
#include "qdg/graph_convert.hpp"
#include "qdg/normalize.hpp"
#include "qdg/qdmr_to_lf.hpp"

using namespace qdg;

namespace {

const Lexicon& lex() {
  static Lexicon lexicon = Lexicon::default_lexicon();
  return lexicon;
}

const char* kCensusQ =
    "Which group from the census is smaller: Pacific islander or African "
    "American?";
const char* kCensusD =
    "return census groups ;return #1 that is Pacific islander ;"
    "return #1 that is African American ;return size of #2 ;"
    "return size of #3 ;return which is lowest of #4 ,  #5";

// Node identity up to reordering: match nodes by their token lists.
bool sdg_equivalent(const SpanDependencyGraph& a, const SpanDependencyGraph& b) {
  if (a.size() != b.size()) return false;
  std::map<std::vector<int>, int> where;
  for (int k = 0; k < b.size(); ++k) where[b.node_tokens[k]] = k;
  std::vector<int> map_a(a.size(), -1);
  for (int k = 0; k < a.size(); ++k) {
    auto it = where.find(a.node_tokens[k]);
    if (it == where.end()) return false;
    map_a[k] = it->second;
  }
  auto edge_set = [](const SpanDependencyGraph& g,
                     const std::vector<int>* remap) {
    std::vector<std::string> out;
    for (const auto& e : g.edges) {
      int s = remap ? (*remap)[e.src] : e.src;
      int d = remap ? (*remap)[e.dst] : e.dst;
      out.push_back(std::to_string(s) + ">" + std::to_string(d) + ":" +
                    render_edge_tag(e.tag));
    }
    std::sort(out.begin(), out.end());
    return out;
  };
  auto links = [](const SpanDependencyGraph& g) {
    std::vector<std::pair<int, int>> out;
    for (const auto& l : g.duplicate_links) out.push_back({l.dup_token, l.orig_token});
    std::sort(out.begin(), out.end());
    return out;
  };
  return edge_set(a, &map_a) == edge_set(b, nullptr) && links(a) == links(b);
}

struct Pipeline {
  Question q;
  AugmentedQuestion aug;
  LogicalForm lf;
  SpanDependencyGraph sdg;
  DependencyGraph dg;
};

Pipeline run_pipeline(const std::string& question, const std::string& dec) {
  Pipeline p;
  p.q = Question::from_text(question);
  p.aug = augment_question(p.q, lex());
  Qdmr qdmr = parse_qdmr_text(dec);
  p.lf = qdmr_to_lf(qdmr, lex());
  auto aligned = align(p.aug, qdmr, lex());
  p.sdg = extract_sdg(p.lf, aligned.alignment, p.aug);
  p.dg = sdg_to_dg(p.sdg, p.aug);
  return p;
}

}  // namespace

TEST_CASE("augmented question layout") {
  Question q;
  q.tokens = {"a", "b", "c", "d", "e"};
  auto aug = augment_question(q, lex(), 4, 4);
  // 5 base + separator + 6 store words + 4 + 4.
  CHECK(aug.size() == 20);
  CHECK(aug.tokens[5] == kSepToken);
  CHECK(aug.sep_index == 5);
  CHECK(aug.store_indices.size() == 6);
  CHECK(aug.dum_indices.size() == 4);
  CHECK(aug.dup_indices.size() == 4);
  CHECK(aug.is_structural(5));
  CHECK(aug.is_dum(aug.dum_indices[0]));
  CHECK(aug.is_dup(aug.dup_indices[3]));
  CHECK_FALSE(aug.is_structural(0));

  Lexicon no_store = Lexicon::load_json(R"({
    "aux": [], "store": [], "op": [], "properties": [],
    "equivalence_classes": [], "inflections": []})");
  auto aug2 = augment_question(q, no_store, 4, 4);
  CHECK(aug2.size() == 5 + 1 + 0 + 4 + 4);
}

TEST_CASE("store words are addressable after the separator") {
  Question q = Question::from_text("when do we leave?");
  auto aug = augment_question(q, lex());
  bool found = false;
  for (int i : aug.store_indices) {
    if (aug.tokens[i] == "flights") found = true;
  }
  CHECK(found);
}

TEST_CASE("single step graph") {
  auto p = run_pipeline("metal cubes?", "return metal cubes");
  REQUIRE(p.sdg.size() == 1);
  CHECK(p.sdg.edges.empty());
  CHECK(p.sdg.node_tokens[0] == std::vector<int>{0, 1});
  // One span edge, nothing else.
  REQUIRE(p.dg.edges.size() == 1);
  CHECK(p.dg.edges[0] == DgEdge{0, 1, EdgeTag::span()});
}

TEST_CASE("census pipeline: store grounding, duplicates and edges") {
  auto p = run_pipeline(kCensusQ, kCensusD);
  REQUIRE(p.sdg.size() == 6);

  // Steps 4 and 5 use the store word "size": the second claims a [DUP].
  int size_store = -1;
  for (int i : p.aug.store_indices) {
    if (p.aug.tokens[i] == "size") size_store = i;
  }
  REQUIRE(size_store >= 0);
  CHECK(p.sdg.node_tokens[3] == std::vector<int>{size_store});
  REQUIRE(p.sdg.node_tokens[4].size() == 1);
  CHECK(p.aug.is_dup(p.sdg.node_tokens[4][0]));
  bool linked = false;
  for (const auto& l : p.sdg.duplicate_links) {
    if (l.dup_token == p.sdg.node_tokens[4][0] && l.orig_token == size_store) {
      linked = true;
    }
  }
  CHECK(linked);

  // The final step compares steps 4 and 5.
  int comparison_edges = 0;
  for (const auto& e : p.sdg.edges) {
    if (e.src == 5) {
      CHECK(render_edge_tag(e.tag) == "comparison-arg[min]");
      CHECK((e.dst == 3 || e.dst == 4));
      ++comparison_edges;
    }
  }
  CHECK(comparison_edges == 2);
}

TEST_CASE("unaligned step grounds on a dummy token") {
  auto p = run_pipeline("how many cubes are metal?",
                        "return cubes ;return #1 that are metal ;"
                        "return number of #2");
  REQUIRE(p.sdg.size() == 3);
  REQUIRE(p.sdg.node_tokens[2].size() == 1);
  CHECK(p.aug.is_dum(p.sdg.node_tokens[2][0]));
}

TEST_CASE("span chain construction and representative choice") {
  SpanDependencyGraph sdg;
  sdg.node_tokens = {{2, 5, 6}, {0}};
  sdg.edges.push_back({0, 1, EdgeTag::semantic(Operator::Filter, {}, ArgName::Sub)});
  Question q;
  q.tokens = {"t0", "t1", "t2", "t3", "t4", "t5", "t6"};
  AugmentedQuestion aug;
  aug.base = q;
  aug.tokens = q.tokens;
  auto dg = sdg_to_dg(sdg, aug);
  CHECK(std::count_if(dg.edges.begin(), dg.edges.end(), [](const DgEdge& e) {
          return e.tag.kind == EdgeTag::Kind::Span;
        }) == 2);
  CHECK(std::find(dg.edges.begin(), dg.edges.end(),
                  DgEdge{2, 5, EdgeTag::span()}) != dg.edges.end());
  CHECK(std::find(dg.edges.begin(), dg.edges.end(),
                  DgEdge{5, 6, EdgeTag::span()}) != dg.edges.end());
  // Semantic edge runs between representatives (rightmost tokens).
  CHECK(std::find_if(dg.edges.begin(), dg.edges.end(), [](const DgEdge& e) {
          return e.tag.kind == EdgeTag::Kind::Semantic && e.src == 6 &&
                 e.dst == 0;
        }) != dg.edges.end());
}

TEST_CASE("soft decoding inverts the projection") {
  auto p = run_pipeline(kCensusQ, kCensusD);
  auto back = dg_to_sdg_soft(p.dg);
  CHECK(sdg_equivalent(back, p.sdg));
}

TEST_CASE("stray span edges merge into one component") {
  DependencyGraph dg;
  dg.token_count = 4;
  dg.edges.push_back({0, 1, EdgeTag::span()});
  dg.edges.push_back({1, 2, EdgeTag::span()});
  dg.edges.push_back({0, 2, EdgeTag::span()});
  auto sdg = dg_to_sdg_soft(dg);
  REQUIRE(sdg.size() == 1);
  CHECK(sdg.node_tokens[0] == std::vector<int>{0, 1, 2});
}

TEST_CASE("mixed outgoing operations fail step rebuilding") {
  SpanDependencyGraph sdg;
  sdg.node_tokens = {{0}, {1}, {2}};
  sdg.edges.push_back({2, 0, EdgeTag::semantic(Operator::Filter, {}, ArgName::Sub)});
  sdg.edges.push_back({2, 1, EdgeTag::semantic(Operator::Project, {}, ArgName::Sub)});
  AugmentedQuestion aug;
  aug.tokens = {"a", "b", "c"};
  CHECK_THROWS_AS(sdg_to_lf(sdg, aug), QdgError);
}

TEST_CASE("cyclic spans fail step rebuilding") {
  SpanDependencyGraph sdg;
  sdg.node_tokens = {{0}, {1}};
  sdg.edges.push_back({0, 1, EdgeTag::semantic(Operator::Filter, {}, ArgName::Sub)});
  sdg.edges.push_back({1, 0, EdgeTag::semantic(Operator::Filter, {}, ArgName::Sub)});
  AugmentedQuestion aug;
  aug.tokens = {"a", "b"};
  CHECK_THROWS_AS(sdg_to_lf(sdg, aug), QdgError);
}

TEST_CASE("full round trip recovers the logical form") {
  const std::vector<std::pair<std::string, std::string>> cases = {
      {kCensusQ, kCensusD},
      {"metal cubes in the box?", "return cubes; return #1 that are metal"},
      {"what is the head coach of the team?",
       "return team; return the head coach of #1"},
      {"how many cubes are metal?",
       "return cubes; return #1 that are metal; return number of #2"},
      {"are there more dogs than cats?",
       "return dogs; return cats; return number of #1; return number of #2; "
       "return which is more of #3 , #4"},
  };
  for (const auto& [question, dec] : cases) {
    CAPTURE(question);
    auto p = run_pipeline(question, dec);
    auto back = sdg_to_lf(dg_to_sdg_soft(p.dg), p.aug);
    CHECK(lf_em(back, p.lf, lex()));
  }
}

TEST_CASE("greedy decode thresholds and labels") {
  auto t = ProbTensor::zeros(2, {"span", "filter-sub"});
  t.prob(0, 1, 0) = 0.9f;
  auto dg = greedy_decode(t);
  REQUIRE(dg.edges.size() == 1);
  CHECK(dg.edges[0] == DgEdge{0, 1, EdgeTag::span()});

  auto low = ProbTensor::zeros(2, {"span", "filter-sub"});
  low.prob(0, 1, 0) = 0.3f;
  low.prob(1, 0, 1) = 0.2f;
  CHECK(greedy_decode(low).edges.empty());

  // Mass split across tags still crosses the threshold together.
  auto split = ProbTensor::zeros(2, {"span", "filter-sub"});
  split.prob(0, 1, 0) = 0.3f;
  split.prob(0, 1, 1) = 0.3f;
  auto dg2 = greedy_decode(split);
  REQUIRE(dg2.edges.size() == 1);
  // Tie on probability: lexicographically first tag wins.
  CHECK(render_edge_tag(dg2.edges[0].tag) == "filter-sub");
}

TEST_CASE("greedy monotone mass: scaling down never adds edges") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<float> u(0.0f, 0.5f);
  auto t = ProbTensor::zeros(3, {"span", "filter-sub", "project-sub"});
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      for (int k = 0; k < 3; ++k) {
        if (i != j) t.prob(i, j, k) = u(rng);
      }
    }
  }
  auto edges_of = [](const DependencyGraph& g) {
    std::vector<std::pair<int, int>> out;
    for (const auto& e : g.edges) out.push_back({e.src, e.dst});
    std::sort(out.begin(), out.end());
    return out;
  };
  auto base = edges_of(greedy_decode(t));
  for (float scale : {0.9f, 0.6f, 0.3f}) {
    ProbTensor scaled = t;
    for (auto& v : scaled.data) v *= scale;
    auto shrunk = edges_of(greedy_decode(scaled));
    for (const auto& e : shrunk) {
      CHECK(std::find(base.begin(), base.end(), e) != base.end());
    }
  }
}

TEST_CASE("validator flags the named families") {
  AugmentedQuestion aug;
  aug.tokens = {"a", "b", "c", "[DUP]"};
  aug.dup_indices = {3};

  DependencyGraph wrong_span;
  wrong_span.token_count = 4;
  wrong_span.edges.push_back({2, 1, EdgeTag::span()});
  auto v1 = validate_dg(wrong_span, aug);
  CHECK(std::find(v1.begin(), v1.end(), "SpanDirection") != v1.end());

  DependencyGraph two_roots;
  two_roots.token_count = 4;
  two_roots.edges.push_back(
      {0, 1, EdgeTag::semantic(Operator::Filter, {}, ArgName::Sub)});
  two_roots.edges.push_back(
      {2, 1, EdgeTag::semantic(Operator::Filter, {}, ArgName::Sub)});
  auto v2 = validate_dg(two_roots, aug);
  CHECK(std::find(v2.begin(), v2.end(), "Connectivity") != v2.end());

  DependencyGraph dup_bad;
  dup_bad.token_count = 4;
  dup_bad.edges.push_back({0, 1, EdgeTag::duplicate()});
  auto v3 = validate_dg(dup_bad, aug);
  CHECK(std::find(v3.begin(), v3.end(), "DuplicateLegality") != v3.end());

  DependencyGraph inconsistent;
  inconsistent.token_count = 4;
  inconsistent.edges.push_back(
      {0, 1, EdgeTag::semantic(Operator::Filter, {}, ArgName::Sub)});
  inconsistent.edges.push_back(
      {0, 2, EdgeTag::semantic(Operator::Project, {}, ArgName::Sub)});
  auto v4 = validate_dg(inconsistent, aug);
  CHECK(std::find(v4.begin(), v4.end(), "OperatorConsistency") != v4.end());

  DependencyGraph fine;
  fine.token_count = 4;
  fine.edges.push_back({0, 1, EdgeTag::span()});
  fine.edges.push_back(
      {1, 2, EdgeTag::semantic(Operator::Filter, {}, ArgName::Sub)});
  CHECK(validate_dg(fine, aug).empty());
}

TEST_CASE("gold dependency graphs pass validation") {
  auto p = run_pipeline(kCensusQ, kCensusD);
  CHECK(validate_dg(p.dg, p.aug).empty());
}

namespace {

AugmentedQuestion tiny_aug(bool with_dup) {
  AugmentedQuestion aug;
  if (with_dup) {
    aug.tokens = {"red", "cubes", "count", "[DUP]"};
    aug.dup_indices = {3};
  } else {
    aug.tokens = {"red", "cubes", "boxes", "count"};
  }
  return aug;
}

ProbTensor random_tensor(std::mt19937& rng, int n,
                         const std::vector<std::string>& tags) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  std::bernoulli_distribution strong(0.5);
  auto t = ProbTensor::zeros(n, tags);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      std::vector<double> w(tags.size() + 1);
      for (auto& x : w) x = u(rng);
      if (strong(rng)) w[rng() % tags.size()] *= 6.0;  // peaked cells
      double total = 0.0;
      for (double x : w) total += x;
      for (size_t k = 0; k < tags.size(); ++k) {
        t.prob(i, j, static_cast<int>(k)) = static_cast<float>(w[k] / total);
      }
    }
  }
  return t;
}

}  // namespace

TEST_CASE("exact decode equals the exhaustive optimum on small tensors") {
  std::mt19937 rng(20240202);
  const std::vector<std::string> tags = {"span", "duplicate", "filter-sub",
                                         "project-sub"};
  for (int trial = 0; trial < 25; ++trial) {
    auto aug = tiny_aug(trial % 2 == 0);
    auto probs = random_tensor(rng, aug.size(), tags);
    auto oracle = test::decode_oracle(probs, aug);
    auto result = ilp_decode(probs, aug);
    REQUIRE(result.status == IlpStatus::Optimal);
    CHECK(validate_dg(result.dg, aug).empty());
    CHECK(result.objective == doctest::Approx(oracle.objective).epsilon(1e-6));
  }
}

TEST_CASE("exact decode recovers a confidently encoded graph") {
  auto p = run_pipeline("metal cubes in the box?",
                        "return cubes; return #1 that are metal");
  std::vector<std::string> tags = {"span", "duplicate", "filter-sub",
                                   "filter-cond"};
  auto probs = test::tensor_from_dg(p.dg, tags, 0.9f);
  auto result = ilp_decode(probs, p.aug);
  REQUIRE(result.status == IlpStatus::Optimal);
  auto canon = [](DependencyGraph g) {
    std::vector<std::string> s;
    for (const auto& e : g.edges) {
      s.push_back(std::to_string(e.src) + ">" + std::to_string(e.dst) + ":" +
                  render_edge_tag(e.tag));
    }
    std::sort(s.begin(), s.end());
    return s;
  };
  CHECK(canon(result.dg) == canon(p.dg));
}

TEST_CASE("exact decode repairs an invalid greedy graph") {
  // Two confident outgoing arcs with different operators from token 2.
  auto aug = tiny_aug(false);
  auto t = ProbTensor::zeros(4, {"span", "filter-sub", "project-sub"});
  t.prob(2, 0, 1) = 0.9f;  // filter-sub
  t.prob(2, 1, 2) = 0.8f;  // project-sub
  auto greedy = greedy_decode(t);
  CHECK_FALSE(validate_dg(greedy, aug).empty());
  auto repaired = ilp_decode(t, aug);
  CHECK(validate_dg(repaired.dg, aug).empty());
  // The higher-mass arc survives.
  bool kept = false;
  for (const auto& e : repaired.dg.edges) {
    if (e.src == 2 && e.dst == 0 && render_edge_tag(e.tag) == "filter-sub") {
      kept = true;
    }
  }
  CHECK(kept);
}

TEST_CASE("valid greedy output never beats the exact decoder") {
  std::mt19937 rng(77);
  std::uniform_real_distribution<float> noise(0.0f, 0.08f);
  const std::vector<std::string> tags = {"span", "duplicate", "filter-sub",
                                         "filter-cond"};
  auto p = run_pipeline("metal cubes in the box?",
                        "return cubes; return #1 that are metal");
  int compared = 0;
  for (int trial = 0; trial < 10; ++trial) {
    auto probs = test::tensor_from_dg(p.dg, tags, 0.75f);
    for (auto& v : probs.data) {
      if (v == 0.0f) v = noise(rng);  // background mass stays below threshold
    }
    auto greedy = greedy_decode(probs);
    if (!validate_dg(greedy, p.aug).empty()) continue;
    ++compared;
    auto exact = ilp_decode(probs, p.aug);
    CHECK(exact.objective >= dg_log_probability(probs, greedy) - 1e-9);
  }
  CHECK(compared > 0);
}
