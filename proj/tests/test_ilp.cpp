#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "qdg/errors.hpp"
#include "qdg/ilp.hpp"

using namespace qdg;

namespace {

// Sparse random integral model generator shared by the oracle tests.
IlpModel random_model(std::mt19937& rng, int vars, int cons) {
  IlpModel m;
  std::uniform_int_distribution<int> coeff(-4, 4);
  std::uniform_int_distribution<int> rhs(-3, 3);
  std::uniform_int_distribution<int> sense(0, 2);
  std::uniform_real_distribution<double> pick(0.0, 1.0);
  for (int v = 0; v < vars; ++v) {
    m.add_var("x" + std::to_string(v), coeff(rng));
  }
  for (int c = 0; c < cons; ++c) {
    std::vector<IlpTerm> terms;
    for (int v = 0; v < vars; ++v) {
      if (pick(rng) < 0.4) {
        int k = coeff(rng);
        if (k != 0) terms.push_back({v, static_cast<double>(k)});
      }
    }
    if (terms.empty()) continue;
    ConstraintSense s = sense(rng) == 0   ? ConstraintSense::Ge
                        : sense(rng) == 1 ? ConstraintSense::Le
                                          : ConstraintSense::Ge;
    m.add_constraint(std::move(terms), s, rhs(rng));
  }
  return m;
}

}  // namespace

TEST_CASE("single packing constraint") {
  IlpModel m;
  int x1 = m.add_var("x1", 1.0);
  int x2 = m.add_var("x2", 1.0);
  m.add_constraint({{x1, 1.0}, {x2, 1.0}}, ConstraintSense::Le, 1.0);
  auto sol = solve(m);
  CHECK(sol.status == IlpStatus::Optimal);
  CHECK(sol.objective_value == doctest::Approx(1.0));
  auto oracle = brute_force(m);
  CHECK(oracle.objective_value == doctest::Approx(1.0));
}

TEST_CASE("all-negative objective with no constraints stays at zero") {
  IlpModel m;
  m.add_var("a", -2.0);
  m.add_var("b", -1.0);
  m.add_var("c", -5.0);
  auto sol = solve(m);
  CHECK(sol.status == IlpStatus::Optimal);
  CHECK(sol.objective_value == doctest::Approx(0.0));
  for (auto v : sol.assignment) CHECK(v == 0);
  auto oracle = brute_force(m);
  CHECK(oracle.objective_value == doctest::Approx(0.0));
}

TEST_CASE("infeasible model reports infeasible") {
  IlpModel m;
  int x = m.add_var("x", 1.0);
  m.add_constraint({{x, 1.0}}, ConstraintSense::Ge, 1.0);
  m.add_constraint({{x, 1.0}}, ConstraintSense::Le, 0.0);
  auto sol = solve(m);
  CHECK(sol.status == IlpStatus::Infeasible);
  auto oracle = brute_force(m);
  CHECK(oracle.status == IlpStatus::Infeasible);
}

TEST_CASE("equality constraints are honored") {
  IlpModel m;
  int x = m.add_var("x", 3.0);
  int y = m.add_var("y", 2.0);
  int z = m.add_var("z", 1.0);
  m.add_constraint({{x, 1.0}, {y, 1.0}, {z, 1.0}}, ConstraintSense::Eq, 2.0);
  auto sol = solve(m);
  REQUIRE(sol.status == IlpStatus::Optimal);
  CHECK(sol.objective_value == doctest::Approx(5.0));
  CHECK(sol.assignment[0] == 1);
  CHECK(sol.assignment[1] == 1);
  CHECK(sol.assignment[2] == 0);
}

TEST_CASE("12-var random model matches brute force") {
  std::mt19937 rng(7);
  IlpModel m = random_model(rng, 12, 6);
  auto sol = solve(m);
  auto oracle = brute_force(m);
  REQUIRE(sol.status == oracle.status);
  if (sol.status == IlpStatus::Optimal) {
    CHECK(sol.objective_value == doctest::Approx(oracle.objective_value));
  }
}

TEST_CASE("solver equals oracle on random sparse models up to 20 vars") {
  std::mt19937 rng(20240801);
  std::uniform_int_distribution<int> nvars(1, 20);
  std::uniform_int_distribution<int> ncons(0, 10);
  for (int trial = 0; trial < 150; ++trial) {
    IlpModel m = random_model(rng, nvars(rng), ncons(rng));
    auto sol = solve(m);
    auto oracle = brute_force(m);
    REQUIRE(sol.status == oracle.status);
    if (sol.status == IlpStatus::Optimal) {
      REQUIRE(sol.objective_value == doctest::Approx(oracle.objective_value));
      REQUIRE(check_feasible(m, sol.assignment));
    }
  }
}

TEST_CASE("determinism: repeated solves agree bit for bit") {
  std::mt19937 rng(99);
  IlpModel m = random_model(rng, 16, 8);
  auto a = solve(m);
  auto b = solve(m);
  CHECK(a.status == b.status);
  CHECK(a.assignment == b.assignment);
  CHECK(a.objective_value == b.objective_value);
}

TEST_CASE("float objectives solve within tolerance") {
  IlpModel m;
  int x = m.add_var("x", std::log(0.9));
  int y = m.add_var("y", std::log(0.2));
  m.add_constraint({{x, 1.0}, {y, 1.0}}, ConstraintSense::Eq, 1.0);
  auto sol = solve(m);
  REQUIRE(sol.status == IlpStatus::Optimal);
  CHECK(sol.assignment[x] == 1);
  CHECK(sol.assignment[y] == 0);
}

TEST_CASE("float feasibility uses a tight tolerance") {
  IlpModel m;
  int x = m.add_var("x", 0.5);
  m.add_constraint({{x, 0.3}}, ConstraintSense::Le, 0.3 + 1e-12);
  auto sol = solve(m);
  REQUIRE(sol.status == IlpStatus::Optimal);
  CHECK(sol.assignment[x] == 1);
}

TEST_CASE("brute force refuses oversized models") {
  IlpModel m;
  for (int v = 0; v < 25; ++v) m.add_var("x" + std::to_string(v), 1.0);
  CHECK_THROWS_AS(brute_force(m), QdgError);
}

TEST_CASE("timeout returns a flagged incumbent") {
  // Subset-sum style model with a narrow feasibility window: the positive-sum
  // bound barely prunes, so the search cannot finish in 1ms.
  IlpModel m;
  const int n = 34;
  long long total = 0;
  std::vector<IlpTerm> terms;
  for (int v = 0; v < n; ++v) {
    long long w = 1000003LL * (v + 1) % 8191 + 17;
    m.add_var("x" + std::to_string(v), 1.0);
    terms.push_back({v, static_cast<double>(w)});
    total += w;
  }
  m.add_constraint(terms, ConstraintSense::Le, static_cast<double>(total / 2));
  m.add_constraint(terms, ConstraintSense::Ge,
                   static_cast<double>(total / 2 - 1));
  IlpConfig cfg;
  cfg.time_limit_ms = 1;
  auto sol = solve(m, cfg);
  CHECK(sol.status == IlpStatus::Timeout);
}

TEST_CASE("model dump mentions variables") {
  IlpModel m;
  m.add_var("alpha", 1.0);
  auto text = m.dump();
  CHECK(text.find("alpha") != std::string::npos);
  CHECK(text.find("maximize") != std::string::npos);
}
