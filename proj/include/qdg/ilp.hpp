#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace qdg {

enum class ConstraintSense { Ge, Le, Eq };

struct IlpTerm {
  int var = 0;
  double coeff = 0.0;
};

struct IlpConstraint {
  std::vector<IlpTerm> terms;
  ConstraintSense sense = ConstraintSense::Ge;
  double rhs = 0.0;
};

// A 0/1 maximization program. Variables are identified by declaration index;
// names exist for debugging dumps only.
class IlpModel {
 public:
  int add_var(std::string name, double objective_coeff = 0.0);
  void add_objective(int var, double coeff);  // accumulates
  void add_constraint(std::vector<IlpTerm> terms, ConstraintSense sense,
                      double rhs);

  int var_count() const { return static_cast<int>(names_.size()); }
  const std::string& var_name(int v) const { return names_[v]; }
  const std::vector<double>& objective() const { return objective_; }
  const std::vector<IlpConstraint>& constraints() const { return constraints_; }

  // True when every coefficient and bound is an integer: solves then run on
  // 64-bit integer arithmetic, immune to float cancellation.
  bool all_integral() const;

  // Plain-text dump (LP-like) for external cross-checking.
  std::string dump() const;

 private:
  std::vector<std::string> names_;
  std::vector<double> objective_;
  std::vector<IlpConstraint> constraints_;
};

enum class IlpStatus { Optimal, Infeasible, Timeout };

struct IlpSolution {
  std::vector<uint8_t> assignment;
  double objective_value = 0.0;
  IlpStatus status = IlpStatus::Infeasible;
};

struct IlpConfig {
  int64_t time_limit_ms = 10000;
  uint64_t deterministic_seed = 0;  // accepted for interface stability; the
                                    // search itself is already deterministic
};

// Exact branch-and-bound over the declaration order, 1-branch first, with
// unit propagation and a positive-coefficient bound. On timeout returns the
// best incumbent found (status Timeout).
IlpSolution solve(const IlpModel& model, const IlpConfig& config = {});

// Exhaustive oracle for models with <= 24 variables; ties broken by the
// lexicographically smallest assignment. Throws TooLarge above the limit.
IlpSolution brute_force(const IlpModel& model);

// Independent feasibility check of a full assignment.
bool check_feasible(const IlpModel& model, const std::vector<uint8_t>& assignment,
                    double tolerance = 1e-9);

double objective_value(const IlpModel& model,
                       const std::vector<uint8_t>& assignment);

}  // namespace qdg
