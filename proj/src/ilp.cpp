#include "qdg/ilp.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

#include "qdg/errors.hpp"

namespace qdg {

int IlpModel::add_var(std::string name, double objective_coeff) {
  names_.push_back(std::move(name));
  objective_.push_back(objective_coeff);
  return static_cast<int>(names_.size()) - 1;
}

void IlpModel::add_objective(int var, double coeff) { objective_[var] += coeff; }

void IlpModel::add_constraint(std::vector<IlpTerm> terms, ConstraintSense sense,
                              double rhs) {
  for (const auto& t : terms) {
    if (t.var < 0 || t.var >= var_count()) {
      throw QdgError(ErrorKind::InvalidInput, "constraint uses undeclared var");
    }
    if (!std::isfinite(t.coeff)) {
      throw QdgError(ErrorKind::InvalidInput, "non-finite coefficient");
    }
  }
  if (!std::isfinite(rhs)) {
    throw QdgError(ErrorKind::InvalidInput, "non-finite rhs");
  }
  constraints_.push_back({std::move(terms), sense, rhs});
}

bool IlpModel::all_integral() const {
  auto integral = [](double x) { return x == std::floor(x); };
  for (double c : objective_) {
    if (!integral(c)) return false;
  }
  for (const auto& con : constraints_) {
    if (!integral(con.rhs)) return false;
    for (const auto& t : con.terms) {
      if (!integral(t.coeff)) return false;
    }
  }
  return true;
}

std::string IlpModel::dump() const {
  std::ostringstream out;
  out << "maximize";
  for (int v = 0; v < var_count(); ++v) {
    if (objective_[v] == 0.0) continue;
    out << (objective_[v] >= 0 ? " + " : " - ") << std::abs(objective_[v])
        << " " << names_[v];
  }
  out << "\nsubject to\n";
  for (const auto& con : constraints_) {
    out << " ";
    for (const auto& t : con.terms) {
      out << (t.coeff >= 0 ? " + " : " - ") << std::abs(t.coeff) << " "
          << names_[t.var];
    }
    switch (con.sense) {
      case ConstraintSense::Ge: out << " >= "; break;
      case ConstraintSense::Le: out << " <= "; break;
      case ConstraintSense::Eq: out << " = "; break;
    }
    out << con.rhs << "\n";
  }
  out << "binary";
  for (int v = 0; v < var_count(); ++v) out << " " << names_[v];
  out << "\n";
  return out.str();
}

double objective_value(const IlpModel& model,
                       const std::vector<uint8_t>& assignment) {
  double value = 0.0;
  const auto& obj = model.objective();
  for (size_t v = 0; v < obj.size(); ++v) {
    if (assignment[v]) value += obj[v];
  }
  return value;
}

bool check_feasible(const IlpModel& model, const std::vector<uint8_t>& assignment,
                    double tolerance) {
  if (assignment.size() != static_cast<size_t>(model.var_count())) return false;
  for (const auto& con : model.constraints()) {
    double act = 0.0;
    for (const auto& t : con.terms) {
      if (assignment[t.var]) act += t.coeff;
    }
    switch (con.sense) {
      case ConstraintSense::Ge:
        if (act < con.rhs - tolerance) return false;
        break;
      case ConstraintSense::Le:
        if (act > con.rhs + tolerance) return false;
        break;
      case ConstraintSense::Eq:
        if (std::abs(act - con.rhs) > tolerance) return false;
        break;
    }
  }
  return true;
}

namespace {

// Branch-and-bound core, instantiated on int64 (all-integral models, exact)
// or double (1e-9 feasibility tolerance). Branches in declaration order with
// the 1-branch first; the bound is fixed objective + positive free objective.
template <typename Num>
class Search {
 public:
  Search(const IlpModel& model, const IlpConfig& config)
      : model_(model), config_(config) {
    n_ = model.var_count();
    obj_.resize(n_);
    for (int v = 0; v < n_; ++v) obj_[v] = to_num(model.objective()[v]);

    const auto& cons = model.constraints();
    rows_.reserve(cons.size() * 2);
    for (const auto& con : cons) {
      // Eq splits into Ge + Le; Le is stored as negated Ge.
      if (con.sense == ConstraintSense::Ge || con.sense == ConstraintSense::Eq) {
        push_row(con, /*negate=*/false);
      }
      if (con.sense == ConstraintSense::Le || con.sense == ConstraintSense::Eq) {
        push_row(con, /*negate=*/true);
      }
    }
    touching_.resize(n_);
    for (size_t r = 0; r < rows_.size(); ++r) {
      for (const auto& t : rows_[r].terms) touching_[t.var].push_back(r);
    }

    state_.assign(n_, kFree);
    pos_free_total_ = Num(0);
    for (int v = 0; v < n_; ++v) {
      if (obj_[v] > Num(0)) pos_free_total_ += obj_[v];
    }
    for (auto& row : rows_) {
      row.slack = -row.rhs;
      for (const auto& t : row.terms) {
        if (t.coeff > Num(0)) row.slack += t.coeff;
      }
    }
  }

  IlpSolution run() {
    IlpSolution best;
    best.status = IlpStatus::Infeasible;
    found_ = false;
    start_ = std::chrono::steady_clock::now();

    // Unconstrained variables take their objective sign up front.
    std::vector<int> trail;
    for (int v = 0; v < n_; ++v) {
      if (touching_[v].empty()) {
        if (!fix(v, obj_[v] > Num(0) ? 1 : 0, trail)) return best;
      }
    }
    if (!propagate_all(trail)) {
      return best;  // root conflict
    }

    bool timed_out = false;
    dfs(0, trail, best, timed_out);
    if (timed_out) {
      best.status = IlpStatus::Timeout;
    } else if (found_) {
      best.status = IlpStatus::Optimal;
    }
    return best;
  }

 private:
  static constexpr int8_t kFree = -1;

  struct Row {
    struct Term {
      int var;
      Num coeff;
    };
    std::vector<Term> terms;
    Num rhs = Num(0);
    // Maximum achievable activity minus rhs given current fixings. A row is
    // violated-beyond-repair when slack < -tol.
    Num slack = Num(0);
  };

  static Num to_num(double x) {
    if constexpr (std::is_same_v<Num, int64_t>) {
      return static_cast<int64_t>(std::llround(x));
    } else {
      return x;
    }
  }

  Num tol() const {
    if constexpr (std::is_same_v<Num, int64_t>) {
      return Num(0);
    } else {
      return 1e-9;
    }
  }

  // Coefficients are coalesced per variable; propagation assumes each
  // variable appears in a row at most once.
  void push_row(const IlpConstraint& con, bool negate) {
    Row row;
    row.rhs = negate ? -to_num(con.rhs) : to_num(con.rhs);
    std::vector<typename Row::Term> raw;
    for (const auto& t : con.terms) {
      Num c = negate ? -to_num(t.coeff) : to_num(t.coeff);
      if (c != Num(0)) raw.push_back({t.var, c});
    }
    std::sort(raw.begin(), raw.end(),
              [](const auto& a, const auto& b) { return a.var < b.var; });
    for (const auto& t : raw) {
      if (!row.terms.empty() && row.terms.back().var == t.var) {
        row.terms.back().coeff += t.coeff;
      } else {
        row.terms.push_back(t);
      }
    }
    row.terms.erase(std::remove_if(row.terms.begin(), row.terms.end(),
                                   [](const auto& t) {
                                     return t.coeff == Num(0);
                                   }),
                    row.terms.end());
    rows_.push_back(std::move(row));
  }

  // Fixes a variable, updating slacks and the objective bound. All row
  // updates complete even on conflict so that undo() is always exact.
  bool fix(int v, int value, std::vector<int>& trail) {
    if (state_[v] != kFree) return state_[v] == value;
    state_[v] = static_cast<int8_t>(value);
    trail.push_back(v);
    if (obj_[v] > Num(0)) pos_free_total_ -= obj_[v];
    if (value) fixed_obj_ += obj_[v];
    bool ok = true;
    for (size_t r : touching_[v]) {
      Row& row = rows_[r];
      for (const auto& t : row.terms) {
        if (t.var != v) continue;
        if (value) {
          if (t.coeff < Num(0)) row.slack += t.coeff;
        } else {
          if (t.coeff > Num(0)) row.slack -= t.coeff;
        }
      }
      if (row.slack < -tol()) ok = false;
      pending_.push_back(r);
    }
    return ok;
  }

  void undo(std::vector<int>& trail, size_t mark) {
    while (trail.size() > mark) {
      int v = trail.back();
      trail.pop_back();
      int value = state_[v];
      state_[v] = kFree;
      if (obj_[v] > Num(0)) pos_free_total_ += obj_[v];
      if (value) fixed_obj_ -= obj_[v];
      for (size_t r : touching_[v]) {
        Row& row = rows_[r];
        for (const auto& t : row.terms) {
          if (t.var != v) continue;
          if (value) {
            if (t.coeff < Num(0)) row.slack -= t.coeff;
          } else {
            if (t.coeff > Num(0)) row.slack += t.coeff;
          }
        }
      }
    }
  }

  // Unit propagation: a free variable whose 0 (or 1) value would push a row
  // beyond repair is forced the other way.
  bool propagate(std::vector<int>& trail) {
    while (!pending_.empty()) {
      size_t r = pending_.back();
      pending_.pop_back();
      Row& row = rows_[r];
      if (row.slack < -tol()) return false;
      for (const auto& t : row.terms) {
        if (state_[t.var] != kFree) continue;
        if (t.coeff > Num(0)) {
          if (row.slack - t.coeff < -tol()) {
            if (!fix(t.var, 1, trail)) return false;
          }
        } else if (t.coeff < Num(0)) {
          if (row.slack + t.coeff < -tol()) {
            if (!fix(t.var, 0, trail)) return false;
          }
        }
      }
    }
    return true;
  }

  bool propagate_all(std::vector<int>& trail) {
    pending_.clear();
    for (size_t r = 0; r < rows_.size(); ++r) pending_.push_back(r);
    return propagate(trail);
  }

  bool out_of_time() {
    if (++clock_probe_ % 64 != 0) return false;
    auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                       std::chrono::steady_clock::now() - start_)
                       .count();
    return elapsed >= config_.time_limit_ms;
  }

  void record_leaf(IlpSolution& best) {
    Num value = fixed_obj_;
    if (found_ && static_cast<double>(value) <= best.objective_value) return;
    found_ = true;
    best.assignment.assign(state_.begin(), state_.end());
    best.objective_value = static_cast<double>(value);
  }

  void dfs(int from, std::vector<int>& trail, IlpSolution& best,
           bool& timed_out) {
    if (timed_out) return;
    if (out_of_time()) {
      timed_out = true;
      return;
    }
    int v = from;
    while (v < n_ && state_[v] != kFree) ++v;
    if (v == n_) {
      record_leaf(best);
      return;
    }
    // Prune when even the optimistic completion cannot beat the incumbent.
    if (found_) {
      double bound = static_cast<double>(fixed_obj_ + pos_free_total_);
      if (bound <= best.objective_value) return;
    }
    // The objective-improving value goes first, so the initial dive doubles
    // as a greedy incumbent and the bound starts pruning immediately.
    const int preferred = obj_[v] > Num(0) ? 1 : 0;
    for (int value : {preferred, 1 - preferred}) {
      size_t mark = trail.size();
      pending_.clear();
      if (fix(v, value, trail) && propagate(trail)) {
        dfs(v + 1, trail, best, timed_out);
      }
      undo(trail, mark);
      if (timed_out) return;
      if (found_) {
        double bound = static_cast<double>(fixed_obj_ + pos_free_total_);
        if (bound <= best.objective_value) return;
      }
    }
  }

  const IlpModel& model_;
  IlpConfig config_;
  int n_ = 0;
  std::vector<Num> obj_;
  std::vector<Row> rows_;
  std::vector<std::vector<size_t>> touching_;
  std::vector<int8_t> state_;
  std::vector<size_t> pending_;
  Num fixed_obj_ = Num(0);
  Num pos_free_total_ = Num(0);
  std::chrono::steady_clock::time_point start_;
  uint64_t clock_probe_ = 0;
  bool found_ = false;
};

}  // namespace

IlpSolution solve(const IlpModel& model, const IlpConfig& config) {
  IlpSolution result;
  if (model.all_integral()) {
    Search<int64_t> search(model, config);
    result = search.run();
  } else {
    Search<double> search(model, config);
    result = search.run();
  }
  if (result.status == IlpStatus::Optimal &&
      !check_feasible(model, result.assignment, 1e-6)) {
    throw QdgError(ErrorKind::Infeasible,
                   "solver returned an assignment that fails verification");
  }
  return result;
}

IlpSolution brute_force(const IlpModel& model) {
  const int n = model.var_count();
  if (n > 24) {
    throw QdgError(ErrorKind::TooLarge,
                   "brute force limited to 24 variables, got " +
                       std::to_string(n));
  }
  IlpSolution best;
  best.status = IlpStatus::Infeasible;
  std::vector<uint8_t> assignment(n, 0);
  const uint64_t limit = 1ull << n;
  for (uint64_t mask = 0; mask < limit; ++mask) {
    // var 0 is the most significant digit so enumeration order is
    // lexicographic over assignments; first strict improvement wins ties.
    for (int v = 0; v < n; ++v) {
      assignment[v] = (mask >> (n - 1 - v)) & 1ull;
    }
    if (!check_feasible(model, assignment)) continue;
    double value = objective_value(model, assignment);
    if (best.status == IlpStatus::Infeasible || value > best.objective_value) {
      best.assignment = assignment;
      best.objective_value = value;
      best.status = IlpStatus::Optimal;
    }
  }
  return best;
}

}  // namespace qdg
