#include "qdg/align.hpp"

#include <algorithm>
#include <map>
#include <string>

#include "qdg/errors.hpp"
#include "qdg/text.hpp"

namespace qdg {

bool Alignment::aligned(int q, int step) const {
  for (const auto& p : pairs) {
    if (p.q == q && p.step == step) return true;
  }
  return false;
}

std::vector<int> Alignment::tokens_of_step(int step) const {
  std::vector<int> out;
  for (const auto& p : pairs) {
    if (p.step == step) out.push_back(p.q);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

int CandidateMatrix::candidate_count() const {
  int count = 0;
  for (const auto& per_step : a) {
    for (const auto& row : per_step) {
      for (uint8_t v : row) count += v;
    }
  }
  return count;
}

CandidateMatrix build_candidates(const AugmentedQuestion& question,
                                 const Qdmr& qdmr, const Lexicon& lexicon) {
  CandidateMatrix cand;
  cand.n = question.size();
  const int m = qdmr.size();
  cand.step_sizes.resize(m);
  cand.a.resize(m);
  cand.b.resize(m);
  cand.r.assign(m, std::vector<uint8_t>(m, 0));

  for (int k = 0; k < m; ++k) {
    const auto& step = qdmr.steps[k];
    cand.step_sizes[k] = step.size();
    cand.a[k].assign(cand.n, std::vector<uint8_t>(step.size(), 0));
    cand.b[k].assign(cand.n, std::vector<uint8_t>(step.size(), 0));
    for (int i = 0; i < cand.n; ++i) {
      if (question.is_structural(i)) continue;
      const std::string& qt = question.tokens[i];
      for (int j = 0; j < step.size(); ++j) {
        const std::string& st = step.tokens[j];
        if (is_reference_token(st)) continue;
        if (qt == st) {
          cand.a[k][i][j] = 1;
          cand.b[k][i][j] = 1;
        } else if (lexicon.equivalent(qt, st)) {
          cand.a[k][i][j] = 1;
        }
      }
    }
    for (int ref : step.references()) {
      cand.r[k][ref - 1] = 1;
    }
  }
  return cand;
}

AlignmentIlp build_alignment_ilp(const CandidateMatrix& cand,
                                 const AlignmentWeights& weights) {
  AlignmentIlp out;
  IlpModel& model = out.model;
  const int m = static_cast<int>(cand.step_sizes.size());
  const int n = cand.n;

  // x variables, (k, i, j) order, only where a candidate exists.
  std::vector<std::vector<std::vector<int>>> xvar(m);
  for (int k = 0; k < m; ++k) {
    xvar[k].assign(n, std::vector<int>(cand.step_sizes[k], -1));
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < cand.step_sizes[k]; ++j) {
        if (!cand.a[k][i][j]) continue;
        double obj = static_cast<double>(-weights.c_min) +
                     (cand.b[k][i][j] ? static_cast<double>(weights.c_exact)
                                      : 0.0);
        int v = model.add_var("x_" + std::to_string(k) + "_" +
                                  std::to_string(i) + "_" + std::to_string(j),
                              obj);
        xvar[k][i][j] = v;
        out.x_pairs.push_back({k, i, j});
      }
    }
  }

  // xi_{k,i}: token i is aligned to some token of step k.
  std::vector<std::vector<int>> xivar(m, std::vector<int>(n, -1));
  for (int k = 0; k < m; ++k) {
    for (int i = 0; i < n; ++i) {
      std::vector<IlpTerm> sum;
      for (int j = 0; j < cand.step_sizes[k]; ++j) {
        if (xvar[k][i][j] >= 0) sum.push_back({xvar[k][i][j], 1.0});
      }
      if (sum.empty()) continue;
      int xi = model.add_var(
          "xi_" + std::to_string(k) + "_" + std::to_string(i), 0.0);
      xivar[k][i] = xi;
      auto ge = sum;
      ge.push_back({xi, -1.0});  // xi <= sum x
      model.add_constraint(std::move(ge), ConstraintSense::Ge, 0.0);
      auto le = sum;
      for (auto& t : le) t.coeff = -1.0;
      le.push_back({xi, static_cast<double>(sum.size())});  // sum x <= n_k xi
      model.add_constraint(std::move(le), ConstraintSense::Ge, 0.0);
    }
  }

  // Coverage: a step token with candidates must be aligned at least once.
  for (int k = 0; k < m; ++k) {
    for (int j = 0; j < cand.step_sizes[k]; ++j) {
      std::vector<IlpTerm> sum;
      int count = 0;
      for (int i = 0; i < n; ++i) {
        if (xvar[k][i][j] >= 0) {
          sum.push_back({xvar[k][i][j], static_cast<double>(n)});
          ++count;
        }
      }
      if (count == 0) continue;
      model.add_constraint(std::move(sum), ConstraintSense::Ge,
                           static_cast<double>(count));
    }
  }

  // y_{k,d,i,j}: a run of d+1 consecutive pairs is fully aligned.
  for (int k = 0; k < m; ++k) {
    for (int d = 1; d <= weights.d_max; ++d) {
      for (int i = 0; i + d < n; ++i) {
        for (int j = 0; j + d < cand.step_sizes[k]; ++j) {
          bool all = true;
          for (int p = 0; p <= d; ++p) {
            if (xvar[k][i + p][j + p] < 0) {
              all = false;
              break;
            }
          }
          if (!all) continue;
          int y = model.add_var("y_" + std::to_string(k) + "_" +
                                    std::to_string(d) + "_" +
                                    std::to_string(i) + "_" + std::to_string(j),
                                static_cast<double>(weights.c_seq));
          std::vector<IlpTerm> up{{y, static_cast<double>(-(d + 1))}};
          std::vector<IlpTerm> down{{y, 1.0}};
          for (int p = 0; p <= d; ++p) {
            up.push_back({xvar[k][i + p][j + p], 1.0});
            down.push_back({xvar[k][i + p][j + p], -1.0});
          }
          model.add_constraint(std::move(up), ConstraintSense::Ge, 0.0);
          model.add_constraint(std::move(down), ConstraintSense::Ge,
                               static_cast<double>(-d));
        }
      }
    }
  }

  // z±: question-adjacent alignment of a step and a step it references.
  for (int k = 0; k < m; ++k) {
    for (int k2 = 0; k2 < m; ++k2) {
      if (!cand.r[k][k2]) continue;
      for (int i = 0; i < n; ++i) {
        if (xivar[k][i] < 0) continue;
        for (int delta : {+1, -1}) {
          int i2 = i + delta;
          if (i2 < 0 || i2 >= n || xivar[k2][i2] < 0) continue;
          int z = model.add_var(
              "z" + std::string(delta > 0 ? "p" : "m") + "_" +
                  std::to_string(k) + "_" + std::to_string(k2) + "_" +
                  std::to_string(i),
              static_cast<double>(weights.c_ref));
          model.add_constraint(
              {{z, -2.0}, {xivar[k][i], 1.0}, {xivar[k2][i2], 1.0}},
              ConstraintSense::Ge, 0.0);
          model.add_constraint(
              {{z, 1.0}, {xivar[k][i], -1.0}, {xivar[k2][i2], -1.0}},
              ConstraintSense::Ge, -1.0);
        }
      }
    }
  }

  // u_{d,i}: token i serves at least d different steps.
  for (int i = 0; i < n; ++i) {
    std::vector<IlpTerm> sum;
    for (int k = 0; k < m; ++k) {
      if (xivar[k][i] >= 0) sum.push_back({xivar[k][i], 1.0});
    }
    const int cap = static_cast<int>(sum.size());
    for (int d = 1; d <= cap; ++d) {
      int u = model.add_var("u_" + std::to_string(d) + "_" + std::to_string(i),
                            static_cast<double>(-weights.c_unique));
      auto upper = sum;
      upper.push_back({u, static_cast<double>(-d)});  // u=1 needs >= d steps
      model.add_constraint(std::move(upper), ConstraintSense::Ge, 0.0);
      auto forcing = sum;
      forcing.push_back({u, static_cast<double>(-m)});  // >= d steps forces u
      model.add_constraint(std::move(forcing), ConstraintSense::Le,
                           static_cast<double>(d - 1));
    }
  }

  return out;
}

AlignResult align(const AugmentedQuestion& question, const Qdmr& qdmr,
                  const Lexicon& lexicon, const AlignmentWeights& weights,
                  const IlpConfig& config) {
  CandidateMatrix cand = build_candidates(question, qdmr, lexicon);
  AlignmentIlp ilp = build_alignment_ilp(cand, weights);
  IlpSolution sol = solve(ilp.model, config);

  AlignResult result;
  result.status = sol.status;
  result.objective = sol.objective_value;
  if (sol.status == IlpStatus::Infeasible) {
    throw QdgError(ErrorKind::Infeasible, "alignment program has no solution");
  }
  if (sol.assignment.empty()) {
    // Timed out before any incumbent; treat as fully unaligned.
    for (int k = 0; k < qdmr.size(); ++k) result.uncovered_steps.push_back(k);
    return result;
  }
  for (size_t v = 0; v < ilp.x_pairs.size(); ++v) {
    if (sol.assignment[v]) {
      result.alignment.pairs.push_back(
          {ilp.x_pairs[v][1], ilp.x_pairs[v][0], ilp.x_pairs[v][2]});
    }
  }
  std::sort(result.alignment.pairs.begin(), result.alignment.pairs.end());
  for (int k = 0; k < qdmr.size(); ++k) {
    if (result.alignment.tokens_of_step(k).empty()) {
      result.uncovered_steps.push_back(k);
    }
  }
  return result;
}

}  // namespace qdg
