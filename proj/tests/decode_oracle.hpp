#pragma once

// Test-only exhaustive decoder: enumerates labeled graphs over all ordered
// token pairs, prunes partial assignments that already break a monotone
// structural rule, and filters leaves with the full validity checker. Used to
// cross-check the exact decoder's optimum.

#include <cmath>
#include <limits>
#include <vector>

#include "qdg/graph_convert.hpp"

namespace qdg::test {

struct DecodeOracleResult {
  double objective = -std::numeric_limits<double>::infinity();
  DependencyGraph best;
  long long leaves = 0;
};

class DecodeEnumerator {
 public:
  DecodeEnumerator(const ProbTensor& probs, const AugmentedQuestion& aug)
      : probs_(probs), aug_(aug) {
    n_ = probs.n;
    T_ = probs.tag_count();
    for (int t = 0; t < T_; ++t) tags_.push_back(parse_edge_tag(probs.tags[t]));
    for (int i = 0; i < n_; ++i) {
      for (int j = 0; j < n_; ++j) {
        if (i != j) pairs_.push_back({i, j});
      }
    }
    base_ = 0.0;
    for (auto [i, j] : pairs_) base_ += log_clamped(probs.none_mass(i, j));

    // Admissible per-pair bound: the best positive gain still available.
    suffix_gain_.assign(pairs_.size() + 1, 0.0);
    for (int p = static_cast<int>(pairs_.size()) - 1; p >= 0; --p) {
      auto [i, j] = pairs_[p];
      double best = 0.0;
      for (int t = 0; t < T_; ++t) {
        if (!legal(i, j, t)) continue;
        best = std::max(best, delta(i, j, t));
      }
      suffix_gain_[p] = suffix_gain_[p + 1] + best;
    }
  }

  DecodeOracleResult run() {
    state_ = State(n_);
    dg_.token_count = n_;
    dg_.edges.clear();
    result_ = DecodeOracleResult{};
    descend(0, base_);
    return result_;
  }

 private:
  struct State {
    std::vector<int> span_out, span_in, dup_out, in_semantic;
    std::vector<std::vector<std::string>> classes;
    explicit State(int n = 0)
        : span_out(n, 0), span_in(n, 0), dup_out(n, 0), in_semantic(n, 0),
          classes(n) {}
  };

  static double log_clamped(double p) { return std::log(std::max(p, 1e-12)); }

  double delta(int i, int j, int t) const {
    return log_clamped(probs_.prob(i, j, t)) -
           log_clamped(probs_.none_mass(i, j));
  }

  bool legal(int i, int j, int t) const {
    const EdgeTag& tag = tags_[t];
    if (tag.kind == EdgeTag::Kind::Span) return i < j;
    if (tag.kind == EdgeTag::Kind::Duplicate) {
      return aug_.is_dup(i) && !aug_.is_dup(j) && !aug_.is_dum(j) &&
             j != aug_.sep_index;
    }
    return true;
  }

  // Monotone structural screens; the rest is checked at the leaf.
  bool admissible(int i, int j, int t) const {
    const EdgeTag& tag = tags_[t];
    std::string cls;
    switch (tag.kind) {
      case EdgeTag::Kind::Span:
        if (state_.span_out[i] > 0 || state_.span_in[j] > 0) return false;
        if (state_.in_semantic[i] > 0) return false;  // i becomes non-rep
        cls = "span";
        break;
      case EdgeTag::Kind::Duplicate:
        if (state_.dup_out[i] > 0) return false;
        cls = "";
        break;
      case EdgeTag::Kind::Semantic:
        if (state_.span_out[j] > 0) return false;
        cls = operator_name(tag.op) + "[" + join(tag.properties, ",") + "]";
        break;
    }
    // One outgoing operation class per token (duplicate is exempt).
    if (!cls.empty()) {
      for (const auto& existing : state_.classes[i]) {
        if (existing != cls) return false;
      }
    }
    return true;
  }

  void apply(int i, int j, int t, int sign) {
    const EdgeTag& tag = tags_[t];
    switch (tag.kind) {
      case EdgeTag::Kind::Span:
        state_.span_out[i] += sign;
        state_.span_in[j] += sign;
        if (sign > 0) {
          state_.classes[i].push_back("span");
        } else {
          state_.classes[i].pop_back();
        }
        break;
      case EdgeTag::Kind::Duplicate:
        state_.dup_out[i] += sign;
        break;
      case EdgeTag::Kind::Semantic: {
        state_.in_semantic[j] += sign;
        std::string cls =
            operator_name(tag.op) + "[" + join(tag.properties, ",") + "]";
        if (sign > 0) {
          state_.classes[i].push_back(cls);
        } else {
          state_.classes[i].pop_back();
        }
        break;
      }
    }
  }

  void descend(size_t pidx, double score) {
    if (score + suffix_gain_[pidx] <= result_.objective) return;
    if (pidx == pairs_.size()) {
      ++result_.leaves;
      if (validate_dg(dg_, aug_).empty() && score > result_.objective) {
        result_.objective = score;
        result_.best = dg_;
      }
      return;
    }
    auto [i, j] = pairs_[pidx];
    descend(pidx + 1, score);  // none
    for (int t = 0; t < T_; ++t) {
      if (!legal(i, j, t) || !admissible(i, j, t)) continue;
      apply(i, j, t, +1);
      dg_.edges.push_back({i, j, tags_[t]});
      descend(pidx + 1, score + delta(i, j, t));
      dg_.edges.pop_back();
      apply(i, j, t, -1);
    }
  }

  const ProbTensor& probs_;
  const AugmentedQuestion& aug_;
  int n_ = 0, T_ = 0;
  std::vector<EdgeTag> tags_;
  std::vector<std::pair<int, int>> pairs_;
  std::vector<double> suffix_gain_;
  double base_ = 0.0;
  State state_;
  DependencyGraph dg_;
  DecodeOracleResult result_;
};

inline DecodeOracleResult decode_oracle(const ProbTensor& probs,
                                        const AugmentedQuestion& aug) {
  DecodeEnumerator e(probs, aug);
  return e.run();
}

// Peaked tensor whose maximum-probability valid graph is the given one.
inline ProbTensor tensor_from_dg(const DependencyGraph& dg,
                                 const std::vector<std::string>& tags,
                                 float peak = 0.9f) {
  ProbTensor t = ProbTensor::zeros(dg.token_count, tags);
  for (const auto& e : dg.edges) {
    for (int k = 0; k < t.tag_count(); ++k) {
      if (t.tags[k] == render_edge_tag(e.tag)) {
        t.prob(e.src, e.dst, k) = peak;
      }
    }
  }
  return t;
}

}  // namespace qdg::test
