#include "qdg/graph_convert.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include <json.hpp>

#include "qdg/errors.hpp"
#include "qdg/text.hpp"

namespace qdg {

namespace {

constexpr double kLogFloor = 1e-12;

double safe_log(double p) { return std::log(std::max(p, kLogFloor)); }

}  // namespace

ProbTensor ProbTensor::zeros(int n, std::vector<std::string> tags) {
  ProbTensor t;
  t.n = n;
  t.tags = std::move(tags);
  t.data.assign(static_cast<size_t>(n) * n * t.tags.size(), 0.0f);
  return t;
}

AugmentedQuestion augment_question(const Question& q, const Lexicon& lexicon,
                                   int k_dum, int k_dup) {
  AugmentedQuestion aug;
  aug.base = q;
  aug.tokens = q.tokens;
  aug.sep_index = static_cast<int>(aug.tokens.size());
  aug.tokens.push_back(kSepToken);
  for (const auto& word : lexicon.store_words()) {
    aug.store_indices.push_back(static_cast<int>(aug.tokens.size()));
    aug.tokens.push_back(word);
  }
  for (int i = 0; i < k_dum; ++i) {
    aug.dum_indices.push_back(static_cast<int>(aug.tokens.size()));
    aug.tokens.push_back(kDumToken);
  }
  for (int i = 0; i < k_dup; ++i) {
    aug.dup_indices.push_back(static_cast<int>(aug.tokens.size()));
    aug.tokens.push_back(kDupToken);
  }
  return aug;
}

SpanDependencyGraph extract_sdg(const LogicalForm& lf, const Alignment& m,
                                const AugmentedQuestion& aug) {
  SpanDependencyGraph sdg;
  const int steps = static_cast<int>(lf.steps.size());
  sdg.node_tokens.resize(steps);

  std::vector<int> claimed_by(aug.size(), -1);
  size_t next_dup = 0;
  size_t next_dum = 0;

  for (int k = 0; k < steps; ++k) {
    for (int token : m.tokens_of_step(k)) {
      if (claimed_by[token] < 0) {
        claimed_by[token] = k;
        sdg.node_tokens[k].push_back(token);
      } else {
        // Shared token: this step takes a [DUP] copy pointing at the
        // original, which stays with the earliest claiming step.
        if (next_dup >= aug.dup_indices.size()) {
          throw QdgError(ErrorKind::DupExhausted,
                         "needs more duplicate placeholders (k_dup)");
        }
        int dup = aug.dup_indices[next_dup++];
        sdg.node_tokens[k].push_back(dup);
        sdg.duplicate_links.push_back({dup, token});
      }
    }
  }
  for (int k = 0; k < steps; ++k) {
    if (!sdg.node_tokens[k].empty()) continue;
    if (next_dum >= aug.dum_indices.size()) {
      throw QdgError(ErrorKind::DumExhausted,
                     "needs more dummy placeholders (k_dum)");
    }
    sdg.node_tokens[k].push_back(aug.dum_indices[next_dum++]);
  }
  for (auto& node : sdg.node_tokens) std::sort(node.begin(), node.end());

  for (int k = 0; k < steps; ++k) {
    const auto& step = lf.steps[k];
    for (const auto& [name, value] : step.args) {
      for (const auto& tok : value) {
        if (!tok.is_ref()) continue;
        SdgEdge edge{k, tok.ref_index - 1,
                     EdgeTag::semantic(step.op, step.properties, name)};
        if (std::find(sdg.edges.begin(), sdg.edges.end(), edge) ==
            sdg.edges.end()) {
          sdg.edges.push_back(edge);
        }
      }
    }
  }
  return sdg;
}

DependencyGraph sdg_to_dg(const SpanDependencyGraph& sdg,
                          const AugmentedQuestion& aug) {
  DependencyGraph dg;
  dg.token_count = aug.size();
  std::vector<int> representative(sdg.size(), -1);
  for (int k = 0; k < sdg.size(); ++k) {
    const auto& node = sdg.node_tokens[k];
    if (node.empty()) {
      throw QdgError(ErrorKind::InvalidInput,
                     "node " + std::to_string(k) + " has no tokens");
    }
    for (size_t p = 0; p + 1 < node.size(); ++p) {
      dg.edges.push_back({node[p], node[p + 1], EdgeTag::span()});
    }
    representative[k] = node.back();
  }
  for (const auto& edge : sdg.edges) {
    DgEdge out{representative[edge.src], representative[edge.dst], edge.tag};
    for (const auto& existing : dg.edges) {
      if (existing.src == out.src && existing.dst == out.dst &&
          !(existing.tag == out.tag)) {
        throw QdgError(ErrorKind::InvalidInput,
                       "parallel arcs with distinct tags between tokens " +
                           std::to_string(out.src) + " and " +
                           std::to_string(out.dst));
      }
    }
    if (std::find(dg.edges.begin(), dg.edges.end(), out) == dg.edges.end()) {
      dg.edges.push_back(out);
    }
  }
  for (const auto& link : sdg.duplicate_links) {
    dg.edges.push_back({link.dup_token, link.orig_token, EdgeTag::duplicate()});
  }
  return dg;
}

SpanDependencyGraph dg_to_sdg_soft(const DependencyGraph& dg) {
  const int n = dg.token_count;
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  auto unite = [&](int a, int b) { parent[find(a)] = find(b); };

  std::vector<bool> incident(n, false);
  for (const auto& e : dg.edges) {
    if (e.src < 0 || e.src >= n || e.dst < 0 || e.dst >= n) {
      throw QdgError(ErrorKind::InvalidInput, "edge endpoint out of range");
    }
    incident[e.src] = true;
    incident[e.dst] = true;
    if (e.tag.kind == EdgeTag::Kind::Span) unite(e.src, e.dst);
  }

  // Components with any incident arc become nodes, ordered by first token.
  std::map<int, std::vector<int>> groups;
  for (int i = 0; i < n; ++i) {
    if (incident[i]) groups[find(i)].push_back(i);
  }
  SpanDependencyGraph sdg;
  std::map<int, int> node_of_root;
  for (auto& [root, tokens] : groups) {
    std::sort(tokens.begin(), tokens.end());
    node_of_root[root] = sdg.size();
    sdg.node_tokens.push_back(tokens);
  }

  for (const auto& e : dg.edges) {
    if (e.tag.kind == EdgeTag::Kind::Span) continue;
    if (e.tag.kind == EdgeTag::Kind::Duplicate) {
      sdg.duplicate_links.push_back({e.src, e.dst});
      continue;
    }
    SdgEdge edge{node_of_root[find(e.src)], node_of_root[find(e.dst)], e.tag};
    if (std::find(sdg.edges.begin(), sdg.edges.end(), edge) ==
        sdg.edges.end()) {
      sdg.edges.push_back(edge);
    }
  }
  return sdg;
}

namespace {

std::string class_key(const EdgeTag& tag) {
  if (tag.kind == EdgeTag::Kind::Span) return "span";
  if (tag.kind == EdgeTag::Kind::Duplicate) return "duplicate";
  return operator_name(tag.op) + "[" + join(tag.properties, ",") + "]";
}

}  // namespace

LogicalForm sdg_to_lf(const SpanDependencyGraph& sdg,
                      const AugmentedQuestion& aug) {
  const int m = sdg.size();
  std::vector<std::vector<const SdgEdge*>> outgoing(m);
  std::vector<int> pending(m, 0);  // unresolved referees
  std::vector<std::vector<int>> referrers(m);
  for (const auto& e : sdg.edges) {
    if (e.src < 0 || e.src >= m || e.dst < 0 || e.dst >= m) {
      throw QdgError(ErrorKind::InvalidInput, "edge endpoint out of range");
    }
    outgoing[e.src].push_back(&e);
    pending[e.src] += 1;
    referrers[e.dst].push_back(e.src);
  }

  // Dependency order: referees first, smallest node id on ties.
  std::vector<int> order;
  std::set<int> ready;
  for (int k = 0; k < m; ++k) {
    if (pending[k] == 0) ready.insert(k);
  }
  while (!ready.empty()) {
    int k = *ready.begin();
    ready.erase(ready.begin());
    order.push_back(k);
    for (int up : referrers[k]) {
      if (--pending[up] == 0) ready.insert(up);
    }
  }
  if (static_cast<int>(order.size()) != m) {
    throw QdgError(ErrorKind::CyclicSdg, "reference cycle between spans");
  }
  std::vector<int> lf_index(m, 0);  // node -> 1-based step
  for (int pos = 0; pos < m; ++pos) lf_index[order[pos]] = pos + 1;

  std::map<int, int> dup_target;
  for (const auto& link : sdg.duplicate_links) {
    dup_target[link.dup_token] = link.orig_token;
  }

  LogicalForm lf;
  for (int pos = 0; pos < m; ++pos) {
    const int node = order[pos];
    LogicalFormStep step;

    if (outgoing[node].empty()) {
      step.op = Operator::Select;
    } else {
      const EdgeTag& first = outgoing[node].front()->tag;
      step.op = first.op;
      step.properties = first.properties;
      for (const SdgEdge* e : outgoing[node]) {
        if (e->tag.kind != EdgeTag::Kind::Semantic ||
            !(e->tag.op == step.op && e->tag.properties == step.properties)) {
          throw QdgError(ErrorKind::InconsistentNode,
                         "node " + std::to_string(node) +
                             " mixes operations " + class_key(first) +
                             " and " + class_key(e->tag));
        }
        if (!operator_has_arg(e->tag.op, e->tag.arg)) {
          throw QdgError(ErrorKind::InconsistentNode,
                         "argument " + arg_name_string(e->tag.arg) +
                             " invalid for " + operator_name(e->tag.op));
        }
      }
    }

    // References per argument slot, ordered by the referee's step index.
    std::map<ArgName, std::vector<int>> refs;
    for (const SdgEdge* e : outgoing[node]) {
      refs[e->tag.arg].push_back(lf_index[e->dst]);
    }
    for (auto& [name, list] : refs) std::sort(list.begin(), list.end());

    // Node text with [DUP] members resolved to their originals.
    ArgValue text;
    for (int token : sdg.node_tokens[node]) {
      int actual = token;
      auto it = dup_target.find(token);
      if (it != dup_target.end()) actual = it->second;
      if (actual < 0 || actual >= aug.size()) {
        throw QdgError(ErrorKind::InvalidInput, "token index out of range");
      }
      if (aug.is_dum(actual) || actual == aug.sep_index || aug.is_dup(actual)) {
        continue;
      }
      text.push_back(ArgToken::word(aug.tokens[actual]));
    }

    ArgName text_slot = operator_text_slot(step.op);
    if (step.op == Operator::Arithmetic) {
      const bool has_left = refs.count(ArgName::Left) > 0;
      const bool has_right = refs.count(ArgName::Right) > 0;
      if (has_left && !has_right) {
        text_slot = ArgName::Right;
      } else if (has_right && !has_left) {
        text_slot = ArgName::Left;
      } else {
        text_slot = ArgName::Arg;
      }
    }

    for (ArgName slot : operator_args(step.op)) {
      ArgValue merged;
      auto it = refs.find(slot);
      if (arg_repeatable(step.op, slot)) {
        if (it != refs.end()) {
          for (int r : it->second) {
            step.args.emplace_back(slot, ArgValue{ArgToken::ref(r)});
          }
        }
        if (slot == text_slot && !text.empty()) {
          step.args.emplace_back(slot, text);
        }
        continue;
      }
      if (it != refs.end()) {
        for (int r : it->second) merged.push_back(ArgToken::ref(r));
      }
      if (slot == text_slot && !text.empty()) {
        for (const auto& tok : text) merged.push_back(tok);
      }
      if (!merged.empty()) step.args.emplace_back(slot, merged);
    }

    lf.steps.push_back(std::move(step));
  }
  validate_references(lf);
  return lf;
}

DependencyGraph greedy_decode(const ProbTensor& probs) {
  DependencyGraph dg;
  dg.token_count = probs.n;
  for (int i = 0; i < probs.n; ++i) {
    for (int j = 0; j < probs.n; ++j) {
      if (i == j) continue;
      double mass = 0.0;
      for (int t = 0; t < probs.tag_count(); ++t) mass += probs.prob(i, j, t);
      if (mass <= 0.5) continue;
      int best = 0;
      for (int t = 1; t < probs.tag_count(); ++t) {
        if (probs.prob(i, j, t) > probs.prob(i, j, best) ||
            (probs.prob(i, j, t) == probs.prob(i, j, best) &&
             probs.tags[t] < probs.tags[best])) {
          best = t;
        }
      }
      dg.edges.push_back({i, j, parse_edge_tag(probs.tags[best])});
    }
  }
  return dg;
}

const std::vector<CombinationRule>& default_combination_rules() {
  static const std::vector<CombinationRule> rules =
      load_combination_rules(std::string(QDG_DATA_DIR) +
                             "/decode_combinations.json");
  return rules;
}

std::vector<CombinationRule> load_combination_rules(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw QdgError(ErrorKind::InvalidInput,
                   "cannot open combination rules " + path);
  }
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw QdgError(ErrorKind::ParseError, e.what());
  }
  std::vector<CombinationRule> rules;
  for (const auto& row : j.at("combinations")) {
    CombinationRule rule;
    if (!operator_from_name(row.at("operator").get<std::string>(), &rule.op)) {
      throw QdgError(ErrorKind::ParseError, "unknown operator in combinations");
    }
    for (const auto& req : row.at("requirements")) {
      ArgName arg;
      if (!arg_name_from_string(req.at("arg").get<std::string>(), &arg)) {
        throw QdgError(ErrorKind::ParseError, "unknown argument name");
      }
      rule.requirements.push_back({arg, req.at("min_count").get<int>()});
    }
    for (const auto& trig : row.at("triggers")) {
      ArgName arg;
      if (!arg_name_from_string(trig.get<std::string>(), &arg)) {
        throw QdgError(ErrorKind::ParseError, "unknown trigger name");
      }
      rule.triggers.push_back(arg);
    }
    rules.push_back(std::move(rule));
  }
  return rules;
}

namespace {

// Content words for span-content tracking: everything except a tiny stop list
// and the structural placeholders.
bool content_token(const AugmentedQuestion& aug, int i) {
  const std::string& t = aug.tokens[i];
  if (t == "the" || t == "a" || t == "that") return false;
  if (i == aug.sep_index || aug.is_dum(i) || aug.is_dup(i)) return false;
  return true;
}

struct TagInfo {
  EdgeTag tag;
  int class_id = -1;   // operation class; duplicate stays -1
  bool is_span = false;
  bool is_dup = false;
};

}  // namespace

DecodeIlp build_decode_ilp(const ProbTensor& probs, const AugmentedQuestion& aug,
                           const std::vector<CombinationRule>& combos) {
  if (probs.n != aug.size()) {
    throw QdgError(ErrorKind::InvalidInput,
                   "tensor size does not match the augmented question");
  }
  const int n = probs.n;
  const int T = probs.tag_count();

  std::vector<TagInfo> tags(T);
  std::map<std::string, int> class_ids;
  for (int t = 0; t < T; ++t) {
    tags[t].tag = parse_edge_tag(probs.tags[t]);
    tags[t].is_span = tags[t].tag.kind == EdgeTag::Kind::Span;
    tags[t].is_dup = tags[t].tag.kind == EdgeTag::Kind::Duplicate;
    if (!tags[t].is_dup) {
      std::string key = class_key(tags[t].tag);
      auto [it, inserted] = class_ids.emplace(key, class_ids.size());
      tags[t].class_id = it->second;
    }
  }
  const int num_classes = static_cast<int>(class_ids.size());
  int span_class = -1;
  if (auto it = class_ids.find("span"); it != class_ids.end()) {
    span_class = it->second;
  }

  DecodeIlp out;
  IlpModel& model = out.model;

  auto legal = [&](int i, int j, int t) {
    if (i == j) return false;
    if (tags[t].is_span) return i < j;
    if (tags[t].is_dup) {
      return aug.is_dup(i) && !aug.is_dup(j) && !aug.is_dum(j) &&
             j != aug.sep_index;
    }
    return true;
  };

  // x variables first. Declaring them by falling objective gain makes the
  // search's first dive a greedy decode and lets the positive-sum bound
  // close as soon as the profitable arcs are decided.
  struct XCandidate {
    double delta;
    int i, j, t;
  };
  std::vector<XCandidate> candidates;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const double none_log = safe_log(probs.none_mass(i, j));
      for (int t = 0; t < T; ++t) {
        if (!legal(i, j, t)) continue;
        candidates.push_back(
            {safe_log(probs.prob(i, j, t)) - none_log, i, j, t});
      }
    }
  }
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const XCandidate& a, const XCandidate& b) {
                     return a.delta > b.delta;
                   });
  std::vector<int> xvar(static_cast<size_t>(n) * n * T, -1);
  auto xid = [&](int i, int j, int t) -> int& {
    return xvar[(static_cast<size_t>(i) * n + j) * T + t];
  };
  for (const auto& cand : candidates) {
    int v = model.add_var("x_" + std::to_string(cand.i) + "_" +
                              std::to_string(cand.j) + "_" + probs.tags[cand.t],
                          cand.delta);
    xid(cand.i, cand.j, cand.t) = v;
    out.x_edges.push_back({cand.i, cand.j, cand.t});
  }

  // Single tag per arc.
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      std::vector<IlpTerm> sum;
      for (int t = 0; t < T; ++t) {
        if (xid(i, j, t) >= 0) sum.push_back({xid(i, j, t), 1.0});
      }
      if (sum.size() > 1) {
        model.add_constraint(std::move(sum), ConstraintSense::Le, 1.0);
      }
    }
  }

  // Span and duplicate degree caps.
  for (int i = 0; i < n; ++i) {
    std::vector<IlpTerm> span_out, span_in, dup_out;
    for (int j = 0; j < n; ++j) {
      for (int t = 0; t < T; ++t) {
        if (tags[t].is_span) {
          if (xid(i, j, t) >= 0) span_out.push_back({xid(i, j, t), 1.0});
          if (xid(j, i, t) >= 0) span_in.push_back({xid(j, i, t), 1.0});
        }
        if (tags[t].is_dup && xid(i, j, t) >= 0) {
          dup_out.push_back({xid(i, j, t), 1.0});
        }
      }
    }
    if (span_out.size() > 1) {
      model.add_constraint(span_out, ConstraintSense::Le, 1.0);
    }
    if (span_in.size() > 1) {
      model.add_constraint(span_in, ConstraintSense::Le, 1.0);
    }
    if (dup_out.size() > 1) {
      model.add_constraint(dup_out, ConstraintSense::Le, 1.0);
    }
  }

  // An active [DUP] must emit its duplicate arc.
  for (int i : aug.dup_indices) {
    std::vector<IlpTerm> row;
    for (int j = 0; j < n; ++j) {
      for (int t = 0; t < T; ++t) {
        if (xid(i, j, t) >= 0) row.push_back({xid(i, j, t), -1.0});
        if (xid(j, i, t) >= 0) row.push_back({xid(j, i, t), -1.0});
      }
    }
    if (row.empty()) continue;
    const double big = 2.0 * n * T;
    for (int j = 0; j < n; ++j) {
      for (int t = 0; t < T; ++t) {
        if (tags[t].is_dup && xid(i, j, t) >= 0) {
          row.push_back({xid(i, j, t), big});
        }
      }
    }
    model.add_constraint(std::move(row), ConstraintSense::Ge, 0.0);
  }

  // Outgoing operation-class indicators; at most one class per token.
  std::vector<std::vector<int>> yop(n, std::vector<int>(num_classes, -1));
  for (int i = 0; i < n; ++i) {
    std::vector<IlpTerm> one_class;
    for (int c = 0; c < num_classes; ++c) {
      std::vector<IlpTerm> sum;
      for (int j = 0; j < n; ++j) {
        for (int t = 0; t < T; ++t) {
          if (tags[t].class_id == c && xid(i, j, t) >= 0) {
            sum.push_back({xid(i, j, t), 1.0});
          }
        }
      }
      if (sum.empty()) continue;
      int y = model.add_var(
          "yop_" + std::to_string(i) + "_" + std::to_string(c), 0.0);
      yop[i][c] = y;
      auto forcing = sum;
      forcing.push_back({y, static_cast<double>(n) * T});
      for (auto& term : forcing) {
        if (term.var != y) term.coeff = -1.0;
      }
      model.add_constraint(std::move(forcing), ConstraintSense::Ge, 0.0);
      auto support = sum;
      support.push_back({y, -1.0});
      model.add_constraint(std::move(support), ConstraintSense::Ge, 0.0);
      one_class.push_back({y, 1.0});
    }
    if (one_class.size() > 1) {
      model.add_constraint(std::move(one_class), ConstraintSense::Le, 1.0);
    }
  }

  // Non-representatives (tokens with an outgoing span) accept no incoming
  // semantic arcs; their span link and duplicate copies are exempt.
  for (int j = 0; j < n; ++j) {
    if (span_class < 0 || yop[j][span_class] < 0) continue;
    std::vector<IlpTerm> row;
    for (int i = 0; i < n; ++i) {
      for (int t = 0; t < T; ++t) {
        if (!tags[t].is_span && !tags[t].is_dup && xid(i, j, t) >= 0) {
          row.push_back({xid(i, j, t), 1.0});
        }
      }
    }
    if (row.empty()) continue;
    const double big = static_cast<double>(n) * std::max(T - 1, 1);
    row.push_back({yop[j][span_class], big});
    model.add_constraint(std::move(row), ConstraintSense::Le, big);
  }

  // Content-holder tracking along span chains (and through duplicates).
  std::vector<int> cvar(n, -1);
  for (int i = 0; i < n; ++i) {
    cvar[i] = model.add_var("c_" + std::to_string(i), 0.0);
  }
  for (int i = 0; i < n; ++i) {
    std::vector<IlpTerm> upper{{cvar[i], -1.0}};   // c_i <= m_i + sum ...
    std::vector<IlpTerm> lower{{cvar[i], static_cast<double>(i + 1)}};
    const double m_i = content_token(aug, i) ? 1.0 : 0.0;
    for (int k = 0; k < n && k < i; ++k) {
      int span_var = -1;
      for (int t = 0; t < T; ++t) {
        if (tags[t].is_span && xid(k, i, t) >= 0) span_var = xid(k, i, t);
      }
      if (span_var < 0) continue;
      int ck = model.add_var(
          "ck_" + std::to_string(k) + "_" + std::to_string(i), 0.0);
      model.add_constraint({{ck, 2.0}, {span_var, -1.0}, {cvar[k], -1.0}},
                           ConstraintSense::Le, 0.0);
      model.add_constraint({{ck, -1.0}, {span_var, 1.0}, {cvar[k], 1.0}},
                           ConstraintSense::Le, 1.0);
      upper.push_back({ck, 1.0});
      lower.push_back({ck, -1.0});
    }
    if (aug.is_dup(i)) {
      for (int k = 0; k < n; ++k) {
        if (!content_token(aug, k)) continue;
        for (int t = 0; t < T; ++t) {
          if (tags[t].is_dup && xid(i, k, t) >= 0) {
            upper.push_back({xid(i, k, t), 1.0});
            lower.push_back({xid(i, k, t), -1.0});
          }
        }
      }
    }
    model.add_constraint(std::move(upper), ConstraintSense::Ge, -m_i);
    model.add_constraint(std::move(lower), ConstraintSense::Ge, m_i);
  }

  // Argument combinations: when triggered, the required slots must be served
  // by arcs, except that one may live inside a content-holding span.
  for (int i = 0; i < n; ++i) {
    for (size_t rix = 0; rix < combos.size(); ++rix) {
      const auto& rule = combos[rix];
      auto slot_terms = [&](ArgName arg) {
        std::vector<IlpTerm> terms;
        for (int j = 0; j < n; ++j) {
          for (int t = 0; t < T; ++t) {
            const auto& tag = tags[t].tag;
            if (tag.kind == EdgeTag::Kind::Semantic && tag.op == rule.op &&
                tag.arg == arg && xid(i, j, t) >= 0) {
              terms.push_back({xid(i, j, t), 1.0});
            }
          }
        }
        return terms;
      };

      std::vector<IlpTerm> trigger_terms;
      for (ArgName trig : rule.triggers) {
        for (auto& term : slot_terms(trig)) trigger_terms.push_back(term);
      }
      if (trigger_terms.empty()) continue;

      const std::string tag_str =
          std::to_string(i) + "_" + std::to_string(rix);
      int g = model.add_var("g_" + tag_str, 0.0);
      auto activation = trigger_terms;
      activation.push_back({g, -static_cast<double>(n) * T});
      model.add_constraint(std::move(activation), ConstraintSense::Le, 0.0);

      std::vector<IlpTerm> demand{{cvar[i], 1.0},
                                  {g, -static_cast<double>(rule.requirements.size())}};
      for (size_t q = 0; q < rule.requirements.size(); ++q) {
        const auto& req = rule.requirements[q];
        int s = model.add_var("s_" + tag_str + "_" + std::to_string(q), 0.0);
        auto counts = slot_terms(req.arg);
        counts.push_back({s, -static_cast<double>(req.min_count)});
        model.add_constraint(std::move(counts), ConstraintSense::Ge, 0.0);
        demand.push_back({s, 1.0});
      }
      model.add_constraint(std::move(demand), ConstraintSense::Ge, 0.0);
    }
  }

  // Connectivity: at most one active representative without incoming arcs.
  std::vector<IlpTerm> root_sum;
  for (int i = 0; i < n; ++i) {
    std::vector<IlpTerm> active;  // any outgoing arc or incoming span
    for (int j = 0; j < n; ++j) {
      for (int t = 0; t < T; ++t) {
        if (xid(i, j, t) >= 0) active.push_back({xid(i, j, t), 1.0});
        if (tags[t].is_span && xid(j, i, t) >= 0) {
          active.push_back({xid(j, i, t), 1.0});
        }
      }
    }
    std::vector<IlpTerm> blockers;  // incoming non-span or outgoing span
    for (int j = 0; j < n; ++j) {
      for (int t = 0; t < T; ++t) {
        if (!tags[t].is_span && xid(j, i, t) >= 0) {
          blockers.push_back({xid(j, i, t), 1.0});
        }
        if (tags[t].is_span && xid(i, j, t) >= 0) {
          blockers.push_back({xid(i, j, t), 1.0});
        }
      }
    }
    int rp = model.add_var("rp_" + std::to_string(i), 0.0);
    auto rp_cap = active;
    rp_cap.push_back({rp, -1.0});
    model.add_constraint(std::move(rp_cap), ConstraintSense::Ge, 0.0);
    auto rp_force = active;
    for (auto& term : rp_force) term.coeff = -1.0;
    rp_force.push_back({rp, static_cast<double>(n) * (T + 1)});
    model.add_constraint(std::move(rp_force), ConstraintSense::Ge, 0.0);

    int rpp = model.add_var("rpp_" + std::to_string(i), 0.0);
    auto rpp_floor = blockers;
    rpp_floor.push_back({rpp, 1.0});
    model.add_constraint(std::move(rpp_floor), ConstraintSense::Ge, 1.0);
    auto rpp_cap = blockers;
    for (auto& term : rpp_cap) term.coeff = -1.0;
    rpp_cap.push_back({rpp, -static_cast<double>(n) * T});
    model.add_constraint(std::move(rpp_cap), ConstraintSense::Ge,
                         -static_cast<double>(n) * T);

    int r = model.add_var("r_" + std::to_string(i), 0.0);
    model.add_constraint({{r, -2.0}, {rp, 1.0}, {rpp, 1.0}},
                         ConstraintSense::Ge, 0.0);
    model.add_constraint({{r, 1.0}, {rp, -1.0}, {rpp, -1.0}},
                         ConstraintSense::Ge, -1.0);
    root_sum.push_back({r, 1.0});
  }
  model.add_constraint(std::move(root_sum), ConstraintSense::Le, 1.0);

  return out;
}

DecodeResult ilp_decode(const ProbTensor& probs, const AugmentedQuestion& aug,
                        const IlpConfig& config,
                        const std::vector<CombinationRule>& combos) {
  DecodeIlp ilp = build_decode_ilp(probs, aug, combos);
  IlpSolution sol = solve(ilp.model, config);

  DecodeResult result;
  result.status = sol.status;
  result.dg.token_count = probs.n;
  if (sol.status == IlpStatus::Infeasible || sol.assignment.empty()) {
    // No usable incumbent: the empty graph is always structurally valid.
    result.objective = dg_log_probability(probs, result.dg);
    return result;
  }
  for (size_t v = 0; v < ilp.x_edges.size(); ++v) {
    if (!sol.assignment[v]) continue;
    const auto& [i, j, t] = ilp.x_edges[v];
    result.dg.edges.push_back({i, j, parse_edge_tag(probs.tags[t])});
  }
  result.objective = dg_log_probability(probs, result.dg);
  return result;
}

double dg_log_probability(const ProbTensor& probs, const DependencyGraph& dg) {
  std::map<std::pair<int, int>, int> chosen;
  for (const auto& e : dg.edges) {
    int t = -1;
    for (int k = 0; k < probs.tag_count(); ++k) {
      if (probs.tags[k] == render_edge_tag(e.tag)) {
        t = k;
        break;
      }
    }
    if (t < 0) {
      throw QdgError(ErrorKind::InvalidInput,
                     "edge tag missing from the tensor vocabulary");
    }
    chosen[{e.src, e.dst}] = t;
  }
  double total = 0.0;
  for (int i = 0; i < probs.n; ++i) {
    for (int j = 0; j < probs.n; ++j) {
      if (i == j) continue;
      auto it = chosen.find({i, j});
      if (it != chosen.end()) {
        total += safe_log(probs.prob(i, j, it->second));
      } else {
        total += safe_log(probs.none_mass(i, j));
      }
    }
  }
  return total;
}

std::vector<std::string> validate_dg(const DependencyGraph& dg,
                                     const AugmentedQuestion& aug) {
  std::vector<std::string> violations;
  auto report = [&](const std::string& family) {
    if (std::find(violations.begin(), violations.end(), family) ==
        violations.end()) {
      violations.push_back(family);
    }
  };
  const int n = dg.token_count;

  std::set<std::pair<int, int>> arcs;
  std::vector<int> span_out(n, 0), span_in(n, 0), dup_out(n, 0);
  std::vector<int> incident(n, 0), has_dup_out(n, 0);
  std::vector<int> in_nonspan(n, 0), in_semantic(n, 0), out_any(n, 0);
  std::vector<std::set<std::string>> out_classes(n);
  std::vector<std::vector<int>> span_parents(n);
  std::vector<std::vector<int>> dup_targets(n);

  for (const auto& e : dg.edges) {
    if (e.src < 0 || e.src >= n || e.dst < 0 || e.dst >= n || e.src == e.dst) {
      report("SelfLoop");
      continue;
    }
    if (!arcs.insert({e.src, e.dst}).second) report("SingleTag");
    incident[e.src] = incident[e.dst] = 1;
    out_any[e.src] += 1;
    switch (e.tag.kind) {
      case EdgeTag::Kind::Span:
        if (e.src >= e.dst) report("SpanDirection");
        span_out[e.src] += 1;
        span_in[e.dst] += 1;
        out_classes[e.src].insert("span");
        span_parents[e.dst].push_back(e.src);
        break;
      case EdgeTag::Kind::Duplicate:
        dup_out[e.src] += 1;
        has_dup_out[e.src] = 1;
        in_nonspan[e.dst] += 1;
        if (!aug.is_dup(e.src) || aug.is_dup(e.dst) || aug.is_dum(e.dst) ||
            e.dst == aug.sep_index) {
          report("DuplicateLegality");
        }
        dup_targets[e.src].push_back(e.dst);
        break;
      case EdgeTag::Kind::Semantic:
        in_nonspan[e.dst] += 1;
        in_semantic[e.dst] += 1;
        out_classes[e.src].insert(class_key(e.tag));
        break;
    }
  }

  for (int i = 0; i < n; ++i) {
    if (span_out[i] > 1 || span_in[i] > 1) report("SpanDegree");
    if (dup_out[i] > 1) report("DuplicateDegree");
    if (aug.is_dup(i) && incident[i] && !has_dup_out[i]) {
      report("DupActivation");
    }
    if (out_classes[i].size() > 1) report("OperatorConsistency");
    if (span_out[i] > 0 && in_semantic[i] > 0) {
      report("RepresentativeExclusivity");
    }
  }

  // Content flags, walking tokens left to right (span arcs go rightward).
  std::vector<uint8_t> content(n, 0);
  for (int i = 0; i < n; ++i) {
    if (content_token(aug, i)) content[i] = 1;
    for (int k : span_parents[i]) {
      if (k < i && content[k]) content[i] = 1;
    }
    if (aug.is_dup(i)) {
      for (int k : dup_targets[i]) {
        if (content_token(aug, k)) content[i] = 1;
      }
    }
  }

  for (int i = 0; i < n; ++i) {
    std::map<ArgName, int> counts;
    Operator op = Operator::Select;
    bool has_semantic = false;
    for (const auto& e : dg.edges) {
      if (e.src != i || e.tag.kind != EdgeTag::Kind::Semantic) continue;
      counts[e.tag.arg] += 1;
      op = e.tag.op;
      has_semantic = true;
    }
    if (!has_semantic) continue;
    for (const auto& rule : default_combination_rules()) {
      if (rule.op != op) continue;
      bool triggered = false;
      for (ArgName trig : rule.triggers) {
        if (counts.count(trig) && counts[trig] > 0) triggered = true;
      }
      if (!triggered) continue;
      int satisfied = 0;
      for (const auto& req : rule.requirements) {
        if (counts[req.arg] >= req.min_count) ++satisfied;
      }
      if (satisfied + (content[i] ? 1 : 0) <
          static_cast<int>(rule.requirements.size())) {
        report("Combination");
      }
    }
  }

  int roots = 0;
  for (int i = 0; i < n; ++i) {
    bool active = out_any[i] > 0 || span_in[i] > 0;
    bool clean = in_nonspan[i] == 0 && span_out[i] == 0;
    if (active && clean) ++roots;
  }
  if (roots > 1) report("Connectivity");

  return violations;
}

}  // namespace qdg
