#include "qdg/normalize.hpp"

#include <algorithm>
#include <functional>
#include <map>

#include "qdg/errors.hpp"
#include "qdg/text.hpp"

namespace qdg {

namespace {

// Sorted-set form of a value: references first by index, then words.
void canonicalize_value(ArgValue& value) {
  std::sort(value.begin(), value.end(),
            [](const ArgToken& a, const ArgToken& b) {
              if (a.is_ref() != b.is_ref()) return a.is_ref();
              if (a.is_ref()) return a.ref_index < b.ref_index;
              return a.text < b.text;
            });
  value.erase(std::unique(value.begin(), value.end()), value.end());
}

int count_references_to(const LogicalForm& lf, int target) {
  int count = 0;
  for (const auto& step : lf.steps) {
    for (int r : step.references()) {
      if (r == target) ++count;
    }
  }
  return count;
}

void shift_references_above(LogicalForm& lf, int removed_index) {
  for (auto& step : lf.steps) {
    for (auto& [name, value] : step.args) {
      (void)name;
      for (auto& tok : value) {
        if (tok.is_ref() && tok.ref_index > removed_index) {
          tok = ArgToken::ref(tok.ref_index - 1);
        }
      }
    }
  }
}

// One merge-rule application; returns false when no rule matches.
bool merge_once(LogicalForm& lf) {
  for (size_t s = 0; s < lf.steps.size(); ++s) {
    auto& src = lf.steps[s];
    const bool src_ok =
        src.op == Operator::Project || src.op == Operator::Filter;
    if (!src_ok) continue;
    for (auto& [name, value] : src.args) {
      if (name != ArgName::Sub) continue;
      for (const auto& tok : value) {
        if (!tok.is_ref()) continue;
        int d = tok.ref_index;  // 1-based
        const auto& dst = lf.steps[d - 1];
        const bool rule =
            (src.op == Operator::Project && dst.op == Operator::Select) ||
            (src.op == Operator::Filter && dst.op == Operator::Select) ||
            (src.op == Operator::Filter && dst.op == Operator::Filter);
        if (!rule) continue;
        if (count_references_to(lf, d) != 1) continue;

        // Absorb dst into src: drop the absorbed reference, then union the
        // absorbed step's arguments in (select content maps to sub).
        LogicalFormStep merged = src;
        for (auto& [mname, mvalue] : merged.args) {
          if (mname != ArgName::Sub) continue;
          mvalue.erase(std::remove_if(mvalue.begin(), mvalue.end(),
                                      [d](const ArgToken& t) {
                                        return t.is_ref() && t.ref_index == d;
                                      }),
                       mvalue.end());
        }
        for (const auto& [dname, dvalue] : lf.steps[d - 1].args) {
          ArgName out_name =
              lf.steps[d - 1].op == Operator::Select ? ArgName::Sub : dname;
          bool appended = false;
          for (auto& [mname, mvalue] : merged.args) {
            if (mname == out_name) {
              for (const auto& t : dvalue) {
                if (std::find(mvalue.begin(), mvalue.end(), t) == mvalue.end()) {
                  mvalue.push_back(t);
                }
              }
              appended = true;
              break;
            }
          }
          if (!appended) merged.args.emplace_back(out_name, dvalue);
        }
        merged.args.erase(
            std::remove_if(merged.args.begin(), merged.args.end(),
                           [](const auto& kv) { return kv.second.empty(); }),
            merged.args.end());

        lf.steps[s] = std::move(merged);
        lf.steps.erase(lf.steps.begin() + (d - 1));
        shift_references_above(lf, d);
        return true;
      }
    }
  }
  return false;
}

}  // namespace

LogicalForm normalize_tokens(const LogicalForm& lf, const Lexicon& lexicon) {
  LogicalForm out;
  out.steps.reserve(lf.steps.size());
  for (const auto& step : lf.steps) {
    LogicalFormStep ns;
    ns.op = step.op;
    ns.properties = step.properties;
    std::sort(ns.properties.begin(), ns.properties.end());
    const auto& removal = lexicon.removal_tokens(step.op);
    for (const auto& [name, value] : step.args) {
      ArgValue nv;
      for (const auto& tok : value) {
        if (tok.is_ref()) {
          nv.push_back(tok);
          continue;
        }
        if (removal.count(tok.text) > 0) continue;
        if (lexicon.is_aux(tok.text)) continue;
        nv.push_back(ArgToken::word(lexicon.representative(tok.text)));
      }
      canonicalize_value(nv);
      ns.args.emplace_back(name, std::move(nv));
    }
    out.steps.push_back(std::move(ns));
  }
  return out;
}

LogicalForm merge_steps(const LogicalForm& lf) {
  LogicalForm out = lf;
  while (merge_once(out)) {
  }
  return out;
}

LogicalForm collapse_leaf_steps(const LogicalForm& lf) {
  LogicalForm out = lf;
  for (auto& step : out.steps) {
    if (step.op != Operator::Filter && step.op != Operator::Project) continue;
    if (!step.references().empty()) continue;
    ArgValue merged;
    for (const auto& [name, value] : step.args) {
      (void)name;
      for (const auto& tok : value) {
        if (std::find(merged.begin(), merged.end(), tok) == merged.end()) {
          merged.push_back(tok);
        }
      }
    }
    step.op = Operator::Select;
    step.properties.clear();
    step.args.clear();
    step.args.emplace_back(ArgName::Sub, std::move(merged));
  }
  return out;
}

int step_layer(const LogicalForm& lf, int index) {
  const int m = static_cast<int>(lf.steps.size());
  std::vector<int> memo(m, -1);
  std::vector<bool> visiting(m, false);
  std::function<int(int)> depth = [&](int i) -> int {
    if (memo[i] >= 0) return memo[i];
    if (visiting[i]) {
      throw QdgError(ErrorKind::CycleDetected,
                     "reference cycle at step " + std::to_string(i + 1));
    }
    visiting[i] = true;
    int layer = 0;
    for (int r : lf.steps[i].references()) {
      if (r < 1 || r > m) {
        throw QdgError(ErrorKind::MalformedReference,
                       "reference #" + std::to_string(r));
      }
      layer = std::max(layer, depth(r - 1) + 1);
    }
    visiting[i] = false;
    memo[i] = layer;
    return layer;
  };
  return depth(index);
}

std::string render_normalized_step(const LogicalFormStep& step) {
  std::string out = operator_display_name(step.op);
  std::vector<std::string> props = step.properties;
  std::sort(props.begin(), props.end());
  out += "[" + join(props, ", ") + "](";
  std::vector<std::pair<std::string, std::string>> rendered;
  for (const auto& [name, value] : step.args) {
    if (value.empty()) continue;
    rendered.emplace_back(arg_name_string(name), render_arg_value(value));
  }
  std::sort(rendered.begin(), rendered.end());
  for (size_t i = 0; i < rendered.size(); ++i) {
    if (i) out += "; ";
    out += rendered[i].first + "=" + rendered[i].second;
  }
  out += ")";
  return out;
}

namespace {

std::string pad3(int v) {
  std::string s = std::to_string(v);
  while (s.size() < 3) s.insert(s.begin(), '0');
  return s;
}

// Rank key with references rendered position-independently: each reference
// becomes the referent's own key prefixed by its zero-padded layer, so key
// order and final index order agree.
struct RankKeys {
  std::vector<int> layer;
  std::vector<std::string> key;
};

RankKeys rank_keys(const LogicalForm& lf) {
  const int m = static_cast<int>(lf.steps.size());
  RankKeys keys;
  keys.layer.resize(m);
  keys.key.assign(m, "");
  for (int i = 0; i < m; ++i) keys.layer[i] = step_layer(lf, i);

  std::function<const std::string&(int)> key_of =
      [&](int i) -> const std::string& {
    if (!keys.key[i].empty()) return keys.key[i];
    LogicalFormStep blind = lf.steps[i];
    for (auto& [name, value] : blind.args) {
      (void)name;
      for (auto& tok : value) {
        if (!tok.is_ref()) continue;
        const std::string& inner = key_of(tok.ref_index - 1);
        tok.text = "#{" + pad3(keys.layer[tok.ref_index - 1]) + ":" + inner + "}";
      }
      // Re-sort words and rewritten refs together so the key is stable under
      // any original reference numbering.
      std::sort(value.begin(), value.end(),
                [](const ArgToken& a, const ArgToken& b) {
                  if (a.is_ref() != b.is_ref()) return a.is_ref();
                  return a.text < b.text;
                });
    }
    keys.key[i] = render_normalized_step(blind);
    return keys.key[i];
  };
  for (int i = 0; i < m; ++i) key_of(i);
  return keys;
}

}  // namespace

NormalizedLf reorder(const LogicalForm& lf) {
  const int m = static_cast<int>(lf.steps.size());
  RankKeys keys = rank_keys(lf);

  std::vector<int> order(m);
  for (int i = 0; i < m; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    if (keys.layer[a] != keys.layer[b]) return keys.layer[a] < keys.layer[b];
    return keys.key[a] < keys.key[b];
  });

  std::vector<int> new_index(m);  // old -> new (1-based)
  for (int pos = 0; pos < m; ++pos) new_index[order[pos]] = pos + 1;

  NormalizedLf out;
  out.provenance = order;
  for (int pos = 0; pos < m; ++pos) {
    LogicalFormStep step = lf.steps[order[pos]];
    for (auto& [name, value] : step.args) {
      (void)name;
      for (auto& tok : value) {
        if (tok.is_ref()) tok = ArgToken::ref(new_index[tok.ref_index - 1]);
      }
      canonicalize_value(value);
    }
    out.steps.push_back(render_normalized_step(step));
  }
  return out;
}

NormalizedLf normal_form(const LogicalForm& lf, const Lexicon& lexicon) {
  LogicalForm current = normalize_tokens(lf, lexicon);
  while (true) {
    LogicalForm next = collapse_leaf_steps(merge_steps(current));
    if (next == current) break;
    current = std::move(next);
  }
  return reorder(current);
}

bool lf_em(const LogicalForm& pred, const LogicalForm& gold,
           const Lexicon& lexicon) {
  return normal_form(pred, lexicon).steps == normal_form(gold, lexicon).steps;
}

double corpus_lf_em(const std::vector<std::optional<LogicalForm>>& preds,
                    const std::vector<LogicalForm>& golds,
                    const Lexicon& lexicon) {
  if (preds.size() != golds.size()) {
    throw QdgError(ErrorKind::LengthMismatch,
                   std::to_string(preds.size()) + " predictions vs " +
                       std::to_string(golds.size()) + " golds");
  }
  if (preds.empty()) return 0.0;
  int hits = 0;
  for (size_t i = 0; i < preds.size(); ++i) {
    if (preds[i].has_value() && lf_em(*preds[i], golds[i], lexicon)) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(preds.size());
}

}  // namespace qdg
