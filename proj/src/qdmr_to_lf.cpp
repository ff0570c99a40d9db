#include "qdg/qdmr_to_lf.hpp"

#include <algorithm>
#include <optional>

#include "qdg/errors.hpp"
#include "qdg/text.hpp"

namespace qdg {

namespace {

struct TriggerMatch {
  int begin = -1;
  int length = 0;
  std::string property;
  std::vector<std::string> phrase;
};

bool is_connective(const std::string& t) {
  return t == "," || t == "and" || t == "or";
}

bool is_preposition(const std::string& t) {
  static const std::vector<std::string> preps = {
      "of", "in", "from", "on", "for", "by", "to", "with", "about", "at"};
  return std::find(preps.begin(), preps.end(), t) != preps.end();
}

std::vector<int> ref_positions(const QdmrStep& step) {
  std::vector<int> out;
  for (int i = 0; i < step.size(); ++i) {
    if (is_reference_token(step.tokens[i])) out.push_back(i);
  }
  return out;
}

int find_token(const QdmrStep& step, const std::string& tok) {
  for (int i = 0; i < step.size(); ++i) {
    if (step.tokens[i] == tok) return i;
  }
  return -1;
}

int find_phrase(const std::vector<std::string>& tokens,
                const std::vector<std::string>& phrase, int from = 0) {
  if (phrase.empty()) return -1;
  const int n = static_cast<int>(tokens.size());
  const int len = static_cast<int>(phrase.size());
  for (int i = from; i + len <= n; ++i) {
    bool ok = true;
    for (int j = 0; j < len; ++j) {
      if (tokens[i + j] != phrase[j]) {
        ok = false;
        break;
      }
    }
    if (ok) return i;
  }
  return -1;
}

// Longest phrase first, leftmost occurrence, each token consumable once.
// All occurrences of a phrase are taken so repeated triggers are removed too.
std::vector<TriggerMatch> scan_triggers(
    const QdmrStep& step, const std::vector<const PropertyEntry*>& entries,
    std::vector<bool>* consumed) {
  struct Candidate {
    const std::vector<std::string>* phrase;
    const std::string* property;
  };
  std::vector<Candidate> candidates;
  for (const auto* entry : entries) {
    for (const auto& phrase : entry->triggers) {
      candidates.push_back({&phrase, &entry->property});
    }
  }
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const Candidate& a, const Candidate& b) {
                     return a.phrase->size() > b.phrase->size();
                   });

  std::vector<TriggerMatch> matches;
  for (const auto& cand : candidates) {
    int from = 0;
    while (true) {
      int at = find_phrase(step.tokens, *cand.phrase, from);
      if (at < 0) break;
      from = at + 1;
      bool free = true;
      for (size_t j = 0; j < cand.phrase->size(); ++j) {
        if ((*consumed)[at + j]) {
          free = false;
          break;
        }
      }
      if (!free) continue;
      for (size_t j = 0; j < cand.phrase->size(); ++j) {
        (*consumed)[at + j] = true;
      }
      matches.push_back({at, static_cast<int>(cand.phrase->size()),
                         *cand.property, *cand.phrase});
    }
  }
  return matches;
}

bool any_trigger(const QdmrStep& step, const Lexicon& lexicon, Operator op,
                 bool property_rows_only) {
  for (const auto* entry : lexicon.entries_for(op)) {
    if (property_rows_only && entry->property.empty()) continue;
    for (const auto& phrase : entry->triggers) {
      if (find_phrase(step.tokens, phrase) >= 0) return true;
    }
  }
  return false;
}

int operand_count(const QdmrStep& step) {
  int count = 0;
  for (const auto& t : step.tokens) {
    if (is_reference_token(t) || is_number_token(t)) ++count;
  }
  return count;
}

}  // namespace

Operator detect_operator(const QdmrStep& step, int position,
                         const Lexicon& lexicon) {
  (void)position;
  if (step.size() == 0) {
    throw QdgError(ErrorKind::EmptyDecomposition, "empty step");
  }
  const auto refs = ref_positions(step);
  const auto& toks = step.tokens;

  // "number of" steps count and "for each" steps group; neither sums
  // operands even when an arithmetic word appears.
  const bool counting_phrase = find_phrase(toks, {"number", "of"}) >= 0;
  const bool grouping_phrase = find_phrase(toks, {"for", "each"}) >= 0;

  if (!counting_phrase && !grouping_phrase && operand_count(step) >= 2 &&
      any_trigger(step, lexicon, Operator::Arithmetic, true)) {
    return Operator::Arithmetic;
  }
  if (refs.size() >= 2 && find_token(step, "which") >= 0 &&
      any_trigger(step, lexicon, Operator::Comparison, true)) {
    return Operator::Comparison;
  }
  const bool boolean_lead =
      toks.front() == "if" || toks.front() == "whether" ||
      (toks.size() >= 2 && (toks[0] == "is" || toks[0] == "are") &&
       toks[1] == "there");

  if (refs.size() >= 2 && find_token(step, "both") >= 0 && !boolean_lead) {
    return Operator::Intersection;
  }
  if (find_token(step, "besides") >= 0 || find_token(step, "except") >= 0 ||
      find_phrase(toks, {"not", "in"}) >= 0 ||
      find_phrase(toks, {"other", "than"}) >= 0) {
    return Operator::Discard;
  }
  if (refs.size() >= 2) {
    bool connectives_only = true;
    for (const auto& t : toks) {
      if (!is_reference_token(t) && !is_connective(t)) {
        connectives_only = false;
        break;
      }
    }
    if (connectives_only) return Operator::Union;
  }
  if (any_trigger(step, lexicon, Operator::Sort, false)) {
    return Operator::Sort;
  }
  if (boolean_lead) {
    return Operator::Boolean;
  }
  if (find_token(step, "where") >= 0 && !refs.empty()) {
    if (any_trigger(step, lexicon, Operator::Superlative, true)) {
      return Operator::Superlative;
    }
    if (refs.size() >= 2) return Operator::Comparative;
  }
  if (find_phrase(toks, {"for", "each"}) >= 0) {
    return Operator::Group;
  }
  if (refs.size() == 1 &&
      any_trigger(step, lexicon, Operator::Aggregate, true)) {
    // Aggregates are bare "<trigger> <ref>" steps; content beyond the
    // trigger and auxiliaries means the step projects or filters instead.
    std::vector<bool> consumed(step.size(), false);
    scan_triggers(step, lexicon.entries_for(Operator::Aggregate), &consumed);
    bool residue = false;
    for (int i = 0; i < step.size(); ++i) {
      if (consumed[i] || is_reference_token(toks[i])) continue;
      if (!lexicon.is_aux(toks[i])) {
        residue = true;
        break;
      }
    }
    if (!residue) return Operator::Aggregate;
  }
  if (refs.size() == 1) {
    // Trailing punctuation does not block the "<phrase> <prep> #k" template.
    int last = step.size() - 1;
    while (last > 0 && toks[last].size() == 1 &&
           !std::isalnum(static_cast<unsigned char>(toks[last][0])) &&
           toks[last][0] != '#') {
      --last;
    }
    if (refs[0] == last && refs[0] > 0 && is_preposition(toks[refs[0] - 1])) {
      return Operator::Project;
    }
  }
  if (!refs.empty()) return Operator::Filter;
  return Operator::Select;
}

std::vector<std::string> detect_properties(const QdmrStep& step, Operator op,
                                           const Lexicon& lexicon,
                                           DetectionTrace* trace) {
  DetectionTrace local;
  DetectionTrace& tr = trace ? *trace : local;
  tr.op = op;
  if (tr.consumed.size() != static_cast<size_t>(step.size())) {
    tr.consumed.assign(step.size(), false);
  }

  std::vector<std::string> fired;
  auto add_prop = [&](const std::string& p) {
    if (!p.empty() &&
        std::find(fired.begin(), fired.end(), p) == fired.end()) {
      fired.push_back(p);
    }
  };

  if (op == Operator::Boolean) {
    // Conjunction/disjunction over truth values is positional, not a
    // contiguous phrase; resolved before the generic scan.
    int truth = find_token(step, "true");
    bool value_true = truth >= 0;
    if (truth < 0) truth = find_token(step, "false");
    if (truth >= 0 && ref_positions(step).size() >= 2) {
      int both = find_token(step, "both");
      int either = find_token(step, "either");
      if (either < 0) either = find_token(step, "any");
      if (both >= 0 || either >= 0) {
        add_prop(std::string(both >= 0 ? "and-" : "or-") +
                 (value_true ? "true" : "false"));
        tr.consumed[truth] = true;
        if (both >= 0) tr.consumed[both] = true;
        if (either >= 0) tr.consumed[either] = true;
      }
    }
  }

  auto matches = scan_triggers(step, lexicon.entries_for(op), &tr.consumed);
  // Longest match is the most specific property; bare comparatives lose to
  // their numeric refinements because those phrases are strictly longer.
  std::stable_sort(matches.begin(), matches.end(),
                   [](const TriggerMatch& a, const TriggerMatch& b) {
                     return a.length > b.length;
                   });
  for (const auto& m : matches) {
    tr.matched_triggers.push_back(join(m.phrase, " "));
    add_prop(m.property);
  }

  if (op == Operator::Aggregate || op == Operator::Comparison ||
      op == Operator::Group) {
    // "maximal number of" fires both count and a superlative adjective; the
    // adjective wins.
    if (fired.size() > 1) {
      fired.erase(std::remove(fired.begin(), fired.end(), "count"),
                  fired.end());
    }
    if (fired.size() > 1) {
      throw QdgError(ErrorKind::ConflictingProperties,
                     "operator " + operator_name(op) + " matched " +
                         join(fired, ", "));
    }
  }
  if (fired.size() > 1) {
    fired.resize(1);  // the longest match is kept
  }

  if (fired.empty()) {
    if (op == Operator::Comparative) fired.push_back("equals");
    if (op == Operator::Boolean) fired.push_back("if-exists");
  }
  for (const auto& p : fired) {
    if (!operator_has_property(op, p)) {
      throw QdgError(ErrorKind::ConflictingProperties,
                     "property " + p + " invalid for " + operator_name(op));
    }
  }
  tr.properties = fired;
  return fired;
}

namespace {

struct Segmenter {
  const QdmrStep& step;
  const DetectionTrace& trace;
  const Lexicon& lexicon;

  bool usable(int i) const {
    return !trace.consumed[i] && !is_reference_token(step.tokens[i]);
  }

  // Free text in [from, to). Stray punctuation never enters an argument;
  // auxiliaries are kept only where the template wants the span verbatim.
  ArgValue text(int from, int to, bool keep_aux) const {
    ArgValue out;
    for (int i = std::max(from, 0); i < std::min(to, step.size()); ++i) {
      if (!usable(i)) continue;
      const std::string& t = step.tokens[i];
      if (t.size() == 1 && !std::isalnum(static_cast<unsigned char>(t[0]))) {
        continue;
      }
      if (!keep_aux && lexicon.is_aux(t)) continue;
      out.push_back(ArgToken::word(t));
    }
    return out;
  }

  std::vector<int> refs_in(int from, int to) const {
    std::vector<int> out;
    for (int i = std::max(from, 0); i < std::min(to, step.size()); ++i) {
      if (is_reference_token(step.tokens[i])) {
        out.push_back(reference_index(step.tokens[i]));
      }
    }
    return out;
  }

  // Refs when present, otherwise the segment's content words.
  ArgValue refs_or_text(int from, int to) const {
    auto refs = refs_in(from, to);
    if (!refs.empty()) {
      ArgValue out;
      for (int r : refs) out.push_back(ArgToken::ref(r));
      return out;
    }
    return text(from, to, /*keep_aux=*/false);
  }
};

void push_arg(std::vector<std::pair<ArgName, ArgValue>>& args, ArgName name,
              ArgValue value) {
  if (!value.empty()) args.emplace_back(name, std::move(value));
}

int trigger_position(const QdmrStep& step, const DetectionTrace& trace,
                     int from = 0) {
  for (int i = from; i < step.size(); ++i) {
    if (trace.consumed[i]) return i;
  }
  return -1;
}

}  // namespace

std::vector<std::pair<ArgName, ArgValue>> extract_arguments(
    const QdmrStep& step, Operator op, const std::vector<std::string>& props,
    const DetectionTrace& trace, const Lexicon& lexicon) {
  Segmenter seg{step, trace, lexicon};
  std::vector<std::pair<ArgName, ArgValue>> args;
  const auto refs = ref_positions(step);
  const int n = step.size();

  switch (op) {
    case Operator::Select: {
      push_arg(args, ArgName::Sub, seg.text(0, n, /*keep_aux=*/true));
      if (args.empty()) {
        throw QdgError(ErrorKind::MissingMandatoryArgument,
                       "select step with no content");
      }
      break;
    }
    case Operator::Filter: {
      args.emplace_back(ArgName::Sub,
                        ArgValue{ArgToken::ref(
                            reference_index(step.tokens[refs.front()]))});
      ArgValue cond;
      for (int i = 0; i < n; ++i) {
        if (i == refs.front() || trace.consumed[i]) continue;
        if (is_reference_token(step.tokens[i])) {
          cond.push_back(ArgToken::ref(reference_index(step.tokens[i])));
        } else if (!(step.tokens[i].size() == 1 &&
                     !std::isalnum(
                         static_cast<unsigned char>(step.tokens[i][0])))) {
          cond.push_back(ArgToken::word(step.tokens[i]));
        }
      }
      push_arg(args, ArgName::Cond, std::move(cond));
      break;
    }
    case Operator::Project: {
      args.emplace_back(ArgName::Sub,
                        ArgValue{ArgToken::ref(
                            reference_index(step.tokens[refs.front()]))});
      push_arg(args, ArgName::Projection, seg.text(0, n, /*keep_aux=*/true));
      break;
    }
    case Operator::Aggregate: {
      args.emplace_back(ArgName::Arg,
                        ArgValue{ArgToken::ref(
                            reference_index(step.tokens[refs.front()]))});
      break;
    }
    case Operator::Group: {
      int split = find_phrase(step.tokens, {"for", "each"});
      if (split < 0) {
        throw QdgError(ErrorKind::MissingMandatoryArgument,
                       "group step without a for-each split");
      }
      push_arg(args, ArgName::Key, seg.refs_or_text(split + 2, n));
      push_arg(args, ArgName::Value, seg.refs_or_text(0, split));
      break;
    }
    case Operator::Superlative:
    case Operator::Comparative: {
      int where = find_token(step, "where");
      auto before = seg.refs_in(0, where);
      auto after = seg.refs_in(where + 1, n);
      if (before.empty() || after.empty()) {
        throw QdgError(ErrorKind::MissingMandatoryArgument,
                       operator_name(op) +
                           " needs a subject and an attribute reference");
      }
      args.emplace_back(ArgName::Sub, ArgValue{ArgToken::ref(before[0])});
      args.emplace_back(ArgName::Attribute, ArgValue{ArgToken::ref(after[0])});
      if (op == Operator::Comparative) {
        int attr_pos = -1;
        for (int p : refs) {
          if (p > where) {
            attr_pos = p;
            break;
          }
        }
        push_arg(args, ArgName::Condition,
                 seg.text(attr_pos + 1, n, /*keep_aux=*/false));
      }
      break;
    }
    case Operator::Comparison: {
      for (int p : refs) {
        args.emplace_back(ArgName::Arg, ArgValue{ArgToken::ref(
                                            reference_index(step.tokens[p]))});
      }
      break;
    }
    case Operator::Union: {
      for (int p : refs) {
        args.emplace_back(ArgName::Sub, ArgValue{ArgToken::ref(
                                            reference_index(step.tokens[p]))});
      }
      break;
    }
    case Operator::Intersection: {
      for (int p : refs) {
        args.emplace_back(
            ArgName::Intersect,
            ArgValue{ArgToken::ref(reference_index(step.tokens[p]))});
      }
      push_arg(args, ArgName::Projection, seg.text(0, n, /*keep_aux=*/false));
      break;
    }
    case Operator::Discard: {
      int at = trigger_position(step, trace);
      if (at < 0) at = n;
      push_arg(args, ArgName::Sub, seg.refs_or_text(0, at));
      push_arg(args, ArgName::Exclude, seg.refs_or_text(at + 1, n));
      if (args.size() < 2) {
        throw QdgError(ErrorKind::MissingMandatoryArgument,
                       "discard needs a subject and an exclusion");
      }
      break;
    }
    case Operator::Sort: {
      int at = trigger_position(step, trace);
      if (at < 0) at = n;
      ArgValue sub;
      for (int r : seg.refs_in(0, at)) sub.push_back(ArgToken::ref(r));
      if (sub.empty()) sub = seg.text(0, at, /*keep_aux=*/false);
      push_arg(args, ArgName::Sub, std::move(sub));
      push_arg(args, ArgName::Order, seg.refs_or_text(at + 1, n));
      break;
    }
    case Operator::Boolean: {
      const std::string& prop = props.empty() ? "" : props.front();
      if (prop.rfind("and-", 0) == 0 || prop.rfind("or-", 0) == 0) {
        for (int p : refs) {
          args.emplace_back(
              ArgName::Sub,
              ArgValue{ArgToken::ref(reference_index(step.tokens[p]))});
        }
        break;
      }
      if (prop == "if-exists") {
        auto subs = seg.refs_in(0, n);
        if (subs.empty()) {
          push_arg(args, ArgName::Sub, seg.text(0, n, /*keep_aux=*/false));
        } else {
          for (int r : subs) {
            args.emplace_back(ArgName::Sub, ArgValue{ArgToken::ref(r)});
          }
          // "if #1 is red" style: content beyond the reference is the test.
          push_arg(args, ArgName::Condition, seg.text(0, n, /*keep_aux=*/false));
        }
        break;
      }
      int at = trigger_position(step, trace, 1);
      if (at < 0) at = n;
      auto subs = seg.refs_in(0, at);
      if (subs.empty()) {
        push_arg(args, ArgName::Sub, seg.text(0, at, /*keep_aux=*/false));
      } else {
        for (int r : subs) {
          args.emplace_back(ArgName::Sub, ArgValue{ArgToken::ref(r)});
        }
      }
      push_arg(args, ArgName::Condition, seg.refs_or_text(at + 1, n));
      break;
    }
    case Operator::Arithmetic: {
      std::vector<ArgToken> operands;
      for (int i = 0; i < n; ++i) {
        if (is_reference_token(step.tokens[i])) {
          operands.push_back(ArgToken::ref(reference_index(step.tokens[i])));
        } else if (is_number_token(step.tokens[i]) && !trace.consumed[i]) {
          operands.push_back(ArgToken::word(step.tokens[i]));
        }
      }
      if (operands.size() < 2) {
        throw QdgError(ErrorKind::MissingMandatoryArgument,
                       "arithmetic needs two operands");
      }
      const std::string& prop = props.empty() ? "" : props.front();
      if (prop == "diff" || prop == "div") {
        args.emplace_back(ArgName::Left, ArgValue{operands[0]});
        args.emplace_back(ArgName::Right, ArgValue{operands[1]});
      } else {
        for (const auto& operand : operands) {
          args.emplace_back(ArgName::Arg, ArgValue{operand});
        }
      }
      break;
    }
  }
  return args;
}

LogicalFormStep step_to_lf(const QdmrStep& step, int position,
                           const Lexicon& lexicon, DetectionTrace* trace) {
  DetectionTrace local;
  DetectionTrace& tr = trace ? *trace : local;
  LogicalFormStep lf;
  lf.op = detect_operator(step, position, lexicon);
  lf.properties = detect_properties(step, lf.op, lexicon, &tr);
  lf.args = extract_arguments(step, lf.op, lf.properties, tr, lexicon);
  std::sort(lf.properties.begin(), lf.properties.end());
  return lf;
}

LogicalForm qdmr_to_lf(const Qdmr& qdmr, const Lexicon& lexicon) {
  LogicalForm lf;
  for (int i = 0; i < qdmr.size(); ++i) {
    try {
      lf.steps.push_back(step_to_lf(qdmr.steps[i], i + 1, lexicon));
    } catch (const QdgError& e) {
      throw QdgError(e.kind(),
                     "step " + std::to_string(i + 1) + ": " + e.what());
    }
  }
  validate_references(lf);
  return lf;
}

}  // namespace qdg
