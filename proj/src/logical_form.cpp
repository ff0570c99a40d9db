#include "qdg/logical_form.hpp"

#include <algorithm>
#include <array>
#include <map>

#include "qdg/errors.hpp"
#include "qdg/text.hpp"

namespace qdg {

namespace {

struct OperatorInfo {
  std::string name;
  std::string display;
  std::vector<std::string> properties;
  std::vector<ArgName> args;
  ArgName text_slot;
};

const std::array<OperatorInfo, kOperatorCount>& operator_table() {
  static const std::array<OperatorInfo, kOperatorCount> table = {{
      {"select", "SELECT", {}, {ArgName::Sub}, ArgName::Sub},
      {"filter", "FILTER", {}, {ArgName::Sub, ArgName::Cond}, ArgName::Cond},
      {"project", "PROJECT", {}, {ArgName::Sub, ArgName::Projection},
       ArgName::Projection},
      {"aggregate",
       "AGGREGATE",
       {"max", "min", "count", "sum", "avg"},
       {ArgName::Arg},
       ArgName::Arg},
      {"group",
       "GROUP",
       {"max", "min", "count", "sum", "avg"},
       {ArgName::Key, ArgName::Value},
       ArgName::Value},
      {"superlative",
       "SUPERLATIVE",
       {"max", "min"},
       {ArgName::Sub, ArgName::Attribute},
       ArgName::Sub},
      {"comparative",
       "COMPARATIVE",
       {"equals", "equals-0", "equals-1", "equals-2", "more", "more-than-0",
        "more-than-1", "more-than-2", "less", "less-than-0", "less-than-1",
        "less-than-2"},
       {ArgName::Sub, ArgName::Attribute, ArgName::Condition},
       ArgName::Condition},
      {"comparison",
       "COMPARISON",
       {"max", "min", "count", "sum", "avg", "true", "false"},
       {ArgName::Arg},
       ArgName::Arg},
      {"union", "UNION", {}, {ArgName::Sub}, ArgName::Sub},
      {"intersection",
       "INTERSECTION",
       {},
       {ArgName::Intersect, ArgName::Projection},
       ArgName::Projection},
      {"discard", "DISCARD", {}, {ArgName::Sub, ArgName::Exclude}, ArgName::Sub},
      {"sort", "SORT", {}, {ArgName::Sub, ArgName::Order}, ArgName::Order},
      {"boolean",
       "BOOLEAN",
       {"equals", "equals-0", "equals-1", "equals-2", "more-than-0",
        "more-than-1", "more-than-2", "less-than-0", "less-than-1",
        "less-than-2", "and-true", "and-false", "or-true", "or-false",
        "if-exists"},
       {ArgName::Sub, ArgName::Condition},
       ArgName::Condition},
      {"arithmetic",
       "ARITHMETIC",
       {"sum", "diff", "multiply", "div"},
       {ArgName::Arg, ArgName::Left, ArgName::Right},
       ArgName::Right},
  }};
  return table;
}

const std::array<std::string, 13>& arg_name_table() {
  static const std::array<std::string, 13> table = {
      "sub",  "cond",      "projection", "arg",   "key",   "value", "attribute",
      "condition", "intersect", "exclude", "order", "left", "right"};
  return table;
}

}  // namespace

const std::string& operator_name(Operator op) {
  return operator_table()[static_cast<size_t>(op)].name;
}

const std::string& operator_display_name(Operator op) {
  return operator_table()[static_cast<size_t>(op)].display;
}

bool operator_from_name(const std::string& name, Operator* out) {
  const auto& table = operator_table();
  for (size_t i = 0; i < table.size(); ++i) {
    if (table[i].name == name || table[i].display == name) {
      *out = static_cast<Operator>(i);
      return true;
    }
  }
  return false;
}

const std::string& arg_name_string(ArgName arg) {
  return arg_name_table()[static_cast<size_t>(arg)];
}

bool arg_name_from_string(const std::string& name, ArgName* out) {
  const auto& table = arg_name_table();
  for (size_t i = 0; i < table.size(); ++i) {
    if (table[i] == name) {
      *out = static_cast<ArgName>(i);
      return true;
    }
  }
  return false;
}

const std::vector<std::string>& operator_properties(Operator op) {
  return operator_table()[static_cast<size_t>(op)].properties;
}

const std::vector<ArgName>& operator_args(Operator op) {
  return operator_table()[static_cast<size_t>(op)].args;
}

bool arg_repeatable(Operator op, ArgName arg) {
  switch (op) {
    case Operator::Union: return arg == ArgName::Sub;
    case Operator::Comparison: return arg == ArgName::Arg;
    case Operator::Intersection: return arg == ArgName::Intersect;
    case Operator::Arithmetic: return arg == ArgName::Arg;
    case Operator::Boolean: return arg == ArgName::Sub;
    default: return false;
  }
}

ArgName operator_text_slot(Operator op) {
  return operator_table()[static_cast<size_t>(op)].text_slot;
}

bool operator_has_property(Operator op, const std::string& prop) {
  const auto& props = operator_properties(op);
  return std::find(props.begin(), props.end(), prop) != props.end();
}

bool operator_has_arg(Operator op, ArgName arg) {
  const auto& args = operator_args(op);
  return std::find(args.begin(), args.end(), arg) != args.end();
}

ArgToken ArgToken::word(std::string text) {
  ArgToken t;
  t.kind = Kind::Word;
  t.text = std::move(text);
  return t;
}

ArgToken ArgToken::ref(int step) {
  ArgToken t;
  t.kind = Kind::Ref;
  t.ref_index = step;
  t.text = "#" + std::to_string(step);
  return t;
}

std::string render_arg_value(const ArgValue& value) {
  std::vector<std::string> parts;
  parts.reserve(value.size());
  for (const auto& tok : value) parts.push_back(tok.text);
  return join(parts, " ");
}

std::string render_lf_step(const LogicalFormStep& step) {
  std::string out = operator_display_name(step.op);
  out += "[";
  std::vector<std::string> props = step.properties;
  std::sort(props.begin(), props.end());
  out += join(props, ", ");
  out += "](";

  // Template slot order; within repeated slots, entries sorted by value.
  std::vector<std::pair<std::string, std::string>> rendered;
  for (ArgName slot : operator_args(step.op)) {
    std::vector<std::string> values;
    for (const auto& [name, value] : step.args) {
      if (name == slot) values.push_back(render_arg_value(value));
    }
    if (values.size() > 1) std::sort(values.begin(), values.end());
    for (auto& v : values) rendered.emplace_back(arg_name_string(slot), v);
  }
  std::string args_str;
  for (size_t i = 0; i < rendered.size(); ++i) {
    if (i) args_str += ", ";
    args_str += rendered[i].first + "=" + rendered[i].second;
  }
  out += args_str;
  out += ")";
  return out;
}

std::vector<int> LogicalFormStep::references() const {
  std::vector<int> refs;
  for (const auto& [name, value] : args) {
    (void)name;
    for (const auto& tok : value) {
      if (tok.kind == ArgToken::Kind::Ref) refs.push_back(tok.ref_index);
    }
  }
  return refs;
}

void validate_references(const LogicalForm& lf) {
  for (size_t i = 0; i < lf.steps.size(); ++i) {
    for (int ref : lf.steps[i].references()) {
      if (ref < 1 || static_cast<size_t>(ref) > lf.steps.size()) {
        throw QdgError(ErrorKind::MalformedReference,
                       "step " + std::to_string(i + 1) + " references #" +
                           std::to_string(ref));
      }
      if (static_cast<size_t>(ref) >= i + 1) {
        throw QdgError(ErrorKind::MalformedReference,
                       "step " + std::to_string(i + 1) +
                           " references a non-prior step #" +
                           std::to_string(ref));
      }
    }
  }
}

}  // namespace qdg
