#pragma once

#include <string>
#include <vector>

namespace qdg {

// The closed operator inventory. Every decomposition step maps to exactly one.
enum class Operator {
  Select,
  Filter,
  Project,
  Aggregate,
  Group,
  Superlative,
  Comparative,
  Comparison,
  Union,
  Intersection,
  Discard,
  Sort,
  Boolean,
  Arithmetic,
};

inline constexpr int kOperatorCount = 14;

// Named argument slots. `Cond` is the filter condition; `Condition` belongs to
// comparative/boolean steps. They render differently and never unify.
enum class ArgName {
  Sub,
  Cond,
  Projection,
  Arg,
  Key,
  Value,
  Attribute,
  Condition,
  Intersect,
  Exclude,
  Order,
  Left,
  Right,
};

const std::string& operator_name(Operator op);          // lowercase, e.g. "filter"
const std::string& operator_display_name(Operator op);  // uppercase, e.g. "FILTER"
bool operator_from_name(const std::string& name, Operator* out);

const std::string& arg_name_string(ArgName arg);
bool arg_name_from_string(const std::string& name, ArgName* out);

// Properties an operator admits (canonical lowercase symbols).
const std::vector<std::string>& operator_properties(Operator op);

// Argument slots in the operator's template order, used for plain rendering.
const std::vector<ArgName>& operator_args(Operator op);

// Slots that may legally occur more than once (union subjects etc.).
bool arg_repeatable(Operator op, ArgName arg);

// Slot that absorbs a node's free text when rebuilding a step from a graph.
ArgName operator_text_slot(Operator op);

bool operator_has_property(Operator op, const std::string& prop);
bool operator_has_arg(Operator op, ArgName arg);

}  // namespace qdg
