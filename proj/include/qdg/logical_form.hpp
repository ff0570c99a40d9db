#pragma once

#include <string>
#include <utility>
#include <vector>

#include "qdg/operators.hpp"

namespace qdg {

// One element of an argument value: a plain word or a reference to a prior
// step. `text` always carries the rendered form ("#3" for references).
struct ArgToken {
  enum class Kind { Word, Ref };
  Kind kind = Kind::Word;
  std::string text;
  int ref_index = 0;  // 1-based step index, Ref only

  static ArgToken word(std::string text);
  static ArgToken ref(int step);

  bool is_ref() const { return kind == Kind::Ref; }
  bool operator==(const ArgToken&) const = default;
};

using ArgValue = std::vector<ArgToken>;

std::string render_arg_value(const ArgValue& value);

// One decomposition step as operator + properties + named arguments.
// Arguments are an ordered multimap: repeatable slots may appear repeatedly.
struct LogicalFormStep {
  Operator op = Operator::Select;
  std::vector<std::string> properties;
  std::vector<std::pair<ArgName, ArgValue>> args;

  std::vector<int> references() const;
  bool operator==(const LogicalFormStep&) const = default;
};

struct LogicalForm {
  std::vector<LogicalFormStep> steps;
  bool operator==(const LogicalForm&) const = default;
};

// Plain canonical rendering: OPERATOR[props](slot=value, ...) with template
// slot order and repeated slots sorted by value.
std::string render_lf_step(const LogicalFormStep& step);

// Throws MalformedReference unless every reference points to a prior step.
void validate_references(const LogicalForm& lf);

}  // namespace qdg
