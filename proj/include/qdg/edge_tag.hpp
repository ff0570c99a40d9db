#pragma once

#include <string>
#include <vector>

#include "qdg/operators.hpp"

namespace qdg {

// Label of a graph arc: either a semantic triple (operator, properties,
// argument slot) or one of the two structural labels.
struct EdgeTag {
  enum class Kind { Semantic, Span, Duplicate };
  Kind kind = Kind::Semantic;
  Operator op = Operator::Select;        // Semantic only
  std::vector<std::string> properties;   // Semantic only, kept sorted
  ArgName arg = ArgName::Sub;            // Semantic only

  static EdgeTag span();
  static EdgeTag duplicate();
  static EdgeTag semantic(Operator op, std::vector<std::string> properties,
                          ArgName arg);

  bool operator==(const EdgeTag&) const = default;
};

// "filter-sub", "comparative-condition[more]", "span", "duplicate".
std::string render_edge_tag(const EdgeTag& tag);

// Inverse of render_edge_tag; throws ParseError on unknown forms.
EdgeTag parse_edge_tag(const std::string& text);

}  // namespace qdg
