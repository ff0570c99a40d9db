#include "qdg/edge_tag.hpp"

#include <algorithm>

#include "qdg/errors.hpp"
#include "qdg/text.hpp"

namespace qdg {

EdgeTag EdgeTag::span() {
  EdgeTag t;
  t.kind = Kind::Span;
  return t;
}

EdgeTag EdgeTag::duplicate() {
  EdgeTag t;
  t.kind = Kind::Duplicate;
  return t;
}

EdgeTag EdgeTag::semantic(Operator op, std::vector<std::string> properties,
                          ArgName arg) {
  EdgeTag t;
  t.kind = Kind::Semantic;
  t.op = op;
  std::sort(properties.begin(), properties.end());
  t.properties = std::move(properties);
  t.arg = arg;
  return t;
}

std::string render_edge_tag(const EdgeTag& tag) {
  switch (tag.kind) {
    case EdgeTag::Kind::Span: return "span";
    case EdgeTag::Kind::Duplicate: return "duplicate";
    case EdgeTag::Kind::Semantic: break;
  }
  std::string out = operator_name(tag.op) + "-" + arg_name_string(tag.arg);
  if (!tag.properties.empty()) {
    out += "[" + join(tag.properties, ",") + "]";
  }
  return out;
}

EdgeTag parse_edge_tag(const std::string& text) {
  if (text == "span") return EdgeTag::span();
  if (text == "duplicate") return EdgeTag::duplicate();

  std::string head = text;
  std::vector<std::string> props;
  auto bracket = text.find('[');
  if (bracket != std::string::npos) {
    if (text.back() != ']') {
      throw QdgError(ErrorKind::ParseError, "bad edge tag '" + text + "'");
    }
    head = text.substr(0, bracket);
    std::string inside = text.substr(bracket + 1, text.size() - bracket - 2);
    std::string cur;
    for (char c : inside) {
      if (c == ',') {
        if (!cur.empty()) props.push_back(cur);
        cur.clear();
      } else {
        cur.push_back(c);
      }
    }
    if (!cur.empty()) props.push_back(cur);
  }
  auto dash = head.find('-');
  if (dash == std::string::npos) {
    throw QdgError(ErrorKind::ParseError, "bad edge tag '" + text + "'");
  }
  Operator op;
  if (!operator_from_name(head.substr(0, dash), &op)) {
    throw QdgError(ErrorKind::ParseError,
                   "unknown operator in edge tag '" + text + "'");
  }
  ArgName arg;
  if (!arg_name_from_string(head.substr(dash + 1), &arg)) {
    throw QdgError(ErrorKind::ParseError,
                   "unknown argument in edge tag '" + text + "'");
  }
  return EdgeTag::semantic(op, std::move(props), arg);
}

}  // namespace qdg
