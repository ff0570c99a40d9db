#include "qdg/lexicon.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "qdg/errors.hpp"
#include "qdg/text.hpp"

namespace qdg {

namespace {

using nlohmann::ordered_json;

std::vector<std::string> as_string_list(const ordered_json& j) {
  std::vector<std::string> out;
  for (const auto& item : j) out.push_back(item.get<std::string>());
  return out;
}

}  // namespace

Lexicon Lexicon::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw QdgError(ErrorKind::InvalidInput, "cannot open lexicon " + path);
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return load_json(buffer.str());
}

Lexicon Lexicon::default_lexicon() {
  return load_file(std::string(QDG_DATA_DIR) + "/lexicon.json");
}

Lexicon Lexicon::load_json(const std::string& json_text) {
  ordered_json j;
  try {
    j = ordered_json::parse(json_text);
  } catch (const std::exception& e) {
    throw QdgError(ErrorKind::ParseError, std::string("lexicon: ") + e.what());
  }

  Lexicon lex;
  for (const auto& w : j.at("aux")) lex.aux_.insert(w.get<std::string>());
  for (const auto& w : j.at("store")) {
    std::string token = w.get<std::string>();
    if (lex.store_set_.insert(token).second) lex.store_.push_back(token);
  }
  for (const auto& w : j.at("op")) lex.op_words_.insert(w.get<std::string>());

  for (const auto& row : j.at("properties")) {
    PropertyEntry entry;
    if (!operator_from_name(row.at("operator").get<std::string>(), &entry.op)) {
      throw QdgError(ErrorKind::ParseError,
                     "lexicon: unknown operator " +
                         row.at("operator").get<std::string>());
    }
    entry.property = row.at("property").get<std::string>();
    if (!entry.property.empty() &&
        !operator_has_property(entry.op, entry.property)) {
      throw QdgError(ErrorKind::ParseError,
                     "lexicon: operator " + operator_name(entry.op) +
                         " has no property " + entry.property);
    }
    for (const auto& phrase : row.at("triggers")) {
      std::vector<std::string> tokens = tokenize(phrase.get<std::string>());
      if (!tokens.empty()) entry.triggers.push_back(std::move(tokens));
    }
    lex.properties_.push_back(std::move(entry));
  }

  for (const auto& cls : j.at("equivalence_classes")) {
    EquivalenceClass ec;
    ec.representative = cls.at("representative").get<std::string>();
    ec.members = as_string_list(cls.at("members"));
    if (std::find(ec.members.begin(), ec.members.end(), ec.representative) ==
        ec.members.end()) {
      ec.members.push_back(ec.representative);
    }
    lex.classes_.push_back(std::move(ec));
  }

  for (const auto& rule : j.at("inflections")) {
    lex.inflections_.push_back({rule.at("suffix_from").get<std::string>(),
                                rule.at("suffix_to").get<std::string>()});
  }
  if (lex.inflections_.empty()) lex.inflections_ = default_suffix_rules();

  lex.finalize();
  return lex;
}

std::string Lexicon::stem(const std::string& token) const {
  // Fixed point keeps representative() idempotent: "cubes" -> "cube" -> "cub"
  // stabilizes at the same stem that "cube" reaches directly.
  std::string cur = token;
  for (int pass = 0; pass < 5; ++pass) {
    std::string next = apply_suffix_rules(cur, inflections_);
    if (next == cur) break;
    cur = std::move(next);
  }
  return cur;
}

void Lexicon::finalize() {
  // Merge classes that share a token, keeping the smallest representative so
  // the result does not depend on declaration order.
  std::vector<EquivalenceClass> merged;
  std::unordered_map<std::string, int> where;
  for (const auto& cls : classes_) {
    int target = -1;
    for (const auto& m : cls.members) {
      auto it = where.find(m);
      if (it != where.end()) {
        target = it->second;
        break;
      }
    }
    if (target < 0) {
      target = static_cast<int>(merged.size());
      merged.push_back({cls.representative, {}});
    }
    for (const auto& m : cls.members) {
      auto it = where.find(m);
      if (it == where.end()) {
        where[m] = target;
        merged[target].members.push_back(m);
      } else if (it->second != target) {
        // A token bridges two previously separate classes: fold one in.
        int other = it->second;
        for (const auto& om : merged[other].members) {
          where[om] = target;
          merged[target].members.push_back(om);
        }
        merged[other].members.clear();
      }
    }
    if (merged[target].representative > cls.representative) {
      merged[target].representative = cls.representative;
    }
  }
  classes_.clear();
  class_of_.clear();
  for (auto& cls : merged) {
    if (cls.members.empty()) continue;
    std::sort(cls.members.begin(), cls.members.end());
    cls.members.erase(std::unique(cls.members.begin(), cls.members.end()),
                      cls.members.end());
    int id = static_cast<int>(classes_.size());
    for (const auto& m : cls.members) class_of_[m] = id;
    classes_.push_back(std::move(cls));
  }

  removal_by_op_.assign(kOperatorCount, {});
  for (const auto& entry : properties_) {
    auto& set = removal_by_op_[static_cast<size_t>(entry.op)];
    for (const auto& phrase : entry.triggers) {
      for (const auto& tok : phrase) set.insert(tok);
    }
  }
}

std::string Lexicon::to_json() const {
  ordered_json j;
  std::vector<std::string> aux(aux_.begin(), aux_.end());
  std::sort(aux.begin(), aux.end());
  j["aux"] = aux;
  j["store"] = store_;
  std::vector<std::string> ops(op_words_.begin(), op_words_.end());
  std::sort(ops.begin(), ops.end());
  j["op"] = ops;
  j["properties"] = ordered_json::array();
  for (const auto& entry : properties_) {
    ordered_json row;
    row["operator"] = operator_name(entry.op);
    row["property"] = entry.property;
    std::vector<std::string> phrases;
    for (const auto& phrase : entry.triggers) phrases.push_back(join(phrase, " "));
    row["triggers"] = phrases;
    j["properties"].push_back(row);
  }
  j["equivalence_classes"] = ordered_json::array();
  for (const auto& cls : classes_) {
    ordered_json row;
    row["representative"] = cls.representative;
    row["members"] = cls.members;
    j["equivalence_classes"].push_back(row);
  }
  j["inflections"] = ordered_json::array();
  for (const auto& rule : inflections_) {
    ordered_json row;
    row["suffix_from"] = rule.from;
    row["suffix_to"] = rule.to;
    j["inflections"].push_back(row);
  }
  return j.dump(2);
}

std::vector<const PropertyEntry*> Lexicon::entries_for(Operator op) const {
  std::vector<const PropertyEntry*> out;
  for (const auto& entry : properties_) {
    if (entry.op == op) out.push_back(&entry);
  }
  return out;
}

bool Lexicon::same_class(const std::string& a, const std::string& b) const {
  auto ia = class_of_.find(a);
  auto ib = class_of_.find(b);
  return ia != class_of_.end() && ib != class_of_.end() &&
         ia->second == ib->second;
}

bool Lexicon::equivalent(const std::string& a, const std::string& b) const {
  if (a == b) return true;
  if (is_reference_token(a) || is_reference_token(b)) return false;
  return representative(a) == representative(b);
}

std::string Lexicon::representative(const std::string& token) const {
  auto it = class_of_.find(token);
  if (it != class_of_.end()) return classes_[it->second].representative;
  const std::string stemmed = stem(token);
  it = class_of_.find(stemmed);
  if (it != class_of_.end()) return classes_[it->second].representative;
  return stemmed;
}

const std::unordered_set<std::string>& Lexicon::removal_tokens(Operator op) const {
  return removal_by_op_[static_cast<size_t>(op)];
}

}  // namespace qdg
