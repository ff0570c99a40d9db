#pragma once

#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "qdg/operators.hpp"
#include "qdg/text.hpp"

namespace qdg {

// A row of the trigger table. `property` is empty for operator-indicator
// entries (connectives like "ordered by") that carry no property of their own.
struct PropertyEntry {
  Operator op;
  std::string property;
  std::vector<std::vector<std::string>> triggers;  // tokenized phrases
};

struct EquivalenceClass {
  std::string representative;
  std::vector<std::string> members;  // includes the representative
};

using InflectionRule = SuffixRule;

// The annotation vocabulary: auxiliary words, domain store words, operational
// words, the trigger table and token equivalence classes. Immutable once
// loaded; shared freely across threads.
class Lexicon {
 public:
  static Lexicon load_file(const std::string& path);
  static Lexicon load_json(const std::string& json_text);
  static Lexicon default_lexicon();  // data/lexicon.json next to the binary
  std::string to_json() const;

  bool is_aux(const std::string& token) const { return aux_.count(token) > 0; }
  bool is_store(const std::string& token) const { return store_set_.count(token) > 0; }
  bool is_op_word(const std::string& token) const { return op_words_.count(token) > 0; }

  const std::vector<std::string>& store_words() const { return store_; }
  const std::vector<PropertyEntry>& property_entries() const { return properties_; }
  const std::vector<EquivalenceClass>& equivalence_classes() const { return classes_; }
  const std::vector<InflectionRule>& inflections() const { return inflections_; }

  // Rows for one operator, both property rows and indicator rows.
  std::vector<const PropertyEntry*> entries_for(Operator op) const;

  // Same equivalence class (exact class membership, no inflection).
  bool same_class(const std::string& a, const std::string& b) const;

  // Identical, same class, or inflection-equivalent.
  bool equivalent(const std::string& a, const std::string& b) const;

  // Class representative if the token belongs to a class, otherwise its
  // inflection stem.
  std::string representative(const std::string& token) const;

  // All trigger/indicator tokens of the operator's rows (any property).
  const std::unordered_set<std::string>& removal_tokens(Operator op) const;

  // Stem under this lexicon's suffix table.
  std::string stem(const std::string& token) const;

 private:
  void finalize();

  std::unordered_set<std::string> aux_;
  std::vector<std::string> store_;
  std::unordered_set<std::string> store_set_;
  std::unordered_set<std::string> op_words_;
  std::vector<PropertyEntry> properties_;
  std::vector<EquivalenceClass> classes_;
  std::vector<InflectionRule> inflections_;

  std::unordered_map<std::string, int> class_of_;
  std::vector<std::unordered_set<std::string>> removal_by_op_;
};

}  // namespace qdg
