#pragma once

#include <string>
#include <vector>

namespace qdg {

std::string to_lower(std::string_view s);

// Whitespace split with punctuation peeled off into separate tokens.
// Reference tokens (#12), plain numbers (3.5) and hyphenated words survive
// intact. Everything is lowercased.
std::vector<std::string> tokenize(std::string_view text);

bool is_reference_token(std::string_view token);

// Parses "#12" -> 12. Returns 0 when the token is not a reference.
int reference_index(std::string_view token);

bool is_number_token(std::string_view token);

std::string join(const std::vector<std::string>& tokens, std::string_view sep);

// Suffix rewrite used for inflection equivalence. Rules are tried longest
// suffix first; an identity rule ("ss" -> "ss") blocks shorter ones. After a
// strip, a doubled trailing consonant is collapsed ("running" -> "run").
struct SuffixRule {
  std::string from;
  std::string to;
};

const std::vector<SuffixRule>& default_suffix_rules();

std::string apply_suffix_rules(const std::string& token,
                               const std::vector<SuffixRule>& rules);

// Stem under the default rule table.
std::string inflection_stem(const std::string& token);

bool inflection_equivalent(const std::string& a, const std::string& b);

}  // namespace qdg
