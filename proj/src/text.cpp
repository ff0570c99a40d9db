#include "qdg/text.hpp"

#include <algorithm>
#include <cctype>

namespace qdg {

namespace {

bool is_punct_char(char c) {
  switch (c) {
    case ',': case '.': case '?': case '!': case ';': case ':':
    case '(': case ')': case '[': case ']': case '"': case '\'':
    case '%': case '$':
      return true;
    default:
      return false;
  }
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() &&
         s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

std::string collapse_double(std::string s) {
  if (s.size() >= 3 && s[s.size() - 1] == s[s.size() - 2]) {
    char c = s.back();
    if (c != 'l' && c != 's' && c != 'e' && c != 'o') s.pop_back();
  }
  return s;
}

}  // namespace

std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

bool is_reference_token(std::string_view token) {
  if (token.size() < 2 || token[0] != '#') return false;
  for (size_t i = 1; i < token.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(token[i]))) return false;
  }
  return true;
}

int reference_index(std::string_view token) {
  if (!is_reference_token(token)) return 0;
  int value = 0;
  for (size_t i = 1; i < token.size(); ++i) {
    value = value * 10 + (token[i] - '0');
  }
  return value;
}

bool is_number_token(std::string_view token) {
  if (token.empty()) return false;
  bool digit_seen = false;
  for (size_t i = 0; i < token.size(); ++i) {
    char c = token[i];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      digit_seen = true;
    } else if (c == '.') {
      continue;
    } else if ((c == '-' || c == '+') && i == 0) {
      continue;
    } else {
      return false;
    }
  }
  return digit_seen;
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::string word;
  auto flush_word = [&]() {
    if (word.empty()) return;
    size_t begin = 0, end = word.size();
    std::vector<std::string> lead, trail;
    while (end > begin && is_punct_char(word[end - 1]) &&
           !is_number_token(std::string_view(word).substr(begin, end - begin))) {
      trail.push_back(std::string(1, word[end - 1]));
      --end;
    }
    while (begin < end && is_punct_char(word[begin]) && word[begin] != '#') {
      lead.push_back(std::string(1, word[begin]));
      ++begin;
    }
    for (auto it = lead.begin(); it != lead.end(); ++it) out.push_back(*it);
    if (end > begin) out.push_back(to_lower(std::string_view(word).substr(begin, end - begin)));
    for (auto it = trail.rbegin(); it != trail.rend(); ++it) out.push_back(*it);
    word.clear();
  };
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      flush_word();
    } else {
      word.push_back(c);
    }
  }
  flush_word();
  return out;
}

std::string join(const std::vector<std::string>& tokens, std::string_view sep) {
  std::string out;
  for (size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += sep;
    out += tokens[i];
  }
  return out;
}

const std::vector<SuffixRule>& default_suffix_rules() {
  static const std::vector<SuffixRule> rules = {
      {"sses", "ss"}, {"iest", "y"}, {"ness", ""}, {"ches", "ch"},
      {"shes", "sh"}, {"ies", "y"},  {"xes", "x"}, {"zes", "z"},
      {"oes", "o"},   {"ing", ""},   {"est", ""},  {"ied", "y"},
      {"ier", "y"},   {"ed", ""},    {"er", ""},   {"ss", "ss"},
      {"us", "us"},   {"is", "is"},  {"s", ""},
  };
  return rules;
}

std::string apply_suffix_rules(const std::string& token,
                               const std::vector<SuffixRule>& rules) {
  if (token.size() < 4 || is_reference_token(token) || is_number_token(token)) {
    return token;
  }
  // Longest suffix first; ties keep table order.
  std::vector<const SuffixRule*> ordered;
  ordered.reserve(rules.size());
  for (const auto& r : rules) ordered.push_back(&r);
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const SuffixRule* a, const SuffixRule* b) {
                     return a->from.size() > b->from.size();
                   });
  for (const SuffixRule* rule : ordered) {
    if (!ends_with(token, rule->from)) continue;
    std::string stem =
        token.substr(0, token.size() - rule->from.size()) + rule->to;
    if (stem.size() < 3) continue;
    if (rule->from == rule->to) return token;  // identity rule: blocked
    return collapse_double(stem);
  }
  return token;
}

std::string inflection_stem(const std::string& token) {
  std::string cur = token;
  for (int pass = 0; pass < 5; ++pass) {
    std::string next = apply_suffix_rules(cur, default_suffix_rules());
    if (next == cur) break;
    cur = std::move(next);
  }
  return cur;
}

bool inflection_equivalent(const std::string& a, const std::string& b) {
  if (a == b) return true;
  if (is_reference_token(a) || is_reference_token(b)) return false;
  const std::string sa = inflection_stem(a);
  const std::string sb = inflection_stem(b);
  return sa == sb || sa == b || a == sb;
}

}  // namespace qdg
