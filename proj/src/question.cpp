#include "qdg/question.hpp"

#include "qdg/errors.hpp"
#include "qdg/text.hpp"

namespace qdg {

Question Question::from_text(const std::string& text) {
  Question q;
  q.tokens = tokenize(text);
  if (q.tokens.empty()) {
    throw QdgError(ErrorKind::InvalidInput, "empty question");
  }
  return q;
}

bool AugmentedQuestion::is_structural(int i) const {
  return i == sep_index || is_dum(i) || is_dup(i);
}

bool AugmentedQuestion::is_dum(int i) const {
  return !dum_indices.empty() && i >= dum_indices.front() &&
         i <= dum_indices.back();
}

bool AugmentedQuestion::is_dup(int i) const {
  return !dup_indices.empty() && i >= dup_indices.front() &&
         i <= dup_indices.back();
}

bool AugmentedQuestion::is_store(int i) const {
  return !store_indices.empty() && i >= store_indices.front() &&
         i <= store_indices.back();
}

AugmentedQuestion AugmentedQuestion::from_tokens(
    std::vector<std::string> tokens) {
  AugmentedQuestion aug;
  aug.tokens = std::move(tokens);
  for (int i = 0; i < aug.size(); ++i) {
    const std::string& t = aug.tokens[i];
    if (t == kSepToken && aug.sep_index < 0) {
      aug.sep_index = i;
    } else if (t == kDumToken) {
      aug.dum_indices.push_back(i);
    } else if (t == kDupToken) {
      aug.dup_indices.push_back(i);
    } else if (aug.sep_index >= 0 && aug.dum_indices.empty() &&
               aug.dup_indices.empty()) {
      aug.store_indices.push_back(i);
    } else if (aug.sep_index < 0) {
      aug.base.tokens.push_back(t);
    }
  }
  return aug;
}

}  // namespace qdg
