#pragma once

#include <string>
#include <vector>

namespace qdg {

inline const std::string kSepToken = "[SEP]";
inline const std::string kDumToken = "[DUM]";
inline const std::string kDupToken = "[DUP]";

// A tokenized question; tokens are lowercase, punctuation split off.
struct Question {
  std::vector<std::string> tokens;

  int size() const { return static_cast<int>(tokens.size()); }
  static Question from_text(const std::string& text);
  bool operator==(const Question&) const = default;
};

// Question extended with the addressable blocks appended after it:
// base ++ [SEP] ++ store words ++ [DUM]*k ++ [DUP]*k.
struct AugmentedQuestion {
  Question base;
  std::vector<std::string> tokens;  // the full augmented sequence
  int sep_index = -1;
  std::vector<int> store_indices;
  std::vector<int> dum_indices;
  std::vector<int> dup_indices;

  int size() const { return static_cast<int>(tokens.size()); }
  bool is_structural(int i) const;  // [SEP] / [DUM] / [DUP]
  bool is_dum(int i) const;
  bool is_dup(int i) const;
  bool is_store(int i) const;

  // Rebuilds the block layout from literal [SEP]/[DUM]/[DUP] markers, e.g.
  // when a token sequence arrives from a serialized artifact.
  static AugmentedQuestion from_tokens(std::vector<std::string> tokens);
};

}  // namespace qdg
