#pragma once

#include <string>
#include <vector>

namespace qdg {

// One decomposition step: tokens with references recognized.
struct QdmrStep {
  std::vector<std::string> tokens;

  int size() const { return static_cast<int>(tokens.size()); }
  std::vector<int> references() const;  // 1-based targets, in order
  bool operator==(const QdmrStep&) const = default;
};

struct Qdmr {
  std::vector<QdmrStep> steps;

  int size() const { return static_cast<int>(steps.size()); }
  bool operator==(const Qdmr&) const = default;
};

// Splits on ";", strips the leading "return" of each step, tokenizes and
// validates references (each #k must point to a prior step).
// Throws EmptyDecomposition / MalformedReference.
Qdmr parse_qdmr_text(const std::string& text);

}  // namespace qdg
