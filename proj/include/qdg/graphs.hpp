#pragma once

#include <string>
#include <vector>

#include "qdg/edge_tag.hpp"

namespace qdg {

// Step-level graph: one node per step holding its question-token indices,
// semantic edges between steps. Duplicate wiring is token-level bookkeeping
// kept beside the edge list so it survives the round trip.
struct SdgEdge {
  int src = 0;
  int dst = 0;
  EdgeTag tag;  // semantic only

  bool operator==(const SdgEdge&) const = default;
};

struct DuplicateLink {
  int dup_token = 0;   // the [DUP] placeholder index
  int orig_token = 0;  // the token it conceptually copies

  bool operator==(const DuplicateLink&) const = default;
};

struct SpanDependencyGraph {
  std::vector<std::vector<int>> node_tokens;  // sorted question indices
  std::vector<SdgEdge> edges;
  std::vector<DuplicateLink> duplicate_links;

  int size() const { return static_cast<int>(node_tokens.size()); }
  bool operator==(const SpanDependencyGraph&) const = default;
};

// Token-level graph over the augmented question.
struct DgEdge {
  int src = 0;
  int dst = 0;
  EdgeTag tag;

  bool operator==(const DgEdge&) const = default;
};

struct DependencyGraph {
  int token_count = 0;
  std::vector<DgEdge> edges;

  bool operator==(const DependencyGraph&) const = default;
};

// Dense edge-label probabilities p(i, j, t) with the no-edge mass implicit:
// p_none(i, j) = 1 - sum_t p(i, j, t).
struct ProbTensor {
  std::string id;
  int n = 0;
  std::vector<std::string> tags;
  std::vector<std::string> tokens;  // optional; placeholders drive arc legality
  std::vector<float> data;          // row-major (i * n + j) * tags.size() + t

  int tag_count() const { return static_cast<int>(tags.size()); }
  float prob(int i, int j, int t) const {
    return data[(static_cast<size_t>(i) * n + j) * tags.size() + t];
  }
  float& prob(int i, int j, int t) {
    return data[(static_cast<size_t>(i) * n + j) * tags.size() + t];
  }
  double none_mass(int i, int j) const {
    double s = 0.0;
    for (int t = 0; t < tag_count(); ++t) s += prob(i, j, t);
    return 1.0 - s;
  }

  static ProbTensor zeros(int n, std::vector<std::string> tags);
};

}  // namespace qdg
