#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "qdg/ilp.hpp"
#include "qdg/lexicon.hpp"
#include "qdg/qdmr.hpp"
#include "qdg/question.hpp"

namespace qdg {

// One chosen (question token, step, step token) triple.
struct AlignmentPair {
  int q = 0;          // augmented question index i
  int step = 0;       // step index k (0-based)
  int step_token = 0; // token index j within the step

  bool operator==(const AlignmentPair&) const = default;
  auto operator<=>(const AlignmentPair&) const = default;
};

struct Alignment {
  std::vector<AlignmentPair> pairs;

  bool aligned(int q, int step) const;
  std::vector<int> tokens_of_step(int step) const;  // sorted, deduplicated
};

// Boolean candidate structure: a = equivalence candidates, b = exact string
// matches (b implies a), r = step-to-step reference incidence.
struct CandidateMatrix {
  int n = 0;                       // augmented question length
  std::vector<int> step_sizes;     // n_k per step
  std::vector<std::vector<std::vector<uint8_t>>> a;  // [k][i][j]
  std::vector<std::vector<std::vector<uint8_t>>> b;  // [k][i][j]
  std::vector<std::vector<uint8_t>> r;               // [k][k']

  int candidate_count() const;
};

struct AlignmentWeights {
  // Strict order-of-magnitude separation keeps the lexicographic priority of
  // the objective terms intact in 64-bit integer arithmetic.
  int64_t c_min = 1000000;
  int64_t c_unique = 10000;
  int64_t c_seq = 100;
  int64_t c_exact = 1;
  int64_t c_ref = 1;
  int d_max = 6;  // longest rewarded run of consecutive aligned tokens
};

CandidateMatrix build_candidates(const AugmentedQuestion& question,
                                 const Qdmr& qdmr, const Lexicon& lexicon);

// The ILP over x (chosen pairs) with auxiliaries for runs, reference
// adjacency and per-token step counts. x variables are declared first, in
// (k, i, j) order, so solutions map back positionally.
struct AlignmentIlp {
  IlpModel model;
  std::vector<std::array<int, 3>> x_pairs;  // var index -> (k, i, j)
};

AlignmentIlp build_alignment_ilp(const CandidateMatrix& cand,
                                 const AlignmentWeights& weights);

struct AlignResult {
  Alignment alignment;
  std::vector<int> uncovered_steps;  // steps with no aligned token
  IlpStatus status = IlpStatus::Optimal;
  double objective = 0.0;
};

AlignResult align(const AugmentedQuestion& question, const Qdmr& qdmr,
                  const Lexicon& lexicon, const AlignmentWeights& weights = {},
                  const IlpConfig& config = {});

}  // namespace qdg
