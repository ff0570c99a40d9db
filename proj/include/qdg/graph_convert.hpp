#pragma once

#include <string>
#include <vector>

#include "qdg/align.hpp"
#include "qdg/graphs.hpp"
#include "qdg/ilp.hpp"
#include "qdg/lexicon.hpp"
#include "qdg/logical_form.hpp"
#include "qdg/question.hpp"

namespace qdg {

// Question extension: base ++ [SEP] ++ store words ++ [DUM]*k ++ [DUP]*k.
AugmentedQuestion augment_question(const Question& q, const Lexicon& lexicon,
                                   int k_dum = 4, int k_dup = 4);

// Step nodes from the alignment; reference edges tagged by the referrer's
// operator, properties and argument slot. Unaligned steps ground on a free
// [DUM]; a token claimed by several steps stays with the earliest one and the
// later claimants receive a [DUP] copy.
SpanDependencyGraph extract_sdg(const LogicalForm& lf, const Alignment& m,
                                const AugmentedQuestion& aug);

// Left-to-right span chains inside each node; semantic edges connect the
// rightmost (representative) tokens; duplicate links become duplicate edges.
DependencyGraph sdg_to_dg(const SpanDependencyGraph& sdg,
                          const AugmentedQuestion& aug);

// Tolerant inverse: spans are undirected connected components, semantic edges
// project onto component pairs. Never throws; structural conflicts surface
// later in sdg_to_lf.
SpanDependencyGraph dg_to_sdg_soft(const DependencyGraph& dg);

// Rebuilds the logical form: one step per node in dependency order, operator
// and properties from the outgoing tags, node text into the operator's free
// text slot. Throws InconsistentNode / CyclicSdg.
LogicalForm sdg_to_lf(const SpanDependencyGraph& sdg,
                      const AugmentedQuestion& aug);

// Threshold decoder: keep arcs whose total tag mass exceeds 1/2, labeled by
// the most probable tag (lexicographically first on ties).
DependencyGraph greedy_decode(const ProbTensor& probs);

// A required argument combination for one operator: each listed slot needs
// its minimum edge count, except that span content may stand in for one.
struct CombinationRule {
  Operator op;
  struct Requirement {
    ArgName arg;
    int min_count = 1;
  };
  std::vector<Requirement> requirements;
  std::vector<ArgName> triggers;
};

const std::vector<CombinationRule>& default_combination_rules();
std::vector<CombinationRule> load_combination_rules(const std::string& path);

struct DecodeIlp {
  IlpModel model;
  // var index -> (i, j, tag index); x variables are declared first.
  std::vector<std::array<int, 3>> x_edges;
};

DecodeIlp build_decode_ilp(const ProbTensor& probs, const AugmentedQuestion& aug,
                           const std::vector<CombinationRule>& combos);

struct DecodeResult {
  DependencyGraph dg;
  IlpStatus status = IlpStatus::Optimal;
  double objective = 0.0;  // log-probability of the decoded graph
};

DecodeResult ilp_decode(const ProbTensor& probs, const AugmentedQuestion& aug,
                        const IlpConfig& config = {},
                        const std::vector<CombinationRule>& combos =
                            default_combination_rules());

// Names of the violated constraint families; empty means the graph has the
// structure the decode program enforces.
std::vector<std::string> validate_dg(const DependencyGraph& dg,
                                     const AugmentedQuestion& aug);

// Joint log-probability of a graph under a tensor (clamped at 1e-12), the
// quantity the decode program maximizes. Diagonal cells are ignored.
double dg_log_probability(const ProbTensor& probs, const DependencyGraph& dg);

}  // namespace qdg
