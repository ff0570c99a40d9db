#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qdg/lexicon.hpp"
#include "qdg/logical_form.hpp"

namespace qdg {

// Canonical surface of a normalized logical form: one rendered string per
// step, ordered by layer then lexicographic rank, with provenance back to the
// pre-normalization step indices.
struct NormalizedLf {
  std::vector<std::string> steps;
  std::vector<int> provenance;  // new index -> original index

  bool operator==(const NormalizedLf&) const = default;
};

// Token cleanup per step: drop the operator's trigger tokens, drop auxiliary
// words, map the rest to class representatives. Values become sorted sets
// with references first.
LogicalForm normalize_tokens(const LogicalForm& lf, const Lexicon& lexicon);

// Granularity merging to a fixed point: a project or filter referring to a
// select collapses into it, and filter chains flatten. Only steps with a
// single referrer are absorbed.
LogicalForm merge_steps(const LogicalForm& lf);

// Reference-free filter/project steps describe a plain selection; fold them
// into select so granularity variants compare equal.
LogicalForm collapse_leaf_steps(const LogicalForm& lf);

// Reference-chain depth: 0 for leaves, else 1 + max over referenced steps.
int step_layer(const LogicalForm& lf, int index);

// Deterministic step ordering by (layer, reference-blind rank) with the
// references rewritten to the new indices.
NormalizedLf reorder(const LogicalForm& lf);

// Rendering of one step in the normalized surface form (sorted properties,
// arguments sorted by name then value, value tokens sorted refs-first).
std::string render_normalized_step(const LogicalFormStep& step);

// Full pipeline: tokens, merge+collapse to fixed point, reorder.
NormalizedLf normal_form(const LogicalForm& lf, const Lexicon& lexicon);

// Exact match on normalized forms.
bool lf_em(const LogicalForm& pred, const LogicalForm& gold,
           const Lexicon& lexicon);

// Mean LF-EM over aligned prediction/gold lists; an absent prediction counts
// as a non-match. Throws LengthMismatch.
double corpus_lf_em(const std::vector<std::optional<LogicalForm>>& preds,
                    const std::vector<LogicalForm>& golds,
                    const Lexicon& lexicon);

}  // namespace qdg
