#pragma once

#include <string>
#include <vector>

#include "qdg/lexicon.hpp"
#include "qdg/logical_form.hpp"
#include "qdg/qdmr.hpp"

namespace qdg {

// Record of what the rule engine matched in one step: which tokens were
// consumed as triggers, which operator and properties were chosen, and the
// boundaries the argument splitter used.
struct DetectionTrace {
  Operator op = Operator::Select;
  std::vector<std::string> properties;
  std::vector<bool> consumed;            // per step-token: trigger-consumed
  std::vector<std::string> matched_triggers;
};

Operator detect_operator(const QdmrStep& step, int position,
                         const Lexicon& lexicon);

std::vector<std::string> detect_properties(const QdmrStep& step, Operator op,
                                           const Lexicon& lexicon,
                                           DetectionTrace* trace = nullptr);

std::vector<std::pair<ArgName, ArgValue>> extract_arguments(
    const QdmrStep& step, Operator op, const std::vector<std::string>& props,
    const DetectionTrace& trace, const Lexicon& lexicon);

// Converts one step; position is the 1-based step index.
LogicalFormStep step_to_lf(const QdmrStep& step, int position,
                           const Lexicon& lexicon,
                           DetectionTrace* trace = nullptr);

// Whole-decomposition conversion. Any step failure fails the example with the
// step index attached to the error message.
LogicalForm qdmr_to_lf(const Qdmr& qdmr, const Lexicon& lexicon);

}  // namespace qdg
