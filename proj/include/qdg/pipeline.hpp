#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qdg/align.hpp"
#include "qdg/corpus_io.hpp"
#include "qdg/graph_convert.hpp"
#include "qdg/lexicon.hpp"
#include "qdg/normalize.hpp"
#include "qdg/qdmr_to_lf.hpp"

namespace qdg {

struct PipelineConfig {
  int k_dum = 4;
  int k_dup = 4;
  AlignmentWeights weights;
  IlpConfig ilp;
  bool build_graph = true;  // false: stop after the logical form
};

// Everything one example produces. Failures are captured, never thrown, so a
// corpus run always completes.
struct ExampleResult {
  std::string id;
  bool converted = false;   // decomposition parsed and mapped to a LF
  bool round_trip = false;  // graph decoded back to an equivalent LF
  std::string error;        // first failure, as "Kind: detail"
  std::optional<LogicalForm> lf;
  std::optional<LogicalForm> decoded_lf;
  std::optional<DependencyGraph> dg;
  std::vector<std::string> tokens;  // augmented question tokens
};

ExampleResult run_example(const CorpusExample& example, const Lexicon& lexicon,
                          const PipelineConfig& config);

// Serial reference implementation.
std::vector<ExampleResult> run_corpus_serial(
    const std::vector<CorpusExample>& examples, const Lexicon& lexicon,
    const PipelineConfig& config);

// OpenMP variant; output order matches input order regardless of scheduling.
// jobs <= 1 falls back to the serial reference.
std::vector<ExampleResult> run_corpus_parallel(
    const std::vector<CorpusExample>& examples, const Lexicon& lexicon,
    const PipelineConfig& config, int jobs);

struct CorpusStats {
  int total = 0;
  int converted = 0;
  int round_trip = 0;

  double conversion_rate() const;
  double round_trip_rate() const;  // over converted examples
};

CorpusStats summarize(const std::vector<ExampleResult>& results);

}  // namespace qdg
