#include "qdg/pipeline.hpp"

#include <omp.h>

#include "qdg/errors.hpp"

namespace qdg {

ExampleResult run_example(const CorpusExample& example, const Lexicon& lexicon,
                          const PipelineConfig& config) {
  ExampleResult result;
  result.id = example.id;
  try {
    Qdmr qdmr = parse_qdmr_text(example.decomposition);
    LogicalForm lf = qdmr_to_lf(qdmr, lexicon);
    result.lf = lf;
    result.converted = true;
    if (!config.build_graph) return result;

    Question q = Question::from_text(example.question);
    AugmentedQuestion aug =
        augment_question(q, lexicon, config.k_dum, config.k_dup);
    result.tokens = aug.tokens;
    AlignResult aligned = align(aug, qdmr, lexicon, config.weights, config.ilp);
    SpanDependencyGraph sdg = extract_sdg(lf, aligned.alignment, aug);
    DependencyGraph dg = sdg_to_dg(sdg, aug);
    result.dg = dg;
    LogicalForm back = sdg_to_lf(dg_to_sdg_soft(dg), aug);
    result.decoded_lf = back;
    result.round_trip = lf_em(back, lf, lexicon);
  } catch (const QdgError& e) {
    result.error = e.what();
  } catch (const std::exception& e) {
    result.error = std::string("InternalError: ") + e.what();
  }
  return result;
}

std::vector<ExampleResult> run_corpus_serial(
    const std::vector<CorpusExample>& examples, const Lexicon& lexicon,
    const PipelineConfig& config) {
  std::vector<ExampleResult> out(examples.size());
  for (size_t i = 0; i < examples.size(); ++i) {
    out[i] = run_example(examples[i], lexicon, config);
  }
  return out;
}

std::vector<ExampleResult> run_corpus_parallel(
    const std::vector<CorpusExample>& examples, const Lexicon& lexicon,
    const PipelineConfig& config, int jobs) {
  if (jobs <= 1) return run_corpus_serial(examples, lexicon, config);
  std::vector<ExampleResult> out(examples.size());
  const int count = static_cast<int>(examples.size());
#pragma omp parallel for schedule(dynamic) num_threads(jobs)
  for (int i = 0; i < count; ++i) {
    out[i] = run_example(examples[i], lexicon, config);
  }
  return out;
}

double CorpusStats::conversion_rate() const {
  return total == 0 ? 0.0 : static_cast<double>(converted) / total;
}

double CorpusStats::round_trip_rate() const {
  return total == 0 ? 0.0 : static_cast<double>(round_trip) / total;
}

CorpusStats summarize(const std::vector<ExampleResult>& results) {
  CorpusStats stats;
  stats.total = static_cast<int>(results.size());
  for (const auto& r : results) {
    if (r.converted) ++stats.converted;
    if (r.round_trip) ++stats.round_trip;
  }
  return stats;
}

}  // namespace qdg
