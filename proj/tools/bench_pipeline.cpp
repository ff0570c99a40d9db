// Serial vs OpenMP throughput on replicated sample corpora.

#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#include <omp.h>

#include "qdg/pipeline.hpp"

using namespace qdg;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

int main(int argc, char** argv) {
  std::string corpus_path = std::string(QDG_DATA_DIR) + "/sample_corpus.csv";
  int replicas = 4;
  if (argc > 1) corpus_path = argv[1];
  if (argc > 2) replicas = std::atoi(argv[2]);

  Lexicon lexicon = Lexicon::default_lexicon();
  auto base = read_break_csv(corpus_path);
  std::vector<CorpusExample> corpus;
  for (int r = 0; r < replicas; ++r) {
    for (auto ex : base) {
      ex.id += "_" + std::to_string(r);
      corpus.push_back(std::move(ex));
    }
  }
  std::printf("examples: %zu (replicas=%d)\n", corpus.size(), replicas);

  PipelineConfig config;
  auto t0 = Clock::now();
  auto serial = run_corpus_serial(corpus, lexicon, config);
  double serial_s = seconds_since(t0);
  std::printf("serial  : %.3f s (%.1f ex/s)\n", serial_s,
              corpus.size() / serial_s);

  for (int jobs : {2, omp_get_max_threads()}) {
    auto t1 = Clock::now();
    auto parallel = run_corpus_parallel(corpus, lexicon, config, jobs);
    double par_s = seconds_since(t1);
    bool identical = parallel.size() == serial.size();
    for (size_t i = 0; identical && i < parallel.size(); ++i) {
      identical = parallel[i].lf == serial[i].lf &&
                  parallel[i].dg == serial[i].dg &&
                  parallel[i].round_trip == serial[i].round_trip;
    }
    std::printf("jobs=%-3d: %.3f s (%.1f ex/s, speedup %.2fx, match=%s)\n",
                jobs, par_s, corpus.size() / par_s, serial_s / par_s,
                identical ? "yes" : "NO");
    if (!identical) return 1;
  }
  return 0;
}
