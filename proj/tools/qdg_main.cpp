// Command-line front end: batch conversions between decompositions, logical
// forms, dependency graphs and edge-probability tensors.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "qdg/corpus_io.hpp"
#include "qdg/errors.hpp"
#include "qdg/pipeline.hpp"

using namespace qdg;

namespace {

// Exit codes: 0 clean, 1 per-example failures, 2 fatal.
constexpr int kOk = 0;
constexpr int kPartial = 1;
constexpr int kFatal = 2;

struct CommonOptions {
  std::string lexicon_dir;
  std::string config_path;
  std::string json_errors;
  int jobs = 1;
  uint64_t seed = 0;  // accepted for compatibility; nothing consumes it
};

std::map<std::string, std::string> parse_config_file(const std::string& path) {
  std::map<std::string, std::string> out;
  std::ifstream in(path);
  if (!in) {
    throw QdgError(ErrorKind::InvalidInput, "cannot open config " + path);
  }
  std::string line;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      size_t b = s.find_first_not_of(" \t\r");
      size_t e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (!key.empty()) out[key] = value;
  }
  return out;
}

std::string lexicon_directory(const CommonOptions& common,
                              const std::map<std::string, std::string>& cfg) {
  if (!common.lexicon_dir.empty()) return common.lexicon_dir;
  if (auto it = cfg.find("lexicon_dir"); it != cfg.end()) return it->second;
  if (const char* env = std::getenv("QDG_LEXICON_DIR")) return env;
  return QDG_DATA_DIR;
}

PipelineConfig pipeline_config(const std::map<std::string, std::string>& cfg) {
  PipelineConfig config;
  auto geti = [&](const char* key, auto& slot) {
    if (auto it = cfg.find(key); it != cfg.end()) {
      slot = static_cast<std::decay_t<decltype(slot)>>(std::stoll(it->second));
    }
  };
  geti("k_dum", config.k_dum);
  geti("k_dup", config.k_dup);
  geti("c_min", config.weights.c_min);
  geti("c_unique", config.weights.c_unique);
  geti("c_seq", config.weights.c_seq);
  geti("c_exact", config.weights.c_exact);
  geti("c_ref", config.weights.c_ref);
  geti("d_max", config.weights.d_max);
  geti("time_limit_ms", config.ilp.time_limit_ms);
  return config;
}

void write_error_stream(const std::string& path,
                        const std::vector<ExampleResult>& results) {
  if (path.empty()) return;
  std::ofstream out(path);
  for (const auto& r : results) {
    if (r.error.empty()) continue;
    nlohmann::ordered_json j;
    j["id"] = r.id;
    j["error"] = r.error;
    out << j.dump() << "\n";
  }
}

int finish(const std::vector<ExampleResult>& results,
           const CommonOptions& common) {
  write_error_stream(common.json_errors, results);
  for (const auto& r : results) {
    if (!r.error.empty()) return kPartial;
  }
  return kOk;
}

void add_common(CLI::App* cmd, CommonOptions& common) {
  cmd->add_option("--lexicon", common.lexicon_dir,
                  "Directory holding lexicon.json");
  cmd->add_option("--config", common.config_path,
                  "key=value configuration file");
  cmd->add_option("--json-errors", common.json_errors,
                  "Write per-example failures as JSONL");
  cmd->add_option("--jobs", common.jobs, "Worker threads (per example)");
  cmd->add_option("--seed", common.seed, "Accepted for compatibility");
}

struct LoadedSetup {
  Lexicon lexicon;
  PipelineConfig config;
};

LoadedSetup load_setup(const CommonOptions& common) {
  std::map<std::string, std::string> cfg;
  if (!common.config_path.empty()) cfg = parse_config_file(common.config_path);
  LoadedSetup setup{Lexicon::load_file(lexicon_directory(common, cfg) +
                                       "/lexicon.json"),
                    pipeline_config(cfg)};
  return setup;
}

int cmd_qdmr2lf(const std::string& input, const std::string& output,
                bool report_failures, const CommonOptions& common) {
  auto setup = load_setup(common);
  setup.config.build_graph = false;
  auto examples = read_break_csv(input);
  auto results =
      run_corpus_parallel(examples, setup.lexicon, setup.config, common.jobs);

  std::vector<LfRecord> records;
  int converted = 0;
  for (const auto& r : results) {
    if (r.lf.has_value()) {
      records.push_back({r.id, *r.lf});
      ++converted;
    } else if (report_failures) {
      std::cout << r.id << "\t" << r.error << "\n";
    }
  }
  write_lf_jsonl(output, records);
  std::printf("converted %d/%zu (%.2f%%)\n", converted, results.size(),
              results.empty() ? 0.0 : 100.0 * converted / results.size());
  return finish(results, common);
}

int cmd_lfem(const std::string& pred_path, const std::string& gold_path,
             bool per_example, const CommonOptions& common) {
  auto setup = load_setup(common);
  auto preds = read_lf_jsonl(pred_path);
  auto golds = read_lf_jsonl(gold_path);
  std::map<std::string, const LogicalForm*> by_id;
  for (const auto& p : preds) by_id[p.id] = &p.lf;

  std::vector<std::optional<LogicalForm>> aligned;
  std::vector<LogicalForm> gold_lfs;
  for (const auto& g : golds) {
    gold_lfs.push_back(g.lf);
    auto it = by_id.find(g.id);
    if (it == by_id.end()) {
      aligned.push_back(std::nullopt);
    } else {
      aligned.push_back(*it->second);
    }
    if (per_example) {
      bool hit = aligned.back().has_value() &&
                 lf_em(*aligned.back(), g.lf, setup.lexicon);
      std::cout << g.id << "\t" << (hit ? 1 : 0) << "\n";
    }
  }
  double score = corpus_lf_em(aligned, gold_lfs, setup.lexicon);
  std::printf("LF-EM: %.3f\n", score);
  return kOk;
}

int cmd_align(const std::string& input, const std::string& output,
              const std::string& weights_config, const CommonOptions& common) {
  CommonOptions patched = common;
  if (!weights_config.empty()) patched.config_path = weights_config;
  auto setup = load_setup(patched);
  auto examples = read_break_csv(input);

  std::vector<ExampleResult> results(examples.size());
  std::vector<AlignmentRecord> records(examples.size());
#pragma omp parallel for schedule(dynamic) num_threads(std::max(1, common.jobs))
  for (int i = 0; i < static_cast<int>(examples.size()); ++i) {
    results[i].id = examples[i].id;
    records[i].id = examples[i].id;
    try {
      Question q = Question::from_text(examples[i].question);
      Qdmr qdmr = parse_qdmr_text(examples[i].decomposition);
      AugmentedQuestion aug = augment_question(
          q, setup.lexicon, setup.config.k_dum, setup.config.k_dup);
      auto aligned = align(aug, qdmr, setup.lexicon, setup.config.weights,
                           setup.config.ilp);
      records[i].alignment = aligned.alignment;
      results[i].converted = true;
    } catch (const std::exception& e) {
      results[i].error = e.what();
    }
  }
  std::vector<AlignmentRecord> ok;
  for (size_t i = 0; i < records.size(); ++i) {
    if (results[i].error.empty()) ok.push_back(records[i]);
  }
  write_alignment_jsonl(output, ok);
  std::printf("aligned %zu/%zu\n", ok.size(), examples.size());
  return finish(results, common);
}

int cmd_qdmr2dg(const std::string& input, const std::string& output, int k_dum,
                int k_dup, const CommonOptions& common) {
  auto setup = load_setup(common);
  if (k_dum >= 0) setup.config.k_dum = k_dum;
  if (k_dup >= 0) setup.config.k_dup = k_dup;
  auto examples = read_break_csv(input);
  auto results =
      run_corpus_parallel(examples, setup.lexicon, setup.config, common.jobs);
  std::vector<DgRecord> records;
  for (const auto& r : results) {
    if (r.dg.has_value()) records.push_back({r.id, r.tokens, *r.dg});
  }
  write_dg_jsonl(output, records);
  std::printf("graphs %zu/%zu\n", records.size(), results.size());
  return finish(results, common);
}

int cmd_dg2lf(const std::string& input, const std::string& output,
              const std::string& mode, const CommonOptions& common) {
  auto setup = load_setup(common);
  auto records = read_dg_jsonl(input);
  std::vector<LfRecord> out;
  std::vector<ExampleResult> results(records.size());
  for (size_t i = 0; i < records.size(); ++i) {
    results[i].id = records[i].id;
    try {
      AugmentedQuestion aug = AugmentedQuestion::from_tokens(records[i].tokens);
      if (mode == "strict") {
        auto violations = validate_dg(records[i].dg, aug);
        if (!violations.empty()) {
          std::string joined;
          for (const auto& v : violations) {
            if (!joined.empty()) joined += ",";
            joined += v;
          }
          throw QdgError(ErrorKind::InvalidInput,
                         "constraint violations: " + joined);
        }
      }
      LogicalForm lf = sdg_to_lf(dg_to_sdg_soft(records[i].dg), aug);
      out.push_back({records[i].id, lf});
      results[i].converted = true;
    } catch (const std::exception& e) {
      results[i].error = e.what();
    }
  }
  write_lf_jsonl(output, out);
  std::printf("decoded %zu/%zu\n", out.size(), records.size());
  return finish(results, common);
}

int cmd_decode(const std::string& probs_path, const std::string& output,
               const std::string& method, int64_t time_limit_ms,
               const CommonOptions& common) {
  auto setup = load_setup(common);
  if (time_limit_ms > 0) setup.config.ilp.time_limit_ms = time_limit_ms;
  auto tensors = read_probs_jsonl(probs_path);
  std::vector<DgRecord> records(tensors.size());
  std::vector<ExampleResult> results(tensors.size());
  int timeouts = 0;
#pragma omp parallel for schedule(dynamic) num_threads(std::max(1, common.jobs)) \
    reduction(+ : timeouts)
  for (int i = 0; i < static_cast<int>(tensors.size()); ++i) {
    const auto& t = tensors[i];
    results[i].id = t.id;
    records[i].id = t.id;
    try {
      std::vector<std::string> tokens = t.tokens;
      if (tokens.empty()) tokens.assign(t.n, "w");
      AugmentedQuestion aug = AugmentedQuestion::from_tokens(tokens);
      records[i].tokens = tokens;
      if (method == "greedy") {
        records[i].dg = greedy_decode(t);
      } else {
        auto decoded = ilp_decode(t, aug, setup.config.ilp);
        records[i].dg = decoded.dg;
        if (decoded.status == IlpStatus::Timeout) {
          ++timeouts;
          results[i].error = "SolverTimeout: incumbent decode kept";
        }
      }
      results[i].converted = true;
    } catch (const std::exception& e) {
      results[i].error = e.what();
    }
  }
  std::vector<DgRecord> ok;
  for (size_t i = 0; i < records.size(); ++i) {
    if (results[i].converted) ok.push_back(records[i]);
  }
  write_dg_jsonl(output, ok);
  std::printf("decoded %zu/%zu (%d timeouts)\n", ok.size(), tensors.size(),
              timeouts);
  return finish(results, common);
}

int cmd_roundtrip(const std::string& input, bool stats,
                  const CommonOptions& common) {
  auto setup = load_setup(common);
  auto examples = read_break_csv(input);
  auto results =
      run_corpus_parallel(examples, setup.lexicon, setup.config, common.jobs);
  auto summary = summarize(results);
  std::printf("examples: %d\n", summary.total);
  std::printf("convertible: %d (%.2f%%)\n", summary.converted,
              100.0 * summary.conversion_rate());
  std::printf("self-match: %d/%d (%.2f%%)\n", summary.round_trip,
              summary.total, 100.0 * summary.round_trip_rate());
  if (stats) {
    std::map<std::string, int> failures;
    for (const auto& r : results) {
      if (!r.error.empty()) {
        failures[r.error.substr(0, r.error.find(':'))] += 1;
      } else if (!r.round_trip) {
        failures["SelfMismatch"] += 1;
      }
    }
    for (const auto& [kind, count] : failures) {
      std::printf("  %-24s %d\n", kind.c_str(), count);
    }
  }
  write_error_stream(common.json_errors, results);
  return summary.round_trip == summary.total ? kOk : kPartial;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Decomposition graphs toolkit"};
  app.require_subcommand(1);

  CommonOptions common;
  std::string input, output, pred, gold, mode = "soft", method = "ilp";
  std::string weights_config, probs_path;
  bool report_failures = false, per_example = false, stats = false;
  int k_dum = -1, k_dup = -1;
  int64_t time_limit_ms = 0;

  auto* qdmr2lf = app.add_subcommand(
      "qdmr2lf", "Convert decompositions (CSV) to logical forms");
  qdmr2lf->add_option("--input", input, "BREAK-style CSV")->required();
  qdmr2lf->add_option("--output", output, "LF JSONL")->required();
  qdmr2lf->add_flag("--report-failures", report_failures,
                    "Print failed example ids");
  add_common(qdmr2lf, common);

  auto* lfem = app.add_subcommand("lfem", "Score predictions against gold");
  lfem->add_option("--pred", pred, "Predicted LF JSONL")->required();
  lfem->add_option("--gold", gold, "Gold LF JSONL")->required();
  lfem->add_flag("--per-example", per_example, "Print one verdict per line");
  add_common(lfem, common);

  auto* align_cmd = app.add_subcommand("align", "Token alignment only");
  align_cmd->add_option("--input", input)->required();
  align_cmd->add_option("--output", output)->required();
  align_cmd->add_option("--weights-config", weights_config,
                        "key=value file with c_* weights");
  add_common(align_cmd, common);

  auto* qdmr2dg = app.add_subcommand(
      "qdmr2dg", "Convert decompositions to dependency graphs");
  qdmr2dg->add_option("--input", input)->required();
  qdmr2dg->add_option("--output", output)->required();
  qdmr2dg->add_option("--k-dum", k_dum, "Dummy token budget");
  qdmr2dg->add_option("--k-dup", k_dup, "Duplicate token budget");
  add_common(qdmr2dg, common);

  auto* dg2lf = app.add_subcommand("dg2lf", "Decode graphs to logical forms");
  dg2lf->add_option("--input", input)->required();
  dg2lf->add_option("--output", output)->required();
  dg2lf->add_option("--mode", mode, "soft|strict")
      ->check(CLI::IsMember({"soft", "strict"}));
  add_common(dg2lf, common);

  auto* decode = app.add_subcommand(
      "decode", "Decode probability tensors to dependency graphs");
  decode->add_option("--probs", probs_path)->required();
  decode->add_option("--output", output)->required();
  decode->add_option("--method", method, "greedy|ilp")
      ->check(CLI::IsMember({"greedy", "ilp"}));
  decode->add_option("--time-limit-ms", time_limit_ms);
  add_common(decode, common);

  auto* roundtrip = app.add_subcommand(
      "roundtrip", "Decomposition -> graph -> decomposition self check");
  roundtrip->add_option("--input", input)->required();
  roundtrip->add_flag("--stats", stats, "Failure breakdown");
  add_common(roundtrip, common);

  CLI11_PARSE(app, argc, argv);

  try {
    if (qdmr2lf->parsed()) {
      return cmd_qdmr2lf(input, output, report_failures, common);
    }
    if (lfem->parsed()) return cmd_lfem(pred, gold, per_example, common);
    if (align_cmd->parsed()) {
      return cmd_align(input, output, weights_config, common);
    }
    if (qdmr2dg->parsed()) {
      return cmd_qdmr2dg(input, output, k_dum, k_dup, common);
    }
    if (dg2lf->parsed()) return cmd_dg2lf(input, output, mode, common);
    if (decode->parsed()) {
      return cmd_decode(probs_path, output, method, time_limit_ms, common);
    }
    if (roundtrip->parsed()) return cmd_roundtrip(input, stats, common);
  } catch (const std::exception& e) {
    std::cerr << "fatal: " << e.what() << "\n";
    return kFatal;
  }
  return kFatal;
}
