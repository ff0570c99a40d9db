#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qdg/align.hpp"
#include "qdg/graphs.hpp"
#include "qdg/logical_form.hpp"

namespace qdg {

struct CorpusExample {
  std::string id;
  std::string question;
  std::string decomposition;
};

// BREAK-style CSV with question_id, question_text and decomposition columns.
// RFC-4180 quoting; embedded ";" and "," survive inside quoted fields.
std::vector<CorpusExample> read_break_csv(const std::string& path);
std::vector<CorpusExample> read_break_csv(std::istream& in);

// All artifact files are JSONL: a header line {"schema": ..., "version": 1}
// followed by one record per line. Serialization is deterministic (fixed key
// order, 9 significant digits for floats).

struct LfRecord {
  std::string id;
  LogicalForm lf;
};

void write_lf_jsonl(const std::string& path, const std::vector<LfRecord>& records);
std::vector<LfRecord> read_lf_jsonl(const std::string& path);

struct AlignmentRecord {
  std::string id;
  Alignment alignment;
};

void write_alignment_jsonl(const std::string& path,
                           const std::vector<AlignmentRecord>& records);
std::vector<AlignmentRecord> read_alignment_jsonl(const std::string& path);

struct DgRecord {
  std::string id;
  std::vector<std::string> tokens;  // augmented question tokens
  DependencyGraph dg;
};

void write_dg_jsonl(const std::string& path, const std::vector<DgRecord>& records);
std::vector<DgRecord> read_dg_jsonl(const std::string& path);

// Probability tensors: row-major float32 little-endian payload in base64, or
// the equivalent nested-array debug form when debug_arrays is set.
void write_probs_jsonl(const std::string& path,
                       const std::vector<ProbTensor>& tensors,
                       bool debug_arrays = false);
std::vector<ProbTensor> read_probs_jsonl(const std::string& path);

std::string base64_encode(const unsigned char* data, size_t len);
std::vector<unsigned char> base64_decode(const std::string& text);

}  // namespace qdg
