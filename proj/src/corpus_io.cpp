#include "qdg/corpus_io.hpp"

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "qdg/errors.hpp"
#include "qdg/text.hpp"

namespace qdg {

namespace {

using nlohmann::ordered_json;

constexpr int kSchemaVersion = 1;

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw QdgError(ErrorKind::InvalidInput, "cannot write " + path);
  }
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw QdgError(ErrorKind::InvalidInput, "cannot read " + path);
  }
  return in;
}

void write_header(std::ostream& out, const std::string& schema) {
  out << "{\"schema\":\"" << schema << "\",\"version\":" << kSchemaVersion
      << "}\n";
}

// Reads and checks the header line, returns the line counter start.
void check_header(std::istream& in, const std::string& schema) {
  std::string line;
  if (!std::getline(in, line)) {
    throw QdgError(ErrorKind::ParseError, "empty file, missing header");
  }
  ordered_json j;
  try {
    j = ordered_json::parse(line);
  } catch (const std::exception& e) {
    throw QdgError(ErrorKind::ParseError, std::string("header: ") + e.what());
  }
  if (!j.contains("schema") || j["schema"] != schema) {
    throw QdgError(ErrorKind::SchemaVersionMismatch,
                   "expected schema " + schema);
  }
  if (!j.contains("version") || j["version"].get<int>() != kSchemaVersion) {
    throw QdgError(ErrorKind::SchemaVersionMismatch,
                   "unsupported version for " + schema);
  }
}

ordered_json parse_line(const std::string& line, int lineno) {
  try {
    return ordered_json::parse(line);
  } catch (const std::exception& e) {
    throw QdgError(ErrorKind::ParseError,
                   "line " + std::to_string(lineno) + ": " + e.what());
  }
}

}  // namespace

std::vector<CorpusExample> read_break_csv(const std::string& path) {
  auto in = open_in(path);
  return read_break_csv(in);
}

std::vector<CorpusExample> read_break_csv(std::istream& in) {
  // Character-level CSV scan so quoted fields may hold separators/newlines.
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool any = false;
  int ch;
  while ((ch = in.get()) != EOF) {
    char c = static_cast<char>(ch);
    any = true;
    if (quoted) {
      if (c == '"') {
        if (in.peek() == '"') {
          field.push_back('"');
          in.get();
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      row.push_back(field);
      field.clear();
    } else if (c == '\n') {
      row.push_back(field);
      field.clear();
      rows.push_back(row);
      row.clear();
    } else if (c != '\r') {
      field.push_back(c);
    }
  }
  if (quoted) {
    throw QdgError(ErrorKind::MalformedCsv,
                   "line " + std::to_string(rows.size() + 1) +
                       ": unterminated quote");
  }
  if (!field.empty() || !row.empty()) {
    row.push_back(field);
    rows.push_back(row);
  }
  if (!any || rows.empty()) {
    throw QdgError(ErrorKind::MalformedCsv, "empty file");
  }

  const auto& header = rows.front();
  int id_col = -1, question_col = -1, decomposition_col = -1;
  for (size_t c = 0; c < header.size(); ++c) {
    if (header[c] == "question_id") id_col = static_cast<int>(c);
    if (header[c] == "question_text") question_col = static_cast<int>(c);
    if (header[c] == "decomposition") decomposition_col = static_cast<int>(c);
  }
  if (id_col < 0 || question_col < 0 || decomposition_col < 0) {
    throw QdgError(ErrorKind::MissingColumn,
                   "need question_id, question_text and decomposition");
  }

  std::vector<CorpusExample> out;
  for (size_t r = 1; r < rows.size(); ++r) {
    const auto& cells = rows[r];
    if (cells.size() == 1 && cells[0].empty()) continue;  // trailing newline
    if (cells.size() != header.size()) {
      throw QdgError(ErrorKind::MalformedCsv,
                     "line " + std::to_string(r + 1) + ": expected " +
                         std::to_string(header.size()) + " fields, got " +
                         std::to_string(cells.size()));
    }
    out.push_back({cells[id_col], cells[question_col],
                   cells[decomposition_col]});
  }
  return out;
}

namespace {

ordered_json lf_to_json(const LogicalForm& lf) {
  ordered_json steps = ordered_json::array();
  for (const auto& step : lf.steps) {
    ordered_json js;
    js["op"] = operator_name(step.op);
    js["props"] = step.properties;
    ordered_json args = ordered_json::array();
    for (const auto& [name, value] : step.args) {
      ordered_json ja;
      ja["name"] = arg_name_string(name);
      std::vector<std::string> tokens;
      std::vector<int> refs;
      for (const auto& tok : value) {
        tokens.push_back(tok.text);
        if (tok.is_ref()) refs.push_back(tok.ref_index);
      }
      ja["tokens"] = tokens;
      ja["refs"] = refs;
      args.push_back(ja);
    }
    js["args"] = args;
    steps.push_back(js);
  }
  ordered_json out;
  out["steps"] = steps;
  return out;
}

LogicalForm lf_from_json(const ordered_json& j, int lineno) {
  LogicalForm lf;
  for (const auto& js : j.at("steps")) {
    LogicalFormStep step;
    if (!operator_from_name(js.at("op").get<std::string>(), &step.op)) {
      throw QdgError(ErrorKind::ParseError,
                     "line " + std::to_string(lineno) + ": unknown operator");
    }
    for (const auto& p : js.at("props")) {
      step.properties.push_back(p.get<std::string>());
    }
    for (const auto& ja : js.at("args")) {
      ArgName name;
      if (!arg_name_from_string(ja.at("name").get<std::string>(), &name)) {
        throw QdgError(ErrorKind::ParseError,
                       "line " + std::to_string(lineno) +
                           ": unknown argument name");
      }
      ArgValue value;
      for (const auto& t : ja.at("tokens")) {
        std::string text = t.get<std::string>();
        if (is_reference_token(text)) {
          value.push_back(ArgToken::ref(reference_index(text)));
        } else {
          value.push_back(ArgToken::word(text));
        }
      }
      step.args.emplace_back(name, std::move(value));
    }
    lf.steps.push_back(std::move(step));
  }
  return lf;
}

}  // namespace

void write_lf_jsonl(const std::string& path,
                    const std::vector<LfRecord>& records) {
  auto out = open_out(path);
  write_header(out, "qdg.lf");
  for (const auto& rec : records) {
    ordered_json j;
    j["id"] = rec.id;
    j["steps"] = lf_to_json(rec.lf)["steps"];
    out << j.dump() << "\n";
  }
}

std::vector<LfRecord> read_lf_jsonl(const std::string& path) {
  auto in = open_in(path);
  check_header(in, "qdg.lf");
  std::vector<LfRecord> out;
  std::string line;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    ordered_json j = parse_line(line, lineno);
    LfRecord rec;
    rec.id = j.at("id").get<std::string>();
    rec.lf = lf_from_json(j, lineno);
    out.push_back(std::move(rec));
  }
  return out;
}

void write_alignment_jsonl(const std::string& path,
                           const std::vector<AlignmentRecord>& records) {
  auto out = open_out(path);
  write_header(out, "qdg.alignment");
  for (const auto& rec : records) {
    ordered_json j;
    j["id"] = rec.id;
    ordered_json pairs = ordered_json::array();
    for (const auto& p : rec.alignment.pairs) {
      pairs.push_back({p.q, p.step, p.step_token});
    }
    j["pairs"] = pairs;
    out << j.dump() << "\n";
  }
}

std::vector<AlignmentRecord> read_alignment_jsonl(const std::string& path) {
  auto in = open_in(path);
  check_header(in, "qdg.alignment");
  std::vector<AlignmentRecord> out;
  std::string line;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    ordered_json j = parse_line(line, lineno);
    AlignmentRecord rec;
    rec.id = j.at("id").get<std::string>();
    for (const auto& p : j.at("pairs")) {
      rec.alignment.pairs.push_back(
          {p.at(0).get<int>(), p.at(1).get<int>(), p.at(2).get<int>()});
    }
    out.push_back(std::move(rec));
  }
  return out;
}

void write_dg_jsonl(const std::string& path,
                    const std::vector<DgRecord>& records) {
  auto out = open_out(path);
  write_header(out, "qdg.dg");
  for (const auto& rec : records) {
    ordered_json j;
    j["id"] = rec.id;
    j["n"] = rec.dg.token_count;
    j["tokens"] = rec.tokens;
    ordered_json edges = ordered_json::array();
    for (const auto& e : rec.dg.edges) {
      edges.push_back({e.src, e.dst, render_edge_tag(e.tag)});
    }
    j["edges"] = edges;
    out << j.dump() << "\n";
  }
}

std::vector<DgRecord> read_dg_jsonl(const std::string& path) {
  auto in = open_in(path);
  check_header(in, "qdg.dg");
  std::vector<DgRecord> out;
  std::string line;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    ordered_json j = parse_line(line, lineno);
    DgRecord rec;
    rec.id = j.at("id").get<std::string>();
    rec.dg.token_count = j.at("n").get<int>();
    for (const auto& t : j.at("tokens")) {
      rec.tokens.push_back(t.get<std::string>());
    }
    for (const auto& e : j.at("edges")) {
      rec.dg.edges.push_back({e.at(0).get<int>(), e.at(1).get<int>(),
                              parse_edge_tag(e.at(2).get<std::string>())});
    }
    out.push_back(std::move(rec));
  }
  return out;
}

namespace {

const char kB64Alphabet[] =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

std::string format_float9(float v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", static_cast<double>(v));
  return buf;
}

}  // namespace

std::string base64_encode(const unsigned char* data, size_t len) {
  std::string out;
  out.reserve((len + 2) / 3 * 4);
  for (size_t i = 0; i < len; i += 3) {
    unsigned int chunk = data[i] << 16;
    if (i + 1 < len) chunk |= data[i + 1] << 8;
    if (i + 2 < len) chunk |= data[i + 2];
    out.push_back(kB64Alphabet[(chunk >> 18) & 0x3F]);
    out.push_back(kB64Alphabet[(chunk >> 12) & 0x3F]);
    out.push_back(i + 1 < len ? kB64Alphabet[(chunk >> 6) & 0x3F] : '=');
    out.push_back(i + 2 < len ? kB64Alphabet[chunk & 0x3F] : '=');
  }
  return out;
}

std::vector<unsigned char> base64_decode(const std::string& text) {
  auto value_of = [](char c) -> int {
    if (c >= 'A' && c <= 'Z') return c - 'A';
    if (c >= 'a' && c <= 'z') return c - 'a' + 26;
    if (c >= '0' && c <= '9') return c - '0' + 52;
    if (c == '+') return 62;
    if (c == '/') return 63;
    return -1;
  };
  std::vector<unsigned char> out;
  int buffer = 0, bits = 0;
  for (char c : text) {
    if (c == '=') break;
    int v = value_of(c);
    if (v < 0) {
      throw QdgError(ErrorKind::ParseError, "invalid base64 payload");
    }
    buffer = (buffer << 6) | v;
    bits += 6;
    if (bits >= 8) {
      bits -= 8;
      out.push_back(static_cast<unsigned char>((buffer >> bits) & 0xFF));
    }
  }
  return out;
}

void write_probs_jsonl(const std::string& path,
                       const std::vector<ProbTensor>& tensors,
                       bool debug_arrays) {
  auto out = open_out(path);
  write_header(out, "qdg.probs");
  for (const auto& t : tensors) {
    ordered_json head;
    head["id"] = t.id;
    head["n"] = t.n;
    head["tags"] = t.tags;
    if (!t.tokens.empty()) head["tokens"] = t.tokens;
    std::string prefix = head.dump();
    prefix.pop_back();  // strip the closing brace; payload is appended
    if (!debug_arrays) {
      // Little-endian float32, row-major (i * n + j) * |tags| + t.
      std::vector<unsigned char> bytes(t.data.size() * 4);
      for (size_t k = 0; k < t.data.size(); ++k) {
        float v = t.data[k];
        unsigned char b[4];
        std::memcpy(b, &v, 4);
        bytes[k * 4 + 0] = b[0];
        bytes[k * 4 + 1] = b[1];
        bytes[k * 4 + 2] = b[2];
        bytes[k * 4 + 3] = b[3];
      }
      out << prefix << ",\"probs_b64\":\""
          << base64_encode(bytes.data(), bytes.size()) << "\"}\n";
    } else {
      out << prefix << ",\"probs\":[";
      for (int i = 0; i < t.n; ++i) {
        if (i) out << ",";
        out << "[";
        for (int j = 0; j < t.n; ++j) {
          if (j) out << ",";
          out << "[";
          for (int k = 0; k < t.tag_count(); ++k) {
            if (k) out << ",";
            out << format_float9(t.prob(i, j, k));
          }
          out << "]";
        }
        out << "]";
      }
      out << "]}\n";
    }
  }
}

std::vector<ProbTensor> read_probs_jsonl(const std::string& path) {
  auto in = open_in(path);
  check_header(in, "qdg.probs");
  std::vector<ProbTensor> out;
  std::string line;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    ordered_json j = parse_line(line, lineno);
    ProbTensor t;
    t.id = j.at("id").get<std::string>();
    t.n = j.at("n").get<int>();
    for (const auto& tag : j.at("tags")) {
      t.tags.push_back(tag.get<std::string>());
    }
    if (j.contains("tokens")) {
      for (const auto& tok : j["tokens"]) {
        t.tokens.push_back(tok.get<std::string>());
      }
    }
    const size_t expected =
        static_cast<size_t>(t.n) * t.n * t.tags.size();
    if (j.contains("probs_b64")) {
      auto bytes = base64_decode(j["probs_b64"].get<std::string>());
      if (bytes.size() != expected * 4) {
        throw QdgError(ErrorKind::ParseError,
                       "line " + std::to_string(lineno) +
                           ": payload size mismatch");
      }
      t.data.resize(expected);
      for (size_t k = 0; k < expected; ++k) {
        float v;
        std::memcpy(&v, bytes.data() + k * 4, 4);
        t.data[k] = v;
      }
    } else if (j.contains("probs")) {
      t.data.reserve(expected);
      for (const auto& row : j["probs"]) {
        for (const auto& cell : row) {
          for (const auto& v : cell) {
            t.data.push_back(v.get<float>());
          }
        }
      }
      if (t.data.size() != expected) {
        throw QdgError(ErrorKind::ParseError,
                       "line " + std::to_string(lineno) +
                           ": array size mismatch");
      }
    } else {
      throw QdgError(ErrorKind::ParseError,
                     "line " + std::to_string(lineno) +
                         ": missing probs payload");
    }
    out.push_back(std::move(t));
  }
  return out;
}

}  // namespace qdg
