#include "qdg/qdmr.hpp"

#include "qdg/errors.hpp"
#include "qdg/text.hpp"

namespace qdg {

std::vector<int> QdmrStep::references() const {
  std::vector<int> refs;
  for (const auto& tok : tokens) {
    if (is_reference_token(tok)) refs.push_back(reference_index(tok));
  }
  return refs;
}

Qdmr parse_qdmr_text(const std::string& text) {
  Qdmr qdmr;
  std::string current;
  std::vector<std::string> parts;
  for (char c : text) {
    if (c == ';') {
      parts.push_back(current);
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  parts.push_back(current);

  for (const auto& part : parts) {
    std::vector<std::string> tokens = tokenize(part);
    if (!tokens.empty() && tokens.front() == "return") {
      tokens.erase(tokens.begin());
    }
    if (tokens.empty()) continue;  // trailing ";" is tolerated
    qdmr.steps.push_back(QdmrStep{std::move(tokens)});
  }
  if (qdmr.steps.empty()) {
    throw QdgError(ErrorKind::EmptyDecomposition, "no steps in decomposition");
  }
  for (size_t i = 0; i < qdmr.steps.size(); ++i) {
    for (int ref : qdmr.steps[i].references()) {
      if (ref < 1 || static_cast<size_t>(ref) >= i + 1) {
        throw QdgError(ErrorKind::MalformedReference,
                       "step " + std::to_string(i + 1) + " references #" +
                           std::to_string(ref));
      }
    }
  }
  return qdmr;
}

}  // namespace qdg
