#include "roundtable/core.hpp"

#include <algorithm>
#include <cmath>

#include "roundtable/error.hpp"

namespace rtb {

const char* phase_name(Phase phase) {
  switch (phase) {
    case Phase::initial:
      return "initial";
    case Phase::refinement:
      return "refinement";
    case Phase::synthesis:
      return "synthesis";
  }
  return "initial";
}

Phase phase_from_name(const std::string& name) {
  if (name == "initial") return Phase::initial;
  if (name == "refinement") return Phase::refinement;
  if (name == "synthesis") return Phase::synthesis;
  fail("invalid_argument", "unknown phase name: '" + name + "'");
}

EmbeddingVector make_embedding(std::vector<double> values, std::string provider_id) {
  EmbeddingVector v;
  v.dim = values.size();
  v.values = std::move(values);
  v.provider_id = std::move(provider_id);
  return v;
}

namespace {

inline bool is_word_byte(unsigned char c) {
  if (c >= 0x80) return true;  // keep UTF-8 sequences intact
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
}

inline char lower_ascii(unsigned char c) {
  return (c >= 'A' && c <= 'Z') ? char(c - 'A' + 'a') : char(c);
}

}  // namespace

std::vector<Token> tokenize(const std::string& text) {
  std::vector<Token> tokens;
  Token current;
  for (unsigned char c : text) {
    if (is_word_byte(c)) {
      current.push_back(lower_ascii(c));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

double cosine(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) {
    fail("dim_mismatch", "cosine: dimensions differ (" + std::to_string(a.size()) +
                             " vs " + std::to_string(b.size()) + ")");
  }
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) {
    fail("zero_vector", "cosine: zero-norm input");
  }
  double value = dot / (std::sqrt(na) * std::sqrt(nb));
  return std::clamp(value, -1.0, 1.0);
}

double cosine(const EmbeddingVector& a, const EmbeddingVector& b) {
  return cosine(a.values, b.values);
}

}  // namespace rtb
