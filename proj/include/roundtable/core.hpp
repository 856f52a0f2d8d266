#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace rtb {

// A token is lowercase, non-empty, and contains no separator characters.
using Token = std::string;

enum class Phase { initial, refinement, synthesis };

const char* phase_name(Phase phase);
Phase phase_from_name(const std::string& name);  // invalid_argument on unknown name

struct Utterance {
  std::string agent_id;
  Phase phase = Phase::initial;
  int round = 0;  // 0 = initial, 1..R = refinement, R+1 = synthesis
  std::string raw_text;
  std::string summary;
};

struct Code {
  std::string text;
  std::string agent_id;
  int round = 0;
};

struct EmbeddingVector {
  std::vector<double> values;
  std::size_t dim = 0;  // always equals values.size()
  std::string provider_id;
};

EmbeddingVector make_embedding(std::vector<double> values, std::string provider_id);

// Lowercases ASCII letters and splits on maximal runs of separator bytes.
// Separators are ASCII characters that are neither letters nor digits; bytes
// >= 0x80 are treated as word characters so multi-byte UTF-8 sequences pass
// through intact. Order-preserving; never emits empty tokens.
std::vector<Token> tokenize(const std::string& text);

// Cosine similarity clamped to [-1, 1]. Throws dim_mismatch when dimensions
// differ and zero_vector when either input has zero norm.
double cosine(const EmbeddingVector& a, const EmbeddingVector& b);
double cosine(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace rtb
