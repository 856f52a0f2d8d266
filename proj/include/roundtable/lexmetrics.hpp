#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "roundtable/core.hpp"

namespace rtb::lexical {

struct RougeScores {
  double rouge1_f = 0.0;
  double rouge2_f = 0.0;
  double rougeL_f = 0.0;
};

// Unigram/bigram overlap F1 (clipped multiset counts) and LCS F1 over
// tokenize()d inputs. Conventions: both inputs tokenize to empty -> all 1.0;
// exactly one side empty -> all 0.0; single-token inputs have no bigrams, so
// rouge2 is 0 unless both inputs are empty.
RougeScores rouge(const std::string& candidate, const std::string& reference);

struct StabilityScores {
  double exact_match = 0.0;     // 1.0 iff whitespace-trimmed texts are identical
  double token_retention = 0.0; // |tokens(curr) multiset-cap tokens(prev)| / max(1, |tokens(prev)|)
};

StabilityScores stability(const Code& previous, const Code& current);

// TF-IDF vectors with raw term counts, idf = ln((1+N)/(1+df)) + 1, L2
// normalization. The vocabulary and document frequencies come from `corpus`.
class TfIdfVectorizer {
 public:
  explicit TfIdfVectorizer(const std::vector<std::string>& corpus);

  // L2-normalized tf-idf vector over the fitted vocabulary; all-zero when the
  // document shares no vocabulary terms.
  std::vector<double> transform(const std::string& document) const;

  std::size_t vocabulary_size() const { return vocabulary_.size(); }

 private:
  std::map<Token, std::size_t> vocabulary_;
  std::vector<double> idf_;
};

// Mean cosine between consecutive-round outputs of one agent, vectorized
// against `corpus`. `outputs_previous[i]` pairs with `outputs_current[i]`.
// Pairs where either vector is all-zero are skipped; returns the mean over
// the remaining pairs. Throws nothing_to_compare when no pair survives or
// the inputs are empty/mismatched.
double self_consistency(const std::vector<std::string>& outputs_previous,
                        const std::vector<std::string>& outputs_current,
                        const std::vector<std::string>& corpus);

struct Lexicon {
  std::vector<std::vector<Token>> certainty;  // tokenized phrases
  std::vector<std::vector<Token>> hedging;
};

// The built-in marker phrase lists.
Lexicon default_lexicon();

// Loads a lexicon file: `[certainty]` / `[hedging]` section headers, one
// phrase per line, `#` comments and blank lines ignored. Throws
// lexicon_parse_error on a phrase outside any section or an unknown header,
// and lexicon_conflict when a phrase appears in both sections.
Lexicon load_lexicon(const std::string& path);

// (|certainty hits| - |hedging hits|) / token count, in [-1, 1]; 0.0 for
// empty input. Matching scans left to right over the joint lexicon, always
// taking the longest phrase match at the current position (non-overlapping).
double confidence(const std::string& utterance, const Lexicon& lexicon);

}  // namespace rtb::lexical
