#include "roundtable/lexmetrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "roundtable/csv.hpp"
#include "roundtable/error.hpp"

namespace rtb::lexical {

namespace {

double f1(double precision, double recall) {
  double sum = precision + recall;
  if (sum == 0.0) return 0.0;
  return 2.0 * precision * recall / sum;
}

// Clipped multiset overlap of n-grams divided by candidate/reference sizes.
double ngram_f1(const std::vector<Token>& candidate, const std::vector<Token>& reference,
                std::size_t n) {
  if (candidate.size() < n || reference.size() < n) return 0.0;
  std::map<std::vector<Token>, std::size_t> reference_counts;
  for (std::size_t i = 0; i + n <= reference.size(); ++i) {
    reference_counts[{reference.begin() + i, reference.begin() + i + n}]++;
  }
  std::size_t overlap = 0;
  std::map<std::vector<Token>, std::size_t> used;
  for (std::size_t i = 0; i + n <= candidate.size(); ++i) {
    std::vector<Token> gram(candidate.begin() + i, candidate.begin() + i + n);
    auto it = reference_counts.find(gram);
    if (it != reference_counts.end() && used[gram] < it->second) {
      ++used[gram];
      ++overlap;
    }
  }
  std::size_t cand_total = candidate.size() - n + 1;
  std::size_t ref_total = reference.size() - n + 1;
  return f1(double(overlap) / double(cand_total), double(overlap) / double(ref_total));
}

std::size_t lcs_length(const std::vector<Token>& a, const std::vector<Token>& b) {
  if (a.empty() || b.empty()) return 0;
  std::vector<std::size_t> prev(b.size() + 1, 0), curr(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      curr[j] = (a[i - 1] == b[j - 1]) ? prev[j - 1] + 1 : std::max(prev[j], curr[j - 1]);
    }
    std::swap(prev, curr);
  }
  return prev[b.size()];
}

std::string trim(const std::string& s) {
  std::size_t begin = 0, end = s.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(s[begin]))) ++begin;
  while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1]))) --end;
  return s.substr(begin, end - begin);
}

}  // namespace

RougeScores rouge(const std::string& candidate, const std::string& reference) {
  std::vector<Token> cand = tokenize(candidate);
  std::vector<Token> ref = tokenize(reference);
  RougeScores scores;
  if (cand.empty() && ref.empty()) {
    scores.rouge1_f = scores.rouge2_f = scores.rougeL_f = 1.0;
    return scores;
  }
  if (cand.empty() || ref.empty()) {
    return scores;  // all zero
  }
  scores.rouge1_f = ngram_f1(cand, ref, 1);
  scores.rouge2_f = ngram_f1(cand, ref, 2);
  std::size_t lcs = lcs_length(cand, ref);
  scores.rougeL_f =
      f1(double(lcs) / double(cand.size()), double(lcs) / double(ref.size()));
  return scores;
}

StabilityScores stability(const Code& previous, const Code& current) {
  StabilityScores scores;
  scores.exact_match = trim(previous.text) == trim(current.text) ? 1.0 : 0.0;

  std::vector<Token> prev_tokens = tokenize(previous.text);
  std::vector<Token> curr_tokens = tokenize(current.text);
  std::map<Token, std::size_t> prev_counts;
  for (const auto& t : prev_tokens) ++prev_counts[t];
  std::size_t retained = 0;
  for (const auto& t : curr_tokens) {
    auto it = prev_counts.find(t);
    if (it != prev_counts.end() && it->second > 0) {
      --it->second;
      ++retained;
    }
  }
  scores.token_retention =
      double(retained) / double(std::max<std::size_t>(1, prev_tokens.size()));
  return scores;
}

TfIdfVectorizer::TfIdfVectorizer(const std::vector<std::string>& corpus) {
  std::map<Token, std::size_t> document_frequency;
  for (const auto& doc : corpus) {
    std::vector<Token> tokens = tokenize(doc);
    std::sort(tokens.begin(), tokens.end());
    tokens.erase(std::unique(tokens.begin(), tokens.end()), tokens.end());
    for (const auto& t : tokens) ++document_frequency[t];
  }
  std::size_t index = 0;
  for (const auto& [token, df] : document_frequency) {
    vocabulary_[token] = index++;
  }
  idf_.resize(vocabulary_.size());
  double n_docs = double(corpus.size());
  for (const auto& [token, df] : document_frequency) {
    idf_[vocabulary_[token]] = std::log((1.0 + n_docs) / (1.0 + double(df))) + 1.0;
  }
}

std::vector<double> TfIdfVectorizer::transform(const std::string& document) const {
  std::vector<double> vec(vocabulary_.size(), 0.0);
  for (const auto& token : tokenize(document)) {
    auto it = vocabulary_.find(token);
    if (it != vocabulary_.end()) vec[it->second] += 1.0;
  }
  double norm_sq = 0.0;
  for (std::size_t i = 0; i < vec.size(); ++i) {
    vec[i] *= idf_[i];
    norm_sq += vec[i] * vec[i];
  }
  if (norm_sq > 0.0) {
    double inv = 1.0 / std::sqrt(norm_sq);
    for (auto& v : vec) v *= inv;
  }
  return vec;
}

double self_consistency(const std::vector<std::string>& outputs_previous,
                        const std::vector<std::string>& outputs_current,
                        const std::vector<std::string>& corpus) {
  if (outputs_previous.empty() || outputs_previous.size() != outputs_current.size()) {
    fail("nothing_to_compare", "self_consistency: no aligned output pairs");
  }
  TfIdfVectorizer vectorizer(corpus);
  double sum = 0.0;
  std::size_t used = 0;
  for (std::size_t i = 0; i < outputs_previous.size(); ++i) {
    std::vector<double> a = vectorizer.transform(outputs_previous[i]);
    std::vector<double> b = vectorizer.transform(outputs_current[i]);
    auto nonzero = [](const std::vector<double>& v) {
      return std::any_of(v.begin(), v.end(), [](double x) { return x != 0.0; });
    };
    if (!nonzero(a) || !nonzero(b)) continue;
    double dot = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) dot += a[j] * b[j];
    sum += std::clamp(dot, -1.0, 1.0);  // vectors are unit-norm already
    ++used;
  }
  if (used == 0) {
    fail("nothing_to_compare", "self_consistency: all pairs degenerate");
  }
  return sum / double(used);
}

namespace {

std::vector<std::vector<Token>> tokenize_phrases(const std::vector<std::string>& phrases) {
  std::vector<std::vector<Token>> out;
  out.reserve(phrases.size());
  for (const auto& p : phrases) out.push_back(tokenize(p));
  return out;
}

}  // namespace

Lexicon default_lexicon() {
  static const std::vector<std::string> certainty = {
      "definitely",   "must",        "undoubtedly",    "always",
      "clearly",      "certainly",   "absolutely",     "without a doubt",
      "unquestionably", "conclusively", "positively",   "with certainty",
      "no doubt",     "undeniably",  "strongly",
  };
  static const std::vector<std::string> hedging = {
      "might",      "possibly",  "could",      "likely",
      "seems",      "apparently", "perhaps",   "maybe",
      "presumably", "arguably",  "supposedly", "relatively",
      "somewhat",   "in theory", "reportedly", "one might argue",
      "from what i gather", "i guess",
  };
  Lexicon lex;
  lex.certainty = tokenize_phrases(certainty);
  lex.hedging = tokenize_phrases(hedging);
  return lex;
}

Lexicon load_lexicon(const std::string& path) {
  std::string content = csv::slurp_file(path);
  std::istringstream lines(content);
  std::string line;
  Lexicon lex;
  std::vector<std::vector<Token>>* section = nullptr;
  std::size_t line_no = 0;
  while (std::getline(lines, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string trimmed = trim(line);
    if (trimmed.empty() || trimmed.front() == '#') continue;
    if (trimmed == "[certainty]") {
      section = &lex.certainty;
      continue;
    }
    if (trimmed == "[hedging]") {
      section = &lex.hedging;
      continue;
    }
    if (trimmed.front() == '[' && trimmed.back() == ']') {
      fail("lexicon_parse_error",
           path + ":" + std::to_string(line_no) + ": unknown section " + trimmed);
    }
    if (section == nullptr) {
      fail("lexicon_parse_error",
           path + ":" + std::to_string(line_no) + ": phrase before any section header");
    }
    std::vector<Token> phrase = tokenize(trimmed);
    if (phrase.empty()) {
      fail("lexicon_parse_error",
           path + ":" + std::to_string(line_no) + ": phrase has no tokens");
    }
    section->push_back(std::move(phrase));
  }
  for (const auto& c : lex.certainty) {
    if (std::find(lex.hedging.begin(), lex.hedging.end(), c) != lex.hedging.end()) {
      std::string joined;
      for (const auto& t : c) {
        if (!joined.empty()) joined.push_back(' ');
        joined += t;
      }
      fail("lexicon_conflict", path + ": phrase in both sections: '" + joined + "'");
    }
  }
  return lex;
}

double confidence(const std::string& utterance, const Lexicon& lexicon) {
  std::vector<Token> tokens = tokenize(utterance);
  if (tokens.empty()) return 0.0;

  // Joint longest-match table: phrase tokens -> +1 (certainty) / -1 (hedging).
  std::map<std::vector<Token>, int> joint;
  std::size_t max_len = 1;
  for (const auto& p : lexicon.certainty) {
    joint[p] = 1;
    max_len = std::max(max_len, p.size());
  }
  for (const auto& p : lexicon.hedging) {
    joint.emplace(p, -1);  // certainty wins a (disallowed) duplicate
    max_len = std::max(max_len, p.size());
  }

  long long certainty_hits = 0, hedging_hits = 0;
  std::size_t i = 0;
  while (i < tokens.size()) {
    std::size_t longest = std::min(max_len, tokens.size() - i);
    bool matched = false;
    for (std::size_t len = longest; len >= 1; --len) {
      std::vector<Token> window(tokens.begin() + i, tokens.begin() + i + len);
      auto it = joint.find(window);
      if (it != joint.end()) {
        (it->second > 0 ? certainty_hits : hedging_hits) += 1;
        i += len;
        matched = true;
        break;
      }
    }
    if (!matched) ++i;
  }
  return double(certainty_hits - hedging_hits) / double(tokens.size());
}

}  // namespace rtb::lexical
