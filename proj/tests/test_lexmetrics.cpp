#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "roundtable/error.hpp"
#include "roundtable/hash.hpp"
#include "roundtable/lexmetrics.hpp"

#include "helpers.hpp"

using namespace rtb;
using namespace rtb::lexical;

TEST_CASE("rouge matches the worked unigram example") {
  // Candidate tokens all appear in the 6-token reference: P = 4/4, R = 4/6.
  RougeScores scores =
      rouge("community mistrust of experts", "community mistrust of experts grows rapidly");
  CHECK(scores.rouge1_f == doctest::Approx(0.8).epsilon(1e-9));
  // All 3 candidate bigrams hit among the 5 reference bigrams.
  CHECK(scores.rouge2_f == doctest::Approx(0.75).epsilon(1e-9));
  CHECK(scores.rougeL_f == doctest::Approx(0.8).epsilon(1e-9));
}

TEST_CASE("rouge trivial conventions") {
  RougeScores same = rouge("Fees fund transit.", "fees fund transit");
  CHECK(same.rouge1_f == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(same.rouge2_f == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(same.rougeL_f == doctest::Approx(1.0).epsilon(1e-9));

  RougeScores disjoint = rouge("alpha beta", "gamma delta");
  CHECK(disjoint.rouge1_f == 0.0);
  CHECK(disjoint.rouge2_f == 0.0);
  CHECK(disjoint.rougeL_f == 0.0);

  RougeScores both_empty = rouge("", "  ...  ");
  CHECK(both_empty.rouge1_f == 1.0);
  CHECK(both_empty.rouge2_f == 1.0);
  CHECK(both_empty.rougeL_f == 1.0);

  RougeScores one_empty = rouge("", "text");
  CHECK(one_empty.rouge1_f == 0.0);
  CHECK(one_empty.rougeL_f == 0.0);

  // Single tokens have no bigrams: identical unigrams, rouge2 stays 0.
  RougeScores single = rouge("tax", "tax");
  CHECK(single.rouge1_f == 1.0);
  CHECK(single.rouge2_f == 0.0);
}

TEST_CASE("rouge clips repeated tokens") {
  // "the" appears twice in the candidate but once in the reference.
  RougeScores scores = rouge("the the cat", "the cat");
  // Overlap = 2 (one "the", one "cat"); P = 2/3, R = 2/2.
  CHECK(scores.rouge1_f == doctest::Approx(0.8).epsilon(1e-9));
}

TEST_CASE("rouge is symmetric and bounded on fuzzed pairs") {
  SplitMix rng(20250819);
  auto random_text = [&rng]() {
    std::string text;
    std::size_t words = rng.next_below(8);
    for (std::size_t w = 0; w < words; ++w) {
      if (w > 0) text.push_back(' ');
      std::size_t len = 1 + rng.next_below(4);
      for (std::size_t c = 0; c < len; ++c) {
        text.push_back(char('a' + rng.next_below(6)));
      }
    }
    return text;
  };
  for (int i = 0; i < 2000; ++i) {
    std::string a = random_text(), b = random_text();
    RougeScores ab = rouge(a, b);
    RougeScores ba = rouge(b, a);
    CHECK(ab.rouge1_f == doctest::Approx(ba.rouge1_f).epsilon(1e-12));
    CHECK(ab.rouge2_f == doctest::Approx(ba.rouge2_f).epsilon(1e-12));
    CHECK(ab.rougeL_f == doctest::Approx(ba.rougeL_f).epsilon(1e-12));
    for (double v : {ab.rouge1_f, ab.rouge2_f, ab.rougeL_f}) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
    // The LCS is a common subsequence, so it can never beat unigram overlap.
    CHECK(ab.rougeL_f <= ab.rouge1_f + 1e-12);
  }
}

TEST_CASE("stability trims before exact matching and counts retained tokens") {
  Code previous{"  Edge decay  ", "a", 1};
  Code current{"Edge decay", "a", 2};
  StabilityScores scores = stability(previous, current);
  CHECK(scores.exact_match == 1.0);
  CHECK(scores.token_retention == 1.0);

  scores = stability({"a b b c", "a", 1}, {"b c d", "a", 2});
  CHECK(scores.exact_match == 0.0);
  // Multiset intersection {b, c} over the 4 previous tokens.
  CHECK(scores.token_retention == doctest::Approx(0.5).epsilon(1e-12));

  scores = stability({"", "a", 1}, {"anything", "a", 2});
  CHECK(scores.exact_match == 0.0);
  CHECK(scores.token_retention == 0.0);  // max(1, 0) denominator guards /0

  scores = stability({"   ", "a", 1}, {"", "a", 2});
  CHECK(scores.exact_match == 1.0);  // both trim to nothing
}

TEST_CASE("tf-idf cosine matches the closed-form two-document value") {
  // Shared term "alpha" (df 2), distinct "beta"/"gamma" (df 1 each):
  // cos = 1 / (1 + (ln 1.5 + 1)^2).
  std::vector<std::string> corpus = {"alpha beta", "alpha gamma"};
  TfIdfVectorizer vectorizer(corpus);
  CHECK(vectorizer.vocabulary_size() == 3);
  std::vector<double> a = vectorizer.transform("alpha beta");
  std::vector<double> b = vectorizer.transform("alpha gamma");
  double dot = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) dot += a[i] * b[i];
  double expected = 1.0 / (1.0 + std::pow(std::log(1.5) + 1.0, 2.0));
  CHECK(dot == doctest::Approx(expected).epsilon(1e-9));

  // Unknown words vanish; vectors are unit length when non-empty.
  std::vector<double> c = vectorizer.transform("alpha unseen");
  double norm = 0.0;
  for (double v : c) norm += v * v;
  CHECK(norm == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("self_consistency averages aligned cosine pairs") {
  std::vector<std::string> corpus = {"rent control debate", "rent control policy",
                                     "zoning reform"};
  double identical = self_consistency({"rent control debate"}, {"rent control debate"}, corpus);
  CHECK(identical == doctest::Approx(1.0).epsilon(1e-9));

  try {
    self_consistency({}, {}, corpus);
    FAIL("expected nothing_to_compare");
  } catch (const Error& e) {
    CHECK(e.code() == "nothing_to_compare");
  }
  try {
    self_consistency({"a"}, {"a", "b"}, corpus);
    FAIL("expected nothing_to_compare");
  } catch (const Error& e) {
    CHECK(e.code() == "nothing_to_compare");
  }
  // Vocabulary-free documents vectorize to zero and are skipped.
  try {
    self_consistency({"unknown words"}, {"also unknown"}, corpus);
    FAIL("expected nothing_to_compare");
  } catch (const Error& e) {
    CHECK(e.code() == "nothing_to_compare");
  }
}

TEST_CASE("confidence scores the worked examples") {
  Lexicon lexicon = default_lexicon();
  CHECK(confidence("This is clearly correct.", lexicon) ==
        doctest::Approx(0.25).epsilon(1e-12));
  CHECK(confidence("might possibly", lexicon) == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(confidence("the cat sat", lexicon) == 0.0);
  CHECK(confidence("", lexicon) == 0.0);
  CHECK(confidence("...", lexicon) == 0.0);
}

TEST_CASE("confidence takes the longest match and never re-reads tokens") {
  Lexicon lexicon = default_lexicon();
  // "without a doubt" consumes three tokens as one certainty hit.
  CHECK(confidence("Definitely without a doubt", lexicon) ==
        doctest::Approx(0.5).epsilon(1e-12));
  // "one might argue" absorbs "might"; only one hedging hit over 4 tokens.
  CHECK(confidence("one might argue this", lexicon) ==
        doctest::Approx(-0.25).epsilon(1e-12));
  // Case and punctuation fold away before matching.
  CHECK(confidence("CLEARLY!!!", lexicon) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("confidence stays within [-1, 1] on fuzzed blends") {
  Lexicon lexicon = default_lexicon();
  std::vector<std::string> vocab = {"clearly", "might",  "possibly", "budget",
                                    "doubt",   "always", "a",        "without",
                                    "transit", "maybe"};
  SplitMix rng(424242);
  for (int i = 0; i < 2000; ++i) {
    std::string text;
    std::size_t words = rng.next_below(12);
    for (std::size_t w = 0; w < words; ++w) {
      if (w > 0) text.push_back(' ');
      text += vocab[rng.next_below(vocab.size())];
    }
    double value = confidence(text, lexicon);
    CHECK(value >= -1.0);
    CHECK(value <= 1.0);
  }
}

TEST_CASE("lexicon files parse sections, comments and blank lines") {
  TempDir dir("lexicon");
  write_text(dir.file("markers.txt"),
             "# custom marker lists\n"
             "[certainty]\n"
             "beyond question\n"
             "surely\n"
             "\n"
             "[hedging]\n"
             "sort of  \n"
             "# a comment inside a section\n"
             "kind of\n");
  Lexicon lexicon = load_lexicon(dir.file("markers.txt"));
  REQUIRE(lexicon.certainty.size() == 2);
  REQUIRE(lexicon.hedging.size() == 2);
  CHECK(lexicon.certainty[0] == std::vector<Token>{"beyond", "question"});
  CHECK(lexicon.hedging[0] == std::vector<Token>{"sort", "of"});

  CHECK(confidence("surely but sort of unsure", lexicon) ==
        doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("lexicon files reject malformed and conflicting content") {
  TempDir dir("lexicon");
  write_text(dir.file("no_section.txt"), "surely\n");
  try {
    load_lexicon(dir.file("no_section.txt"));
    FAIL("expected lexicon_parse_error");
  } catch (const Error& e) {
    CHECK(e.code() == "lexicon_parse_error");
  }

  write_text(dir.file("bad_header.txt"), "[conviction]\nsurely\n");
  try {
    load_lexicon(dir.file("bad_header.txt"));
    FAIL("expected lexicon_parse_error");
  } catch (const Error& e) {
    CHECK(e.code() == "lexicon_parse_error");
  }

  write_text(dir.file("conflict.txt"), "[certainty]\nsurely\n[hedging]\nSURELY\n");
  try {
    load_lexicon(dir.file("conflict.txt"));
    FAIL("expected lexicon_conflict");
  } catch (const Error& e) {
    CHECK(e.code() == "lexicon_conflict");
  }
}

TEST_CASE("default lexicon lists are disjoint and non-empty") {
  Lexicon lexicon = default_lexicon();
  CHECK(lexicon.certainty.size() == 15);
  CHECK(lexicon.hedging.size() == 18);
  for (const auto& phrase : lexicon.certainty) {
    CHECK(std::find(lexicon.hedging.begin(), lexicon.hedging.end(), phrase) ==
          lexicon.hedging.end());
  }
}
