#include <doctest.h>

#include <cmath>

#include "roundtable/core.hpp"
#include "roundtable/error.hpp"
#include "roundtable/hash.hpp"

using namespace rtb;

TEST_CASE("tokenize lowercases and splits on punctuation runs") {
  CHECK(tokenize("The cat, sat!") == std::vector<Token>{"the", "cat", "sat"});
  CHECK(tokenize("Clearly-wrong") == std::vector<Token>{"clearly", "wrong"});
  CHECK(tokenize("") == std::vector<Token>{});
  CHECK(tokenize("...---...") == std::vector<Token>{});
  CHECK(tokenize("  a  b  ") == std::vector<Token>{"a", "b"});
  CHECK(tokenize("don't stop") == std::vector<Token>{"don", "t", "stop"});
  CHECK(tokenize("x42 7y") == std::vector<Token>{"x42", "7y"});
}

TEST_CASE("tokenize keeps multi-byte characters intact") {
  auto tokens = tokenize("caf\xc3\xa9 au lait");
  REQUIRE(tokens.size() == 3);
  CHECK(tokens[0] == "caf\xc3\xa9");
  CHECK(tokens[1] == "au");
  CHECK(tokens[2] == "lait");
}

TEST_CASE("tokenize is idempotent over its own join") {
  auto join = [](const std::vector<Token>& tokens) {
    std::string text;
    for (const auto& t : tokens) {
      if (!text.empty()) text.push_back(' ');
      text += t;
    }
    return text;
  };
  for (const std::string sample :
       {"The  QUICK-brown fox; jumps... over 2 lazy dogs!", "a,b,,c", "Hello?!  World"}) {
    auto once = tokenize(sample);
    CHECK(tokenize(join(once)) == once);
  }
}

TEST_CASE("cosine matches the hand-computed value") {
  EmbeddingVector a = make_embedding({1.0, 0.0}, "test");
  EmbeddingVector b = make_embedding({1.0, 1.0}, "test");
  CHECK(cosine(a, b) == doctest::Approx(0.7071067812).epsilon(1e-9));
  CHECK(cosine(a, a) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("cosine clamps rounding spill into [-1, 1]") {
  EmbeddingVector a = make_embedding({0.1, 0.2, 0.3}, "test");
  CHECK(cosine(a, a) <= 1.0);
  EmbeddingVector c = make_embedding({-0.1, -0.2, -0.3}, "test");
  CHECK(cosine(a, c) >= -1.0);
  CHECK(cosine(a, c) == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("cosine rejects mismatched and zero inputs") {
  EmbeddingVector a = make_embedding({1.0, 0.0}, "test");
  EmbeddingVector b = make_embedding({1.0, 0.0, 0.0}, "test");
  EmbeddingVector zero = make_embedding({0.0, 0.0}, "test");
  CHECK_THROWS_WITH_AS(cosine(a, b), doctest::Contains("dimensions differ"), Error);
  try {
    cosine(a, zero);
    FAIL("expected zero_vector");
  } catch (const Error& e) {
    CHECK(e.code() == "zero_vector");
  }
}

TEST_CASE("phase names round-trip") {
  for (Phase phase : {Phase::initial, Phase::refinement, Phase::synthesis}) {
    CHECK(phase_from_name(phase_name(phase)) == phase);
  }
  CHECK_THROWS_AS(phase_from_name("afterparty"), Error);
}

TEST_CASE("sha256 matches the published test vectors") {
  CHECK(sha256_hex("") ==
        "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(sha256_hex("abcdbcdecdefdefgefghfghighijhijkijkljklmklmnlmnomnopnopq") ==
        "248d6a61d20638b8e5c026930c3e6039a33ce45964ff2167f6ecedd419db06c1");
  // One block boundary case: 55 bytes forces the length into a second block.
  CHECK(sha256_hex(std::string(55, 'a')) ==
        "9f4390f8d30c2dd92ec9f095b65e2b9ae9b0a925a5258e241c9f1e910f734318");
  CHECK(sha256_hex(std::string(1000000, 'a')) ==
        "cdc76e5c9914fb9281a1c7e284d73e67f1809a48a497200e046d39ccc7112cd0");
}

TEST_CASE("splitmix stream is stable across runs") {
  SplitMix a(42), b(42);
  for (int i = 0; i < 100; ++i) {
    CHECK(a.next_u64() == b.next_u64());
  }
  SplitMix c(42);
  for (int i = 0; i < 1000; ++i) {
    double u = c.next_unit();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
  SplitMix d(7);
  for (int i = 0; i < 1000; ++i) {
    CHECK(d.next_below(10) < 10);
  }
}

TEST_CASE("fnv1a64 differs on order and content") {
  CHECK(fnv1a64("ab") != fnv1a64("ba"));
  CHECK(fnv1a64("") != fnv1a64(" "));
  CHECK(fnv1a64("same") == fnv1a64("same"));
}
