#include <doctest.h>

#include <algorithm>
#include <set>

#include "roundtable/csv.hpp"
#include "roundtable/error.hpp"
#include "roundtable/ingest.hpp"

#include "helpers.hpp"

using namespace rtb;

TEST_CASE("csv parser handles quoting, embedded delimiters and newlines") {
  csv::Table table = csv::parse(
      "id,text,score\n"
      "1,\"hello, world\",0.5\n"
      "2,\"he said \"\"hi\"\"\",1.0\n"
      "3,\"line one\nline two\",0.25\r\n"
      "4,plain,\n");
  REQUIRE(table.header == std::vector<std::string>{"id", "text", "score"});
  REQUIRE(table.rows.size() == 4);
  CHECK(table.rows[0][1] == "hello, world");
  CHECK(table.rows[1][1] == "he said \"hi\"");
  CHECK(table.rows[2][1] == "line one\nline two");
  CHECK(table.rows[3][2] == "");
  CHECK(table.column("score") == std::size_t(2));
  CHECK(!table.column("missing").has_value());
}

TEST_CASE("csv parser flags unterminated quotes and skips blank lines") {
  CHECK_THROWS_AS(csv::parse("a,b\n\"open,1\n"), Error);
  csv::Table table = csv::parse("h1,h2\n\na,b\n\n");
  CHECK(table.rows.size() == 1);
}

TEST_CASE("csv escape round-trips through the parser") {
  for (const std::string field :
       {std::string("plain"), std::string("with,comma"), std::string("with \"quote\""),
        std::string("multi\nline"), std::string("")}) {
    csv::Table table = csv::parse("h\n" + csv::escape_field(field) + "\n");
    if (field.empty()) {
      CHECK(table.rows.empty());  // a lone empty field is a blank line
    } else {
      REQUIRE(table.rows.size() == 1);
      CHECK(table.rows[0][0] == field);
    }
  }
}

TEST_CASE("count_words counts maximal whitespace-separated runs") {
  CHECK(ingest::count_words("") == 0);
  CHECK(ingest::count_words("   ") == 0);
  CHECK(ingest::count_words("one") == 1);
  CHECK(ingest::count_words("  spaced   out  words ") == 3);
  CHECK(ingest::count_words("tabs\tand\nnewlines") == 3);
}

namespace {

ingest::LoadResult load_sample(const TempDir& dir) {
  write_text(dir.file("comments.csv"),
             "comment_id,body,disagreement\n"
             "c1,This policy is unfair to drivers,0.9\n"
             "c2,,0.5\n"
             "c3,\"Strongly agree, the fees help transit\",0.7\n"
             "c4,   ,0.2\n"
             "c5,Short,not-a-number\n");
  ingest::LoadOptions options;
  options.text_column = "body";
  options.score_column = "disagreement";
  options.id_column = "comment_id";
  return ingest::load_comments(dir.file("comments.csv"), options);
}

}  // namespace

TEST_CASE("load_comments keeps text rows and counts empties") {
  TempDir dir("ingest");
  ingest::LoadResult result = load_sample(dir);
  CHECK(result.report.rows_read == 5);
  CHECK(result.report.rows_kept == 3);
  CHECK(result.report.rows_dropped_empty == 2);
  REQUIRE(result.set.items.size() == 3);
  CHECK(result.set.items[0].id == "c1");
  CHECK(result.set.items[0].word_count == 6);
  CHECK(result.set.items[0].disagreement_score == doctest::Approx(0.9));
  CHECK(result.set.items[1].text == "Strongly agree, the fees help transit");
  CHECK(!result.set.items[2].disagreement_score.has_value());  // unparseable score
}

TEST_CASE("load_comments falls back to row ordinals without an id column") {
  TempDir dir("ingest");
  write_text(dir.file("plain.csv"), "text\nalpha\nbeta\n");
  ingest::LoadOptions options;
  options.text_column = "text";
  ingest::LoadResult result = ingest::load_comments(dir.file("plain.csv"), options);
  REQUIRE(result.set.items.size() == 2);
  CHECK(result.set.items[0].id == "row-1");
  CHECK(result.set.items[1].id == "row-2");
}

TEST_CASE("load_comments reports missing columns and files") {
  TempDir dir("ingest");
  write_text(dir.file("bad.csv"), "a,b\n1,2\n");
  ingest::LoadOptions options;
  options.text_column = "text";
  try {
    ingest::load_comments(dir.file("bad.csv"), options);
    FAIL("expected column_not_found");
  } catch (const Error& e) {
    CHECK(e.code() == "column_not_found");
  }
  try {
    ingest::load_comments(dir.file("nonexistent.csv"), options);
    FAIL("expected io_error");
  } catch (const Error& e) {
    CHECK(e.code() == "io_error");
  }
}

namespace {

ingest::ItemSet make_items(std::size_t n) {
  ingest::ItemSet set;
  for (std::size_t i = 0; i < n; ++i) {
    ingest::CommentRecord record;
    record.id = "i" + std::to_string(i);
    record.text = "word word word";
    record.word_count = 3;
    record.disagreement_score = double(i) / double(n);
    set.items.push_back(record);
  }
  return set;
}

}  // namespace

TEST_CASE("filter_items applies word and score thresholds") {
  ingest::ItemSet set = make_items(4);
  set.items[1].word_count = 1;
  set.items[2].disagreement_score.reset();

  ingest::FilterOptions options;
  options.min_words = 2;
  ingest::ItemSet filtered = ingest::filter_items(set, options);
  CHECK(filtered.items.size() == 3);

  options.min_score = 0.5;
  filtered = ingest::filter_items(set, options);
  // Drops the short row, the score-less row, and everything under 0.5.
  REQUIRE(filtered.items.size() == 1);
  CHECK(filtered.items[0].id == "i3");
}

TEST_CASE("uniform sampling is deterministic and order-preserving") {
  ingest::ItemSet set = make_items(20);
  ingest::FilterOptions options;
  options.sample_n = 5;
  options.seed = 99;

  ingest::ItemSet first = ingest::filter_items(set, options);
  ingest::ItemSet second = ingest::filter_items(set, options);
  REQUIRE(first.items.size() == 5);
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(first.items[i].id == second.items[i].id);
  }
  // Membership ordered as in the source set.
  std::vector<std::string> ids;
  for (const auto& item : first.items) ids.push_back(item.id);
  CHECK(std::is_sorted(ids.begin(), ids.end(), [](const std::string& a, const std::string& b) {
    return std::stoi(a.substr(1)) < std::stoi(b.substr(1));
  }));

  options.seed = 100;
  ingest::ItemSet other = ingest::filter_items(set, options);
  std::set<std::string> first_ids, other_ids;
  for (const auto& item : first.items) first_ids.insert(item.id);
  for (const auto& item : other.items) other_ids.insert(item.id);
  CHECK(first_ids != other_ids);  // a different seed draws a different subset
}

TEST_CASE("top_score sampling keeps the highest-scoring rows") {
  ingest::ItemSet set = make_items(10);
  ingest::FilterOptions options;
  options.sample_n = 3;
  options.sample_mode = ingest::SampleMode::top_score;
  ingest::ItemSet sampled = ingest::filter_items(set, options);
  REQUIRE(sampled.items.size() == 3);
  std::set<std::string> ids;
  for (const auto& item : sampled.items) ids.insert(item.id);
  CHECK(ids == std::set<std::string>{"i7", "i8", "i9"});
}

TEST_CASE("oversampling the population is an error") {
  ingest::ItemSet set = make_items(3);
  ingest::FilterOptions options;
  options.sample_n = 4;
  try {
    ingest::filter_items(set, options);
    FAIL("expected sample_too_large");
  } catch (const Error& e) {
    CHECK(e.code() == "sample_too_large");
  }
}
