#include <doctest.h>

#include <string>

#include <json.hpp>

#include "roundtable/error.hpp"
#include "roundtable/hash.hpp"
#include "roundtable/lexmetrics.hpp"
#include "roundtable/report.hpp"

#include "helpers.hpp"

using namespace rtb;
using namespace rtb::report;

namespace {

engine::Transcript with_finals(const std::string& id, int prompt_index,
                               const std::vector<std::string>& finals, int rounds = 1) {
  engine::Transcript t;
  t.discussion_id = id;
  t.item_id = id;
  t.prompt_index = prompt_index;
  t.rounds = rounds;
  for (std::size_t i = 0; i < finals.size(); ++i) {
    std::string agent = "agent" + std::to_string(i);
    t.agents.push_back({agent, "model" + std::to_string(i)});
    t.final_codes[agent] = finals[i];
    Utterance u;
    u.agent_id = agent;
    u.phase = Phase::synthesis;
    u.round = rounds + 1;
    u.raw_text = finals[i];
    u.summary = finals[i];
    t.utterances.push_back(u);
  }
  return t;
}

}  // namespace

TEST_CASE("final-round table averages rouge-l over pairs and discussions") {
  std::vector<engine::Transcript> transcripts;
  // Two k=3 discussions under prompt 0. Pair scores are hand-checkable.
  transcripts.push_back(
      with_finals("d1", 0, {"community mistrust", "community mistrust", "other thing"}));
  transcripts.push_back(
      with_finals("d2", 0, {"community mistrust", "community mistrust", "community mistrust"}));

  auto table = final_round_rouge_table(transcripts);
  REQUIRE(table.size() == 1);
  const RougeLSummaryCell& cell = table[0];
  CHECK(cell.prompt_index == 0);
  CHECK(cell.k == 3);
  CHECK(cell.rounds == 1);
  CHECK(cell.n_discussions == 2);
  // d1 pairs: 1.0, 0, 0; d2 pairs: 1.0 x3 -> avg 4/6.
  CHECK(cell.avg_final == doctest::Approx(4.0 / 6.0).epsilon(1e-12));
  CHECK(cell.max_final == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("with two agents the average equals the maximum exactly") {
  std::vector<engine::Transcript> transcripts = {
      with_finals("d1", 0, {"policy failure", "policy failure critique"})};
  auto table = final_round_rouge_table(transcripts);
  REQUIRE(table.size() == 1);
  CHECK(table[0].avg_final == table[0].max_final);  // bitwise: one pair only
  double expected = lexical::rouge("policy failure", "policy failure critique").rougeL_f;
  CHECK(table[0].avg_final == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("two-agent equality survives discussions with different scores") {
  // Same cell, one pair each, scores 0.8 and 0.0: a global maximum would
  // report 0.8 while the average sat at 0.4.
  std::vector<engine::Transcript> transcripts = {
      with_finals("d1", 0, {"policy failure", "policy failure critique"}),
      with_finals("d2", 0, {"alpha beta", "gamma delta"})};
  auto table = final_round_rouge_table(transcripts);
  REQUIRE(table.size() == 1);
  CHECK(table[0].n_discussions == 2);
  CHECK(table[0].avg_final == table[0].max_final);
  double s1 = lexical::rouge("policy failure", "policy failure critique").rougeL_f;
  CHECK(table[0].avg_final == doctest::Approx((s1 + 0.0) / 2.0).epsilon(1e-12));
}

TEST_CASE("the cell maximum averages per-discussion maxima") {
  // d1's best pair is 1.0, d2's best is 0.0; the cell reports their mean.
  std::vector<engine::Transcript> transcripts = {
      with_finals("d1", 0, {"community mistrust", "community mistrust", "other thing"}),
      with_finals("d2", 0, {"aa bb", "cc dd", "ee ff"})};
  auto table = final_round_rouge_table(transcripts);
  REQUIRE(table.size() == 1);
  CHECK(table[0].max_final == doctest::Approx(0.5).epsilon(1e-12));
  // avg: d1 mean = (1 + 0 + 0)/3, d2 mean = 0 -> (1/3 + 0)/2.
  CHECK(table[0].avg_final == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
}

TEST_CASE("table cells order by prompt, group size, then rounds") {
  std::vector<engine::Transcript> transcripts;
  transcripts.push_back(with_finals("d1", 1, {"x", "x"}, 2));
  transcripts.push_back(with_finals("d2", 0, {"x", "x", "x"}, 1));
  transcripts.push_back(with_finals("d3", 0, {"x", "x"}, 3));
  transcripts.push_back(with_finals("d4", 0, {"x", "x"}, 1));

  auto table = final_round_rouge_table(transcripts);
  REQUIRE(table.size() == 4);
  CHECK(table[0].prompt_index == 0);
  CHECK(table[0].k == 2);
  CHECK(table[0].rounds == 1);
  CHECK(table[1].k == 2);
  CHECK(table[1].rounds == 3);
  CHECK(table[2].k == 3);
  CHECK(table[3].prompt_index == 1);
}

TEST_CASE("incomplete or single-coded discussions stay out of the table") {
  engine::Transcript broken = with_finals("d1", 0, {"a", "b"});
  broken.incomplete = true;
  engine::Transcript sparse = with_finals("d2", 0, {"only one"});
  std::vector<engine::Transcript> transcripts = {broken, sparse};
  CHECK(final_round_rouge_table(transcripts).empty());
}

TEST_CASE("round labels name the trajectory points") {
  CHECK(round_label(0, 4) == "R0");
  CHECK(round_label(4, 4) == "R4");
  CHECK(round_label(5, 4) == "Final");
}

TEST_CASE("id summaries read endpoints and the steepest drop") {
  MetricSeries series;
  series.metric_name = "twonn_id";
  series.rounds = 3;
  series.points = {{0, 7.9, 100}, {1, 3.1, 100}, {2, 3.4, 100}, {4, 0.6, 100}};

  IdSummary summary = summarize_id_series(series);
  CHECK(summary.initial_id == doctest::Approx(7.9));
  CHECK(summary.final_id == doctest::Approx(0.6));
  CHECK(summary.delta == doctest::Approx(-7.3));
  CHECK(summary.steepest_drop == doctest::Approx(-4.8));
  CHECK(summary.drop_round == "R1");

  // Ties keep the first occurrence.
  MetricSeries tie;
  tie.rounds = 2;
  tie.points = {{0, 5.0, 10}, {1, 3.0, 10}, {2, 1.0, 10}, {3, 1.0, 10}};
  CHECK(summarize_id_series(tie).drop_round == "R1");
  CHECK(summarize_id_series(tie).steepest_drop == doctest::Approx(-2.0));

  MetricSeries flat;
  flat.rounds = 1;
  flat.points = {{0, 2.0, 10}};
  try {
    summarize_id_series(flat);
    FAIL("expected nothing_to_compare");
  } catch (const Error& e) {
    CHECK(e.code() == "nothing_to_compare");
  }
}

TEST_CASE("values render with fixed six-decimal precision") {
  CHECK(format_value(0.0) == "0.000000");
  CHECK(format_value(1.0) == "1.000000");
  CHECK(format_value(2.0 / 3.0) == "0.666667");
  CHECK(format_value(-0.5) == "-0.500000");
  CHECK(format_value(7.941) == "7.941000");
}

TEST_CASE("exporter writes byte-stable csv artifacts and a sorted manifest") {
  TempDir dir("report");
  std::string out = dir.file("analysis");
  {
    Exporter exporter(out);
    exporter.write_table("z_last.csv", {"round", "value"}, {{"0", "1.000000"}});
    exporter.write_table("a_first.csv", {"text", "n"},
                         {{"say \"hi\", twice", "2"}, {"line\nbreak", "3"}});
    Manifest manifest = exporter.finalize();
    REQUIRE(manifest.artifacts.size() == 2);
    CHECK(manifest.artifacts[0].name == "a_first.csv");  // sorted on finalize
    CHECK(manifest.artifacts[0].rows == 2);
    CHECK(manifest.artifacts[1].name == "z_last.csv");
    CHECK(manifest.artifacts[1].rows == 1);
  }

  // Quoted fields survive the escape; files end with a newline.
  std::string table = read_text(out + "/a_first.csv");
  CHECK(table == "text,n\n\"say \"\"hi\"\", twice\",2\n\"line\nbreak\",3\n");

  // The manifest hash matches the bytes on disk.
  auto manifest_doc = nlohmann::json::parse(read_text(out + "/manifest.json"));
  REQUIRE(manifest_doc["artifacts"].size() == 2);
  CHECK(manifest_doc["artifacts"][0]["artifact"] == "a_first.csv");
  CHECK(manifest_doc["artifacts"][0]["sha256"] == sha256_hex(table));
  CHECK(manifest_doc["artifacts"][0]["rows"] == 2);

  // A second exporter over the same inputs reproduces every byte.
  std::string manifest_once = read_text(out + "/manifest.json");
  {
    Exporter exporter(out);
    exporter.write_table("z_last.csv", {"round", "value"}, {{"0", "1.000000"}});
    exporter.write_table("a_first.csv", {"text", "n"},
                         {{"say \"hi\", twice", "2"}, {"line\nbreak", "3"}});
    exporter.finalize();
  }
  CHECK(read_text(out + "/manifest.json") == manifest_once);
  CHECK(read_text(out + "/a_first.csv") == table);

  // No artifacts still yields a well-formed manifest.
  Exporter empty(dir.file("empty"));
  Manifest none = empty.finalize();
  CHECK(none.artifacts.empty());
  auto empty_doc = nlohmann::json::parse(read_text(dir.file("empty") + "/manifest.json"));
  CHECK(empty_doc["artifacts"].empty());
}
