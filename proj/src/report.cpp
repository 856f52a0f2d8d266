#include "roundtable/report.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <map>
#include <tuple>

#include <json.hpp>

#include "roundtable/csv.hpp"
#include "roundtable/error.hpp"
#include "roundtable/hash.hpp"
#include "roundtable/lexmetrics.hpp"

namespace rtb::report {

std::vector<RougeLSummaryCell> final_round_rouge_table(
    const std::vector<engine::Transcript>& transcripts) {
  // Both statistics aggregate per discussion first, then average across
  // discussions; a single global max would break the k == 2 avg == max
  // equality whenever per-discussion scores differ.
  struct Accumulator {
    double mean_sum = 0.0;  // per-discussion pair means
    double max_sum = 0.0;   // per-discussion pair maxima
    std::size_t discussions = 0;
  };
  std::map<std::tuple<int, int, int>, Accumulator> cells;

  for (const auto& t : transcripts) {
    if (t.incomplete) continue;
    std::vector<const std::string*> finals;
    for (const auto& agent : t.agents) {
      auto it = t.final_codes.find(agent.agent_id);
      if (it != t.final_codes.end()) finals.push_back(&it->second);
    }
    if (finals.size() < 2) continue;
    double sum = 0.0;
    double best = 0.0;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < finals.size(); ++i) {
      for (std::size_t j = i + 1; j < finals.size(); ++j) {
        double score = lexical::rouge(*finals[i], *finals[j]).rougeL_f;
        sum += score;
        best = std::max(best, score);
        ++pairs;
      }
    }
    auto key = std::make_tuple(t.prompt_index, int(t.agents.size()), t.rounds);
    Accumulator& acc = cells[key];
    acc.mean_sum += sum / double(pairs);
    acc.max_sum += best;
    ++acc.discussions;
  }

  std::vector<RougeLSummaryCell> table;
  for (const auto& [key, acc] : cells) {
    RougeLSummaryCell cell;
    cell.prompt_index = std::get<0>(key);
    cell.k = std::get<1>(key);
    cell.rounds = std::get<2>(key);
    cell.avg_final = acc.mean_sum / double(acc.discussions);
    cell.max_final = acc.max_sum / double(acc.discussions);
    cell.n_discussions = acc.discussions;
    table.push_back(cell);
  }
  return table;  // map iteration is already (prompt, k, rounds) ordered
}

std::string round_label(int round, int rounds) {
  if (round == rounds + 1) return "Final";
  return "R" + std::to_string(round);
}

IdSummary summarize_id_series(const MetricSeries& series) {
  if (series.points.size() < 2) {
    fail("nothing_to_compare", "id summary needs at least 2 points in the series");
  }
  IdSummary summary;
  summary.initial_id = series.points.front().value;
  summary.final_id = series.points.back().value;
  summary.delta = summary.final_id - summary.initial_id;

  // Steepest drop between adjacent present points; first occurrence wins.
  double steepest = std::numeric_limits<double>::infinity();
  int drop_round = series.points[1].round;
  for (std::size_t i = 1; i < series.points.size(); ++i) {
    double diff = series.points[i].value - series.points[i - 1].value;
    if (diff < steepest) {
      steepest = diff;
      drop_round = series.points[i].round;
    }
  }
  summary.steepest_drop = steepest;
  summary.drop_round = round_label(drop_round, series.rounds);
  return summary;
}

std::string format_value(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.6f", value);
  return buffer;
}

Exporter::Exporter(std::string out_dir) : out_dir_(std::move(out_dir)) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir_, ec);
  if (ec) fail("io_error", "cannot create analysis directory: " + out_dir_);
}

void Exporter::write_table(const std::string& name, const std::vector<std::string>& header,
                           const std::vector<std::vector<std::string>>& rows) {
  std::string content;
  auto append_row = [&content](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i > 0) content.push_back(',');
      content += csv::escape_field(cells[i]);
    }
    content.push_back('\n');
  };
  append_row(header);
  for (const auto& row : rows) append_row(row);

  csv::write_file_atomic((std::filesystem::path(out_dir_) / name).string(), content);
  artifacts_.push_back({name, rows.size(), sha256_hex(content)});
}

Manifest Exporter::finalize() {
  std::sort(artifacts_.begin(), artifacts_.end(),
            [](const Artifact& a, const Artifact& b) { return a.name < b.name; });
  nlohmann::json doc;
  doc["artifacts"] = nlohmann::json::array();
  for (const auto& artifact : artifacts_) {
    doc["artifacts"].push_back({{"artifact", artifact.name},
                                {"rows", artifact.rows},
                                {"sha256", artifact.sha256}});
  }
  std::string payload = doc.dump(2);
  payload.push_back('\n');
  csv::write_file_atomic((std::filesystem::path(out_dir_) / "manifest.json").string(), payload);
  Manifest manifest;
  manifest.artifacts = artifacts_;
  return manifest;
}

}  // namespace rtb::report
