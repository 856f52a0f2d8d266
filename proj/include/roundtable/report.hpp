#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "roundtable/engine.hpp"

namespace rtb::report {

struct SlicePoint {
  int round = 0;
  double value = 0.0;
  std::size_t n_samples = 0;
};

// One per-round trajectory within a grid cell. `scope` is "pooled" or an
// agent/model identity; rounds are strictly increasing but may have gaps
// (a round that could not be computed is simply absent).
struct MetricSeries {
  std::string metric_name;
  int k = 0;
  int rounds = 0;
  std::string scope = "pooled";
  std::vector<SlicePoint> points;
};

// One final-round agreement cell: ROUGE-L F1 over the unordered final-code
// pairs of every complete discussion with this (prompt, k, rounds).
// avg_final is the per-discussion pair mean averaged over discussions;
// max_final is the per-discussion pair maximum averaged over discussions.
struct RougeLSummaryCell {
  int prompt_index = 0;
  int k = 0;
  int rounds = 0;
  double avg_final = 0.0;
  double max_final = 0.0;
  std::size_t n_discussions = 0;
};

// Cells ordered by (prompt_index, k, rounds). Transcripts flagged incomplete
// are ignored. With k == 2 each discussion has one pair, so its mean and max
// coincide and avg_final equals max_final exactly.
std::vector<RougeLSummaryCell> final_round_rouge_table(
    const std::vector<engine::Transcript>& transcripts);

struct IdSummary {
  double initial_id = 0.0;
  double final_id = 0.0;
  double delta = 0.0;          // final - initial
  double steepest_drop = 0.0;  // most negative consecutive difference
  std::string drop_round;      // label of the round the steepest drop lands on
};

// Reads the trajectory endpoints and the steepest between-round drop from a
// pooled series. Labels: "R0".."R<rounds>" and "Final" for round rounds+1.
// Throws nothing_to_compare when the series has fewer than 2 points.
IdSummary summarize_id_series(const MetricSeries& series);

// Round label used in summaries and rendered reports.
std::string round_label(int round, int rounds);

// Fixed-precision rendering used by every CSV cell (6 decimal places).
std::string format_value(double value);

struct Artifact {
  std::string name;       // file name within the analysis directory
  std::size_t rows = 0;   // data rows, excluding the header
  std::string sha256;
};

struct Manifest {
  std::vector<Artifact> artifacts;  // sorted by name
};

// Writes CSV artifacts (LF line endings, header first, atomic) plus a
// manifest.json listing name, row count and content hash of every artifact.
// Identical inputs produce byte-identical files on every platform.
class Exporter {
 public:
  explicit Exporter(std::string out_dir);

  // Writes `name` (e.g. "rouge_k3_r4.csv") from pre-rendered cells.
  void write_table(const std::string& name, const std::vector<std::string>& header,
                   const std::vector<std::vector<std::string>>& rows);

  // Writes manifest.json and returns the manifest.
  Manifest finalize();

  const std::string& out_dir() const { return out_dir_; }

 private:
  std::string out_dir_;
  std::vector<Artifact> artifacts_;
};

}  // namespace rtb::report
