#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "roundtable/config.hpp"
#include "roundtable/engine.hpp"
#include "roundtable/report.hpp"

namespace rtb::analysis {

// The metric selectors cmd-line callers may pass.
const std::set<std::string>& known_metrics();

struct SimulateResult {
  engine::RunReport report;
  std::optional<ingest::LoadReport> load_report;  // present for dataset runs
  std::string output_dir;
};

// Loads items, expands the grid, runs every discussion, and persists
// transcripts plus `run_report.json` under the configured output directory.
SimulateResult simulate(const config::RunConfig& config);

struct AnalyzeOptions {
  std::set<std::string> metrics;  // empty = all known metrics
  bool include_incomplete = false;
  std::size_t grid_bins = 50;
  bool export_pca2d = false;
  std::optional<std::string> lexicon_path;
  double twonn_discard_fraction = 0.1;

  // Embedding provider: "scripted" (offline, deterministic) or "http".
  std::string embeddings_mode = "scripted";
  std::size_t scripted_dim = 384;
  backends::AgentSpec embedding_spec;  // model/endpoint/api_key_env for http
  std::optional<std::string> cache_path;
  std::string cache_format = "jsonl";  // or "binary"
};

struct AnalyzeResult {
  report::Manifest manifest;
  std::vector<std::string> notes;  // skipped rounds, unreadable files, ...
  std::size_t transcripts_analyzed = 0;
};

// Loads transcripts from `transcript_dir`, computes the selected metrics per
// grid cell, and writes one CSV artifact per metric per cell plus
// manifest.json into `out_dir`. Unreadable transcript files and skipped
// rounds are collected as notes, not errors.
AnalyzeResult analyze(const std::string& transcript_dir, const std::string& out_dir,
                      const AnalyzeOptions& options);

// Renders a plain-text digest of a previously written analysis directory
// (final-round agreement tables and dimensionality trajectories). Throws
// missing_artifacts when manifest.json is absent.
std::string render_report(const std::string& analysis_dir);

}  // namespace rtb::analysis
