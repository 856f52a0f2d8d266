// Command-line front end; all real work happens behind the C API.

#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "roundtable.h"

namespace {

// 0 on success, 2 when the library reports partial results, 1 otherwise.
int finish(rtb_session* session, rtb_status status, char* payload) {
  if (payload != nullptr) {
    std::fputs(payload, stdout);
    std::fputc('\n', stdout);
    rtb_string_free(payload);
  }
  int exit_code = 0;
  if (status == RTB_PARTIAL) {
    exit_code = 2;
  } else if (status != RTB_OK) {
    std::fprintf(stderr, "error (%s): %s\n", rtb_last_error_code(session),
                 rtb_last_error(session));
    exit_code = 1;
  }
  rtb_session_free(session);
  return exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-agent discussion simulation and convergence metrics"};
  app.set_version_flag("--version", std::string(rtb_version()));
  app.require_subcommand(1);

  // --- simulate ---
  std::string config_path;
  CLI::App* simulate = app.add_subcommand(
      "simulate", "Run the configured discussion grid and persist transcripts");
  simulate->add_option("--config", config_path, "Run configuration (JSON)")
      ->required()
      ->check(CLI::ExistingFile);

  // --- analyze ---
  std::string in_dir, out_dir, metrics, lexicon_path, embeddings_mode, embeddings_endpoint,
      embeddings_model, embeddings_api_key_env, cache_path, cache_format;
  bool include_incomplete = false, export_pca2d = false;
  int grid_bins = 50, embeddings_dim = 384;
  double discard_fraction = 0.1;
  CLI::App* analyze = app.add_subcommand(
      "analyze", "Compute convergence metrics over stored transcripts");
  analyze->add_option("--in", in_dir, "Transcript directory")->required();
  analyze->add_option("--out", out_dir, "Analysis output directory")->required();
  analyze->add_option(
      "--metrics", metrics,
      "Comma-separated subset of rouge,stability,consistency,confidence,influence,id,opinion "
      "(default: all)");
  analyze->add_flag("--include-incomplete", include_incomplete,
                    "Include transcripts flagged incomplete");
  analyze->add_option("--bins", grid_bins, "Opinion-confidence grid resolution")
      ->check(CLI::PositiveNumber);
  analyze->add_flag("--export-pca2d", export_pca2d,
                    "Also export per-utterance 2-D map coordinates");
  analyze->add_option("--lexicon", lexicon_path, "Confidence lexicon file");
  analyze->add_option("--discard-fraction", discard_fraction,
                      "Dimension estimator tail discard fraction")
      ->check(CLI::Range(0.0, 0.999));
  analyze->add_option("--embeddings", embeddings_mode,
                      "Embedding provider: scripted (offline) or http");
  analyze->add_option("--embeddings-dim", embeddings_dim, "Scripted embedding dimension")
      ->check(CLI::PositiveNumber);
  analyze->add_option("--embeddings-endpoint", embeddings_endpoint,
                      "HTTP embeddings base URL");
  analyze->add_option("--embeddings-model", embeddings_model, "HTTP embeddings model name");
  analyze->add_option("--embeddings-api-key-env", embeddings_api_key_env,
                      "Environment variable holding the embeddings API key");
  analyze->add_option("--cache", cache_path, "Embedding cache file");
  analyze->add_option("--cache-format", cache_format, "Cache file format: jsonl or binary");

  // --- report ---
  std::string analysis_dir;
  CLI::App* report =
      app.add_subcommand("report", "Render a text digest of an analysis directory");
  report->add_option("--in", analysis_dir, "Analysis directory")->required();

  CLI11_PARSE(app, argc, argv);

  rtb_session* session = rtb_session_new();
  if (session == nullptr) {
    std::fprintf(stderr, "error: out of memory\n");
    return 1;
  }

  if (simulate->parsed()) {
    char* report_json = nullptr;
    rtb_status status = rtb_simulate(session, config_path.c_str(), &report_json);
    return finish(session, status, report_json);
  }

  if (analyze->parsed()) {
    rtb_analyze_options options;
    rtb_analyze_options_init(&options);
    options.include_incomplete = include_incomplete ? 1 : 0;
    options.grid_bins = grid_bins;
    options.export_pca2d = export_pca2d ? 1 : 0;
    options.twonn_discard_fraction = discard_fraction;
    if (!lexicon_path.empty()) options.lexicon_path = lexicon_path.c_str();
    if (!embeddings_mode.empty()) options.embeddings_mode = embeddings_mode.c_str();
    options.embeddings_dim = embeddings_dim;
    if (!embeddings_endpoint.empty()) options.embeddings_endpoint = embeddings_endpoint.c_str();
    if (!embeddings_model.empty()) options.embeddings_model = embeddings_model.c_str();
    if (!embeddings_api_key_env.empty()) {
      options.embeddings_api_key_env = embeddings_api_key_env.c_str();
    }
    if (!cache_path.empty()) options.cache_path = cache_path.c_str();
    if (!cache_format.empty()) options.cache_format = cache_format.c_str();

    char* summary_json = nullptr;
    rtb_status status = rtb_analyze(session, in_dir.c_str(), out_dir.c_str(),
                                    metrics.empty() ? nullptr : metrics.c_str(), &options,
                                    &summary_json);
    return finish(session, status, summary_json);
  }

  char* text = nullptr;
  rtb_status status = rtb_report(session, analysis_dir.c_str(), &text);
  return finish(session, status, text);
}
