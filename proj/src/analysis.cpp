#include "roundtable/analysis.hpp"

#include <algorithm>
#include <filesystem>
#include <map>
#include <memory>
#include <tuple>

#include <json.hpp>

#include "roundtable/csv.hpp"
#include "roundtable/error.hpp"
#include "roundtable/geometry.hpp"
#include "roundtable/lexmetrics.hpp"
#include "roundtable/store.hpp"

namespace rtb::analysis {

namespace fs = std::filesystem;
using engine::Transcript;
using report::format_value;

const std::set<std::string>& known_metrics() {
  static const std::set<std::string> metrics = {
      "rouge", "stability", "consistency", "confidence", "influence", "id", "opinion"};
  return metrics;
}

SimulateResult simulate(const config::RunConfig& config) {
  SimulateResult result;
  result.output_dir = config.output_dir;

  ingest::ItemSet items;
  if (config.dataset) {
    const config::DatasetConfig& d = *config.dataset;
    ingest::LoadOptions load_options;
    load_options.text_column = d.text_column;
    load_options.score_column = d.score_column;
    load_options.id_column = d.id_column;
    load_options.delimiter = d.delimiter;
    ingest::LoadResult loaded = ingest::load_comments(d.path, load_options);
    result.load_report = loaded.report;

    ingest::FilterOptions filter;
    filter.min_words = d.min_words;
    filter.min_score = d.min_score;
    filter.sample_n = d.sample_n;
    filter.seed = config.seed;
    filter.sample_mode = d.sample_mode;
    items = ingest::filter_items(loaded.set, filter);
  } else {
    items.items = config.inline_items;
    items.source_uri = "(inline)";
  }

  std::unique_ptr<backends::ChatBackend> backend;
  if (config.backend == config::BackendMode::scripted) {
    backend = std::make_unique<backends::ScriptedChatBackend>(
        backends::ScriptedChatBackend::from_file(config.scripted_plans_path));
  } else {
    auto http = std::make_unique<backends::HttpChatBackend>(config.retry);
    http->summary_instruction = config.summary_instruction;
    backend = std::move(http);
  }

  std::vector<engine::SimulationConfig> grid = config::expand_grid(config, items);
  engine::GridResult run = engine::run_grid(grid, *backend, config.workers);
  result.report = run.report;

  for (const auto& transcript : run.transcripts) {
    store::save_transcript(transcript, config.output_dir);
  }

  nlohmann::json report_doc;
  report_doc["discussions_attempted"] = run.report.discussions_attempted;
  report_doc["completed"] = run.report.completed;
  report_doc["failed"] = run.report.failed;
  report_doc["utterances_total"] = run.report.utterances_total;
  report_doc["wall_time_seconds"] = run.report.wall_time_seconds;
  if (result.load_report) {
    report_doc["dataset"] = {{"rows_read", result.load_report->rows_read},
                             {"rows_kept", result.load_report->rows_kept},
                             {"rows_dropped_empty", result.load_report->rows_dropped_empty}};
  }
  std::string payload = report_doc.dump(2);
  payload.push_back('\n');
  csv::write_file_atomic((fs::path(config.output_dir) / "run_report.json").string(), payload);
  return result;
}

// ---------------------------------------------------------------------------

namespace {

using Slice = std::vector<Transcript>;  // one grid cell's transcripts

// Codes of one agent at one round, aligned across a slice's discussions.
std::vector<std::pair<std::string, std::string>> aligned_codes(const Slice& slice,
                                                               const std::string& agent_id,
                                                               int round_prev, int round_curr) {
  std::vector<std::pair<std::string, std::string>> pairs;
  for (const auto& t : slice) {
    auto prev = engine::code_at(t, agent_id, round_prev);
    auto curr = engine::code_at(t, agent_id, round_curr);
    if (prev && curr) pairs.emplace_back(std::move(*prev), std::move(*curr));
  }
  return pairs;
}

std::vector<std::string> agent_ids_of(const Slice& slice) {
  std::vector<std::string> ids;
  for (const auto& a : slice.front().agents) ids.push_back(a.agent_id);
  return ids;
}

int rounds_of(const Slice& slice) { return slice.front().rounds; }

void write_rouge(report::Exporter& exporter, const std::string& slug, const Slice& slice) {
  int rounds = rounds_of(slice);
  int k = int(slice.front().agents.size());

  std::set<int> prompt_indices;
  for (const auto& t : slice) prompt_indices.insert(t.prompt_index);

  std::vector<std::vector<std::string>> rows;
  for (int prompt : prompt_indices) {
    for (int round = 0; round <= rounds + 1; ++round) {
      // Per-discussion pair means and maxima, averaged over discussions, so
      // the k == 2 avg == max equality survives aggregation.
      double sum1 = 0.0, sum2 = 0.0, sum_l = 0.0, sum_max = 0.0;
      std::size_t discussions = 0;
      for (const auto& t : slice) {
        if (t.prompt_index != prompt) continue;
        std::vector<std::string> codes;
        for (const auto& u : t.utterances) {
          if (u.round == round) codes.push_back(u.raw_text);
        }
        if (codes.size() < 2) continue;
        double d1 = 0.0, d2 = 0.0, dl = 0.0, dmax = 0.0;
        std::size_t pairs = 0;
        for (std::size_t i = 0; i < codes.size(); ++i) {
          for (std::size_t j = i + 1; j < codes.size(); ++j) {
            lexical::RougeScores scores = lexical::rouge(codes[i], codes[j]);
            d1 += scores.rouge1_f;
            d2 += scores.rouge2_f;
            dl += scores.rougeL_f;
            dmax = std::max(dmax, scores.rougeL_f);
            ++pairs;
          }
        }
        ++discussions;
        sum1 += d1 / double(pairs);
        sum2 += d2 / double(pairs);
        sum_l += dl / double(pairs);
        sum_max += dmax;
      }
      if (discussions == 0) continue;
      rows.push_back({std::to_string(prompt), std::to_string(k), std::to_string(rounds),
                      std::to_string(round), std::to_string(discussions),
                      format_value(sum1 / double(discussions)),
                      format_value(sum2 / double(discussions)),
                      format_value(sum_l / double(discussions)),
                      format_value(sum_max / double(discussions))});
    }
  }
  exporter.write_table("rouge_" + slug + ".csv",
                       {"prompt_index", "k", "rounds", "round", "n_discussions", "rouge1_avg",
                        "rouge2_avg", "rougeL_avg", "rougeL_max"},
                       rows);
}

void write_stability(report::Exporter& exporter, const std::string& slug, const Slice& slice) {
  int rounds = rounds_of(slice);
  int k = int(slice.front().agents.size());
  std::vector<std::vector<std::string>> rows;
  for (const auto& agent_id : agent_ids_of(slice)) {
    for (int round = 1; round <= rounds + 1; ++round) {
      auto pairs = aligned_codes(slice, agent_id, round - 1, round);
      if (pairs.empty()) continue;
      double exact = 0.0, retention = 0.0;
      for (const auto& [prev, curr] : pairs) {
        lexical::StabilityScores scores =
            lexical::stability({prev, agent_id, round - 1}, {curr, agent_id, round});
        exact += scores.exact_match;
        retention += scores.token_retention;
      }
      rows.push_back({std::to_string(k), std::to_string(rounds), agent_id,
                      std::to_string(round), std::to_string(pairs.size()),
                      format_value(exact / double(pairs.size())),
                      format_value(retention / double(pairs.size()))});
    }
  }
  exporter.write_table("stability_" + slug + ".csv",
                       {"k", "rounds", "agent_id", "round", "n", "exact_match_rate",
                        "token_retention_mean"},
                       rows);
}

void write_consistency(report::Exporter& exporter, const std::string& slug, const Slice& slice,
                       std::vector<std::string>* notes) {
  int rounds = rounds_of(slice);
  int k = int(slice.front().agents.size());
  std::vector<std::vector<std::string>> rows;
  for (const auto& agent_id : agent_ids_of(slice)) {
    // The tf-idf corpus: everything this agent said anywhere in the cell.
    std::vector<std::string> corpus;
    for (const auto& t : slice) {
      for (const auto& u : t.utterances) {
        if (u.agent_id == agent_id) corpus.push_back(u.raw_text);
      }
    }
    for (int round = 1; round <= rounds + 1; ++round) {
      auto aligned = aligned_codes(slice, agent_id, round - 1, round);
      if (aligned.empty()) continue;
      std::vector<std::string> previous, current;
      for (auto& [prev, curr] : aligned) {
        previous.push_back(std::move(prev));
        current.push_back(std::move(curr));
      }
      try {
        double mean = lexical::self_consistency(previous, current, corpus);
        rows.push_back({std::to_string(k), std::to_string(rounds), agent_id,
                        std::to_string(round), std::to_string(previous.size()),
                        format_value(mean)});
      } catch (const Error& e) {
        if (notes) {
          notes->push_back("consistency[" + agent_id + "] round " + std::to_string(round) +
                           " skipped: " + e.code());
        }
      }
    }
  }
  exporter.write_table("consistency_" + slug + ".csv",
                       {"k", "rounds", "agent_id", "round", "n_pairs", "mean_cosine"}, rows);
}

void write_confidence(report::Exporter& exporter, const std::string& slug, const Slice& slice,
                      const lexical::Lexicon& lexicon) {
  int rounds = rounds_of(slice);
  int k = int(slice.front().agents.size());
  std::vector<std::vector<std::string>> rows;
  for (const auto& agent_id : agent_ids_of(slice)) {
    for (int round = 0; round <= rounds + 1; ++round) {
      double sum = 0.0;
      std::size_t n = 0;
      for (const auto& t : slice) {
        for (const auto& u : t.utterances) {
          if (u.round == round && u.agent_id == agent_id) {
            sum += lexical::confidence(u.raw_text, lexicon);
            ++n;
          }
        }
      }
      if (n == 0) continue;
      rows.push_back({std::to_string(k), std::to_string(rounds), agent_id,
                      std::to_string(round), std::to_string(n), format_value(sum / double(n))});
    }
  }
  exporter.write_table("confidence_" + slug + ".csv",
                       {"k", "rounds", "agent_id", "round", "n", "mean_confidence"}, rows);
}

void write_influence(report::Exporter& exporter, const std::string& slug, const Slice& slice,
                     geometry::CachedEmbedder& embedder) {
  int rounds = rounds_of(slice);
  int k = int(slice.front().agents.size());
  std::vector<geometry::InfluenceMatrix> matrices =
      geometry::influence_matrices(slice, embedder);
  std::vector<std::vector<std::string>> rows;
  for (const auto& matrix : matrices) {
    for (std::size_t target = 0; target < matrix.agent_ids.size(); ++target) {
      for (std::size_t source = 0; source < matrix.agent_ids.size(); ++source) {
        rows.push_back({std::to_string(k), std::to_string(rounds),
                        std::to_string(matrix.round), matrix.agent_ids[target],
                        matrix.agent_ids[source],
                        std::to_string(matrix.n_samples[target][source]),
                        format_value(matrix.values[target][source])});
      }
    }
  }
  exporter.write_table("influence_" + slug + ".csv",
                       {"k", "rounds", "round", "target_agent", "source_agent", "n",
                        "mean_cosine"},
                       rows);
}

void write_id(report::Exporter& exporter, const std::string& slug, const Slice& slice,
              geometry::CachedEmbedder& embedder, double discard_fraction,
              std::vector<std::string>* notes) {
  int rounds = rounds_of(slice);
  int k = int(slice.front().agents.size());
  std::vector<std::vector<std::string>> rows;
  auto emit = [&](const report::MetricSeries& series) {
    for (const auto& point : series.points) {
      rows.push_back({std::to_string(k), std::to_string(rounds), series.metric_name,
                      series.scope, std::to_string(point.round),
                      std::to_string(point.n_samples), format_value(point.value)});
    }
  };
  emit(geometry::pooled_id_series(slice, embedder, discard_fraction, notes));
  for (const auto& [model, series] :
       geometry::per_model_id_series(slice, embedder, discard_fraction, notes)) {
    emit(series);
  }
  emit(geometry::mean_pairwise_cosine_series(slice, embedder));
  exporter.write_table("id_" + slug + ".csv",
                       {"k", "rounds", "metric", "scope", "round", "n", "value"}, rows);
}

void write_opinion(report::Exporter& exporter, const std::string& slug, const Slice& slice,
                   geometry::CachedEmbedder& embedder, const lexical::Lexicon& lexicon,
                   std::size_t bins, bool export_pca2d, std::vector<std::string>* notes) {
  // One shared axis per cell: every utterance embedding, all rounds pooled.
  std::vector<std::string> texts;
  std::vector<const Utterance*> utterances;
  std::vector<const Transcript*> owners;
  for (const auto& t : slice) {
    for (const auto& u : t.utterances) {
      texts.push_back(u.raw_text);
      utterances.push_back(&u);
      owners.push_back(&t);
    }
  }
  std::vector<EmbeddingVector> vectors = embedder.embed(texts);

  try {
    geometry::PrincipalAxis axis = geometry::opinion_axis(vectors);
    std::vector<geometry::OpinionConfidencePoint> points(utterances.size());
    for (std::size_t i = 0; i < utterances.size(); ++i) {
      points[i] = {axis.projections[i], lexical::confidence(utterances[i]->raw_text, lexicon),
                   utterances[i]->agent_id, utterances[i]->round};
    }
    std::vector<std::vector<std::string>> rows;
    for (const auto& grid : geometry::opinion_confidence_grid(points, bins)) {
      for (std::size_t y = 0; y < grid.bins; ++y) {
        for (std::size_t x = 0; x < grid.bins; ++x) {
          std::size_t count = grid.at(x, y);
          if (count == 0) continue;  // occupancy grids are written sparse
          rows.push_back({std::to_string(grid.round), std::to_string(x), std::to_string(y),
                          std::to_string(count)});
        }
      }
    }
    exporter.write_table("opinion_" + slug + ".csv", {"round", "x_bin", "y_bin", "count"},
                         rows);
  } catch (const Error& e) {
    if (notes) notes->push_back("opinion[" + slug + "] skipped: " + e.code());
  }

  if (!export_pca2d) return;
  try {
    auto axes = geometry::principal_axes2(vectors);
    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < utterances.size(); ++i) {
      rows.push_back({owners[i]->discussion_id, utterances[i]->agent_id,
                      std::to_string(utterances[i]->round),
                      format_value(axes[0].projections[i]),
                      format_value(axes[1].projections[i])});
    }
    exporter.write_table("pca2d_" + slug + ".csv",
                         {"discussion_id", "agent_id", "round", "x", "y"}, rows);
  } catch (const Error& e) {
    if (notes) notes->push_back("pca2d[" + slug + "] skipped: " + e.code());
  }
}

}  // namespace

AnalyzeResult analyze(const std::string& transcript_dir, const std::string& out_dir,
                      const AnalyzeOptions& options) {
  std::set<std::string> metrics = options.metrics.empty() ? known_metrics() : options.metrics;
  for (const auto& metric : metrics) {
    if (!known_metrics().count(metric)) {
      std::string valid;
      for (const auto& m : known_metrics()) {
        if (!valid.empty()) valid += ", ";
        valid += m;
      }
      fail("invalid_argument", "unknown metric '" + metric + "'; valid metrics: " + valid);
    }
  }
  if (options.grid_bins == 0) {
    fail("invalid_argument", "grid_bins must be >= 1");
  }
  if (options.embeddings_mode != "scripted" && options.embeddings_mode != "http") {
    fail("invalid_argument", "embeddings_mode must be \"scripted\" or \"http\"");
  }
  if (options.cache_format != "jsonl" && options.cache_format != "binary") {
    fail("invalid_argument", "cache_format must be \"jsonl\" or \"binary\"");
  }

  AnalyzeResult result;
  store::LoadResult loaded =
      store::load_transcripts(transcript_dir, options.include_incomplete);
  for (const auto& error : loaded.errors) {
    result.notes.push_back("unreadable transcript " + error.path + ": " + error.message);
  }
  if (loaded.transcripts.empty()) {
    fail("nothing_to_compare", "no usable transcripts under " + transcript_dir);
  }
  result.transcripts_analyzed = loaded.transcripts.size();

  lexical::Lexicon lexicon =
      options.lexicon_path ? lexical::load_lexicon(*options.lexicon_path)
                           : lexical::default_lexicon();

  std::unique_ptr<backends::EmbeddingBackend> embedding_backend;
  if (options.embeddings_mode == "scripted") {
    embedding_backend = std::make_unique<backends::ScriptedEmbeddingBackend>(options.scripted_dim);
  } else {
    embedding_backend = std::make_unique<backends::HttpEmbeddingBackend>(options.embedding_spec);
  }
  geometry::EmbeddingCache cache =
      options.cache_path
          ? geometry::EmbeddingCache(*options.cache_path,
                                     options.cache_format == "binary"
                                         ? geometry::CacheFormat::binary
                                         : geometry::CacheFormat::jsonl)
          : geometry::EmbeddingCache();
  geometry::CachedEmbedder embedder(*embedding_backend, cache);

  // Group into grid cells; every metric artifact is per cell.
  std::map<std::pair<int, int>, Slice> slices;
  for (auto& t : loaded.transcripts) {
    slices[{int(t.agents.size()), t.rounds}].push_back(std::move(t));
  }

  report::Exporter exporter(out_dir);
  for (const auto& [key, slice] : slices) {
    std::string slug = engine::config_slug(std::size_t(key.first), key.second);
    if (metrics.count("rouge")) write_rouge(exporter, slug, slice);
    if (metrics.count("stability")) write_stability(exporter, slug, slice);
    if (metrics.count("consistency")) write_consistency(exporter, slug, slice, &result.notes);
    if (metrics.count("confidence")) write_confidence(exporter, slug, slice, lexicon);
    if (metrics.count("influence")) write_influence(exporter, slug, slice, embedder);
    if (metrics.count("id")) {
      write_id(exporter, slug, slice, embedder, options.twonn_discard_fraction, &result.notes);
    }
    if (metrics.count("opinion")) {
      write_opinion(exporter, slug, slice, embedder, lexicon, options.grid_bins,
                    options.export_pca2d, &result.notes);
    }
  }
  result.manifest = exporter.finalize();
  return result;
}

// ---------------------------------------------------------------------------

namespace {

std::string pad(const std::string& text, std::size_t width) {
  return text.size() >= width ? text : text + std::string(width - text.size(), ' ');
}

}  // namespace

std::string render_report(const std::string& analysis_dir) {
  fs::path manifest_path = fs::path(analysis_dir) / "manifest.json";
  if (!fs::exists(manifest_path)) {
    fail("missing_artifacts", "no manifest.json under " + analysis_dir +
                                  "; run the analyze step first");
  }
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(csv::slurp_file(manifest_path.string()));
  } catch (const nlohmann::json::exception& e) {
    fail("missing_artifacts", "manifest.json is unreadable: " + std::string(e.what()));
  }

  std::string out;
  out += "Analysis digest: " + analysis_dir + "\n";

  std::vector<std::string> rouge_files, id_files;
  for (const auto& entry : manifest["artifacts"]) {
    std::string name = entry["artifact"].get<std::string>();
    if (name.rfind("rouge_", 0) == 0) rouge_files.push_back(name);
    if (name.rfind("id_", 0) == 0) id_files.push_back(name);
  }

  for (const auto& name : rouge_files) {
    csv::Table table = csv::read_file((fs::path(analysis_dir) / name).string());
    auto round_col = table.column("round");
    auto rounds_col = table.column("rounds");
    auto prompt_col = table.column("prompt_index");
    auto avg_col = table.column("rougeL_avg");
    auto max_col = table.column("rougeL_max");
    auto n_col = table.column("n_discussions");
    auto k_col = table.column("k");
    if (!round_col || !rounds_col || !prompt_col || !avg_col || !max_col || !n_col || !k_col) {
      continue;
    }
    std::string cell;
    out += "\nFinal-round agreement (ROUGE-L F1), " + name + "\n";
    out += "  prompt   avg      max      n\n";
    for (const auto& row : table.rows) {
      int round = std::stoi(row[*round_col]);
      int rounds = std::stoi(row[*rounds_col]);
      if (round != rounds + 1) continue;  // the digest shows the final pass
      out += "  " + pad(row[*prompt_col], 9) + pad(row[*avg_col], 9) +
             pad(row[*max_col], 9) + row[*n_col] + "\n";
    }
  }

  for (const auto& name : id_files) {
    csv::Table table = csv::read_file((fs::path(analysis_dir) / name).string());
    auto metric_col = table.column("metric");
    auto scope_col = table.column("scope");
    auto round_col = table.column("round");
    auto value_col = table.column("value");
    auto rounds_col = table.column("rounds");
    if (!metric_col || !scope_col || !round_col || !value_col || !rounds_col) continue;

    report::MetricSeries pooled;
    pooled.metric_name = "twonn_id";
    int max_seen = -1;
    for (const auto& row : table.rows) {
      if (row[*metric_col] != "twonn_id" || row[*scope_col] != "pooled") continue;
      pooled.rounds = std::stoi(row[*rounds_col]);
      int round = std::stoi(row[*round_col]);
      pooled.points.push_back({round, std::stod(row[*value_col]), 0});
      max_seen = std::max(max_seen, round);
    }
    if (pooled.points.empty()) continue;
    std::sort(pooled.points.begin(), pooled.points.end(),
              [](const report::SlicePoint& a, const report::SlicePoint& b) {
                return a.round < b.round;
              });

    out += "\nIntrinsic dimensionality (pooled), " + name + "\n  ";
    for (const auto& point : pooled.points) {
      out += report::round_label(point.round, pooled.rounds) + "=" +
             format_value(point.value) + "  ";
    }
    out += "\n";
    // Flag estimator gaps so a thinner trajectory is not mistaken for data.
    std::set<int> present;
    for (const auto& point : pooled.points) present.insert(point.round);
    std::string gaps;
    for (int r = pooled.points.front().round; r <= max_seen; ++r) {
      if (!present.count(r)) gaps += (gaps.empty() ? "" : ", ") + report::round_label(r, pooled.rounds);
    }
    if (!gaps.empty()) out += "  (no estimate for: " + gaps + ")\n";
    if (pooled.points.size() >= 2) {
      report::IdSummary summary = report::summarize_id_series(pooled);
      out += "  initial=" + format_value(summary.initial_id) +
             "  final=" + format_value(summary.final_id) +
             "  delta=" + format_value(summary.delta) +
             "  steepest_drop=" + format_value(summary.steepest_drop) + " at " +
             summary.drop_round + "\n";
    }
  }
  return out;
}

}  // namespace rtb::analysis
