#include "roundtable.h"

#include <cstdlib>
#include <cstring>
#include <string>

#include <json.hpp>

#include "roundtable/analysis.hpp"
#include "roundtable/error.hpp"
#include "roundtable/geometry.hpp"
#include "roundtable/lexmetrics.hpp"

struct rtb_session {
  std::string last_error;
  std::string last_code;
};

namespace {

rtb_status status_for_code(const std::string& code) {
  if (code == "invalid_argument") return RTB_ERR_INVALID_ARGUMENT;
  if (code == "io_error") return RTB_ERR_IO;
  if (code == "parse_error" || code == "column_not_found" ||
      code == "lexicon_parse_error" || code == "lexicon_conflict" ||
      code == "missing_artifacts") {
    return RTB_ERR_PARSE;
  }
  if (code == "transport_error" || code == "provider_error" ||
      code == "empty_completion" || code == "plan_missing") {
    return RTB_ERR_BACKEND;
  }
  if (code == "dim_mismatch" || code == "zero_vector" || code == "sample_too_large" ||
      code == "inconsistent_dim" || code == "nothing_to_compare" ||
      code == "insufficient_points" || code == "degenerate_geometry" ||
      code == "zero_variance" || code == "power_iteration_stalled" ||
      code == "round_gap") {
    return RTB_ERR_METRIC;
  }
  return RTB_ERR_INTERNAL;
}

void clear_error(rtb_session* session) {
  session->last_error.clear();
  session->last_code.clear();
}

rtb_status set_error(rtb_session* session, const std::string& code,
                     const std::string& message) {
  session->last_error = message;
  session->last_code = code;
  return status_for_code(code);
}

char* copy_string(const std::string& text) {
  char* out = static_cast<char*>(std::malloc(text.size() + 1));
  if (out != nullptr) {
    std::memcpy(out, text.c_str(), text.size() + 1);
  }
  return out;
}

// Runs `body` with uniform exception-to-status mapping.
template <typename Fn>
rtb_status guarded(rtb_session* session, Fn&& body) {
  if (session == nullptr) return RTB_ERR_INVALID_ARGUMENT;
  clear_error(session);
  try {
    return body();
  } catch (const rtb::Error& e) {
    return set_error(session, e.code(), e.what());
  } catch (const std::exception& e) {
    return set_error(session, "internal_error", e.what());
  } catch (...) {
    return set_error(session, "internal_error", "unknown failure");
  }
}

}  // namespace

extern "C" {

rtb_session* rtb_session_new(void) { return new (std::nothrow) rtb_session(); }

void rtb_session_free(rtb_session* session) { delete session; }

const char* rtb_version(void) { return "0.1.0"; }

const char* rtb_last_error(const rtb_session* session) {
  return session == nullptr ? "" : session->last_error.c_str();
}

const char* rtb_last_error_code(const rtb_session* session) {
  return session == nullptr ? "" : session->last_code.c_str();
}

rtb_status rtb_simulate(rtb_session* session, const char* config_path,
                        char** run_report_json) {
  return guarded(session, [&]() -> rtb_status {
    if (config_path == nullptr) {
      return set_error(session, "invalid_argument", "config_path is NULL");
    }
    rtb::config::RunConfig config = rtb::config::load_run_config(config_path);
    rtb::analysis::SimulateResult result = rtb::analysis::simulate(config);

    if (run_report_json != nullptr) {
      nlohmann::json doc;
      doc["discussions_attempted"] = result.report.discussions_attempted;
      doc["completed"] = result.report.completed;
      doc["failed"] = result.report.failed;
      doc["utterances_total"] = result.report.utterances_total;
      doc["wall_time_seconds"] = result.report.wall_time_seconds;
      doc["output_dir"] = result.output_dir;
      if (result.load_report) {
        doc["dataset"] = {{"rows_read", result.load_report->rows_read},
                          {"rows_kept", result.load_report->rows_kept},
                          {"rows_dropped_empty", result.load_report->rows_dropped_empty}};
      }
      *run_report_json = copy_string(doc.dump(2));
    }
    return result.report.failed > 0 ? RTB_PARTIAL : RTB_OK;
  });
}

void rtb_analyze_options_init(rtb_analyze_options* options) {
  if (options == nullptr) return;
  options->include_incomplete = 0;
  options->grid_bins = 50;
  options->export_pca2d = 0;
  options->twonn_discard_fraction = 0.1;
  options->lexicon_path = nullptr;
  options->embeddings_mode = nullptr;
  options->embeddings_dim = 384;
  options->embeddings_endpoint = nullptr;
  options->embeddings_model = nullptr;
  options->embeddings_api_key_env = nullptr;
  options->cache_path = nullptr;
  options->cache_format = nullptr;
}

rtb_status rtb_analyze(rtb_session* session, const char* transcript_dir, const char* out_dir,
                       const char* metrics_csv, const rtb_analyze_options* options,
                       char** summary_json) {
  return guarded(session, [&]() -> rtb_status {
    if (transcript_dir == nullptr || out_dir == nullptr) {
      return set_error(session, "invalid_argument", "transcript_dir and out_dir are required");
    }
    rtb::analysis::AnalyzeOptions opts;
    if (metrics_csv != nullptr && *metrics_csv != '\0') {
      std::string list(metrics_csv);
      std::size_t begin = 0;
      while (begin <= list.size()) {
        std::size_t end = list.find(',', begin);
        if (end == std::string::npos) end = list.size();
        std::string metric = list.substr(begin, end - begin);
        if (!metric.empty()) opts.metrics.insert(metric);
        begin = end + 1;
      }
    }
    if (options != nullptr) {
      opts.include_incomplete = options->include_incomplete != 0;
      if (options->grid_bins > 0) opts.grid_bins = std::size_t(options->grid_bins);
      opts.export_pca2d = options->export_pca2d != 0;
      if (options->twonn_discard_fraction >= 0.0) {
        opts.twonn_discard_fraction = options->twonn_discard_fraction;
      }
      if (options->lexicon_path != nullptr) opts.lexicon_path = options->lexicon_path;
      if (options->embeddings_mode != nullptr) opts.embeddings_mode = options->embeddings_mode;
      if (options->embeddings_dim > 0) opts.scripted_dim = std::size_t(options->embeddings_dim);
      if (options->embeddings_endpoint != nullptr) {
        opts.embedding_spec.endpoint = options->embeddings_endpoint;
      }
      if (options->embeddings_model != nullptr) {
        opts.embedding_spec.model_name = options->embeddings_model;
        opts.embedding_spec.agent_id = options->embeddings_model;
      }
      if (options->embeddings_api_key_env != nullptr) {
        opts.embedding_spec.api_key_env = options->embeddings_api_key_env;
      }
      if (options->cache_path != nullptr) opts.cache_path = options->cache_path;
      if (options->cache_format != nullptr) opts.cache_format = options->cache_format;
    }

    rtb::analysis::AnalyzeResult result =
        rtb::analysis::analyze(transcript_dir, out_dir, opts);
    if (summary_json != nullptr) {
      nlohmann::json doc;
      doc["transcripts_analyzed"] = result.transcripts_analyzed;
      doc["artifacts"] = nlohmann::json::array();
      for (const auto& artifact : result.manifest.artifacts) {
        doc["artifacts"].push_back({{"artifact", artifact.name},
                                    {"rows", artifact.rows},
                                    {"sha256", artifact.sha256}});
      }
      doc["notes"] = result.notes;
      *summary_json = copy_string(doc.dump(2));
    }
    return result.notes.empty() ? RTB_OK : RTB_PARTIAL;
  });
}

rtb_status rtb_report(rtb_session* session, const char* analysis_dir, char** text) {
  return guarded(session, [&]() -> rtb_status {
    if (analysis_dir == nullptr) {
      return set_error(session, "invalid_argument", "analysis_dir is NULL");
    }
    std::string rendered = rtb::analysis::render_report(analysis_dir);
    if (text != nullptr) *text = copy_string(rendered);
    return RTB_OK;
  });
}

rtb_status rtb_rouge(rtb_session* session, const char* candidate, const char* reference,
                     double scores_out[3]) {
  return guarded(session, [&]() -> rtb_status {
    if (candidate == nullptr || reference == nullptr || scores_out == nullptr) {
      return set_error(session, "invalid_argument", "candidate, reference and scores_out "
                                                    "are required");
    }
    rtb::lexical::RougeScores scores = rtb::lexical::rouge(candidate, reference);
    scores_out[0] = scores.rouge1_f;
    scores_out[1] = scores.rouge2_f;
    scores_out[2] = scores.rougeL_f;
    return RTB_OK;
  });
}

rtb_status rtb_confidence(rtb_session* session, const char* text, const char* lexicon_path,
                          double* value_out) {
  return guarded(session, [&]() -> rtb_status {
    if (text == nullptr || value_out == nullptr) {
      return set_error(session, "invalid_argument", "text and value_out are required");
    }
    rtb::lexical::Lexicon lexicon = lexicon_path != nullptr
                                        ? rtb::lexical::load_lexicon(lexicon_path)
                                        : rtb::lexical::default_lexicon();
    *value_out = rtb::lexical::confidence(text, lexicon);
    return RTB_OK;
  });
}

rtb_status rtb_twonn_id(rtb_session* session, const double* points, size_t n_points,
                        size_t dim, double discard_fraction, double* id_out) {
  return guarded(session, [&]() -> rtb_status {
    if (points == nullptr || id_out == nullptr || dim == 0) {
      return set_error(session, "invalid_argument", "points, id_out and a positive dim "
                                                    "are required");
    }
    std::vector<rtb::EmbeddingVector> cloud;
    cloud.reserve(n_points);
    for (size_t i = 0; i < n_points; ++i) {
      std::vector<double> values(points + i * dim, points + (i + 1) * dim);
      cloud.push_back(rtb::make_embedding(std::move(values), "capi"));
    }
    double fraction = discard_fraction < 0.0 ? 0.1 : discard_fraction;
    *id_out = rtb::geometry::twonn_id(cloud, fraction).id_estimate;
    return RTB_OK;
  });
}

void rtb_string_free(char* text) { std::free(text); }

}  // extern "C"
