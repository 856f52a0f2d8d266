#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace rtb::ingest {

struct CommentRecord {
  std::string id;
  std::string text;
  std::optional<double> disagreement_score;
  std::size_t word_count = 0;  // whitespace-delimited words in `text`
};

struct ItemSet {
  std::vector<CommentRecord> items;
  std::string source_uri;
};

struct LoadReport {
  std::size_t rows_read = 0;
  std::size_t rows_kept = 0;
  std::size_t rows_dropped_empty = 0;
};

struct LoadOptions {
  std::string text_column;                  // required
  std::optional<std::string> score_column;  // parsed as double when present
  std::optional<std::string> id_column;     // default: row ordinal ("row-<n>")
  char delimiter = ',';
};

struct LoadResult {
  ItemSet set;
  LoadReport report;
};

// Loads comments from a CSV file. Rows whose text is empty or whitespace-only
// are dropped and counted. Throws column_not_found when a named column is
// missing and io_error when the file is unreadable.
LoadResult load_comments(const std::string& path, const LoadOptions& options);

enum class SampleMode { uniform, top_score };

struct FilterOptions {
  std::size_t min_words = 0;
  std::optional<double> min_score;      // drops rows without a score
  std::optional<std::size_t> sample_n;  // subsample after the filters
  std::uint64_t seed = 0;
  SampleMode sample_mode = SampleMode::uniform;
};

// Applies word/score filters, then an optional subsample: `uniform` draws
// without replacement (seed-deterministic, original order kept); `top_score`
// keeps the highest-scoring rows (score descending, id ascending on ties).
// Throws sample_too_large when sample_n exceeds the filtered population.
ItemSet filter_items(const ItemSet& set, const FilterOptions& options);

// Number of maximal whitespace-delimited words.
std::size_t count_words(const std::string& text);

}  // namespace rtb::ingest
