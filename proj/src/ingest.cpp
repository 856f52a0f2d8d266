#include "roundtable/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "roundtable/csv.hpp"
#include "roundtable/error.hpp"
#include "roundtable/hash.hpp"

namespace rtb::ingest {

namespace {

bool is_blank(const std::string& s) {
  return std::all_of(s.begin(), s.end(),
                     [](unsigned char c) { return std::isspace(c) != 0; });
}

std::optional<double> parse_score(const std::string& raw) {
  if (is_blank(raw)) return std::nullopt;
  try {
    std::size_t pos = 0;
    double value = std::stod(raw, &pos);
    while (pos < raw.size() && std::isspace(static_cast<unsigned char>(raw[pos]))) ++pos;
    if (pos != raw.size()) return std::nullopt;
    return value;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

}  // namespace

std::size_t count_words(const std::string& text) {
  std::size_t count = 0;
  bool in_word = false;
  for (unsigned char c : text) {
    bool space = std::isspace(c) != 0;
    if (!space && !in_word) ++count;
    in_word = !space;
  }
  return count;
}

LoadResult load_comments(const std::string& path, const LoadOptions& options) {
  csv::Table table = csv::read_file(path, options.delimiter);

  auto require_column = [&](const std::string& name) {
    auto idx = table.column(name);
    if (!idx) fail("column_not_found", "column '" + name + "' not found in " + path);
    return *idx;
  };

  std::size_t text_idx = require_column(options.text_column);
  std::optional<std::size_t> score_idx;
  if (options.score_column) score_idx = require_column(*options.score_column);
  std::optional<std::size_t> id_idx;
  if (options.id_column) id_idx = require_column(*options.id_column);

  LoadResult result;
  result.set.source_uri = path;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    ++result.report.rows_read;
    const std::string& text = row[text_idx];
    if (is_blank(text)) {
      ++result.report.rows_dropped_empty;
      continue;
    }
    CommentRecord record;
    record.text = text;
    record.id = id_idx ? row[*id_idx] : "row-" + std::to_string(r + 1);
    if (score_idx) record.disagreement_score = parse_score(row[*score_idx]);
    record.word_count = count_words(text);
    result.set.items.push_back(std::move(record));
    ++result.report.rows_kept;
  }
  return result;
}

ItemSet filter_items(const ItemSet& set, const FilterOptions& options) {
  ItemSet out;
  out.source_uri = set.source_uri;
  for (const auto& item : set.items) {
    if (item.word_count < options.min_words) continue;
    if (options.min_score) {
      if (!item.disagreement_score || *item.disagreement_score < *options.min_score) continue;
    }
    out.items.push_back(item);
  }
  if (!options.sample_n) return out;

  std::size_t n = *options.sample_n;
  if (n > out.items.size()) {
    fail("sample_too_large", "sample_n=" + std::to_string(n) + " exceeds population of " +
                                 std::to_string(out.items.size()));
  }
  if (n == out.items.size()) return out;

  if (options.sample_mode == SampleMode::top_score) {
    // Highest score first; missing scores sort last; ties break on id.
    std::vector<std::size_t> order(out.items.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      double sa = out.items[a].disagreement_score.value_or(
          -std::numeric_limits<double>::infinity());
      double sb = out.items[b].disagreement_score.value_or(
          -std::numeric_limits<double>::infinity());
      if (sa != sb) return sa > sb;
      return out.items[a].id < out.items[b].id;
    });
    order.resize(n);
    std::sort(order.begin(), order.end());  // keep original order in the result
    ItemSet sampled;
    sampled.source_uri = out.source_uri;
    for (std::size_t idx : order) sampled.items.push_back(out.items[idx]);
    return sampled;
  }

  // Uniform without replacement: Fisher-Yates over indices, then restore
  // original order so runs differ only in membership.
  std::vector<std::size_t> indices(out.items.size());
  std::iota(indices.begin(), indices.end(), 0);
  SplitMix rng(options.seed);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t j = i + static_cast<std::size_t>(rng.next_below(indices.size() - i));
    std::swap(indices[i], indices[j]);
  }
  indices.resize(n);
  std::sort(indices.begin(), indices.end());
  ItemSet sampled;
  sampled.source_uri = out.source_uri;
  for (std::size_t idx : indices) sampled.items.push_back(out.items[idx]);
  return sampled;
}

}  // namespace rtb::ingest
