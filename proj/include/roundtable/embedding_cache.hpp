#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "roundtable/backends.hpp"
#include "roundtable/core.hpp"

namespace rtb::geometry {

enum class CacheFormat { jsonl, binary };

// Embedding store keyed by (provider_id, sha256(text)). With a path the
// cache loads existing entries up front and appends every new vector, so a
// re-run embeds nothing; without a path it is memory-only. The jsonl format
// is one {provider_id, text_sha256, dim, values} object per line; the binary
// format is a fixed magic, then length-prefixed key records with raw
// little-endian doubles.
class EmbeddingCache {
 public:
  EmbeddingCache() = default;
  EmbeddingCache(std::string path, CacheFormat format);

  std::optional<EmbeddingVector> get(const std::string& provider_id,
                                     const std::string& text) const;
  void put(const std::string& provider_id, const std::string& text,
           const EmbeddingVector& vector);

  std::size_t size() const { return entries_.size(); }

 private:
  void load();
  void append(const std::string& key_hash, const EmbeddingVector& vector);

  std::map<std::string, EmbeddingVector> entries_;  // "provider|sha" -> vector
  std::string path_;
  CacheFormat format_ = CacheFormat::jsonl;
  bool persistent_ = false;
};

// Batches texts through a backend with cache lookups in front. Results align
// with the input order.
class CachedEmbedder {
 public:
  CachedEmbedder(backends::EmbeddingBackend& backend, EmbeddingCache& cache,
                 std::size_t batch_size = 64);

  std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts);
  EmbeddingVector embed_one(const std::string& text);

  const std::string& provider_id() const { return provider_id_; }

 private:
  backends::EmbeddingBackend& backend_;
  EmbeddingCache& cache_;
  std::size_t batch_size_;
  std::string provider_id_;
};

}  // namespace rtb::geometry
