#include "roundtable/embedding_cache.hpp"

#include <cstring>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "roundtable/csv.hpp"
#include "roundtable/error.hpp"
#include "roundtable/hash.hpp"

namespace rtb::geometry {

namespace {

constexpr char kBinaryMagic[8] = {'R', 'T', 'B', 'E', 'M', 'B', '0', '1'};

std::string cache_key(const std::string& provider_id, const std::string& text_sha) {
  return provider_id + '|' + text_sha;
}

}  // namespace

EmbeddingCache::EmbeddingCache(std::string path, CacheFormat format)
    : path_(std::move(path)), format_(format), persistent_(true) {
  load();
}

std::optional<EmbeddingVector> EmbeddingCache::get(const std::string& provider_id,
                                                   const std::string& text) const {
  auto it = entries_.find(cache_key(provider_id, sha256_hex(text)));
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void EmbeddingCache::put(const std::string& provider_id, const std::string& text,
                         const EmbeddingVector& vector) {
  std::string key = cache_key(provider_id, sha256_hex(text));
  auto [it, inserted] = entries_.emplace(key, vector);
  if (inserted && persistent_) {
    append(key, vector);
  }
}

void EmbeddingCache::load() {
  namespace fs = std::filesystem;
  if (!fs::exists(path_)) return;

  if (format_ == CacheFormat::jsonl) {
    std::ifstream in(path_, std::ios::binary);
    if (!in) fail("io_error", "cannot open embedding cache: " + path_);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      nlohmann::json doc;
      try {
        doc = nlohmann::json::parse(line);
      } catch (const nlohmann::json::exception& e) {
        fail("parse_error",
             path_ + ":" + std::to_string(line_no) + ": invalid cache line: " + e.what());
      }
      if (!doc.contains("provider_id") || !doc.contains("text_sha256") ||
          !doc.contains("dim") || !doc.contains("values")) {
        fail("parse_error", path_ + ":" + std::to_string(line_no) + ": incomplete cache line");
      }
      EmbeddingVector vector;
      vector.provider_id = doc["provider_id"].get<std::string>();
      vector.values = doc["values"].get<std::vector<double>>();
      vector.dim = vector.values.size();
      if (vector.dim != doc["dim"].get<std::size_t>()) {
        fail("parse_error", path_ + ":" + std::to_string(line_no) + ": dim does not match values");
      }
      entries_[cache_key(vector.provider_id, doc["text_sha256"].get<std::string>())] =
          std::move(vector);
    }
    return;
  }

  // Binary: magic, then [u32 key_len][key][u32 dim][dim x f64 LE] records.
  std::ifstream in(path_, std::ios::binary);
  if (!in) fail("io_error", "cannot open embedding cache: " + path_);
  char magic[8];
  if (!in.read(magic, 8) || std::memcmp(magic, kBinaryMagic, 8) != 0) {
    fail("parse_error", path_ + ": not a binary embedding cache");
  }
  while (true) {
    std::uint32_t key_len = 0;
    if (!in.read(reinterpret_cast<char*>(&key_len), 4)) break;  // clean EOF
    std::string key(key_len, '\0');
    std::uint32_t dim = 0;
    if (!in.read(key.data(), key_len) || !in.read(reinterpret_cast<char*>(&dim), 4)) {
      fail("parse_error", path_ + ": truncated cache record");
    }
    std::vector<double> values(dim);
    if (dim > 0 &&
        !in.read(reinterpret_cast<char*>(values.data()),
                 static_cast<std::streamsize>(sizeof(double) * dim))) {
      fail("parse_error", path_ + ": truncated cache record");
    }
    auto sep = key.find('|');
    if (sep == std::string::npos) fail("parse_error", path_ + ": malformed cache key");
    EmbeddingVector vector = make_embedding(std::move(values), key.substr(0, sep));
    entries_[key] = std::move(vector);
  }
}

void EmbeddingCache::append(const std::string& key, const EmbeddingVector& vector) {
  namespace fs = std::filesystem;
  fs::path target(path_);
  if (target.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(target.parent_path(), ec);
  }
  bool fresh = !fs::exists(target);
  std::ofstream out(path_, std::ios::binary | std::ios::app);
  if (!out) fail("io_error", "cannot append to embedding cache: " + path_);

  if (format_ == CacheFormat::jsonl) {
    auto sep = key.find('|');
    nlohmann::json doc;
    doc["provider_id"] = vector.provider_id;
    doc["text_sha256"] = key.substr(sep + 1);
    doc["dim"] = vector.dim;
    doc["values"] = vector.values;
    out << doc.dump() << '\n';
  } else {
    if (fresh) out.write(kBinaryMagic, 8);
    auto key_len = static_cast<std::uint32_t>(key.size());
    auto dim = static_cast<std::uint32_t>(vector.dim);
    out.write(reinterpret_cast<const char*>(&key_len), 4);
    out.write(key.data(), static_cast<std::streamsize>(key.size()));
    out.write(reinterpret_cast<const char*>(&dim), 4);
    out.write(reinterpret_cast<const char*>(vector.values.data()),
              static_cast<std::streamsize>(sizeof(double) * vector.dim));
  }
  out.flush();
  if (!out) fail("io_error", "failed writing embedding cache: " + path_);
}

CachedEmbedder::CachedEmbedder(backends::EmbeddingBackend& backend, EmbeddingCache& cache,
                               std::size_t batch_size)
    : backend_(backend), cache_(cache), batch_size_(std::max<std::size_t>(1, batch_size)),
      provider_id_(backend.provider_id()) {}

std::vector<EmbeddingVector> CachedEmbedder::embed(const std::vector<std::string>& texts) {
  std::vector<EmbeddingVector> out(texts.size());
  std::vector<std::string> missing;   // unique texts not in the cache
  std::map<std::string, std::size_t> missing_index;
  for (std::size_t i = 0; i < texts.size(); ++i) {
    if (auto hit = cache_.get(provider_id_, texts[i])) {
      out[i] = std::move(*hit);
    } else if (missing_index.emplace(texts[i], missing.size()).second) {
      missing.push_back(texts[i]);
    }
  }

  for (std::size_t begin = 0; begin < missing.size(); begin += batch_size_) {
    std::size_t end = std::min(missing.size(), begin + batch_size_);
    std::vector<std::string> batch(missing.begin() + std::ptrdiff_t(begin),
                                   missing.begin() + std::ptrdiff_t(end));
    std::vector<EmbeddingVector> vectors = backend_.embed(batch);
    if (vectors.size() != batch.size()) {
      fail("provider_error", "embedding backend returned a mismatched batch");
    }
    for (std::size_t i = 0; i < batch.size(); ++i) {
      cache_.put(provider_id_, batch[i], vectors[i]);
    }
  }

  std::size_t expected_dim = 0;
  for (std::size_t i = 0; i < texts.size(); ++i) {
    if (out[i].dim == 0) {
      auto hit = cache_.get(provider_id_, texts[i]);
      if (!hit) fail("provider_error", "embedding missing after backend call");
      out[i] = std::move(*hit);
    }
    if (expected_dim == 0) expected_dim = out[i].dim;
    if (out[i].dim != expected_dim) {
      fail("inconsistent_dim", "embeddings mix dimensions " + std::to_string(expected_dim) +
                                   " and " + std::to_string(out[i].dim));
    }
  }
  return out;
}

EmbeddingVector CachedEmbedder::embed_one(const std::string& text) {
  return embed({text})[0];
}

}  // namespace rtb::geometry
