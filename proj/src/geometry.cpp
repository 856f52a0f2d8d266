#include "roundtable/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <set>

#include "roundtable/error.hpp"
#include "roundtable/hash.hpp"

namespace rtb::geometry {

namespace {

void check_same_dim(const std::vector<EmbeddingVector>& points) {
  for (const auto& p : points) {
    if (p.dim != points.front().dim) {
      fail("dim_mismatch", "point cloud mixes dimensions");
    }
  }
}

double squared_distance(const EmbeddingVector& a, const EmbeddingVector& b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    double diff = a.values[i] - b.values[i];
    sum += diff * diff;
  }
  return sum;
}

}  // namespace

TwoNNResult twonn_id(const std::vector<EmbeddingVector>& points, double discard_fraction) {
  if (discard_fraction < 0.0 || discard_fraction >= 1.0) {
    fail("invalid_argument", "discard_fraction must lie in [0, 1)");
  }
  if (points.size() < 3) {
    fail("insufficient_points", "need at least 3 points, got " + std::to_string(points.size()));
  }
  check_same_dim(points);

  // Per-point ratio of the two smallest neighbour distances.
  std::vector<double> ratios;
  ratios.reserve(points.size());
  std::size_t duplicates = 0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    double best1 = std::numeric_limits<double>::infinity();
    double best2 = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < points.size(); ++j) {
      if (j == i) continue;
      double d2 = squared_distance(points[i], points[j]);
      if (d2 < best1) {
        best2 = best1;
        best1 = d2;
      } else if (d2 < best2) {
        best2 = d2;
      }
    }
    if (best1 == 0.0) {
      ++duplicates;  // coincident neighbour: the ratio is undefined
      continue;
    }
    ratios.push_back(std::sqrt(best2) / std::sqrt(best1));
  }

  if (ratios.size() < 10) {
    fail("insufficient_points", "only " + std::to_string(ratios.size()) +
                                    " distinct points after duplicate removal");
  }

  // Discard the largest ratios; the tail is dominated by boundary effects.
  // Dropping them censors the sample, so the maximum-likelihood denominator
  // carries one copy of the largest kept log-ratio per discarded point —
  // without that term the estimate inflates by ~1/3 at a 10% discard.
  std::sort(ratios.begin(), ratios.end());
  std::size_t discard = static_cast<std::size_t>(
      std::floor(discard_fraction * static_cast<double>(ratios.size())));
  std::size_t kept = ratios.size() - discard;

  double log_sum = 0.0;
  for (std::size_t i = 0; i < kept; ++i) {
    log_sum += std::log(ratios[i]);
  }
  log_sum += static_cast<double>(discard) * std::log(ratios[kept - 1]);
  if (log_sum == 0.0) {
    fail("degenerate_geometry", "all neighbour ratios are 1; no dimension signal");
  }

  TwoNNResult result;
  result.id_estimate = static_cast<double>(kept) / log_sum;
  result.n_points_used = kept;
  result.n_duplicates_dropped = duplicates;
  return result;
}

namespace {

// Centered data matrix stored row-major (n x d).
struct Centered {
  std::vector<double> data;
  std::size_t n = 0;
  std::size_t d = 0;

  double at(std::size_t i, std::size_t j) const { return data[i * d + j]; }
};

Centered center(const std::vector<EmbeddingVector>& points) {
  Centered m;
  m.n = points.size();
  m.d = points.front().dim;
  m.data.resize(m.n * m.d);
  std::vector<double> mean(m.d, 0.0);
  for (const auto& p : points) {
    for (std::size_t j = 0; j < m.d; ++j) mean[j] += p.values[j];
  }
  for (auto& v : mean) v /= static_cast<double>(m.n);
  for (std::size_t i = 0; i < m.n; ++i) {
    for (std::size_t j = 0; j < m.d; ++j) {
      m.data[i * m.d + j] = points[i].values[j] - mean[j];
    }
  }
  return m;
}

double total_variance(const Centered& m) {
  return std::inner_product(m.data.begin(), m.data.end(), m.data.begin(), 0.0);
}

// Leading eigenvector of X^T X / (n-1) by power iteration; converged when
// successive normalized iterates differ by less than 1e-10 in L2 norm, which
// keeps the final angle error well below the 1e-6 the callers rely on.
PrincipalAxis power_iteration(const Centered& m) {
  constexpr double kTolerance = 1e-10;
  constexpr int kMaxIterations = 10000;
  if (total_variance(m) == 0.0) {
    fail("zero_variance", "data cloud has no spread along any direction");
  }

  std::vector<double> v(m.d);
  double scale = m.n > 1 ? 1.0 / static_cast<double>(m.n - 1) : 1.0;
  for (std::uint64_t draw = 0; draw < 3; ++draw) {
    // Deterministic start; re-drawn up to twice if the draw happens to sit
    // in the covariance null space.
    SplitMix rng(0x706f776572u + draw);
    double norm_sq = 0.0;
    for (auto& x : v) {
      x = 2.0 * rng.next_unit() - 1.0;
      norm_sq += x * x;
    }
    double inv = 1.0 / std::sqrt(norm_sq);
    for (auto& x : v) x *= inv;

    std::vector<double> w(m.n), z(m.d);
    bool stalled_draw = false;
    for (int iter = 0; iter < kMaxIterations; ++iter) {
      for (std::size_t i = 0; i < m.n; ++i) {
        double dot = 0.0;
        for (std::size_t j = 0; j < m.d; ++j) dot += m.at(i, j) * v[j];
        w[i] = dot;
      }
      std::fill(z.begin(), z.end(), 0.0);
      for (std::size_t i = 0; i < m.n; ++i) {
        for (std::size_t j = 0; j < m.d; ++j) z[j] += m.at(i, j) * w[i];
      }
      double z_norm_sq = 0.0;
      for (auto& x : z) {
        x *= scale;
        z_norm_sq += x * x;
      }
      if (z_norm_sq == 0.0) {
        stalled_draw = true;  // start vector was orthogonal to the data
        break;
      }
      double z_inv = 1.0 / std::sqrt(z_norm_sq);
      double diff_sq = 0.0;
      for (std::size_t j = 0; j < m.d; ++j) {
        z[j] *= z_inv;
        double step = z[j] - v[j];
        diff_sq += step * step;
      }
      v = z;
      if (diff_sq < kTolerance * kTolerance) {
        // Orient the axis: the largest-magnitude coordinate is positive.
        std::size_t pivot = 0;
        for (std::size_t j = 1; j < m.d; ++j) {
          if (std::abs(v[j]) > std::abs(v[pivot])) pivot = j;
        }
        if (v[pivot] < 0.0) {
          for (auto& x : v) x = -x;
        }
        PrincipalAxis axis;
        axis.axis = v;
        axis.projections.resize(m.n);
        for (std::size_t i = 0; i < m.n; ++i) {
          double dot = 0.0;
          for (std::size_t j = 0; j < m.d; ++j) dot += m.at(i, j) * v[j];
          axis.projections[i] = dot;
        }
        return axis;
      }
    }
    if (!stalled_draw) break;  // genuine non-convergence, not a bad start
  }
  fail("power_iteration_stalled", "no convergence within iteration budget");
}

}  // namespace

PrincipalAxis opinion_axis(const std::vector<EmbeddingVector>& points) {
  if (points.size() < 2) {
    fail("insufficient_points", "need at least 2 points for an opinion axis");
  }
  check_same_dim(points);
  return power_iteration(center(points));
}

std::array<PrincipalAxis, 2> principal_axes2(const std::vector<EmbeddingVector>& points) {
  if (points.size() < 2) {
    fail("insufficient_points", "need at least 2 points for a 2-D map");
  }
  check_same_dim(points);
  Centered m = center(points);
  PrincipalAxis first = power_iteration(m);

  // Deflate: remove the first component, then repeat on the remainder.
  Centered deflated = m;
  for (std::size_t i = 0; i < m.n; ++i) {
    for (std::size_t j = 0; j < m.d; ++j) {
      deflated.data[i * m.d + j] -= first.projections[i] * first.axis[j];
    }
  }
  PrincipalAxis second = power_iteration(deflated);
  return {std::move(first), std::move(second)};
}

// ---------------------------------------------------------------------------

namespace {

// Embeds the raw text of every utterance once, keyed by text.
std::map<std::string, EmbeddingVector> embed_utterances(
    const std::vector<engine::Transcript>& transcripts, CachedEmbedder& embedder) {
  std::set<std::string> unique;
  for (const auto& t : transcripts) {
    for (const auto& u : t.utterances) unique.insert(u.raw_text);
  }
  std::vector<std::string> texts(unique.begin(), unique.end());
  std::vector<EmbeddingVector> vectors = embedder.embed(texts);
  std::map<std::string, EmbeddingVector> out;
  for (std::size_t i = 0; i < texts.size(); ++i) out[texts[i]] = std::move(vectors[i]);
  return out;
}

int max_round(const std::vector<engine::Transcript>& transcripts) {
  int rounds = 0;
  for (const auto& t : transcripts) rounds = std::max(rounds, t.rounds);
  return rounds + 1;  // synthesis round index
}

}  // namespace

std::vector<InfluenceMatrix> influence_matrices(
    const std::vector<engine::Transcript>& transcripts, CachedEmbedder& embedder) {
  if (transcripts.empty()) {
    fail("nothing_to_compare", "influence: no transcripts");
  }
  std::vector<std::string> agent_ids;
  for (const auto& a : transcripts.front().agents) agent_ids.push_back(a.agent_id);
  std::size_t k = agent_ids.size();

  // Only transcripts with the identical agent roster enter the means.
  auto same_roster = [&](const engine::Transcript& t) {
    if (t.agents.size() != k) return false;
    for (std::size_t i = 0; i < k; ++i) {
      if (t.agents[i].agent_id != agent_ids[i]) return false;
    }
    return true;
  };

  auto vectors = embed_utterances(transcripts, embedder);

  int last_round = max_round(transcripts);
  std::vector<InfluenceMatrix> matrices;
  for (int round = 1; round <= last_round; ++round) {
    InfluenceMatrix matrix;
    matrix.round = round;
    matrix.agent_ids = agent_ids;
    matrix.values.assign(k, std::vector<double>(k, 0.0));
    matrix.n_samples.assign(k, std::vector<std::size_t>(k, 0));
    std::vector<std::vector<double>> sums(k, std::vector<double>(k, 0.0));

    for (const auto& t : transcripts) {
      if (!same_roster(t) || round > t.rounds + 1) continue;
      for (std::size_t target = 0; target < k; ++target) {
        auto target_text = engine::code_at(t, agent_ids[target], round);
        if (!target_text) continue;
        for (std::size_t source = 0; source < k; ++source) {
          auto source_text = engine::code_at(t, agent_ids[source], round - 1);
          if (!source_text) continue;
          sums[target][source] += cosine(vectors.at(*target_text), vectors.at(*source_text));
          ++matrix.n_samples[target][source];
        }
      }
    }
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = 0; j < k; ++j) {
        if (matrix.n_samples[i][j] > 0) {
          matrix.values[i][j] = sums[i][j] / double(matrix.n_samples[i][j]);
        }
      }
    }
    matrices.push_back(std::move(matrix));
  }
  return matrices;
}

namespace {

report::MetricSeries id_series_over(
    const std::vector<engine::Transcript>& transcripts, CachedEmbedder& embedder,
    double discard_fraction, std::vector<std::string>* notes, const std::string& scope,
    const std::function<bool(const engine::Transcript&, const Utterance&)>& selector) {
  report::MetricSeries series;
  series.metric_name = "twonn_id";
  series.scope = scope;
  if (transcripts.empty()) return series;
  series.k = int(transcripts.front().agents.size());
  series.rounds = transcripts.front().rounds;

  auto vectors = embed_utterances(transcripts, embedder);
  int last = max_round(transcripts);
  for (int round = 0; round <= last; ++round) {
    std::vector<EmbeddingVector> cloud;
    for (const auto& t : transcripts) {
      for (const auto& u : t.utterances) {
        if (u.round == round && selector(t, u)) cloud.push_back(vectors.at(u.raw_text));
      }
    }
    if (cloud.empty()) continue;
    try {
      TwoNNResult result = twonn_id(cloud, discard_fraction);
      series.points.push_back({round, result.id_estimate, result.n_points_used});
    } catch (const Error& e) {
      if (notes) {
        notes->push_back("id[" + scope + "] round " + std::to_string(round) +
                         " skipped: " + e.code());
      }
    }
  }
  return series;
}

}  // namespace

report::MetricSeries pooled_id_series(const std::vector<engine::Transcript>& transcripts,
                                      CachedEmbedder& embedder, double discard_fraction,
                                      std::vector<std::string>* notes) {
  return id_series_over(transcripts, embedder, discard_fraction, notes, "pooled",
                        [](const engine::Transcript&, const Utterance&) { return true; });
}

std::map<std::string, report::MetricSeries> per_model_id_series(
    const std::vector<engine::Transcript>& transcripts, CachedEmbedder& embedder,
    double discard_fraction, std::vector<std::string>* notes) {
  std::set<std::string> models;
  for (const auto& t : transcripts) {
    for (const auto& a : t.agents) models.insert(a.model_name);
  }
  std::map<std::string, report::MetricSeries> out;
  for (const auto& model : models) {
    out[model] = id_series_over(
        transcripts, embedder, discard_fraction, notes, model,
        [&model](const engine::Transcript& t, const Utterance& u) {
          for (const auto& a : t.agents) {
            if (a.agent_id == u.agent_id) return a.model_name == model;
          }
          return false;
        });
  }
  return out;
}

report::MetricSeries mean_pairwise_cosine_series(
    const std::vector<engine::Transcript>& transcripts, CachedEmbedder& embedder) {
  report::MetricSeries series;
  series.metric_name = "mean_pairwise_cosine";
  series.scope = "pooled";
  if (transcripts.empty()) return series;
  series.k = int(transcripts.front().agents.size());
  series.rounds = transcripts.front().rounds;

  auto vectors = embed_utterances(transcripts, embedder);
  int last = max_round(transcripts);
  for (int round = 0; round <= last; ++round) {
    double sum = 0.0;
    std::size_t count = 0;
    for (const auto& t : transcripts) {
      std::vector<const EmbeddingVector*> cloud;
      for (const auto& u : t.utterances) {
        if (u.round == round) cloud.push_back(&vectors.at(u.raw_text));
      }
      for (std::size_t i = 0; i < cloud.size(); ++i) {
        for (std::size_t j = i + 1; j < cloud.size(); ++j) {
          sum += cosine(*cloud[i], *cloud[j]);
          ++count;
        }
      }
    }
    if (count > 0) {
      series.points.push_back({round, sum / double(count), count});
    }
  }
  return series;
}

std::vector<GridHistogram> opinion_confidence_grid(
    const std::vector<OpinionConfidencePoint>& points, std::size_t bins) {
  if (bins == 0) fail("invalid_argument", "grid needs at least 1 bin");
  std::vector<GridHistogram> grids;
  if (points.empty()) return grids;

  double x_min = points.front().opinion, x_max = points.front().opinion;
  for (const auto& p : points) {
    x_min = std::min(x_min, p.opinion);
    x_max = std::max(x_max, p.opinion);
  }
  double x_width = x_max - x_min;

  auto bin_of = [bins](double value, double lo, double width) -> std::size_t {
    if (width <= 0.0) return bins - 1;
    double t = (value - lo) / width * static_cast<double>(bins);
    auto b = static_cast<long long>(std::floor(t));
    // The upper edge belongs to the last bin; clamp guards FP spill.
    if (b < 0) b = 0;
    if (b >= static_cast<long long>(bins)) b = static_cast<long long>(bins) - 1;
    return static_cast<std::size_t>(b);
  };

  std::set<int> rounds;
  for (const auto& p : points) rounds.insert(p.round);
  for (int round : rounds) {
    GridHistogram grid;
    grid.round = round;
    grid.bins = bins;
    grid.counts.assign(bins * bins, 0);
    for (const auto& p : points) {
      if (p.round != round) continue;
      std::size_t x = bin_of(p.opinion, x_min, x_width);
      std::size_t y = bin_of(p.confidence, -1.0, 2.0);
      ++grid.at(x, y);
    }
    grids.push_back(std::move(grid));
  }
  return grids;
}

}  // namespace rtb::geometry
