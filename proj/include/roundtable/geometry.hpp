#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "roundtable/core.hpp"
#include "roundtable/embedding_cache.hpp"
#include "roundtable/engine.hpp"
#include "roundtable/report.hpp"

namespace rtb::geometry {

struct TwoNNResult {
  double id_estimate = 0.0;
  std::size_t n_points_used = 0;         // after duplicate drop and tail discard
  std::size_t n_duplicates_dropped = 0;  // points whose nearest neighbour distance is 0
};

// Two-nearest-neighbour intrinsic dimension estimate. For each point the
// ratio mu = r2/r1 of its two nearest Euclidean distances is computed; points
// with r1 == 0 are dropped; the largest floor(discard_fraction * N) ratios
// are discarded as boundary noise. The estimate is the maximum-likelihood
// value under that discard, N_kept / (sum of kept ln mu + n_discarded * the
// largest kept ln mu), which reduces to N / sum(ln mu) at discard 0.
// Scale-invariant. Throws insufficient_points (< 10 distinct points),
// degenerate_geometry (denominator 0), dim_mismatch on mixed dimensions.
TwoNNResult twonn_id(const std::vector<EmbeddingVector>& points,
                     double discard_fraction = 0.1);

struct PrincipalAxis {
  std::vector<double> axis;         // unit length; largest-|coordinate| entry positive
  std::vector<double> projections;  // centered data projected onto the axis
};

// First principal component of the point cloud via power iteration on the
// covariance (tolerance 1e-10, cap 10000 iterations). Throws zero_variance
// when the data has no spread and power_iteration_stalled when the iteration
// fails to converge.
PrincipalAxis opinion_axis(const std::vector<EmbeddingVector>& points);

// First two principal axes (second from a deflated covariance), for 2-D map
// exports. The second axis may throw zero_variance on rank-1 data.
std::array<PrincipalAxis, 2> principal_axes2(const std::vector<EmbeddingVector>& points);

// ---------------------------------------------------------------------------
// Transcript-level series

// influence[target][source] at refinement round r: cosine between target's
// round-r embedding and source's round-(r-1) embedding, averaged over
// discussions. n_samples counts the discussions entering each mean.
struct InfluenceMatrix {
  int round = 1;
  std::vector<std::string> agent_ids;
  std::vector<std::vector<double>> values;
  std::vector<std::vector<std::size_t>> n_samples;
};

// One matrix per round 1..R (synthesis included as round R+1). Pairs where
// either utterance is missing are excluded from the mean.
std::vector<InfluenceMatrix> influence_matrices(
    const std::vector<engine::Transcript>& transcripts, CachedEmbedder& embedder);

// Pooled intrinsic dimension per round over every agent's utterance in every
// transcript. Rounds whose estimator fails are skipped and noted.
report::MetricSeries pooled_id_series(const std::vector<engine::Transcript>& transcripts,
                                      CachedEmbedder& embedder, double discard_fraction,
                                      std::vector<std::string>* notes);

// Same estimator, one series per model name (pooling that model's agents).
std::map<std::string, report::MetricSeries> per_model_id_series(
    const std::vector<engine::Transcript>& transcripts, CachedEmbedder& embedder,
    double discard_fraction, std::vector<std::string>* notes);

// Mean cosine over all unordered agent pairs within a round, averaged over
// discussions.
report::MetricSeries mean_pairwise_cosine_series(
    const std::vector<engine::Transcript>& transcripts, CachedEmbedder& embedder);

// ---------------------------------------------------------------------------
// Opinion-confidence occupancy grids

struct OpinionConfidencePoint {
  double opinion = 0.0;     // projection on the shared opinion axis
  double confidence = 0.0;  // lexical confidence, in [-1, 1]
  std::string agent_id;
  int round = 0;
};

struct GridHistogram {
  int round = 0;
  std::size_t bins = 50;
  std::vector<std::size_t> counts;  // bins x bins, row-major [y][x]

  std::size_t& at(std::size_t x_bin, std::size_t y_bin) { return counts[y_bin * bins + x_bin]; }
  std::size_t at(std::size_t x_bin, std::size_t y_bin) const {
    return counts[y_bin * bins + x_bin];
  }
};

// Bins points into a bins x bins occupancy grid per round. The x range spans
// the observed opinion extent across all rounds, y spans [-1, 1]; each bin is
// half-open except the last, which includes its upper edge. Constant-opinion
// data lands in the final x bin.
std::vector<GridHistogram> opinion_confidence_grid(
    const std::vector<OpinionConfidencePoint>& points, std::size_t bins = 50);

}  // namespace rtb::geometry
