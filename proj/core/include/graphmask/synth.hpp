#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "graphmask/graph.hpp"

namespace graphmask {

struct SynthConfig {
  int n = 20;
  double sigma = 0.45;  ///< Gaussian kernel width
  /// Fraction of vertex pairs kept as layer-union edges (closest first).
  /// The default gives mean degree 6 at n = 20.
  double edge_quantile = 6.0 / 19.0;
  double tau = 0.8;                ///< kernel weight above which an edge is reserved for the masks
  double coverability = 1.0;       ///< target coverability of the global graph, in (0, 1]
  int k_signals = 50;
  std::optional<double> snr_db;    ///< additive noise on the signals when set
  std::uint64_t seed = 1;
  int max_retries = 32;

  void validate() const;
};

/// Raw layer construction: coordinates, two random vertex groups and the
/// reserved edge set E^M.
struct LayerGeneration {
  Matrix coords;                ///< n x 2 points in the unit square
  std::vector<int> groups;      ///< 0 or 1 per vertex
  MultiLayerGraph layers;       ///< kernel weights in (0, 1]
  EdgeSet union_edges;
  EdgeSet reserved;             ///< union edges with weight above tau
};

struct GlobalGeneration {
  GlobalGraph global;
  double coverability = 1.0;
  std::size_t rewired = 0;
};

struct SynthInstance {
  MultiLayerGraph layers;       ///< layers scaled so the planted combination has volume n
  MaskSet true_masks;
  GlobalGraph true_global;
  Matrix signals;
  double coverability_actual = 1.0;
  double layer_scale = 1.0;     ///< factor applied to the raw kernel layers
  std::vector<int> groups;
  EdgeSet reserved;
  Matrix coords;
  SynthConfig config;
};

/// exp(-d^2 / (2 sigma^2)).
double gaussian_kernel(double distance, double sigma);

/// Throws NumericError when no attempt within cfg.max_retries yields a
/// nonempty layer union.
LayerGeneration generate_layers(const SynthConfig& cfg, std::uint64_t seed);

/// 1 on reserved within-group edges of the owning layer, 0.5 / 0.5 on edges
/// shared by both layers, and the remaining single-layer edges masked out.
MaskSet plant_masks(const LayerGeneration& gen);

/// Builds the global graph from the planted combination `combination`
/// (already at target volume). For coverability < 1, ceil((1 - c)|E|) edges
/// move to random pairs outside `layer_union`, keeping their weight.
GlobalGeneration make_global(const Matrix& combination, const EdgeSet& layer_union, double coverability_target,
                             double volume, std::uint64_t seed);

SynthInstance generate_instance(const SynthConfig& cfg);

/// min(|E_1|, |E_2|) / max(|E_1|, |E_2|) of a two-layer graph.
double layer_edge_ratio(const MultiLayerGraph& ml);

}  // namespace graphmask
