#include "graphmask/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "graphmask/error.hpp"
#include "graphmask/rng.hpp"
#include "graphmask/spectral.hpp"

namespace graphmask {

void SynthConfig::validate() const {
  if (n < 2) throw ValidationError("synthetic instances need n >= 2");
  if (!(sigma > 0.0)) throw ValidationError("sigma must be positive");
  if (!(edge_quantile > 0.0 && edge_quantile <= 1.0)) throw ValidationError("edge quantile must lie in (0, 1]");
  if (!(tau > 0.0 && tau < 1.0)) throw ValidationError("tau must lie in (0, 1)");
  if (!(coverability > 0.0 && coverability <= 1.0)) throw ValidationError("coverability must lie in (0, 1]");
  if (k_signals < 1) throw ValidationError("need at least one signal");
  if (max_retries < 1) throw ValidationError("max_retries must be positive");
}

double gaussian_kernel(double distance, double sigma) {
  return std::exp(-distance * distance / (2.0 * sigma * sigma));
}

namespace {

LayerGeneration generate_layers_once(const SynthConfig& cfg, std::uint64_t seed) {
  const int n = cfg.n;
  Rng rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Matrix coords(n, 2);
  for (int i = 0; i < n; ++i) {
    coords(i, 0) = unit(rng);
    coords(i, 1) = unit(rng);
  }
  std::vector<int> groups(static_cast<std::size_t>(n));
  std::bernoulli_distribution coin(0.5);
  for (auto& g : groups) g = coin(rng) ? 1 : 0;

  struct Candidate {
    double d;
    Edge e;
  };
  std::vector<Candidate> pairs;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) pairs.push_back({(coords.row(i) - coords.row(j)).norm(), Edge(i, j)});
  std::stable_sort(pairs.begin(), pairs.end(), [](const Candidate& a, const Candidate& b) { return a.d < b.d; });
  const auto keep = static_cast<std::size_t>(std::llround(cfg.edge_quantile * static_cast<double>(pairs.size())));

  Matrix base = Matrix::Zero(n, n);
  std::vector<Edge> uni, reserved;
  for (std::size_t k = 0; k < std::min(keep, pairs.size()); ++k) {
    const auto& c = pairs[k];
    const double w = gaussian_kernel(c.d, cfg.sigma);
    base(c.e.i, c.e.j) = base(c.e.j, c.e.i) = w;
    uni.push_back(c.e);
    if (w > cfg.tau) reserved.push_back(c.e);
  }

  std::vector<GraphLayer> layers;
  for (int t = 0; t < 2; ++t) {
    Matrix w = Matrix::Zero(n, n);
    for (const auto& e : uni)
      if (groups[static_cast<std::size_t>(e.i)] == t || groups[static_cast<std::size_t>(e.j)] == t)
        w(e.i, e.j) = w(e.j, e.i) = base(e.i, e.j);
    layers.emplace_back(std::move(w), "layer" + std::to_string(t + 1));
  }
  return {std::move(coords), std::move(groups), MultiLayerGraph(std::move(layers)), EdgeSet(std::move(uni)),
          EdgeSet(std::move(reserved))};
}

}  // namespace

LayerGeneration generate_layers(const SynthConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  for (int attempt = 0; attempt < cfg.max_retries; ++attempt) {
    auto gen = generate_layers_once(cfg, derive_seed(seed, "layers", static_cast<std::uint64_t>(attempt)));
    if (!gen.union_edges.empty()) return gen;
  }
  throw NumericError("could not generate a nonempty layer union within the retry budget");
}

MaskSet plant_masks(const LayerGeneration& gen) {
  const MultiLayerGraph& ml = gen.layers;
  const EdgeSet& support = ml.union_edges();
  Matrix values = Matrix::Zero(2, static_cast<Eigen::Index>(support.size()));
  for (std::size_t k = 0; k < support.size(); ++k) {
    const auto& e = support.edges()[k];
    const auto col = static_cast<Eigen::Index>(k);
    const bool in0 = ml.layer(0).weight(e.i, e.j) > 0.0;
    const bool in1 = ml.layer(1).weight(e.i, e.j) > 0.0;
    if (in0 && in1) {
      values(0, col) = values(1, col) = 0.5;
      continue;
    }
    const int owner = in0 ? 0 : 1;
    const bool keep = gen.reserved.contains(e);
    values(owner, col) = keep ? 1.0 : 0.0;
    values(1 - owner, col) = keep ? 0.0 : 1.0;
  }
  return {support, std::move(values)};
}

GlobalGeneration make_global(const Matrix& combination, const EdgeSet& layer_union, double coverability_target,
                             double volume, std::uint64_t seed) {
  if (!(coverability_target > 0.0 && coverability_target <= 1.0))
    throw ValidationError("coverability target must lie in (0, 1]");
  const int n = static_cast<int>(combination.rows());
  Matrix w = combination;
  const EdgeSet edges = edges_from_weights(w, 0.0);
  if (edges.empty()) throw NumericError("the planted mask combination has no edges");

  const double moved = std::ceil((1.0 - coverability_target) * static_cast<double>(edges.size()) - 1e-9);
  const auto rewire = static_cast<std::size_t>(std::max(0.0, moved));
  if (rewire > 0) {
    Rng rng(seed);
    std::vector<Edge> pick = edges.edges();
    std::shuffle(pick.begin(), pick.end(), rng);
    std::vector<Edge> outside;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (!layer_union.contains(Edge(i, j))) outside.emplace_back(i, j);
    if (outside.size() < rewire)
      throw ValidationError("only " + std::to_string(outside.size()) + " pairs lie outside the layer union, " +
                            std::to_string(rewire) + " needed for rewiring");
    std::shuffle(outside.begin(), outside.end(), rng);
    for (std::size_t k = 0; k < rewire; ++k) {
      const Edge from = pick[k], to = outside[k];
      const double v = w(from.i, from.j);
      w(from.i, from.j) = w(from.j, from.i) = 0.0;
      w(to.i, to.j) = w(to.j, to.i) = v;
    }
  }
  GlobalGraph g = GlobalGraph::from_weights(w).normalized(volume);
  const double cov = coverability(g.edges(0.0), layer_union);
  return {std::move(g), cov, rewire};
}

SynthInstance generate_instance(const SynthConfig& cfg) {
  cfg.validate();
  for (int attempt = 0; attempt < cfg.max_retries; ++attempt) {
    const std::uint64_t seed = derive_seed(cfg.seed, "instance", static_cast<std::uint64_t>(attempt));
    LayerGeneration gen = generate_layers(cfg, seed);
    MaskSet masks = plant_masks(gen);
    const Matrix raw = mask_combination(gen.layers, masks);
    const double raw_volume = raw.sum();
    if (!(raw_volume > 0.0)) continue;

    // Scale the layers so the planted combination already has volume n.
    const double scale = static_cast<double>(cfg.n) / raw_volume;
    std::vector<GraphLayer> scaled;
    for (const auto& layer : gen.layers.layers()) scaled.emplace_back(layer.weights() * scale, layer.name());
    MultiLayerGraph layers(std::move(scaled));

    GlobalGeneration global = make_global(raw * scale, layers.union_edges(), cfg.coverability,
                                          static_cast<double>(cfg.n), derive_seed(seed, "rewire"));
    Matrix x = generate_smooth_signals(global.global.laplacian(), cfg.k_signals, derive_seed(seed, "signals"));
    if (cfg.snr_db) x = add_noise(x, *cfg.snr_db, derive_seed(seed, "noise"));

    return {std::move(layers), std::move(masks), std::move(global.global), std::move(x), global.coverability,
            scale, std::move(gen.groups), std::move(gen.reserved), std::move(gen.coords), cfg};
  }
  throw NumericError("could not generate a synthetic instance with a nonempty planted graph");
}

double layer_edge_ratio(const MultiLayerGraph& ml) {
  if (ml.layer_count() != 2) throw DimensionError("layer edge ratio needs exactly two layers");
  const auto a = static_cast<double>(ml.layer(0).edges().size());
  const auto b = static_cast<double>(ml.layer(1).edges().size());
  const double hi = std::max(a, b);
  return hi == 0.0 ? 0.0 : std::min(a, b) / hi;
}

}  // namespace graphmask
