#pragma once

#include <random>

#include <graphmask/graph.hpp>

namespace graphmask::testing {

/// Random symmetric weights in [lo, hi] with edge probability p.
inline Matrix random_weights(int n, double p, unsigned seed, double lo = 0.1, double hi = 1.0) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Matrix w = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (u(rng) < p) w(i, j) = w(j, i) = lo + (hi - lo) * u(rng);
  return w;
}

/// Random weights plus a Hamiltonian path so the graph is connected.
inline Matrix random_connected_weights(int n, double p, unsigned seed) {
  Matrix w = random_weights(n, p, seed);
  std::mt19937 rng(seed + 7919);
  std::uniform_real_distribution<double> u(0.2, 1.0);
  for (int i = 0; i + 1 < n; ++i)
    if (w(i, i + 1) == 0.0) w(i, i + 1) = w(i + 1, i) = u(rng);
  return w;
}

inline Matrix random_signals(int n, int k, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix x(n, k);
  for (int i = 0; i < n; ++i)
    for (int c = 0; c < k; ++c) x(i, c) = g(rng);
  return x;
}

/// Five-vertex two-layer instance:
/// layer 1 has edges 01 (1.0), 12 (2.0), 23 (1.0), 34 (0.5);
/// layer 2 has edges 01 (0.5), 12 (1.0), 02 (1.5), 24 (1.0).
inline MultiLayerGraph hand_instance() {
  Matrix a = Matrix::Zero(5, 5), b = Matrix::Zero(5, 5);
  auto set = [](Matrix& m, int i, int j, double v) { m(i, j) = m(j, i) = v; };
  set(a, 0, 1, 1.0);
  set(a, 1, 2, 2.0);
  set(a, 2, 3, 1.0);
  set(a, 3, 4, 0.5);
  set(b, 0, 1, 0.5);
  set(b, 1, 2, 1.0);
  set(b, 0, 2, 1.5);
  set(b, 2, 4, 1.0);
  return MultiLayerGraph({GraphLayer(a, "a"), GraphLayer(b, "b")});
}

}  // namespace graphmask::testing
