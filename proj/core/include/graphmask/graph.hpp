#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace graphmask {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Absolute threshold above which a learned weight counts as an edge.
inline constexpr double kEdgeEpsilon = 1e-4;

/// Unordered vertex pair stored with i < j.
struct Edge {
  int i = 0;
  int j = 0;

  Edge() = default;
  Edge(int a, int b) : i(a < b ? a : b), j(a < b ? b : a) {}

  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Flat index of pair (i, j), i < j, in row-major upper-triangle order.
inline std::size_t pair_index(int i, int j, int n) {
  if (i > j) std::swap(i, j);
  const auto ii = static_cast<std::size_t>(i);
  const auto nn = static_cast<std::size_t>(n);
  return ii * nn - ii * (ii + 1) / 2 + static_cast<std::size_t>(j - i - 1);
}

inline std::size_t pair_count(int n) {
  return static_cast<std::size_t>(n) * static_cast<std::size_t>(n - 1) / 2;
}

/// Sorted set of unordered pairs.
class EdgeSet {
 public:
  EdgeSet() = default;
  explicit EdgeSet(std::vector<Edge> edges);

  const std::vector<Edge>& edges() const noexcept { return edges_; }
  std::size_t size() const noexcept { return edges_.size(); }
  bool empty() const noexcept { return edges_.empty(); }
  bool contains(const Edge& e) const;
  /// Position of `e` in sorted order, or -1.
  long index_of(const Edge& e) const;

  auto begin() const noexcept { return edges_.begin(); }
  auto end() const noexcept { return edges_.end(); }

  friend bool operator==(const EdgeSet&, const EdgeSet&) = default;

 private:
  std::vector<Edge> edges_;
};

EdgeSet set_union(const EdgeSet& a, const EdgeSet& b);
EdgeSet set_intersection(const EdgeSet& a, const EdgeSet& b);
EdgeSet set_difference(const EdgeSet& a, const EdgeSet& b);

/// Pairs (i < j) with weight strictly above `eps`.
EdgeSet edges_from_weights(const Matrix& weights, double eps = kEdgeEpsilon);

class VertexSet {
 public:
  explicit VertexSet(int n);
  int size() const noexcept { return n_; }

 private:
  int n_;
};

/// One relation type: symmetric, nonnegative, zero-diagonal weight matrix.
class GraphLayer {
 public:
  explicit GraphLayer(Matrix weights, std::string name = {});

  int size() const noexcept { return static_cast<int>(weights_.rows()); }
  const Matrix& weights() const noexcept { return weights_; }
  const std::string& name() const noexcept { return name_; }
  /// Pairs with strictly positive weight.
  const EdgeSet& edges() const noexcept { return edges_; }
  double weight(int i, int j) const { return weights_(i, j); }

 private:
  Matrix weights_;
  std::string name_;
  EdgeSet edges_;
};

/// T >= 1 layers on one shared vertex set.
class MultiLayerGraph {
 public:
  explicit MultiLayerGraph(std::vector<GraphLayer> layers);

  int size() const noexcept { return n_; }
  int layer_count() const noexcept { return static_cast<int>(layers_.size()); }
  const GraphLayer& layer(int t) const { return layers_.at(static_cast<std::size_t>(t)); }
  const std::vector<GraphLayer>& layers() const noexcept { return layers_; }
  /// Union support E^L of all layer edge sets.
  const EdgeSet& union_edges() const noexcept { return union_edges_; }

  /// Entrywise min / max over layers, the bounds of the mask combination.
  Matrix min_weights() const;
  Matrix max_weights() const;

 private:
  std::vector<GraphLayer> layers_;
  int n_ = 0;
  EdgeSet union_edges_;
};

/// Per-layer mask values stored on the union support only.
///
/// values(t, k) is [M_t]_ij for the k-th pair of `support()`. Entries off the
/// support are zero. Columns sum to one and values are nonnegative, both
/// within `tol` at construction.
class MaskSet {
 public:
  MaskSet(EdgeSet support, Matrix values, double tol = 1e-6);

  /// Uniform masks 1/T on every union edge.
  static MaskSet uniform(const MultiLayerGraph& ml);

  int layer_count() const noexcept { return static_cast<int>(values_.rows()); }
  const EdgeSet& support() const noexcept { return support_; }
  const Matrix& values() const noexcept { return values_; }
  double value(int t, int i, int j) const;
  /// Dense symmetric N x N matrix of layer t.
  Matrix dense(int t, int n) const;

 private:
  EdgeSet support_;
  Matrix values_;
};

struct ValidityReport {
  bool valid = true;
  double max_asymmetry = 0.0;
  double max_positive_offdiag = 0.0;
  double max_abs_row_sum = 0.0;

  std::string describe() const;
};

/// Membership test for the set of valid Laplacians at tolerance `tol`.
ValidityReport check_valid_laplacian(const Matrix& l, double tol = 1e-9);

class Laplacian {
 public:
  explicit Laplacian(Matrix l, double tol = 1e-9);

  const Matrix& matrix() const noexcept { return l_; }
  bool valid() const noexcept { return valid_; }
  int size() const noexcept { return static_cast<int>(l_.rows()); }
  double trace() const { return l_.trace(); }

 private:
  Matrix l_;
  bool valid_;
};

/// Learned graph: Laplacian plus derived weights W_ij = max(0, -L_ij).
class GlobalGraph {
 public:
  explicit GlobalGraph(Laplacian l);
  static GlobalGraph from_weights(const Matrix& w);

  const Laplacian& laplacian() const noexcept { return laplacian_; }
  const Matrix& weights() const noexcept { return weights_; }
  double trace() const noexcept { return trace_; }
  int size() const noexcept { return laplacian_.size(); }
  EdgeSet edges(double eps = kEdgeEpsilon) const { return edges_from_weights(weights_, eps); }

  /// Same topology with the trace rescaled to `volume`.
  GlobalGraph normalized(double volume) const;

 private:
  Laplacian laplacian_;
  Matrix weights_;
  double trace_;
};

/// Symmetric, zero row sum correction term, parameterized by its strict upper
/// triangle. Off-diagonals may take either sign.
class CorrectiveLaplacian {
 public:
  CorrectiveLaplacian(int n, Vector upper);
  static CorrectiveLaplacian zero(int n) { return {n, Vector::Zero(static_cast<Eigen::Index>(pair_count(n)))}; }

  const Matrix& matrix() const noexcept { return matrix_; }
  const Vector& upper() const noexcept { return upper_; }
  double frobenius_squared() const { return matrix_.squaredNorm(); }

 private:
  Vector upper_;
  Matrix matrix_;
};

/// Throws ValidationError unless `w` is square, symmetric, nonnegative with
/// zero diagonal (all within `tol`).
void validate_weights(const Matrix& w, double tol = 1e-12);

Laplacian laplacian_from_weights(const Matrix& weights);

/// W_M = sum_t M_t .* W_t
Matrix mask_combination(const MultiLayerGraph& ml, const MaskSet& masks);

/// Laplacian of the mask combination.
Laplacian lambda_of(const MultiLayerGraph& ml, const MaskSet& masks);

/// |global ∩ layer_union| / |global|. Throws UndefinedMetricError if `global` is empty.
double coverability(const EdgeSet& global, const EdgeSet& layer_union);

/// Pairwise squared row distances Z_ij = ||x_i - x_j||^2 for pairs i < j, flat.
Vector pairwise_sq_distances(const Matrix& x);

}  // namespace graphmask
