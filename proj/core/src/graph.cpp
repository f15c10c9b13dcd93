#include "graphmask/graph.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "graphmask/error.hpp"

namespace graphmask {

EdgeSet::EdgeSet(std::vector<Edge> edges) : edges_(std::move(edges)) {
  std::sort(edges_.begin(), edges_.end());
  edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());
  for (const auto& e : edges_) {
    if (e.i == e.j) throw ValidationError("edge set contains a self-loop at vertex " + std::to_string(e.i));
    if (e.i < 0) throw ValidationError("edge set contains a negative vertex id");
  }
}

bool EdgeSet::contains(const Edge& e) const {
  return std::binary_search(edges_.begin(), edges_.end(), e);
}

long EdgeSet::index_of(const Edge& e) const {
  auto it = std::lower_bound(edges_.begin(), edges_.end(), e);
  if (it == edges_.end() || *it != e) return -1;
  return static_cast<long>(it - edges_.begin());
}

EdgeSet set_union(const EdgeSet& a, const EdgeSet& b) {
  std::vector<Edge> out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return EdgeSet(std::move(out));
}

EdgeSet set_intersection(const EdgeSet& a, const EdgeSet& b) {
  std::vector<Edge> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return EdgeSet(std::move(out));
}

EdgeSet set_difference(const EdgeSet& a, const EdgeSet& b) {
  std::vector<Edge> out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return EdgeSet(std::move(out));
}

EdgeSet edges_from_weights(const Matrix& weights, double eps) {
  std::vector<Edge> out;
  const int n = static_cast<int>(weights.rows());
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (weights(i, j) > eps) out.emplace_back(i, j);
  return EdgeSet(std::move(out));
}

VertexSet::VertexSet(int n) : n_(n) {
  if (n < 2) throw ValidationError("a vertex set needs at least 2 vertices, got " + std::to_string(n));
}

void validate_weights(const Matrix& w, double tol) {
  if (w.rows() != w.cols())
    throw DimensionError("weight matrix must be square, got " + std::to_string(w.rows()) + "x" +
                         std::to_string(w.cols()));
  const Eigen::Index n = w.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::abs(w(i, i)) > tol)
      throw ValidationError("weight matrix has a nonzero diagonal entry at " + std::to_string(i));
    for (Eigen::Index j = 0; j < n; ++j) {
      if (!std::isfinite(w(i, j))) throw ValidationError("weight matrix has a non-finite entry");
      if (w(i, j) < -tol)
        throw ValidationError("negative weight at (" + std::to_string(i) + "," + std::to_string(j) + ")");
      if (std::abs(w(i, j) - w(j, i)) > tol)
        throw ValidationError("weight matrix is not symmetric at (" + std::to_string(i) + "," +
                              std::to_string(j) + ")");
    }
  }
}

GraphLayer::GraphLayer(Matrix weights, std::string name) : weights_(std::move(weights)), name_(std::move(name)) {
  validate_weights(weights_);
  VertexSet check(static_cast<int>(weights_.rows()));
  (void)check;
  edges_ = edges_from_weights(weights_, 0.0);
}

MultiLayerGraph::MultiLayerGraph(std::vector<GraphLayer> layers) : layers_(std::move(layers)) {
  if (layers_.empty()) throw ValidationError("a multi-layer graph needs at least one layer");
  n_ = layers_.front().size();
  EdgeSet u;
  for (const auto& layer : layers_) {
    if (layer.size() != n_) throw DimensionError("all layers must share one vertex set");
    u = set_union(u, layer.edges());
  }
  union_edges_ = std::move(u);
}

Matrix MultiLayerGraph::min_weights() const {
  Matrix m = layers_.front().weights();
  for (const auto& layer : layers_) m = m.cwiseMin(layer.weights());
  return m;
}

Matrix MultiLayerGraph::max_weights() const {
  Matrix m = layers_.front().weights();
  for (const auto& layer : layers_) m = m.cwiseMax(layer.weights());
  return m;
}

MaskSet::MaskSet(EdgeSet support, Matrix values, double tol)
    : support_(std::move(support)), values_(std::move(values)) {
  if (values_.cols() != static_cast<Eigen::Index>(support_.size()))
    throw DimensionError("mask values have " + std::to_string(values_.cols()) + " columns for " +
                         std::to_string(support_.size()) + " support edges");
  if (values_.rows() < 1) throw DimensionError("a mask set needs at least one layer");
  for (Eigen::Index k = 0; k < values_.cols(); ++k) {
    const auto& e = support_.edges()[static_cast<std::size_t>(k)];
    if (values_.col(k).minCoeff() < -tol)
      throw ValidationError("negative mask entry on edge (" + std::to_string(e.i) + "," + std::to_string(e.j) + ")");
    if (std::abs(values_.col(k).sum() - 1.0) > tol)
      throw ValidationError("mask entries on edge (" + std::to_string(e.i) + "," + std::to_string(e.j) +
                            ") do not sum to one");
  }
}

MaskSet MaskSet::uniform(const MultiLayerGraph& ml) {
  const auto t = ml.layer_count();
  return {ml.union_edges(), Matrix::Constant(t, static_cast<Eigen::Index>(ml.union_edges().size()), 1.0 / t)};
}

double MaskSet::value(int t, int i, int j) const {
  const long k = support_.index_of(Edge(i, j));
  return k < 0 ? 0.0 : values_(t, k);
}

Matrix MaskSet::dense(int t, int n) const {
  Matrix m = Matrix::Zero(n, n);
  for (std::size_t k = 0; k < support_.size(); ++k) {
    const auto& e = support_.edges()[k];
    m(e.i, e.j) = m(e.j, e.i) = values_(t, static_cast<Eigen::Index>(k));
  }
  return m;
}

std::string ValidityReport::describe() const {
  std::ostringstream os;
  os << (valid ? "valid" : "invalid") << " (asymmetry " << max_asymmetry << ", positive off-diagonal "
     << max_positive_offdiag << ", row sum " << max_abs_row_sum << ")";
  return os.str();
}

ValidityReport check_valid_laplacian(const Matrix& l, double tol) {
  if (l.rows() != l.cols()) throw DimensionError("Laplacian must be square");
  ValidityReport r;
  const Eigen::Index n = l.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    r.max_abs_row_sum = std::max(r.max_abs_row_sum, std::abs(l.row(i).sum()));
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) continue;
      r.max_asymmetry = std::max(r.max_asymmetry, std::abs(l(i, j) - l(j, i)));
      r.max_positive_offdiag = std::max(r.max_positive_offdiag, l(i, j));
    }
  }
  r.valid = l.allFinite() && r.max_asymmetry <= tol && r.max_positive_offdiag <= tol && r.max_abs_row_sum <= tol;
  return r;
}

Laplacian::Laplacian(Matrix l, double tol) : l_(std::move(l)) {
  if (l_.rows() != l_.cols()) throw DimensionError("Laplacian must be square");
  valid_ = check_valid_laplacian(l_, tol).valid;
}

GlobalGraph::GlobalGraph(Laplacian l) : laplacian_(std::move(l)) {
  const Matrix& m = laplacian_.matrix();
  const Eigen::Index n = m.rows();
  weights_ = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double w = std::max(0.0, -0.5 * (m(i, j) + m(j, i)));
      weights_(i, j) = weights_(j, i) = w;
    }
  trace_ = m.trace();
}

GlobalGraph GlobalGraph::from_weights(const Matrix& w) { return GlobalGraph(laplacian_from_weights(w)); }

GlobalGraph GlobalGraph::normalized(double volume) const {
  const double total = weights_.sum();
  if (total <= 0.0) throw UndefinedMetricError("cannot normalize the volume of an empty graph");
  return from_weights(weights_ * (volume / total));
}

CorrectiveLaplacian::CorrectiveLaplacian(int n, Vector upper) : upper_(std::move(upper)) {
  if (upper_.size() != static_cast<Eigen::Index>(pair_count(n)))
    throw DimensionError("corrective term needs N(N-1)/2 upper entries");
  matrix_ = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double v = upper_(static_cast<Eigen::Index>(pair_index(i, j, n)));
      matrix_(i, j) = matrix_(j, i) = v;
    }
  for (int i = 0; i < n; ++i) matrix_(i, i) = -matrix_.row(i).sum();
}

Laplacian laplacian_from_weights(const Matrix& weights) {
  validate_weights(weights);
  Matrix l = -weights;
  l.diagonal() = weights.rowwise().sum();
  return Laplacian(std::move(l));
}

Matrix mask_combination(const MultiLayerGraph& ml, const MaskSet& masks) {
  if (masks.layer_count() != ml.layer_count())
    throw DimensionError("mask set has " + std::to_string(masks.layer_count()) + " layers, graph has " +
                         std::to_string(ml.layer_count()));
  const int n = ml.size();
  Matrix w = Matrix::Zero(n, n);
  for (std::size_t k = 0; k < masks.support().size(); ++k) {
    const auto& e = masks.support().edges()[k];
    if (e.j >= n) throw DimensionError("mask support exceeds the vertex set");
    double v = 0.0;
    for (int t = 0; t < ml.layer_count(); ++t)
      v += masks.values()(t, static_cast<Eigen::Index>(k)) * ml.layer(t).weight(e.i, e.j);
    w(e.i, e.j) = w(e.j, e.i) = v;
  }
  return w;
}

Laplacian lambda_of(const MultiLayerGraph& ml, const MaskSet& masks) {
  Matrix w = mask_combination(ml, masks).cwiseMax(0.0);
  return laplacian_from_weights(w);
}

double coverability(const EdgeSet& global, const EdgeSet& layer_union) {
  if (global.empty()) throw UndefinedMetricError("coverability is undefined for an empty global edge set");
  return static_cast<double>(set_intersection(global, layer_union).size()) / static_cast<double>(global.size());
}

Vector pairwise_sq_distances(const Matrix& x) {
  const int n = static_cast<int>(x.rows());
  Vector z(static_cast<Eigen::Index>(pair_count(n)));
  Eigen::Index k = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) z(k++) = (x.row(i) - x.row(j)).squaredNorm();
  return z;
}

}  // namespace graphmask
