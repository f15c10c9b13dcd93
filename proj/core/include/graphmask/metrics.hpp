#pragma once

#include <cstddef>

#include "graphmask/graph.hpp"

namespace graphmask {

struct EdgeClassificationReport {
  double precision = 0.0;
  double recall = 0.0;
  double f_score = 0.0;
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;

  static EdgeClassificationReport from_counts(std::size_t tp, std::size_t fp, std::size_t fn);
};

struct WeightErrorReport {
  double mse = 0.0;  ///< over strict upper-triangle entries
  double rse = 0.0;  ///< ||W - W*||_F^2 / ||W*||_F^2
};

/// Unordered-pair classification of `inferred` against `truth`, both edge sets
/// taken at weight > edge_tol. Throws UndefinedMetricError if truth has no edges.
EdgeClassificationReport edge_report(const GlobalGraph& inferred, const GlobalGraph& truth,
                                     double edge_tol = kEdgeEpsilon);
EdgeClassificationReport edge_report(const EdgeSet& inferred, const EdgeSet& truth);

/// Throws DimensionError on size mismatch and UndefinedMetricError on a zero truth.
WeightErrorReport weight_report(const Matrix& inferred, const Matrix& truth);
WeightErrorReport weight_report(const GlobalGraph& inferred, const GlobalGraph& truth);

/// Selection of every layer edge (pairs with W_t > 0): mask value >= threshold
/// within 1e-6. Counts are pooled over layers.
EdgeClassificationReport mask_report(const MultiLayerGraph& ml, const MaskSet& inferred, const MaskSet& truth,
                                     double select_threshold = 0.5);

/// |a ∩ b| / |a ∪ b|. Throws UndefinedMetricError when both are empty.
double jaccard(const EdgeSet& a, const EdgeSet& b);

/// Mean of |rec - true| / |true| * 100 over entries where `evaluated` is true.
/// Throws UndefinedMetricError listing any evaluated entry with a zero truth.
double mape(const Matrix& recovered, const Matrix& truth, const Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>& evaluated);
double mape(const Vector& recovered, const Vector& truth);

}  // namespace graphmask
