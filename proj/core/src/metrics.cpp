#include "graphmask/metrics.hpp"

#include <cmath>
#include <sstream>

#include "graphmask/error.hpp"

namespace graphmask {

EdgeClassificationReport EdgeClassificationReport::from_counts(std::size_t tp, std::size_t fp, std::size_t fn) {
  EdgeClassificationReport r;
  r.tp = tp;
  r.fp = fp;
  r.fn = fn;
  r.precision = tp + fp > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
  r.recall = tp + fn > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
  const double s = r.precision + r.recall;
  r.f_score = s > 0.0 ? 2.0 * r.precision * r.recall / s : 0.0;
  return r;
}

EdgeClassificationReport edge_report(const EdgeSet& inferred, const EdgeSet& truth) {
  if (truth.empty()) throw UndefinedMetricError("edge metrics are undefined for a ground truth without edges");
  const std::size_t tp = set_intersection(inferred, truth).size();
  return EdgeClassificationReport::from_counts(tp, inferred.size() - tp, truth.size() - tp);
}

EdgeClassificationReport edge_report(const GlobalGraph& inferred, const GlobalGraph& truth, double edge_tol) {
  if (inferred.size() != truth.size())
    throw DimensionError("edge_report: " + std::to_string(inferred.size()) + " vs " + std::to_string(truth.size()) +
                         " vertices");
  return edge_report(inferred.edges(edge_tol), truth.edges(edge_tol));
}

WeightErrorReport weight_report(const Matrix& inferred, const Matrix& truth) {
  if (inferred.rows() != truth.rows() || inferred.cols() != truth.cols() || truth.rows() != truth.cols())
    throw DimensionError("weight_report: matrix dimensions differ");
  const auto n = truth.rows();
  if (n < 2) throw DimensionError("weight_report needs at least two vertices");
  double se = 0.0, norm = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double d = inferred(i, j) - truth(i, j);
      se += d * d;
      norm += truth(i, j) * truth(i, j);
    }
  if (norm == 0.0) throw UndefinedMetricError("relative squared error is undefined for a zero ground truth");
  WeightErrorReport r;
  r.mse = se / static_cast<double>(pair_count(static_cast<int>(n)));
  // Both triangles contribute equally, so the ratio equals the full Frobenius ratio.
  r.rse = se / norm;
  return r;
}

WeightErrorReport weight_report(const GlobalGraph& inferred, const GlobalGraph& truth) {
  return weight_report(inferred.weights(), truth.weights());
}

EdgeClassificationReport mask_report(const MultiLayerGraph& ml, const MaskSet& inferred, const MaskSet& truth,
                                     double select_threshold) {
  if (inferred.layer_count() != ml.layer_count() || truth.layer_count() != ml.layer_count())
    throw DimensionError("mask_report: layer counts differ");
  constexpr double slack = 1e-6;
  std::size_t tp = 0, fp = 0, fn = 0, selected_truth = 0;
  for (int t = 0; t < ml.layer_count(); ++t) {
    for (const auto& e : ml.layer(t).edges()) {
      const bool a = inferred.value(t, e.i, e.j) >= select_threshold - slack;
      const bool b = truth.value(t, e.i, e.j) >= select_threshold - slack;
      selected_truth += b ? 1 : 0;
      if (a && b) ++tp;
      else if (a) ++fp;
      else if (b) ++fn;
    }
  }
  if (selected_truth == 0) throw UndefinedMetricError("mask metrics are undefined when the true masks select nothing");
  return EdgeClassificationReport::from_counts(tp, fp, fn);
}

double jaccard(const EdgeSet& a, const EdgeSet& b) {
  const std::size_t u = set_union(a, b).size();
  if (u == 0) throw UndefinedMetricError("jaccard index is undefined for two empty edge sets");
  return static_cast<double>(set_intersection(a, b).size()) / static_cast<double>(u);
}

double mape(const Matrix& recovered, const Matrix& truth,
            const Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>& evaluated) {
  if (recovered.rows() != truth.rows() || recovered.cols() != truth.cols() || evaluated.rows() != truth.rows() ||
      evaluated.cols() != truth.cols())
    throw DimensionError("mape: dimensions differ");
  double total = 0.0;
  std::size_t count = 0;
  std::ostringstream bad;
  std::size_t bad_count = 0;
  for (Eigen::Index j = 0; j < truth.cols(); ++j)
    for (Eigen::Index i = 0; i < truth.rows(); ++i) {
      if (!evaluated(i, j)) continue;
      if (truth(i, j) == 0.0) {
        if (bad_count++ < 16) bad << " (" << i << "," << j << ")";
        continue;
      }
      total += std::abs(recovered(i, j) - truth(i, j)) / std::abs(truth(i, j));
      ++count;
    }
  if (bad_count > 0)
    throw UndefinedMetricError("mape: zero ground truth at " + std::to_string(bad_count) + " entries:" + bad.str());
  if (count == 0) throw UndefinedMetricError("mape: no entries evaluated");
  return 100.0 * total / static_cast<double>(count);
}

double mape(const Vector& recovered, const Vector& truth) {
  const Matrix r = recovered, t = truth;
  return mape(r, t, Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(t.rows(), t.cols(), true));
}

}  // namespace graphmask
