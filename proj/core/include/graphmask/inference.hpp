#pragma once

#include <optional>
#include <string>
#include <vector>

#include "graphmask/error.hpp"
#include "graphmask/graph.hpp"
#include "graphmask/qp.hpp"

namespace graphmask {

/// Feasible trace interval of the mask combination when no corrective term
/// is used: [sum_ij min_t W_t, sum_ij max_t W_t].
struct VolumeRange {
  double lower = 0.0;
  double upper = 0.0;
  bool contains(double v, double rel_tol = 1e-9) const;
};

VolumeRange feasible_volume_range(const MultiLayerGraph& ml);

/// Raised when the requested trace lies outside the feasible volume range.
class VolumeRangeError : public InfeasibleError {
 public:
  VolumeRangeError(double trace, VolumeRange range);
  double trace() const noexcept { return trace_; }
  const VolumeRange& range() const noexcept { return range_; }

 private:
  double trace_;
  VolumeRange range_;
};

struct SolveStats {
  QpStatus status = QpStatus::MaxIter;
  int iterations = 0;
  double objective = 0.0;
  std::size_t variables = 0;
  KktReport kkt;
};

struct MlConfig {
  double gamma = 1.0;            ///< corrective-term penalty, > 0 when use_corrective
  std::optional<double> trace;   ///< target volume, defaults to N
  bool use_corrective = true;    ///< full problem with L_E, or the reduced LP
  QpSettings qp;
};

struct MlResult {
  MaskSet masks;
  CorrectiveLaplacian corrective;
  GlobalGraph global;
  /// Percent of global edges drawn from each layer; empty when undefined.
  std::vector<double> layer_contributions;
  SolveStats stats;
  std::vector<std::string> warnings;
  double gamma = 0.0;
  double trace = 0.0;
  bool use_corrective = true;
};

struct LearnedGraph {
  GlobalGraph global;
  SolveStats stats;
  std::vector<std::string> warnings;
};

struct ConvResult {
  Vector alphas;
  GlobalGraph global;
  SolveStats stats;
};

/// Mask learning with the corrective Laplacian:
/// min tr(X'(Lambda(M) + L_E)X) + gamma ||L_E||_F^2 over masks and L_E.
MlResult solve_ml_full(const MultiLayerGraph& ml, const Matrix& x, const MlConfig& cfg);

/// Corrective-free linear program. Throws VolumeRangeError outside the
/// feasible volume range.
MlResult solve_ml_reduced(const MultiLayerGraph& ml, const Matrix& x, const MlConfig& cfg);

/// Dispatches on cfg.use_corrective.
MlResult solve_ml(const MultiLayerGraph& ml, const Matrix& x, const MlConfig& cfg);

/// Signal-only baseline: min tr(X'LX) + gamma ||L||_F^2, L valid, tr(L) = trace.
LearnedGraph solve_gl_sigrep(const Matrix& x, double gamma, double trace, const QpSettings& qp = {});

/// The baseline restricted to the layer union support.
LearnedGraph solve_gl_informed(const MultiLayerGraph& ml, const Matrix& x, double gamma, double trace,
                               const QpSettings& qp = {});

/// Convex combination of layer Laplacians, min tr(X'LX) + beta ||alpha||^2.
/// The returned graph is rescaled to `normalize_volume` when given.
ConvResult solve_gl_conv(const MultiLayerGraph& ml, const Matrix& x, double beta,
                         std::optional<double> normalize_volume = std::nullopt, const QpSettings& qp = {});

/// Percent of global-graph edges on the layer support drawn from each layer.
/// An edge goes to the layer (among those containing it) with the largest mask
/// entry; ties within 1e-6 are split equally. Throws UndefinedMetricError when
/// the global graph has no edge on the layer support.
std::vector<double> layer_contributions(const MultiLayerGraph& ml, const MaskSet& masks, const GlobalGraph& global);
std::vector<double> layer_contributions(const MultiLayerGraph& ml, const MlResult& result);

/// Mask-learning objective evaluated at (masks, corrective).
double ml_objective(const MultiLayerGraph& ml, const Matrix& x, const MaskSet& masks,
                    const CorrectiveLaplacian& corrective, double gamma);

/// Canonical programs, exposed for dumping and testing.
QpProblem build_ml_problem(const MultiLayerGraph& ml, const Matrix& x, double gamma, double trace,
                           bool use_corrective);
QpProblem build_gl_problem(const Matrix& x, double gamma, double trace, const EdgeSet* support);
QpProblem build_conv_problem(const MultiLayerGraph& ml, const Matrix& x, double beta);

/// gamma scaled by the squared Frobenius norm of the observations after
/// removing each signal's mean, which the smoothness term ignores.
double auto_gamma(const Matrix& x, double factor);

}  // namespace graphmask
