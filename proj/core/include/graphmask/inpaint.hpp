#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "graphmask/error.hpp"
#include "graphmask/graph.hpp"

namespace graphmask {

struct InpaintProblem {
  Laplacian laplacian;
  std::vector<int> observed;  ///< distinct vertex ids
  Vector y;                   ///< values on `observed`, same order
  double gamma = 1000.0;

  void validate() const;
};

/// The system S'S + gamma L is singular: `component` has no observed vertex.
class SingularSystemError : public NumericError {
 public:
  SingularSystemError(const std::string& what, std::vector<int> component)
      : NumericError(what), component_(std::move(component)) {}
  const std::vector<int>& component() const noexcept { return component_; }

 private:
  std::vector<int> component_;
};

/// x = (S'S + gamma L)^{-1} S'y. The relative residual of the normal
/// equations is at most 1e-8 on return.
Vector inpaint(const InpaintProblem& p);

/// Like inpaint, but components without an observed vertex take the mean of
/// `y` instead of raising. `filled` receives the number of such vertices.
Vector inpaint_or_fill(const InpaintProblem& p, std::size_t* filled = nullptr);

/// Objective ||Sx - y||^2 + gamma x'Lx.
double inpaint_objective(const InpaintProblem& p, const Vector& x);

/// Connected components of the graph (W_ij > 0), sorted by smallest vertex.
std::vector<std::vector<int>> connected_components(const Matrix& weights);

struct HoldoutSpec {
  double fraction = 0.5;  ///< share of vertices hidden in each round
  std::uint64_t seed = 1;
};

/// Observed vertex ids for one round, sorted.
std::vector<int> holdout_observed(int n, const HoldoutSpec& spec, std::uint64_t round);

struct InpaintScore {
  std::string method;
  double mse = 0.0;   ///< over all vertices
  double mape = 0.0;  ///< percent, over all vertices
  std::size_t filled = 0;  ///< vertices predicted by the observed mean over all rounds
};

struct InpaintExperimentResult {
  std::vector<std::string> methods;
  Matrix mse;   ///< rounds x methods
  Matrix mape;  ///< rounds x methods
  std::vector<InpaintScore> mean;
};

/// Learns one graph per method from the training columns.
using GraphLearner = std::function<std::vector<std::pair<std::string, GlobalGraph>>(const Matrix& train)>;

/// Leave-one-column-out protocol: for every column c, learn on the others,
/// hide a share of the vertices of c and inpaint them. `gamma_override`
/// replaces `gamma` for the named methods. Vertices in components without an
/// observation are predicted by the observed mean (see inpaint_or_fill).
InpaintExperimentResult inpaint_experiment(const Matrix& signals, const GraphLearner& learner, const HoldoutSpec& holdout,
                                           double gamma, const std::map<std::string, double>& gamma_override = {},
                                           int threads = 0);

}  // namespace graphmask
