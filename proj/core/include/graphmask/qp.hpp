#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Sparse>

#include "graphmask/graph.hpp"

namespace graphmask {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// What a flat variable index stands for in a canonicalized problem.
struct VariableTag {
  enum class Kind { Generic, Mask, Corrective, RowSum, Weight, Degree, Alpha };
  Kind kind = Kind::Generic;
  int layer = -1;
  int i = -1;
  int j = -1;
};

/// minimize 1/2 z'Pz + q'z  subject to  A z = b,  G z <= h.
struct QpProblem {
  SparseMatrix p;
  Vector q;
  SparseMatrix a;
  Vector b;
  SparseMatrix g;
  Vector h;
  std::vector<VariableTag> var_names;

  /// Empty problem over `n` variables.
  static QpProblem with_variables(Eigen::Index n);

  Eigen::Index variables() const noexcept { return q.size(); }
  Eigen::Index equalities() const noexcept { return b.size(); }
  Eigen::Index inequalities() const noexcept { return h.size(); }
  double objective(const Vector& z) const;
  /// Throws DimensionError / ValidationError on inconsistent data.
  void validate() const;
};

enum class QpStatus { Optimal, MaxIter, Infeasible };

std::string to_string(QpStatus s);

/// Residuals of the KKT conditions at (z, y, lambda). `*_rel` values are
/// normalized by 1 + the magnitude of the data they are built from.
struct KktReport {
  double stationarity = 0.0;
  double primal_equality = 0.0;
  double primal_inequality = 0.0;
  double dual_infeasibility = 0.0;
  double complementarity = 0.0;
  double duality_gap = 0.0;

  double stationarity_rel = 0.0;
  double primal_equality_rel = 0.0;
  double primal_inequality_rel = 0.0;
  double duality_gap_rel = 0.0;

  double max_primal_rel() const { return std::max(primal_equality_rel, primal_inequality_rel); }
  double max_rel() const;
};

struct QpSettings {
  double tol_feas = 1e-7;
  double tol_gap = 1e-7;
  int max_iter = 20000;
  /// Iterations without merit improvement before giving up.
  int stall_limit = 60;
  bool verbose = false;
};

struct QpSolution {
  Vector z;
  Vector y;       ///< equality multipliers
  Vector lambda;  ///< inequality multipliers, >= 0
  double objective = 0.0;
  QpStatus status = QpStatus::MaxIter;
  int iterations = 0;
  KktReport kkt;
};

/// Primal-dual interior point solve. Deterministic for fixed input.
QpSolution solve(const QpProblem& problem, const QpSettings& settings = {});

KktReport kkt_residuals(const QpProblem& problem, const Vector& z, const Vector& y, const Vector& lambda);

/// Text dump of (P, q, A, b, G, h) for cross-checking with external solvers.
void write_problem(std::ostream& os, const QpProblem& problem);
QpProblem read_problem(std::istream& is);

}  // namespace graphmask
