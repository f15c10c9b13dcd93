#include "graphmask/inference.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace graphmask {

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

SparseMatrix from_triplets(Eigen::Index rows, Eigen::Index cols, const Triplets& t) {
  SparseMatrix m(rows, cols);
  m.setFromTriplets(t.begin(), t.end());
  m.makeCompressed();
  return m;
}

void check_signals(const Matrix& x, int n) {
  if (x.rows() != n)
    throw DimensionError("signal matrix has " + std::to_string(x.rows()) + " rows for " + std::to_string(n) +
                         " vertices");
  if (x.cols() < 1) throw DimensionError("signal matrix has no columns");
  if (!x.allFinite()) throw ValidationError("signal matrix has non-finite entries");
}

bool degenerate_signals(const Vector& z, const Matrix& x) {
  return z.size() == 0 || z.maxCoeff() <= 1e-12 * (1.0 + x.squaredNorm());
}

const char* kDegenerateWarning =
    "signals are constant across vertices; the solution is determined by the regularizer alone";

SolveStats stats_of(const QpSolution& sol, const QpProblem& pr) {
  SolveStats s;
  s.status = sol.status;
  s.iterations = sol.iterations;
  s.objective = sol.objective;
  s.variables = static_cast<std::size_t>(pr.variables());
  s.kkt = sol.kkt;
  return s;
}

QpSolution run(const QpProblem& pr, const QpSettings& settings, std::vector<std::string>& warnings) {
  QpSolution sol = solve(pr, settings);
  if (sol.status == QpStatus::Infeasible) throw InfeasibleError("the learning problem has no feasible point");
  if (sol.status == QpStatus::MaxIter) {
    if (sol.kkt.max_rel() > 1e-5) {
      std::ostringstream os;
      os << "solver stopped after " << sol.iterations << " iterations with KKT residual " << sol.kkt.max_rel();
      throw NumericError(os.str());
    }
    warnings.emplace_back("solver stopped at the iteration cap with KKT residual " + std::to_string(sol.kkt.max_rel()));
  }
  return sol;
}

// Symmetrizes, clears solver round-off on off-diagonals and restores zero row sums.
Laplacian clean_laplacian(Matrix l) {
  const Eigen::Index n = l.rows();
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) {
      double v = 0.5 * (l(i, j) + l(j, i));
      if (v > 0.0 && v <= 1e-6) v = 0.0;
      l(i, j) = l(j, i) = v;
    }
  for (Eigen::Index i = 0; i < n; ++i) {
    l(i, i) = 0.0;
    l(i, i) = -l.row(i).sum();
  }
  return Laplacian(std::move(l));
}

Matrix raw_mask_combination(const MultiLayerGraph& ml, const EdgeSet& support, const Matrix& values) {
  const int n = ml.size();
  Matrix w = Matrix::Zero(n, n);
  for (std::size_t k = 0; k < support.size(); ++k) {
    const auto& e = support.edges()[k];
    double v = 0.0;
    for (int t = 0; t < ml.layer_count(); ++t) v += values(t, static_cast<Eigen::Index>(k)) * ml.layer(t).weight(e.i, e.j);
    w(e.i, e.j) = w(e.j, e.i) = v;
  }
  return w;
}

}  // namespace

bool VolumeRange::contains(double v, double rel_tol) const {
  const double slack = rel_tol * std::max(1.0, std::abs(upper));
  return v >= lower - slack && v <= upper + slack;
}

VolumeRange feasible_volume_range(const MultiLayerGraph& ml) { return {ml.min_weights().sum(), ml.max_weights().sum()}; }

VolumeRangeError::VolumeRangeError(double trace, VolumeRange range)
    : InfeasibleError([&] {
        std::ostringstream os;
        os.precision(10);
        os << "trace " << trace << " is outside the feasible volume range [" << range.lower << ", " << range.upper
           << "] of the mask combination";
        return os.str();
      }()),
      trace_(trace),
      range_(range) {}

double auto_gamma(const Matrix& x, double factor) {
  const Matrix centered = x.rowwise() - x.colwise().mean();
  return factor * centered.squaredNorm();
}

QpProblem build_ml_problem(const MultiLayerGraph& ml, const Matrix& x, double gamma, double trace,
                           bool use_corrective) {
  const int n = ml.size();
  const int layers = ml.layer_count();
  const EdgeSet& support = ml.union_edges();
  const auto edges = static_cast<Eigen::Index>(support.size());
  const auto pairs = static_cast<Eigen::Index>(pair_count(n));
  const Vector z = pairwise_sq_distances(x);

  const Eigen::Index n_mask = edges * layers;
  const Eigen::Index n_corr = use_corrective ? pairs : 0;
  const Eigen::Index n_row = use_corrective ? n : 0;
  const Eigen::Index total = n_mask + n_corr + n_row;
  auto mask_var = [&](Eigen::Index e, int t) { return e * layers + t; };
  auto corr_var = [&](Eigen::Index p) { return n_mask + p; };
  auto row_var = [&](int i) { return n_mask + n_corr + i; };

  QpProblem pr = QpProblem::with_variables(total);
  for (Eigen::Index e = 0; e < edges; ++e) {
    const auto& edge = support.edges()[static_cast<std::size_t>(e)];
    const double ze = z(static_cast<Eigen::Index>(pair_index(edge.i, edge.j, n)));
    for (int t = 0; t < layers; ++t) {
      pr.q(mask_var(e, t)) = ml.layer(t).weight(edge.i, edge.j) * ze;
      pr.var_names[static_cast<std::size_t>(mask_var(e, t))] = {VariableTag::Kind::Mask, t, edge.i, edge.j};
    }
  }

  Triplets pt, at, gt;
  Eigen::Index eq = 0, ineq = 0;
  std::vector<double> b, h;

  // Unity sum per union edge.
  for (Eigen::Index e = 0; e < edges; ++e) {
    for (int t = 0; t < layers; ++t) at.emplace_back(static_cast<int>(eq), static_cast<int>(mask_var(e, t)), 1.0);
    b.push_back(1.0);
    ++eq;
  }
  // Trace: 2 sum W_M - 2 sum c = Gamma.
  for (Eigen::Index e = 0; e < edges; ++e) {
    const auto& edge = support.edges()[static_cast<std::size_t>(e)];
    for (int t = 0; t < layers; ++t) {
      const double w = ml.layer(t).weight(edge.i, edge.j);
      if (w != 0.0) at.emplace_back(static_cast<int>(eq), static_cast<int>(mask_var(e, t)), 2.0 * w);
    }
  }
  if (use_corrective)
    for (Eigen::Index p = 0; p < pairs; ++p) at.emplace_back(static_cast<int>(eq), static_cast<int>(corr_var(p)), -2.0);
  b.push_back(trace);
  ++eq;

  // Masks are nonnegative.
  for (Eigen::Index v = 0; v < n_mask; ++v) {
    gt.emplace_back(static_cast<int>(ineq++), static_cast<int>(v), -1.0);
    h.push_back(0.0);
  }

  if (use_corrective) {
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        const auto p = static_cast<Eigen::Index>(pair_index(i, j, n));
        pr.q(corr_var(p)) = -z(p);
        pr.var_names[static_cast<std::size_t>(corr_var(p))] = {VariableTag::Kind::Corrective, -1, i, j};
        pt.emplace_back(static_cast<int>(corr_var(p)), static_cast<int>(corr_var(p)), 4.0 * gamma);
        // Global off-diagonal c_ij - W_M,ij must stay <= 0.
        gt.emplace_back(static_cast<int>(ineq), static_cast<int>(corr_var(p)), 1.0);
        const long e = support.index_of(Edge(i, j));
        if (e >= 0)
          for (int t = 0; t < layers; ++t) {
            const double w = ml.layer(t).weight(i, j);
            if (w != 0.0) gt.emplace_back(static_cast<int>(ineq), static_cast<int>(mask_var(e, t)), -w);
          }
        h.push_back(0.0);
        ++ineq;
      }
    // Row sums r_i of the corrective off-diagonals; diag(L_E) = -r.
    for (int i = 0; i < n; ++i) {
      pr.var_names[static_cast<std::size_t>(row_var(i))] = {VariableTag::Kind::RowSum, -1, i, i};
      pt.emplace_back(static_cast<int>(row_var(i)), static_cast<int>(row_var(i)), 2.0 * gamma);
      at.emplace_back(static_cast<int>(eq), static_cast<int>(row_var(i)), 1.0);
      for (int j = 0; j < n; ++j)
        if (j != i) at.emplace_back(static_cast<int>(eq), static_cast<int>(corr_var(static_cast<Eigen::Index>(pair_index(i, j, n)))), -1.0);
      b.push_back(0.0);
      ++eq;
    }
  }

  pr.p = from_triplets(total, total, pt);
  pr.a = from_triplets(eq, total, at);
  pr.b = Eigen::Map<Vector>(b.data(), static_cast<Eigen::Index>(b.size()));
  pr.g = from_triplets(ineq, total, gt);
  pr.h = Eigen::Map<Vector>(h.data(), static_cast<Eigen::Index>(h.size()));
  return pr;
}

namespace {

MlResult extract_ml(const MultiLayerGraph& ml, const QpSolution& sol, double gamma, double trace, bool use_corrective) {
  const int n = ml.size();
  const int layers = ml.layer_count();
  const EdgeSet& support = ml.union_edges();
  const auto edges = static_cast<Eigen::Index>(support.size());
  Matrix values(layers, edges);
  for (Eigen::Index e = 0; e < edges; ++e)
    for (int t = 0; t < layers; ++t) values(t, e) = sol.z(e * layers + t);

  Vector upper = Vector::Zero(static_cast<Eigen::Index>(pair_count(n)));
  if (use_corrective) upper = sol.z.segment(edges * layers, upper.size());
  CorrectiveLaplacian corrective(n, upper);

  const Matrix wm = raw_mask_combination(ml, support, values);
  Matrix l = -wm;
  l.diagonal() = wm.rowwise().sum();
  l += corrective.matrix();

  MlResult r{MaskSet(support, values, 1e-5), std::move(corrective), GlobalGraph(clean_laplacian(std::move(l))),
             {}, {}, {}, gamma, trace, use_corrective};
  return r;
}

void attach_contributions(const MultiLayerGraph& ml, MlResult& r) {
  try {
    r.layer_contributions = layer_contributions(ml, r.masks, r.global);
  } catch (const UndefinedMetricError&) {
    r.layer_contributions.clear();
  }
}

}  // namespace

MlResult solve_ml_full(const MultiLayerGraph& ml, const Matrix& x, const MlConfig& cfg) {
  check_signals(x, ml.size());
  if (!(cfg.gamma > 0.0)) throw ValidationError("gamma must be positive for the corrective formulation");
  const double trace = cfg.trace.value_or(static_cast<double>(ml.size()));
  if (!(trace > 0.0)) throw InfeasibleError("trace must be positive, got " + std::to_string(trace));

  std::vector<std::string> warnings;
  if (degenerate_signals(pairwise_sq_distances(x), x)) warnings.emplace_back(kDegenerateWarning);
  const QpProblem pr = build_ml_problem(ml, x, cfg.gamma, trace, true);
  const QpSolution sol = run(pr, cfg.qp, warnings);
  MlResult r = extract_ml(ml, sol, cfg.gamma, trace, true);
  r.stats = stats_of(sol, pr);
  r.warnings = std::move(warnings);
  attach_contributions(ml, r);
  return r;
}

MlResult solve_ml_reduced(const MultiLayerGraph& ml, const Matrix& x, const MlConfig& cfg) {
  check_signals(x, ml.size());
  const double trace = cfg.trace.value_or(static_cast<double>(ml.size()));
  const VolumeRange range = feasible_volume_range(ml);
  if (!(trace > 0.0) || !range.contains(trace)) throw VolumeRangeError(trace, range);

  std::vector<std::string> warnings;
  if (degenerate_signals(pairwise_sq_distances(x), x)) warnings.emplace_back(kDegenerateWarning);
  const QpProblem pr = build_ml_problem(ml, x, 0.0, trace, false);
  const QpSolution sol = run(pr, cfg.qp, warnings);
  MlResult r = extract_ml(ml, sol, 0.0, trace, false);
  r.stats = stats_of(sol, pr);
  r.warnings = std::move(warnings);
  attach_contributions(ml, r);
  return r;
}

MlResult solve_ml(const MultiLayerGraph& ml, const Matrix& x, const MlConfig& cfg) {
  return cfg.use_corrective ? solve_ml_full(ml, x, cfg) : solve_ml_reduced(ml, x, cfg);
}

QpProblem build_gl_problem(const Matrix& x, double gamma, double trace, const EdgeSet* support) {
  const int n = static_cast<int>(x.rows());
  const Vector z = pairwise_sq_distances(x);
  std::vector<Edge> pairs;
  if (support) {
    pairs = support->edges();
  } else {
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
  }
  const auto nw = static_cast<Eigen::Index>(pairs.size());
  const Eigen::Index total = nw + n;
  QpProblem pr = QpProblem::with_variables(total);
  Triplets pt, at, gt;
  std::vector<double> b;

  for (Eigen::Index k = 0; k < nw; ++k) {
    const auto& e = pairs[static_cast<std::size_t>(k)];
    pr.q(k) = z(static_cast<Eigen::Index>(pair_index(e.i, e.j, n)));
    pr.var_names[static_cast<std::size_t>(k)] = {VariableTag::Kind::Weight, -1, e.i, e.j};
    if (gamma != 0.0) pt.emplace_back(static_cast<int>(k), static_cast<int>(k), 4.0 * gamma);
    at.emplace_back(0, static_cast<int>(k), 2.0);
    gt.emplace_back(static_cast<int>(k), static_cast<int>(k), -1.0);
  }
  b.push_back(trace);
  for (int i = 0; i < n; ++i) {
    const Eigen::Index v = nw + i;
    pr.var_names[static_cast<std::size_t>(v)] = {VariableTag::Kind::Degree, -1, i, i};
    if (gamma != 0.0) pt.emplace_back(static_cast<int>(v), static_cast<int>(v), 2.0 * gamma);
    at.emplace_back(1 + i, static_cast<int>(v), 1.0);
    b.push_back(0.0);
  }
  for (Eigen::Index k = 0; k < nw; ++k) {
    const auto& e = pairs[static_cast<std::size_t>(k)];
    at.emplace_back(1 + e.i, static_cast<int>(k), -1.0);
    at.emplace_back(1 + e.j, static_cast<int>(k), -1.0);
  }
  pr.p = from_triplets(total, total, pt);
  pr.a = from_triplets(1 + n, total, at);
  pr.b = Eigen::Map<Vector>(b.data(), static_cast<Eigen::Index>(b.size()));
  pr.g = from_triplets(nw, total, gt);
  pr.h = Vector::Zero(nw);
  return pr;
}

namespace {

LearnedGraph solve_gl(const Matrix& x, double gamma, double trace, const EdgeSet* support, const QpSettings& qp) {
  if (!(gamma >= 0.0)) throw ValidationError("gamma must be nonnegative");
  if (!(trace > 0.0)) throw InfeasibleError("trace must be positive");
  const int n = static_cast<int>(x.rows());
  if (support && support->empty())
    throw InfeasibleError("the layer union is empty, so only the zero Laplacian is admissible");

  std::vector<std::string> warnings;
  if (degenerate_signals(pairwise_sq_distances(x), x)) warnings.emplace_back(kDegenerateWarning);
  const QpProblem pr = build_gl_problem(x, gamma, trace, support);
  const QpSolution sol = run(pr, qp, warnings);

  Matrix l = Matrix::Zero(n, n);
  for (std::size_t k = 0; k < pr.var_names.size(); ++k) {
    const auto& tag = pr.var_names[k];
    if (tag.kind != VariableTag::Kind::Weight) continue;
    l(tag.i, tag.j) = l(tag.j, tag.i) = -sol.z(static_cast<Eigen::Index>(k));
  }
  return {GlobalGraph(clean_laplacian(std::move(l))), stats_of(sol, pr), std::move(warnings)};
}

}  // namespace

LearnedGraph solve_gl_sigrep(const Matrix& x, double gamma, double trace, const QpSettings& qp) {
  if (x.rows() < 2) throw DimensionError("need at least two vertices");
  check_signals(x, static_cast<int>(x.rows()));
  return solve_gl(x, gamma, trace, nullptr, qp);
}

LearnedGraph solve_gl_informed(const MultiLayerGraph& ml, const Matrix& x, double gamma, double trace,
                               const QpSettings& qp) {
  check_signals(x, ml.size());
  return solve_gl(x, gamma, trace, &ml.union_edges(), qp);
}

QpProblem build_conv_problem(const MultiLayerGraph& ml, const Matrix& x, double beta) {
  const int layers = ml.layer_count();
  QpProblem pr = QpProblem::with_variables(layers);
  Triplets pt, at, gt;
  for (int t = 0; t < layers; ++t) {
    const Laplacian lt = laplacian_from_weights(ml.layer(t).weights());
    pr.q(t) = (x.transpose() * lt.matrix() * x).trace();
    pr.var_names[static_cast<std::size_t>(t)] = {VariableTag::Kind::Alpha, t, -1, -1};
    if (beta != 0.0) pt.emplace_back(t, t, 2.0 * beta);
    at.emplace_back(0, t, 1.0);
    gt.emplace_back(t, t, -1.0);
  }
  pr.p = from_triplets(layers, layers, pt);
  pr.a = from_triplets(1, layers, at);
  pr.b = Vector::Ones(1);
  pr.g = from_triplets(layers, layers, gt);
  pr.h = Vector::Zero(layers);
  return pr;
}

ConvResult solve_gl_conv(const MultiLayerGraph& ml, const Matrix& x, double beta,
                         std::optional<double> normalize_volume, const QpSettings& qp) {
  check_signals(x, ml.size());
  if (!(beta >= 0.0)) throw ValidationError("beta must be nonnegative");
  std::vector<std::string> warnings;
  const QpProblem pr = build_conv_problem(ml, x, beta);
  const QpSolution sol = run(pr, qp, warnings);
  Vector alphas = sol.z.cwiseMax(0.0);
  alphas /= alphas.sum();

  Matrix w = Matrix::Zero(ml.size(), ml.size());
  for (int t = 0; t < ml.layer_count(); ++t) w += alphas(t) * ml.layer(t).weights();
  GlobalGraph global = GlobalGraph::from_weights(w);
  if (normalize_volume && w.sum() > 0.0) global = global.normalized(*normalize_volume);
  return {std::move(alphas), std::move(global), stats_of(sol, pr)};
}

std::vector<double> layer_contributions(const MultiLayerGraph& ml, const MaskSet& masks, const GlobalGraph& global) {
  const int layers = ml.layer_count();
  std::vector<double> counts(static_cast<std::size_t>(layers), 0.0);
  double total = 0.0;
  for (const auto& e : global.edges()) {
    const long k = masks.support().index_of(e);
    if (k < 0) continue;
    double best = -1.0;
    for (int t = 0; t < layers; ++t)
      if (ml.layer(t).weight(e.i, e.j) > 0.0) best = std::max(best, masks.values()(t, k));
    if (best < 0.0) continue;
    std::vector<int> tied;
    for (int t = 0; t < layers; ++t)
      if (ml.layer(t).weight(e.i, e.j) > 0.0 && masks.values()(t, k) >= best - 1e-6) tied.push_back(t);
    for (int t : tied) counts[static_cast<std::size_t>(t)] += 1.0 / static_cast<double>(tied.size());
    total += 1.0;
  }
  if (total == 0.0) throw UndefinedMetricError("the global graph has no edge on the layer support");
  for (auto& c : counts) c = 100.0 * c / total;
  return counts;
}

std::vector<double> layer_contributions(const MultiLayerGraph& ml, const MlResult& result) {
  return layer_contributions(ml, result.masks, result.global);
}

double ml_objective(const MultiLayerGraph& ml, const Matrix& x, const MaskSet& masks,
                    const CorrectiveLaplacian& corrective, double gamma) {
  const Matrix wm = raw_mask_combination(ml, masks.support(), masks.values());
  Matrix l = -wm;
  l.diagonal() = wm.rowwise().sum();
  l += corrective.matrix();
  return (x.transpose() * l * x).trace() + gamma * corrective.frobenius_squared();
}

}  // namespace graphmask
