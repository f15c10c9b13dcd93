#include "graphmask/qp.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>

#include <Eigen/SparseCholesky>

#include "graphmask/error.hpp"

namespace graphmask {

namespace {

double inf_norm(const Vector& v) { return v.size() == 0 ? 0.0 : v.lpNorm<Eigen::Infinity>(); }

double max_abs(const SparseMatrix& m) {
  double out = 0.0;
  for (int k = 0; k < m.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(m, k); it; ++it) out = std::max(out, std::abs(it.value()));
  return out;
}

Vector row_inf_norms(const SparseMatrix& m) {
  Vector out = Vector::Zero(m.rows());
  for (int k = 0; k < m.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(m, k); it; ++it)
      out(it.row()) = std::max(out(it.row()), std::abs(it.value()));
  return out;
}

// Largest step in (0, 1] keeping v + alpha * dv >= 0.
double max_step(const Vector& v, const Vector& dv) {
  double alpha = 1.0;
  for (Eigen::Index k = 0; k < v.size(); ++k)
    if (dv(k) < 0.0) alpha = std::min(alpha, -v(k) / dv(k));
  return alpha;
}

// Scaled copy of the problem plus the factors needed to map back.
struct ScaledProblem {
  SparseMatrix p, a, at, g, gt;
  Vector q, b, h;
  double cost_scale = 1.0;
  Vector a_scale, g_scale;  // row multipliers applied to A and G
};

ScaledProblem scale_problem(const QpProblem& in) {
  ScaledProblem s;
  s.cost_scale = std::max(max_abs(in.p), inf_norm(in.q));
  if (!(s.cost_scale > 0.0)) s.cost_scale = 1.0;
  s.p = in.p / s.cost_scale;
  s.q = in.q / s.cost_scale;

  auto row_scale = [](const SparseMatrix& m, Vector& scale) {
    scale = row_inf_norms(m).unaryExpr([](double v) { return v > 0.0 ? 1.0 / v : 1.0; });
    return SparseMatrix(scale.asDiagonal() * m);
  };
  s.a = row_scale(in.a, s.a_scale);
  s.g = row_scale(in.g, s.g_scale);
  s.b = s.a_scale.cwiseProduct(in.b);
  s.h = s.g_scale.cwiseProduct(in.h);
  s.at = s.a.transpose();
  s.gt = s.g.transpose();
  return s;
}

// Quasi-definite KKT system [H + dI, A'; A, -dI] with H = P + G' diag(w) G.
class KktSystem {
 public:
  KktSystem(const ScaledProblem& sp, double reg) : sp_(sp), reg_(reg) {
    n_ = sp.p.rows();
    p_ = sp.a.rows();
  }

  void factor(const Vector& w) {
    h_ = sp_.p;
    if (sp_.g.rows() > 0) h_ += SparseMatrix(sp_.gt * (w.asDiagonal() * sp_.g));
    h_.makeCompressed();
    for (double reg = reg_; reg <= 1e-3; reg *= 100.0) {
      if (factor_with(reg)) return;
    }
    throw NumericError("KKT factorization failed");
  }

  // Solves the unregularized system with iterative refinement.
  void solve(const Vector& rhs_z, const Vector& rhs_y, Vector& dz, Vector& dy) const {
    Vector rhs(n_ + p_);
    rhs << rhs_z, rhs_y;
    Vector x = ldlt_.solve(rhs);
    const double scale = 1.0 + inf_norm(rhs);
    for (int pass = 0; pass < 8; ++pass) {
      Vector r = rhs - apply(x);
      if (inf_norm(r) <= 1e-14 * scale) break;
      x += ldlt_.solve(r);
    }
    dz = x.head(n_);
    dy = x.tail(p_);
  }

 private:
  // Primal block first, so every pivot keeps the sign of its block.
  bool factor_with(double reg) {
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(h_.nonZeros() + sp_.a.nonZeros() + n_ + p_));
    for (int k = 0; k < h_.outerSize(); ++k)
      for (SparseMatrix::InnerIterator it(h_, k); it; ++it)
        if (it.row() >= it.col()) trip.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
    for (Eigen::Index i = 0; i < n_; ++i) trip.emplace_back(static_cast<int>(i), static_cast<int>(i), reg);
    for (int k = 0; k < sp_.a.outerSize(); ++k)
      for (SparseMatrix::InnerIterator it(sp_.a, k); it; ++it)
        trip.emplace_back(static_cast<int>(n_ + it.row()), static_cast<int>(it.col()), it.value());
    for (Eigen::Index i = 0; i < p_; ++i) trip.emplace_back(static_cast<int>(n_ + i), static_cast<int>(n_ + i), -reg);

    SparseMatrix k(n_ + p_, n_ + p_);
    k.setFromTriplets(trip.begin(), trip.end());
    k.makeCompressed();

    const bool same_pattern =
        analyzed_ && k.nonZeros() == static_cast<Eigen::Index>(pattern_inner_.size()) &&
        std::equal(k.outerIndexPtr(), k.outerIndexPtr() + k.outerSize() + 1, pattern_outer_.begin()) &&
        std::equal(k.innerIndexPtr(), k.innerIndexPtr() + k.nonZeros(), pattern_inner_.begin());
    if (!same_pattern) {
      ldlt_.analyzePattern(k);
      pattern_outer_.assign(k.outerIndexPtr(), k.outerIndexPtr() + k.outerSize() + 1);
      pattern_inner_.assign(k.innerIndexPtr(), k.innerIndexPtr() + k.nonZeros());
      analyzed_ = true;
    }
    ldlt_.factorize(k);
    if (ldlt_.info() != Eigen::Success) return false;
    const Vector& d = ldlt_.vectorD();
    if (!d.allFinite()) return false;
    return (d.head(n_).array() > 0.0).all() && (d.tail(p_).array() < 0.0).all();
  }

  Vector apply(const Vector& x) const {
    Vector out(n_ + p_);
    const auto xz = x.head(n_);
    const auto xy = x.tail(p_);
    out.head(n_) = h_.selfadjointView<Eigen::Lower>() * xz;
    if (p_ > 0) {
      out.head(n_) += sp_.at * xy;
      out.tail(p_) = sp_.a * xz;
    }
    return out;
  }

  const ScaledProblem& sp_;
  double reg_;
  Eigen::Index n_ = 0, p_ = 0;
  SparseMatrix h_;
  Eigen::SimplicialLDLT<SparseMatrix, Eigen::Lower, Eigen::NaturalOrdering<int>> ldlt_;
  bool analyzed_ = false;
  std::vector<int> pattern_outer_, pattern_inner_;
};

void check_psd(const SparseMatrix& p) {
  if (p.rows() == 0) return;
  SparseMatrix shifted = p;
  for (Eigen::Index i = 0; i < p.rows(); ++i) shifted.coeffRef(i, i) += 1e-9;
  Eigen::SimplicialLLT<SparseMatrix> llt(shifted);
  if (llt.info() != Eigen::Success) throw ValidationError("quadratic term P is not positive semidefinite");
}

struct Iterate {
  Vector z, y, lambda, s;
};

}  // namespace

QpProblem QpProblem::with_variables(Eigen::Index n) {
  QpProblem out;
  out.p = SparseMatrix(n, n);
  out.q = Vector::Zero(n);
  out.a = SparseMatrix(0, n);
  out.b = Vector::Zero(0);
  out.g = SparseMatrix(0, n);
  out.h = Vector::Zero(0);
  out.var_names.assign(static_cast<std::size_t>(n), VariableTag{});
  return out;
}

double QpProblem::objective(const Vector& z) const { return 0.5 * z.dot(p * z) + q.dot(z); }

void QpProblem::validate() const {
  const Eigen::Index n = q.size();
  if (p.rows() != n || p.cols() != n) throw DimensionError("P must be n x n");
  if (a.cols() != n || a.rows() != b.size()) throw DimensionError("equality system has inconsistent dimensions");
  if (g.cols() != n || g.rows() != h.size()) throw DimensionError("inequality system has inconsistent dimensions");
  if (!var_names.empty() && static_cast<Eigen::Index>(var_names.size()) != n)
    throw DimensionError("variable name table does not match the variable count");
  const double asym = max_abs(SparseMatrix(p - SparseMatrix(p.transpose())));
  if (asym > 1e-9 * std::max(1.0, max_abs(p))) throw ValidationError("P is not symmetric");
  if (!q.allFinite() || !b.allFinite() || !h.allFinite()) throw ValidationError("problem data must be finite");
}

std::string to_string(QpStatus s) {
  switch (s) {
    case QpStatus::Optimal: return "optimal";
    case QpStatus::MaxIter: return "max-iter";
    case QpStatus::Infeasible: return "infeasible";
  }
  return "unknown";
}

double KktReport::max_rel() const {
  return std::max({stationarity_rel, primal_equality_rel, primal_inequality_rel, duality_gap_rel});
}

KktReport kkt_residuals(const QpProblem& pr, const Vector& z, const Vector& y, const Vector& lambda) {
  if (z.size() != pr.variables() || y.size() != pr.equalities() || lambda.size() != pr.inequalities())
    throw DimensionError("KKT point does not match the problem dimensions");
  KktReport r;
  const Vector pz = pr.p * z;
  const Vector aty = pr.a.transpose() * y;
  const Vector gtl = pr.g.transpose() * lambda;
  const Vector az = pr.a * z;
  const Vector gz = pr.g * z;
  const Vector slack = pr.h - gz;

  r.stationarity = inf_norm(pz + pr.q + aty + gtl);
  r.primal_equality = inf_norm(az - pr.b);
  r.primal_inequality = slack.size() ? std::max(0.0, -slack.minCoeff()) : 0.0;
  r.dual_infeasibility = lambda.size() ? std::max(0.0, -lambda.minCoeff()) : 0.0;
  r.complementarity = lambda.size() ? inf_norm(lambda.cwiseProduct(slack)) : 0.0;

  const double pobj = 0.5 * z.dot(pz) + pr.q.dot(z);
  const double dobj = -0.5 * z.dot(pz) - pr.b.dot(y) - pr.h.dot(lambda);
  r.duality_gap = std::abs(pobj - dobj);

  r.stationarity_rel =
      r.stationarity / (1.0 + std::max({inf_norm(pz), inf_norm(pr.q), inf_norm(aty), inf_norm(gtl)}));
  r.primal_equality_rel = r.primal_equality / (1.0 + std::max(inf_norm(az), inf_norm(pr.b)));
  r.primal_inequality_rel = r.primal_inequality / (1.0 + std::max(inf_norm(gz), inf_norm(pr.h)));
  r.duality_gap_rel = r.duality_gap / (1.0 + std::abs(pobj));
  return r;
}

namespace {

QpSolution solve_interior(const QpProblem& problem, const QpSettings& settings) {

  const ScaledProblem sp = scale_problem(problem);
  const Eigen::Index n = sp.q.size();
  const Eigen::Index p = sp.b.size();
  const Eigen::Index m = sp.h.size();

  QpSolution out;
  auto finish = [&](const Iterate& it, QpStatus status, int iters) {
    out.z = it.z;
    out.y = sp.cost_scale * sp.a_scale.cwiseProduct(it.y);
    out.lambda = sp.cost_scale * sp.g_scale.cwiseProduct(it.lambda);
    out.objective = problem.objective(out.z);
    out.status = status;
    out.iterations = iters;
    out.kkt = kkt_residuals(problem, out.z, out.y, out.lambda);
    return out;
  };

  // A zero row in A with nonzero rhs (or in G with negative rhs) is infeasible outright.
  {
    const Vector an = row_inf_norms(problem.a);
    for (Eigen::Index k = 0; k < p; ++k)
      if (an(k) == 0.0 && std::abs(problem.b(k)) > settings.tol_feas) {
        Iterate it{Vector::Zero(n), Vector::Zero(p), Vector::Zero(m), Vector::Ones(m)};
        return finish(it, QpStatus::Infeasible, 0);
      }
    const Vector gn = row_inf_norms(problem.g);
    for (Eigen::Index k = 0; k < m; ++k)
      if (gn(k) == 0.0 && problem.h(k) < -settings.tol_feas) {
        Iterate it{Vector::Zero(n), Vector::Zero(p), Vector::Zero(m), Vector::Ones(m)};
        return finish(it, QpStatus::Infeasible, 0);
      }
  }

  // Internal stopping runs tighter than the contract so the unscaled residuals clear it.
  const double tol_p = 0.1 * settings.tol_feas;
  const double tol_d = 0.1 * settings.tol_feas;
  const double tol_g = 0.1 * settings.tol_gap;

  KktSystem kkt(sp, 1e-10);
  Iterate it;

  // Initial point from the regularized least-squares system with unit weights.
  kkt.factor(Vector::Ones(m));
  {
    Vector rhs_z = -sp.q;
    if (m > 0) rhs_z += sp.gt * sp.h;
    kkt.solve(rhs_z, sp.b, it.z, it.y);
    if (m > 0) {
      it.s = sp.h - sp.g * it.z;
      it.lambda = -it.s;
      const double alpha_p = -it.s.minCoeff();
      if (alpha_p >= -1e-8) it.s.array() += 1.0 + alpha_p;
      const double alpha_d = -it.lambda.minCoeff();
      if (alpha_d >= -1e-8) it.lambda.array() += 1.0 + alpha_d;
    } else {
      it.s = Vector::Zero(0);
      it.lambda = Vector::Zero(0);
    }
  }

  const double b_norm = inf_norm(sp.b), h_norm = inf_norm(sp.h), q_norm = inf_norm(sp.q);
  Iterate best = it;
  double best_merit = std::numeric_limits<double>::infinity();
  int since_best = 0;

  for (int iter = 0; iter < settings.max_iter; ++iter) {
    const Vector r_d = sp.p * it.z + sp.q + (p ? Vector(sp.at * it.y) : Vector::Zero(n)) +
                       (m ? Vector(sp.gt * it.lambda) : Vector::Zero(n));
    const Vector r_p = sp.a * it.z - sp.b;
    const Vector r_i = m ? Vector(sp.g * it.z + it.s - sp.h) : Vector::Zero(0);
    const double sl = m ? it.s.dot(it.lambda) : 0.0;
    const double mu = m ? sl / static_cast<double>(m) : 0.0;
    const double pobj = 0.5 * it.z.dot(sp.p * it.z) + sp.q.dot(it.z);

    if (!r_d.allFinite() || !std::isfinite(mu)) throw NumericError("interior point iterate diverged");

    const double pres = std::max(inf_norm(r_p) / (1.0 + b_norm), inf_norm(r_i) / (1.0 + h_norm));
    const double dres = inf_norm(r_d) / (1.0 + q_norm);
    const double gap = sl / (1.0 + std::abs(pobj));
    const double merit = std::max({pres, dres, gap});

    if (settings.verbose)
      std::cerr << "ipm " << iter << " pres " << pres << " dres " << dres << " gap " << gap << " mu " << mu << "\n";

    if (pres <= tol_p && dres <= tol_d && gap <= tol_g) {
      finish(it, QpStatus::Optimal, iter);
      if (out.kkt.max_primal_rel() <= settings.tol_feas && out.kkt.stationarity_rel <= settings.tol_feas &&
          out.kkt.duality_gap_rel <= settings.tol_gap)
        return out;
    }

    if (merit < best_merit * (1.0 - 1e-3)) {
      best_merit = merit;
      best = it;
      since_best = 0;
    } else if (++since_best > settings.stall_limit) {
      return finish(best, QpStatus::MaxIter, iter);
    }

    Vector w = m ? Vector(it.lambda.cwiseQuotient(it.s).cwiseMax(1e-14).cwiseMin(1e14)) : Vector::Zero(0);
    kkt.factor(w);

    auto direction = [&](const Vector& r_c, Vector& dz, Vector& dy, Vector& dl, Vector& ds) {
      Vector rhs_z = -r_d;
      if (m > 0) rhs_z -= sp.gt * ((-r_c + it.lambda.cwiseProduct(r_i)).cwiseQuotient(it.s));
      kkt.solve(rhs_z, -r_p, dz, dy);
      if (m > 0) {
        ds = -r_i - sp.g * dz;
        dl = (-r_c - it.lambda.cwiseProduct(ds)).cwiseQuotient(it.s);
      } else {
        ds = Vector::Zero(0);
        dl = Vector::Zero(0);
      }
    };

    Vector dz, dy, dl, ds;
    if (m == 0) {
      direction(Vector::Zero(0), dz, dy, dl, ds);
      it.z += dz;
      it.y += dy;
      continue;
    }

    const Vector sl_vec = it.s.cwiseProduct(it.lambda);
    direction(sl_vec, dz, dy, dl, ds);
    const double alpha_aff = std::min(max_step(it.s, ds), max_step(it.lambda, dl));
    const double mu_aff = (it.s + alpha_aff * ds).dot(it.lambda + alpha_aff * dl) / static_cast<double>(m);
    const double sigma = std::clamp(std::pow(mu_aff / mu, 3.0), 0.0, 1.0);

    const Vector r_c = sl_vec + ds.cwiseProduct(dl) - Vector::Constant(m, sigma * mu);
    direction(r_c, dz, dy, dl, ds);
    const double alpha = std::min(1.0, 0.99 * std::min(max_step(it.s, ds), max_step(it.lambda, dl)));

    it.z += alpha * dz;
    it.y += alpha * dy;
    it.lambda += alpha * dl;
    it.s += alpha * ds;
  }
  return finish(best, QpStatus::MaxIter, settings.max_iter);
}

// Minimum total violation of the row-normalized constraints, via an always
// feasible elastic program.
double min_violation(const QpProblem& pr, const QpSettings& settings) {
  const Eigen::Index n = pr.variables(), p = pr.equalities(), m = pr.inequalities();
  const Vector as = row_inf_norms(pr.a).unaryExpr([](double v) { return v > 0.0 ? 1.0 / v : 1.0; });
  const Vector gs = row_inf_norms(pr.g).unaryExpr([](double v) { return v > 0.0 ? 1.0 / v : 1.0; });
  const SparseMatrix a = as.asDiagonal() * pr.a;
  const SparseMatrix g = gs.asDiagonal() * pr.g;

  const Eigen::Index total = n + 2 * p + m;
  QpProblem el = QpProblem::with_variables(total);
  el.q.tail(2 * p + m).setOnes();
  std::vector<Eigen::Triplet<double>> at, gt;
  for (int k = 0; k < a.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(a, k); it; ++it) at.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
  for (Eigen::Index r = 0; r < p; ++r) {
    at.emplace_back(static_cast<int>(r), static_cast<int>(n + r), 1.0);
    at.emplace_back(static_cast<int>(r), static_cast<int>(n + p + r), -1.0);
  }
  for (int k = 0; k < g.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(g, k); it; ++it) gt.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
  for (Eigen::Index r = 0; r < m; ++r) gt.emplace_back(static_cast<int>(r), static_cast<int>(n + 2 * p + r), -1.0);
  for (Eigen::Index v = 0; v < 2 * p + m; ++v) gt.emplace_back(static_cast<int>(m + v), static_cast<int>(n + v), -1.0);
  el.a = SparseMatrix(p, total);
  el.a.setFromTriplets(at.begin(), at.end());
  el.b = as.cwiseProduct(pr.b);
  el.g = SparseMatrix(m + 2 * p + m, total);
  el.g.setFromTriplets(gt.begin(), gt.end());
  el.h = Vector::Zero(m + 2 * p + m);
  el.h.head(m) = gs.cwiseProduct(pr.h);
  const QpSolution sol = solve_interior(el, settings);
  return sol.objective;
}

}  // namespace

QpSolution solve(const QpProblem& problem, const QpSettings& settings) {
  problem.validate();
  check_psd(problem.p);
  QpSolution sol = solve_interior(problem, settings);
  if (sol.status == QpStatus::MaxIter) {
    const double violation = min_violation(problem, settings);
    if (violation > std::max(1e3 * settings.tol_feas, 1e-6)) sol.status = QpStatus::Infeasible;
  }
  return sol;
}

}  // namespace graphmask
