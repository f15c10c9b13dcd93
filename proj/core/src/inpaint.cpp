#include "graphmask/inpaint.hpp"

#include <algorithm>
#include <numeric>
#include <random>

#include "graphmask/metrics.hpp"
#include "graphmask/parallel.hpp"
#include "graphmask/rng.hpp"

namespace graphmask {

void InpaintProblem::validate() const {
  const int n = laplacian.size();
  if (observed.empty()) throw ValidationError("inpainting needs at least one observed vertex");
  if (y.size() != static_cast<Eigen::Index>(observed.size()))
    throw DimensionError("inpainting: " + std::to_string(observed.size()) + " observed indices but " +
                         std::to_string(y.size()) + " values");
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  for (int v : observed) {
    if (v < 0 || v >= n) throw ValidationError("observed index " + std::to_string(v) + " out of range");
    if (seen[static_cast<std::size_t>(v)]++) throw ValidationError("observed index " + std::to_string(v) + " repeated");
  }
  if (!(gamma >= 0.0)) throw ValidationError("inpainting gamma must be nonnegative");
  if (!y.allFinite()) throw ValidationError("observed values must be finite");
}

std::vector<std::vector<int>> connected_components(const Matrix& weights) {
  const auto n = static_cast<int>(weights.rows());
  std::vector<int> label(static_cast<std::size_t>(n), -1);
  std::vector<std::vector<int>> comps;
  for (int s = 0; s < n; ++s) {
    if (label[static_cast<std::size_t>(s)] >= 0) continue;
    const int id = static_cast<int>(comps.size());
    comps.emplace_back();
    std::vector<int> stack{s};
    label[static_cast<std::size_t>(s)] = id;
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      comps.back().push_back(v);
      for (int u = 0; u < n; ++u)
        if (u != v && weights(v, u) > 0.0 && label[static_cast<std::size_t>(u)] < 0) {
          label[static_cast<std::size_t>(u)] = id;
          stack.push_back(u);
        }
    }
    std::sort(comps.back().begin(), comps.back().end());
  }
  return comps;
}

namespace {

void check_solvable(const InpaintProblem& p) {
  const int n = p.laplacian.size();
  std::vector<char> obs(static_cast<std::size_t>(n), 0);
  for (int v : p.observed) obs[static_cast<std::size_t>(v)] = 1;
  auto describe = [](const std::vector<int>& c) {
    std::string s;
    for (std::size_t k = 0; k < c.size() && k < 12; ++k) s += (k ? " " : "") + std::to_string(c[k]);
    if (c.size() > 12) s += " ...";
    return s;
  };
  if (p.gamma == 0.0) {
    std::vector<int> missing;
    for (int v = 0; v < n; ++v)
      if (!obs[static_cast<std::size_t>(v)]) missing.push_back(v);
    if (!missing.empty())
      throw SingularSystemError("singular inpainting system: gamma = 0 leaves vertices {" + describe(missing) +
                                    "} unconstrained",
                                missing);
    return;
  }
  const Matrix w = (-p.laplacian.matrix()).cwiseMax(0.0);
  for (auto& c : connected_components(w)) {
    const bool any = std::any_of(c.begin(), c.end(), [&](int v) { return obs[static_cast<std::size_t>(v)] != 0; });
    if (!any)
      throw SingularSystemError("singular inpainting system: component {" + describe(c) + "} has no observed vertex",
                                c);
  }
}

}  // namespace

Vector inpaint(const InpaintProblem& p) {
  p.validate();
  check_solvable(p);
  const int n = p.laplacian.size();
  const Matrix& l = p.laplacian.matrix();
  Matrix m = p.gamma * 0.5 * (l + l.transpose());
  Vector rhs = Vector::Zero(n);
  for (std::size_t k = 0; k < p.observed.size(); ++k) {
    const int v = p.observed[k];
    m(v, v) += 1.0;
    rhs(v) += p.y(static_cast<Eigen::Index>(k));
  }

  Vector x;
  Eigen::LLT<Matrix> llt(m);
  const bool use_llt = llt.info() == Eigen::Success;
  Eigen::LDLT<Matrix> ldlt;
  if (!use_llt) ldlt.compute(m);
  auto solve = [&](const Vector& b) -> Vector { return use_llt ? Vector(llt.solve(b)) : Vector(ldlt.solve(b)); };
  x = solve(rhs);
  const double scale = m.cwiseAbs().rowwise().sum().maxCoeff() * x.cwiseAbs().maxCoeff() + rhs.cwiseAbs().maxCoeff();
  for (int pass = 0; pass < 10; ++pass) {
    const Vector r = rhs - m * x;
    if (r.cwiseAbs().maxCoeff() <= 1e-14 * std::max(scale, 1e-300)) break;
    x += solve(r);
  }
  const double rel = (rhs - m * x).norm() / std::max(rhs.norm(), 1e-300);
  if (!(rel <= 1e-8) && rhs.norm() > 0.0)
    throw NumericError("inpainting solve did not reach the residual target (relative residual " +
                       std::to_string(rel) + ")");
  return x;
}

Vector inpaint_or_fill(const InpaintProblem& p, std::size_t* filled) {
  p.validate();
  const int n = p.laplacian.size();
  std::vector<char> obs(static_cast<std::size_t>(n), 0);
  for (int v : p.observed) obs[static_cast<std::size_t>(v)] = 1;
  std::vector<int> keep;
  std::size_t skipped = 0;
  if (p.gamma == 0.0) {
    keep = p.observed;
    std::sort(keep.begin(), keep.end());
    skipped = static_cast<std::size_t>(n) - keep.size();
  } else {
    const Matrix w = (-p.laplacian.matrix()).cwiseMax(0.0);
    for (const auto& c : connected_components(w)) {
      if (std::any_of(c.begin(), c.end(), [&](int v) { return obs[static_cast<std::size_t>(v)] != 0; }))
        keep.insert(keep.end(), c.begin(), c.end());
      else skipped += c.size();
    }
    std::sort(keep.begin(), keep.end());
  }
  if (filled) *filled = skipped;
  if (skipped == 0) return inpaint(p);

  Vector x = Vector::Constant(n, p.y.mean());
  std::vector<int> pos(static_cast<std::size_t>(n), -1);
  for (std::size_t k = 0; k < keep.size(); ++k) pos[static_cast<std::size_t>(keep[k])] = static_cast<int>(k);
  const auto m = static_cast<Eigen::Index>(keep.size());
  Matrix sub(m, m);
  for (Eigen::Index a = 0; a < m; ++a)
    for (Eigen::Index b = 0; b < m; ++b) sub(a, b) = p.laplacian.matrix()(keep[static_cast<std::size_t>(a)], keep[static_cast<std::size_t>(b)]);
  std::vector<int> sub_obs;
  for (int v : p.observed) sub_obs.push_back(pos[static_cast<std::size_t>(v)]);
  const Vector xs = inpaint({Laplacian(sub, 1e-6), sub_obs, p.y, p.gamma});
  for (Eigen::Index a = 0; a < m; ++a) x(keep[static_cast<std::size_t>(a)]) = xs(a);
  return x;
}

double inpaint_objective(const InpaintProblem& p, const Vector& x) {
  double fit = 0.0;
  for (std::size_t k = 0; k < p.observed.size(); ++k) {
    const double d = x(p.observed[k]) - p.y(static_cast<Eigen::Index>(k));
    fit += d * d;
  }
  return fit + p.gamma * x.dot(p.laplacian.matrix() * x);
}

std::vector<int> holdout_observed(int n, const HoldoutSpec& spec, std::uint64_t round) {
  if (!(spec.fraction >= 0.0 && spec.fraction < 1.0)) throw ValidationError("holdout fraction must lie in [0, 1)");
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng(derive_seed(spec.seed, "holdout", round));
  std::shuffle(perm.begin(), perm.end(), rng);
  auto hidden = static_cast<std::size_t>(std::llround(spec.fraction * n));
  hidden = std::min(hidden, static_cast<std::size_t>(n - 1));
  std::vector<int> obs(perm.begin() + static_cast<std::ptrdiff_t>(hidden), perm.end());
  std::sort(obs.begin(), obs.end());
  return obs;
}

InpaintExperimentResult inpaint_experiment(const Matrix& signals, const GraphLearner& learner, const HoldoutSpec& holdout,
                                           double gamma, const std::map<std::string, double>& gamma_override,
                                           int threads) {
  const auto n = static_cast<int>(signals.rows());
  const auto k = signals.cols();
  if (k < 2) throw ValidationError("the inpainting protocol needs at least two signal columns");
  struct Round {
    std::vector<std::string> methods;
    std::vector<double> mse, mape;
    std::vector<std::size_t> filled;
  };
  std::vector<Round> rounds(static_cast<std::size_t>(k));
  parallel_for(
      static_cast<std::size_t>(k),
      [&](std::size_t c) {
        const auto col = static_cast<Eigen::Index>(c);
        Matrix train(n, k - 1);
        for (Eigen::Index j = 0, out = 0; j < k; ++j)
          if (j != col) train.col(out++) = signals.col(j);
        const Vector truth = signals.col(col);
        const std::vector<int> obs = holdout_observed(n, holdout, c);
        Vector y(static_cast<Eigen::Index>(obs.size()));
        for (std::size_t q = 0; q < obs.size(); ++q) y(static_cast<Eigen::Index>(q)) = truth(obs[q]);
        Round& r = rounds[c];
        for (auto& [name, graph] : learner(train)) {
          const auto it = gamma_override.find(name);
          InpaintProblem p{graph.laplacian(), obs, y, it == gamma_override.end() ? gamma : it->second};
          std::size_t filled = 0;
          const Vector x = inpaint_or_fill(p, &filled);
          r.methods.push_back(name);
          r.filled.push_back(filled);
          r.mse.push_back((x - truth).squaredNorm() / n);
          r.mape.push_back(mape(x, truth));
        }
      },
      threads);

  InpaintExperimentResult out;
  out.methods = rounds.front().methods;
  const auto m = static_cast<Eigen::Index>(out.methods.size());
  out.mse.resize(k, m);
  out.mape.resize(k, m);
  for (Eigen::Index c = 0; c < k; ++c) {
    const Round& r = rounds[static_cast<std::size_t>(c)];
    if (r.methods != out.methods) throw ValidationError("graph learner returned inconsistent method lists");
    for (Eigen::Index j = 0; j < m; ++j) {
      out.mse(c, j) = r.mse[static_cast<std::size_t>(j)];
      out.mape(c, j) = r.mape[static_cast<std::size_t>(j)];
    }
  }
  for (Eigen::Index j = 0; j < m; ++j) {
    std::size_t filled = 0;
    for (const auto& r : rounds) filled += r.filled[static_cast<std::size_t>(j)];
    out.mean.push_back({out.methods[static_cast<std::size_t>(j)], out.mse.col(j).mean(), out.mape.col(j).mean(), filled});
  }
  return out;
}

}  // namespace graphmask
