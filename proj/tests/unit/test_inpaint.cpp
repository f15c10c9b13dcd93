#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include <graphmask/error.hpp>
#include <graphmask/inpaint.hpp>
#include <graphmask/spectral.hpp>

#include "helpers.hpp"

using namespace graphmask;
using graphmask::testing::random_connected_weights;

namespace {

// Plain conjugate gradients on the normal equations, dense.
Vector cg_oracle(const Matrix& a, const Vector& b) {
  Vector x = Vector::Zero(b.size());
  Vector r = b, p = r;
  double rr = r.squaredNorm();
  for (int it = 0; it < 10 * b.size() && std::sqrt(rr) > 1e-14 * (1.0 + b.norm()); ++it) {
    const Vector ap = a * p;
    const double alpha = rr / p.dot(ap);
    x += alpha * p;
    r -= alpha * ap;
    const double next = r.squaredNorm();
    p = r + (next / rr) * p;
    rr = next;
  }
  return x;
}

InpaintProblem random_problem(int n, unsigned seed, double gamma) {
  std::mt19937 rng(seed);
  std::vector<int> ids(static_cast<std::size_t>(n));
  std::iota(ids.begin(), ids.end(), 0);
  std::shuffle(ids.begin(), ids.end(), rng);
  ids.resize(static_cast<std::size_t>(n / 2));
  std::normal_distribution<double> g(0.0, 1.0);
  Vector y(static_cast<Eigen::Index>(ids.size()));
  for (Eigen::Index k = 0; k < y.size(); ++k) y(k) = g(rng);
  return {laplacian_from_weights(random_connected_weights(n, 0.2, seed)), ids, y, gamma};
}

Matrix normal_matrix(const InpaintProblem& p) {
  Matrix a = p.gamma * p.laplacian.matrix();
  for (int v : p.observed) a(v, v) += 1.0;
  return a;
}

Vector normal_rhs(const InpaintProblem& p) {
  Vector b = Vector::Zero(p.laplacian.size());
  for (std::size_t k = 0; k < p.observed.size(); ++k) b(p.observed[k]) = p.y(static_cast<Eigen::Index>(k));
  return b;
}

}  // namespace

TEST(Inpaint, MatchesConjugateGradientOracle) {
  for (unsigned seed = 1; seed <= 20; ++seed) {
    const InpaintProblem p = random_problem(16, seed, 0.1 * seed);
    const Vector x = inpaint(p);
    const Vector oracle = cg_oracle(normal_matrix(p), normal_rhs(p));
    EXPECT_LT((x - oracle).norm() / (1.0 + oracle.norm()), 1e-8) << "seed " << seed;
  }
}

TEST(Inpaint, ZeroGammaFullyObservedReturnsData) {
  InpaintProblem p = random_problem(10, 3, 0.0);
  p.observed.resize(10);
  std::iota(p.observed.begin(), p.observed.end(), 0);
  p.y = graphmask::testing::random_signals(10, 1, 4).col(0);
  EXPECT_LT((inpaint(p) - p.y).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Inpaint, LargeGammaTendsToObservedMean) {
  InpaintProblem p = random_problem(12, 5, 1e8);
  const Vector x = inpaint(p);
  EXPECT_LT((x.array() - p.y.mean()).abs().maxCoeff(), 1e-5);
}

TEST(Inpaint, UnobservedComponentIsSingular) {
  Matrix w = Matrix::Zero(4, 4);
  w(0, 1) = w(1, 0) = 1.0;
  w(2, 3) = w(3, 2) = 1.0;
  Vector y(1);
  y << 2.0;
  const InpaintProblem p{laplacian_from_weights(w), {0}, y, 1.0};
  try {
    inpaint(p);
    FAIL() << "expected SingularSystemError";
  } catch (const SingularSystemError& e) {
    EXPECT_EQ(e.component(), (std::vector<int>{2, 3}));
  }
  std::size_t filled = 0;
  const Vector x = inpaint_or_fill(p, &filled);
  EXPECT_EQ(filled, 2u);
  EXPECT_NEAR(x(3), 2.0, 1e-12);
  EXPECT_NEAR(x(1), 2.0, 1e-9);
}

TEST(Inpaint, DataFitGrowsWithGamma) {
  double previous = -1.0;
  for (double gamma : {0.01, 0.1, 1.0, 10.0, 100.0}) {
    InpaintProblem p = random_problem(14, 9, gamma);
    const Vector x = inpaint(p);
    double fit = 0.0;
    for (std::size_t k = 0; k < p.observed.size(); ++k)
      fit += std::pow(x(p.observed[k]) - p.y(static_cast<Eigen::Index>(k)), 2);
    EXPECT_GE(fit, previous - 1e-12);
    previous = fit;
  }
}

TEST(Inpaint, PerturbationIncreasesObjective) {
  const InpaintProblem p = random_problem(15, 12, 2.0);
  const Vector x = inpaint(p);
  const double best = inpaint_objective(p, x);
  std::mt19937 rng(1);
  std::normal_distribution<double> g(0.0, 1e-3);
  for (int k = 0; k < 20; ++k) {
    Vector d(x.size());
    for (Eigen::Index i = 0; i < d.size(); ++i) d(i) = g(rng);
    EXPECT_GT(inpaint_objective(p, x + d), best);
  }
}

TEST(Inpaint, ValidatesInput) {
  InpaintProblem p = random_problem(6, 2, 1.0);
  p.observed.push_back(p.observed.front());
  EXPECT_THROW(inpaint(p), Error);
  p = random_problem(6, 2, -1.0);
  EXPECT_THROW(inpaint(p), ValidationError);
}

TEST(ConnectedComponents, SortedBySmallestVertex) {
  Matrix w = Matrix::Zero(5, 5);
  w(0, 3) = w(3, 0) = 1.0;
  w(1, 4) = w(4, 1) = 1.0;
  const auto c = connected_components(w);
  ASSERT_EQ(c.size(), 3u);
  EXPECT_EQ(c[0], (std::vector<int>{0, 3}));
  EXPECT_EQ(c[1], (std::vector<int>{1, 4}));
  EXPECT_EQ(c[2], (std::vector<int>{2}));
}

TEST(Holdout, DeterministicAndSized) {
  const HoldoutSpec spec{0.5, 7};
  const auto a = holdout_observed(20, spec, 3);
  EXPECT_EQ(a, holdout_observed(20, spec, 3));
  EXPECT_EQ(a.size(), 10u);
  EXPECT_TRUE(std::is_sorted(a.begin(), a.end()));
  EXPECT_THROW(holdout_observed(20, {1.0, 1}, 0), ValidationError);
}

TEST(InpaintExperiment, PerfectGraphRecoversConstantSignal) {
  const Matrix w = random_connected_weights(10, 0.3, 5);
  const Matrix signals = Matrix::Constant(10, 4, 3.5);
  const GraphLearner learner = [&](const Matrix&) {
    return std::vector<std::pair<std::string, GlobalGraph>>{{"truth", GlobalGraph::from_weights(w)}};
  };
  const auto r = inpaint_experiment(signals, learner, {0.5, 1}, 10.0, {}, 1);
  ASSERT_EQ(r.mean.size(), 1u);
  EXPECT_LT(r.mean[0].mse, 1e-16);
  EXPECT_LT(r.mean[0].mape, 1e-6);
  EXPECT_EQ(r.mse.rows(), 4);
}
