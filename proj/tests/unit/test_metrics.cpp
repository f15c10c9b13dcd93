#include <gtest/gtest.h>

#include <graphmask/error.hpp>
#include <graphmask/metrics.hpp>

#include "helpers.hpp"

using namespace graphmask;
using graphmask::testing::random_weights;

namespace {

Matrix permute(const Matrix& w, const std::vector<int>& p) {
  Matrix out(w.rows(), w.cols());
  for (Eigen::Index i = 0; i < w.rows(); ++i)
    for (Eigen::Index j = 0; j < w.cols(); ++j) out(p[i], p[j]) = w(i, j);
  return out;
}

}  // namespace

TEST(EdgeReport, PerfectAndDisjoint) {
  const GlobalGraph g = GlobalGraph::from_weights(random_weights(8, 0.4, 1));
  const auto same = edge_report(g, g);
  EXPECT_DOUBLE_EQ(same.f_score, 1.0);
  EXPECT_DOUBLE_EQ(same.precision, 1.0);
  EXPECT_DOUBLE_EQ(same.recall, 1.0);

  const EdgeSet a({{0, 1}, {1, 2}});
  const EdgeSet b({{2, 3}, {3, 4}});
  const auto none = edge_report(a, b);
  EXPECT_DOUBLE_EQ(none.f_score, 0.0);
  EXPECT_EQ(none.fp, 2u);
  EXPECT_EQ(none.fn, 2u);
  EXPECT_THROW(edge_report(a, EdgeSet()), UndefinedMetricError);
}

TEST(EdgeReport, CountsByHand) {
  const EdgeSet truth({{0, 1}, {1, 2}, {2, 3}, {3, 4}});
  const EdgeSet inferred({{0, 1}, {1, 2}, {0, 4}});
  const auto r = edge_report(inferred, truth);
  EXPECT_EQ(r.tp, 2u);
  EXPECT_DOUBLE_EQ(r.precision, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(r.recall, 0.5);
  EXPECT_NEAR(r.f_score, 2.0 * (2.0 / 3.0) * 0.5 / (2.0 / 3.0 + 0.5), 1e-15);
  EXPECT_DOUBLE_EQ(EdgeClassificationReport::from_counts(0, 0, 3).f_score, 0.0);
}

TEST(Metrics, PermutationInvariant) {
  const Matrix t = random_weights(7, 0.5, 2), i = random_weights(7, 0.5, 3);
  const std::vector<int> p = {3, 0, 6, 1, 5, 2, 4};
  const auto e1 = edge_report(GlobalGraph::from_weights(i), GlobalGraph::from_weights(t));
  const auto e2 = edge_report(GlobalGraph::from_weights(permute(i, p)), GlobalGraph::from_weights(permute(t, p)));
  EXPECT_DOUBLE_EQ(e1.f_score, e2.f_score);
  const auto w1 = weight_report(i, t), w2 = weight_report(permute(i, p), permute(t, p));
  EXPECT_NEAR(w1.mse, w2.mse, 1e-15);
  EXPECT_NEAR(w1.rse, w2.rse, 1e-15);
}

TEST(WeightReport, UpperTriangleMeanAndRelative) {
  Matrix t = Matrix::Zero(3, 3), i = Matrix::Zero(3, 3);
  t(0, 1) = t(1, 0) = 2.0;
  i(0, 1) = i(1, 0) = 1.0;
  i(1, 2) = i(2, 1) = 1.0;
  const auto r = weight_report(i, t);
  EXPECT_DOUBLE_EQ(r.mse, (1.0 + 1.0) / 3.0);
  EXPECT_DOUBLE_EQ(r.rse, (2.0 * 1.0 + 2.0 * 1.0) / (2.0 * 4.0));
  EXPECT_DOUBLE_EQ(weight_report(t, t).mse, 0.0);
  EXPECT_THROW(weight_report(i, Matrix::Zero(3, 3)), UndefinedMetricError);
  EXPECT_THROW(weight_report(i, Matrix::Zero(4, 4)), DimensionError);
}

TEST(Jaccard, CountForm) {
  const EdgeSet a({{0, 1}, {1, 2}, {2, 3}});
  const EdgeSet b({{1, 2}, {2, 3}, {3, 4}, {0, 4}});
  EXPECT_DOUBLE_EQ(jaccard(a, b), 2.0 / 5.0);
  EXPECT_DOUBLE_EQ(jaccard(a, a), 1.0);
  EXPECT_THROW(jaccard(EdgeSet(), EdgeSet()), UndefinedMetricError);
}

TEST(Mape, TenPercent) {
  Vector truth(3), rec(3);
  truth << 10.0, -20.0, 5.0;
  rec << 11.0, -18.0, 5.5;
  EXPECT_NEAR(mape(rec, truth), 10.0, 1e-12);
  truth(2) = 0.0;
  EXPECT_THROW(mape(rec, truth), UndefinedMetricError);
  Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> mask(3, 1);
  mask << true, true, false;
  EXPECT_NEAR(mape(Matrix(rec), Matrix(truth), mask), 10.0, 1e-12);
}

TEST(MaskReport, PooledSelection) {
  Matrix a = Matrix::Zero(3, 3), b = Matrix::Zero(3, 3);
  a(0, 1) = a(1, 0) = a(1, 2) = a(2, 1) = 1.0;
  b(0, 1) = b(1, 0) = 1.0;
  const MultiLayerGraph ml({GraphLayer(a), GraphLayer(b)});
  const EdgeSet& u = ml.union_edges();  // 01, 12
  Matrix truth(2, 2), inferred(2, 2);
  truth << 0.5, 1.0, 0.5, 0.0;
  inferred << 1.0, 1.0, 0.0, 0.0;
  // Layer edges: (a,01), (a,12), (b,01). Truth selects all three, inferred drops (b,01).
  const auto r = mask_report(ml, MaskSet(u, inferred), MaskSet(u, truth));
  EXPECT_EQ(r.tp, 2u);
  EXPECT_EQ(r.fn, 1u);
  EXPECT_EQ(r.fp, 0u);
}
