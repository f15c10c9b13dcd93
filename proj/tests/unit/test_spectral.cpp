#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include <graphmask/error.hpp>
#include <graphmask/spectral.hpp>

#include "helpers.hpp"

using namespace graphmask;
using graphmask::testing::random_connected_weights;

namespace {

Laplacian path3() {
  Matrix w = Matrix::Zero(3, 3);
  w(0, 1) = w(1, 0) = w(1, 2) = w(2, 1) = 1.0;
  return laplacian_from_weights(w);
}

// Faddeev-LeVerrier: coefficients c_0..c_n of det(lambda I - A), c_n = 1.
std::vector<double> characteristic_polynomial(const Matrix& a) {
  const Eigen::Index n = a.rows();
  std::vector<double> c(static_cast<std::size_t>(n + 1), 0.0);
  c[static_cast<std::size_t>(n)] = 1.0;
  Matrix m = Matrix::Zero(n, n);
  for (Eigen::Index k = 1; k <= n; ++k) {
    m = a * m + c[static_cast<std::size_t>(n - k + 1)] * Matrix::Identity(n, n);
    c[static_cast<std::size_t>(n - k)] = -(a * m).trace() / static_cast<double>(k);
  }
  return c;
}

double poly_eval(const std::vector<double>& c, double x) {
  double v = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * x + *it;
  return v;
}

std::vector<double> ranks(const std::vector<double>& v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t k = 0; k < idx.size(); ++k) r[idx[k]] = static_cast<double>(k);
  return r;
}

double spearman(const std::vector<double>& a, const std::vector<double>& b) {
  const auto ra = ranks(a), rb = ranks(b);
  const double n = static_cast<double>(a.size());
  double d2 = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) d2 += (ra[k] - rb[k]) * (ra[k] - rb[k]);
  return 1.0 - 6.0 * d2 / (n * (n * n - 1.0));
}

}  // namespace

TEST(Eigendecompose, ZeroLaplacian) {
  const auto s = eigendecompose(Laplacian(Matrix::Zero(4, 4)));
  EXPECT_LT(s.eigenvalues.cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Eigendecompose, TwoNodeSpectrum) {
  Matrix w = Matrix::Zero(2, 2);
  w(0, 1) = w(1, 0) = 1.0;
  const auto s = eigendecompose(laplacian_from_weights(w));
  EXPECT_NEAR(s.eigenvalues(0), 0.0, 1e-12);
  EXPECT_NEAR(s.eigenvalues(1), 2.0, 1e-12);
}

TEST(Eigendecompose, PathGraphMatchesCharacteristicPolynomial) {
  const Laplacian l = path3();
  // Oracle: det(lambda I - L) = lambda^3 - 4 lambda^2 + 3 lambda, roots 0, 1, 3.
  const auto c = characteristic_polynomial(l.matrix());
  ASSERT_EQ(c.size(), 4u);
  EXPECT_NEAR(c[0], 0.0, 1e-12);
  EXPECT_NEAR(c[1], 3.0, 1e-12);
  EXPECT_NEAR(c[2], -4.0, 1e-12);
  const auto s = eigendecompose(l);
  const double frozen[3] = {0.0, 1.0, 3.0};
  for (int k = 0; k < 3; ++k) {
    EXPECT_NEAR(s.eigenvalues(k), frozen[k], 1e-12);
    EXPECT_NEAR(poly_eval(c, s.eigenvalues(k)), 0.0, 1e-10);
  }
}

TEST(Eigendecompose, OrthonormalAscendingReconstruction) {
  const Laplacian l = laplacian_from_weights(random_connected_weights(15, 0.3, 11));
  const auto s = eigendecompose(l);
  EXPECT_NEAR(s.eigenvalues(0), 0.0, 1e-10);
  for (Eigen::Index k = 1; k < s.eigenvalues.size(); ++k) EXPECT_LE(s.eigenvalues(k - 1), s.eigenvalues(k));
  EXPECT_LT((s.eigenvectors.transpose() * s.eigenvectors - Matrix::Identity(15, 15)).norm(), 1e-10);
  EXPECT_LT(s.residual, 1e-12);
}

TEST(SmoothSignals, ShapeZeroSumAndDeterminism) {
  const Laplacian l = laplacian_from_weights(random_connected_weights(20, 0.25, 3));
  const Matrix x = generate_smooth_signals(l, 50, 99);
  EXPECT_EQ(x.rows(), 20);
  EXPECT_EQ(x.cols(), 50);
  EXPECT_LT(x.colwise().sum().cwiseAbs().maxCoeff(), 1e-10);
  const Matrix y = generate_smooth_signals(l, 50, 99);
  EXPECT_EQ((x - y).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_GT((x - generate_smooth_signals(l, 50, 100)).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_THROW(generate_smooth_signals(l, 0, 1), ValidationError);
}

TEST(SmoothSignals, CovarianceApproachesPseudoInverse) {
  const Laplacian l = laplacian_from_weights(random_connected_weights(10, 0.4, 21));
  const Matrix x = generate_smooth_signals(l, 100000, 5);
  const Matrix cov = x * x.transpose() / static_cast<double>(x.cols());
  const Matrix pinv = laplacian_pinv(l);
  EXPECT_LT((cov - pinv).norm() / pinv.norm(), 0.05);
}

TEST(SmoothSignals, EnergyDecreasesWithFrequency) {
  const Laplacian l = laplacian_from_weights(random_connected_weights(12, 0.4, 8));
  const auto s = eigendecompose(l);
  const Matrix x = generate_smooth_signals(l, 20000, 17);
  const Matrix h = s.eigenvectors.transpose() * x;
  std::vector<double> energy, index;
  for (Eigen::Index k = 1; k < h.rows(); ++k) {
    energy.push_back(h.row(k).squaredNorm() / static_cast<double>(h.cols()));
    index.push_back(static_cast<double>(k));
  }
  EXPECT_LT(spearman(index, energy), -0.9);
  EXPECT_LT(h.row(0).squaredNorm(), 1e-12);
}

TEST(Smoothness, QuadraticFormIdentity) {
  const Matrix w = random_connected_weights(9, 0.4, 4);
  const Laplacian l = laplacian_from_weights(w);
  const Matrix x = graphmask::testing::random_signals(9, 3, 12);
  double oracle = 0.0;
  for (Eigen::Index c = 0; c < x.cols(); ++c)
    for (int i = 0; i < 9; ++i)
      for (int j = 0; j < 9; ++j) oracle += 0.5 * w(i, j) * std::pow(x(i, c) - x(j, c), 2);
  EXPECT_NEAR(smoothness(x, l), oracle, 1e-10);
  double by_column = 0.0;
  for (Eigen::Index c = 0; c < x.cols(); ++c) by_column += smoothness(x.col(c), l);
  EXPECT_NEAR(smoothness(x, l), by_column, 1e-10);
  EXPECT_NEAR(smoothness(Matrix::Constant(9, 2, 3.0), l), 0.0, 1e-10);
  EXPECT_THROW(smoothness(Matrix::Zero(8, 1), l), DimensionError);
}

TEST(Smoothness, IndicatorOnStar) {
  Matrix w = Matrix::Zero(5, 5);
  for (int j = 1; j < 5; ++j) w(0, j) = w(j, 0) = 1.0;
  const Laplacian l = laplacian_from_weights(w);
  Vector leaf = Vector::Zero(5);
  leaf(3) = 1.0;
  EXPECT_NEAR(smoothness(leaf, l), 1.0, 1e-12);
  Vector hub = Vector::Zero(5);
  hub(0) = 1.0;
  EXPECT_NEAR(smoothness(hub, l), 4.0, 1e-12);
}

TEST(AddNoise, PowerRatioMatchesSnr) {
  const Laplacian l = laplacian_from_weights(random_connected_weights(20, 0.3, 2));
  const Matrix x = generate_smooth_signals(l, 5000, 3);
  EXPECT_EQ((add_noise(x, std::numeric_limits<double>::infinity(), 1) - x).norm(), 0.0);
  for (double snr : {0.0, 2.0, 10.0}) {
    const Matrix noise = add_noise(x, snr, 4) - x;
    const double ratio_db = 10.0 * std::log10(x.squaredNorm() / noise.squaredNorm());
    EXPECT_NEAR(ratio_db, snr, 0.1);
  }
  EXPECT_THROW(add_noise(x, std::nan(""), 1), ValidationError);
}

TEST(PseudoInverse, MoorePenroseConditions) {
  const Laplacian l = laplacian_from_weights(random_connected_weights(8, 0.5, 6));
  const Matrix& a = l.matrix();
  const Matrix p = laplacian_pinv(l);
  EXPECT_LT((a * p * a - a).norm(), 1e-10);
  EXPECT_LT((p * a * p - p).norm(), 1e-10);
  EXPECT_LT((a * p - (a * p).transpose()).norm(), 1e-10);
}
