#include "graphmask/spectral.hpp"

#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "graphmask/error.hpp"
#include "graphmask/rng.hpp"

namespace graphmask {

SpectralDecomposition eigendecompose(const Laplacian& l, double tol) {
  const Matrix& m = l.matrix();
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m);
  if (solver.info() != Eigen::Success) throw NumericError("symmetric eigensolver did not converge");
  SpectralDecomposition out;
  out.eigenvalues = solver.eigenvalues();
  out.eigenvectors = solver.eigenvectors();
  const Matrix rebuilt = out.eigenvectors * out.eigenvalues.asDiagonal() * out.eigenvectors.transpose();
  out.residual = (m - rebuilt).norm() / std::max(1.0, m.norm());
  if (out.residual > tol)
    throw NumericError("eigendecomposition residual " + std::to_string(out.residual) + " exceeds tolerance");
  return out;
}

Matrix generate_smooth_signals(const Laplacian& l, int k, std::uint64_t seed) {
  if (k < 1) throw ValidationError("signal count must be positive");
  const auto spec = eigendecompose(l);
  const Eigen::Index n = spec.eigenvalues.size();
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix h(n, k);
  for (Eigen::Index c = 0; c < k; ++c)
    for (Eigen::Index i = 0; i < n; ++i) {
      const double lambda = spec.eigenvalues(i);
      const double z = normal(rng);
      h(i, c) = lambda > kZeroEigenvalue ? z / std::sqrt(lambda) : 0.0;
    }
  return spec.eigenvectors * h;
}

double smoothness(const Matrix& x, const Laplacian& l) {
  if (x.rows() != l.size())
    throw DimensionError("signal matrix has " + std::to_string(x.rows()) + " rows for a graph of " +
                         std::to_string(l.size()) + " vertices");
  return (x.transpose() * l.matrix() * x).trace();
}

Matrix add_noise(const Matrix& x, double snr_db, std::uint64_t seed) {
  if (std::isnan(snr_db)) throw ValidationError("SNR must not be NaN");
  if (std::isinf(snr_db) && snr_db > 0) return x;
  const double signal_power = x.squaredNorm() / static_cast<double>(x.size());
  const double noise_sd = std::sqrt(signal_power / std::pow(10.0, snr_db / 10.0));
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, noise_sd);
  Matrix out = x;
  for (Eigen::Index c = 0; c < out.cols(); ++c)
    for (Eigen::Index i = 0; i < out.rows(); ++i) out(i, c) += normal(rng);
  return out;
}

Matrix laplacian_pinv(const Laplacian& l) {
  const auto spec = eigendecompose(l);
  Vector inv = spec.eigenvalues.unaryExpr([](double v) { return v > kZeroEigenvalue ? 1.0 / v : 0.0; });
  return spec.eigenvectors * inv.asDiagonal() * spec.eigenvectors.transpose();
}

}  // namespace graphmask
