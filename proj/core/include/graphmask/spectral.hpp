#pragma once

#include <cstdint>
#include <limits>

#include "graphmask/graph.hpp"

namespace graphmask {

/// Eigenvalues below this are treated as zero when forming the pseudo-inverse.
inline constexpr double kZeroEigenvalue = 1e-9;

/// Ascending spectrum and orthonormal GFT basis of a Laplacian.
struct SpectralDecomposition {
  Vector eigenvalues;
  Matrix eigenvectors;
  double residual = 0.0;  ///< ||L - U diag(lambda) U^T||_F / max(1, ||L||_F)
};

/// Throws NumericError on solver failure or when the relative
/// reconstruction residual exceeds `tol`.
SpectralDecomposition eigendecompose(const Laplacian& l, double tol = 1e-10);

/// N x K signals X = U H with columns of H drawn from N(0, pinv(diag(lambda))).
Matrix generate_smooth_signals(const Laplacian& l, int k, std::uint64_t seed);

/// tr(X^T L X).
double smoothness(const Matrix& x, const Laplacian& l);

/// Additive white Gaussian noise at the given SNR in dB; +inf returns `x`.
Matrix add_noise(const Matrix& x, double snr_db, std::uint64_t seed);

/// Moore-Penrose pseudo-inverse of a Laplacian via its spectrum.
Matrix laplacian_pinv(const Laplacian& l);

}  // namespace graphmask
