#pragma once

// FFT-domain Tikhonov deblurring of color images held as pure quaternion
// fields X_r i + X_g j + X_b k, with a real PSF and circular boundaries.

#include <cstdint>

#include <Eigen/Core>

#include "quatpinv/qmatrix.hpp"

namespace quatpinv {

bool is_power_of_two(Index n);

/// In-place radix-2 2-D FFT. Forward is unnormalized; inverse divides by H*W.
/// Throws NonPowerOfTwo.
void fft2_inplace(Eigen::MatrixXcd& data, bool inverse);
Eigen::MatrixXcd fft2(Eigen::MatrixXcd data);
Eigen::MatrixXcd ifft2(Eigen::MatrixXcd data);
Eigen::MatrixXcd fft2_real(const Eigen::MatrixXd& data);

/// (2r+1) x (2r+1) Gaussian kernel normalized to sum 1.
Eigen::MatrixXd gaussian_psf(int radius, double sigma);

/// Zero-pads the kernel to H x W with its center moved to (0, 0) circularly.
Eigen::MatrixXd center_psf(const Eigen::MatrixXd& psf, Index H, Index W);

/// Circular convolution of every component with a centered, padded kernel.
QMatrix circular_blur(const QMatrix& image, const Eigen::MatrixXd& centered_psf);

/// 10 log10(1 / MSE) over the i, j, k components; 200 dB when identical.
double psnr(const QMatrix& ref, const QMatrix& test);

/// Separable Gaussian filter with replicate boundary, kernel size 2 ceil(2 sigma) + 1.
Eigen::MatrixXd gaussian_smooth(const Eigen::MatrixXd& channel, double sigma);
/// Applies the filter to each of the four components.
QMatrix gaussian_smooth(const QMatrix& image, double sigma);

struct ScalarNsResult {
  Eigen::ArrayXXd y;
  int iterations = 0;
};

/// Elementwise y ~ 1/T by y <- y (2 - T y) from y_0 = 2 / (min T + max T),
/// stopping once max |1 - T y| <= tol. Requires T > 0.
ScalarNsResult scalar_ns_inverse(const Eigen::ArrayXXd& T, double tol, int maxit);

struct DeblurProblem {
  QMatrix image;  // ground truth in [0, 1], dimensions powers of two
  int psf_radius = 4;
  double psf_sigma = 1.0;
  double snr_db = 40.0;
  double lambda = 0.05;
  double tol = 1e-12;
  int maxit = 100;
  std::uint64_t seed = 0;
};

struct DeblurResult {
  QMatrix blurred;
  QMatrix restored;     // FFT-NS
  QMatrix closed_form;  // conj(h) B / (|h|^2 + lambda)
  double psnr_blurred = 0;
  double psnr_restored = 0;
  double psnr_closed_form = 0;
  int iterations = 0;
  double residual = 0;   // relative normal-equation residual of the NS solution
  double wall_time = 0;  // restoration only
};

/// Synthesizes B = h * X + noise and restores X by scalar Newton-Schulz in the
/// frequency domain.
DeblurResult deblur_fft_ns(const DeblurProblem& problem);

}  // namespace quatpinv
