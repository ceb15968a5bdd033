#include "quatpinv/apps/deblur.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "quatpinv/random.hpp"
#include "../solver_common.hpp"

namespace quatpinv {

namespace {

using cd = std::complex<double>;

void fft1(std::vector<cd>& a, bool inverse) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = 2 * std::numbers::pi / static_cast<double>(len) * (inverse ? 1 : -1);
    for (std::size_t i = 0; i < n; i += len) {
      for (std::size_t k = 0; k < len / 2; ++k) {
        const cd w = std::polar(1.0, ang * static_cast<double>(k));
        const cd u = a[i + k];
        const cd v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
      }
    }
  }
}

Eigen::MatrixXd channel_of(const QMatrix& A, int c) { return component(A, c); }

std::vector<double> gaussian_kernel_1d(double sigma) {
  const int half = static_cast<int>(std::ceil(2 * sigma));
  std::vector<double> k(static_cast<std::size_t>(2 * half + 1));
  double sum = 0;
  for (int t = -half; t <= half; ++t) {
    k[static_cast<std::size_t>(t + half)] = std::exp(-t * t / (2 * sigma * sigma));
    sum += k[static_cast<std::size_t>(t + half)];
  }
  for (auto& v : k) v /= sum;
  return k;
}

}  // namespace

bool is_power_of_two(Index n) { return n > 0 && (n & (n - 1)) == 0; }

void fft2_inplace(Eigen::MatrixXcd& data, bool inverse) {
  const Index H = data.rows(), W = data.cols();
  if (!is_power_of_two(H) || !is_power_of_two(W))
    throw NonPowerOfTwo("FFT dimensions must be powers of two, got " + std::to_string(H) + "x" +
                        std::to_string(W));
  std::vector<cd> buf;
  buf.resize(static_cast<std::size_t>(W));
  for (Index i = 0; i < H; ++i) {
    for (Index j = 0; j < W; ++j) buf[static_cast<std::size_t>(j)] = data(i, j);
    fft1(buf, inverse);
    for (Index j = 0; j < W; ++j) data(i, j) = buf[static_cast<std::size_t>(j)];
  }
  buf.resize(static_cast<std::size_t>(H));
  for (Index j = 0; j < W; ++j) {
    for (Index i = 0; i < H; ++i) buf[static_cast<std::size_t>(i)] = data(i, j);
    fft1(buf, inverse);
    for (Index i = 0; i < H; ++i) data(i, j) = buf[static_cast<std::size_t>(i)];
  }
  if (inverse) data /= static_cast<double>(H * W);
}

Eigen::MatrixXcd fft2(Eigen::MatrixXcd data) {
  fft2_inplace(data, false);
  return data;
}

Eigen::MatrixXcd ifft2(Eigen::MatrixXcd data) {
  fft2_inplace(data, true);
  return data;
}

Eigen::MatrixXcd fft2_real(const Eigen::MatrixXd& data) { return fft2(data.cast<cd>()); }

Eigen::MatrixXd gaussian_psf(int radius, double sigma) {
  if (radius < 0) throw InvalidArgument("PSF radius must be >= 0");
  if (!(sigma > 0.0)) throw InvalidArgument("PSF sigma must be > 0");
  const int size = 2 * radius + 1;
  Eigen::MatrixXd k(size, size);
  for (int i = 0; i < size; ++i)
    for (int j = 0; j < size; ++j) {
      const double u = i - radius, v = j - radius;
      k(i, j) = std::exp(-(u * u + v * v) / (2 * sigma * sigma));
    }
  return k / k.sum();
}

Eigen::MatrixXd center_psf(const Eigen::MatrixXd& psf, Index H, Index W) {
  if (psf.rows() % 2 == 0 || psf.cols() % 2 == 0) throw InvalidArgument("PSF needs odd dimensions");
  if (psf.rows() > H || psf.cols() > W) throw InvalidArgument("PSF larger than the image");
  const Index ri = psf.rows() / 2, rj = psf.cols() / 2;
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(H, W);
  for (Index i = 0; i < psf.rows(); ++i)
    for (Index j = 0; j < psf.cols(); ++j) out(((i - ri) % H + H) % H, ((j - rj) % W + W) % W) = psf(i, j);
  return out;
}

QMatrix circular_blur(const QMatrix& image, const Eigen::MatrixXd& centered_psf) {
  if (centered_psf.rows() != image.rows() || centered_psf.cols() != image.cols())
    throw DimensionMismatch("padded PSF must match the image");
  const Eigen::MatrixXcd hhat = fft2_real(centered_psf);
  QMatrix out(image.rows(), image.cols());
  for (int c = 0; c < 4; ++c) {
    const Eigen::MatrixXcd prod = fft2_real(channel_of(image, c)).cwiseProduct(hhat);
    set_component(out, c, ifft2(prod).real());
  }
  return out;
}

double psnr(const QMatrix& ref, const QMatrix& test) {
  if (ref.rows() != test.rows() || ref.cols() != test.cols()) throw DimensionMismatch("psnr shapes differ");
  if (ref.size() == 0) throw DimensionMismatch("psnr of empty images");
  double se = 0;
  for (Index t = 0; t < ref.size(); ++t) {
    const Quat d = ref.data()[t] - test.data()[t];
    se += d.b * d.b + d.c * d.c + d.d * d.d;
  }
  const double mse = se / (3.0 * static_cast<double>(ref.size()));
  if (mse == 0.0) return 200.0;
  return std::min(200.0, 10.0 * std::log10(1.0 / mse));
}

Eigen::MatrixXd gaussian_smooth(const Eigen::MatrixXd& channel, double sigma) {
  if (!(sigma > 0.0)) throw InvalidArgument("smoothing sigma must be > 0");
  const std::vector<double> k = gaussian_kernel_1d(sigma);
  const Index half = static_cast<Index>(k.size() / 2);
  const Index H = channel.rows(), W = channel.cols();
  Eigen::MatrixXd tmp(H, W), out(H, W);
  for (Index i = 0; i < H; ++i)
    for (Index j = 0; j < W; ++j) {
      double s = 0;
      for (Index t = -half; t <= half; ++t)
        s += k[static_cast<std::size_t>(t + half)] * channel(i, std::clamp<Index>(j + t, 0, W - 1));
      tmp(i, j) = s;
    }
  for (Index i = 0; i < H; ++i)
    for (Index j = 0; j < W; ++j) {
      double s = 0;
      for (Index t = -half; t <= half; ++t)
        s += k[static_cast<std::size_t>(t + half)] * tmp(std::clamp<Index>(i + t, 0, H - 1), j);
      out(i, j) = s;
    }
  return out;
}

QMatrix gaussian_smooth(const QMatrix& image, double sigma) {
  QMatrix out(image.rows(), image.cols());
  for (int c = 0; c < 4; ++c) set_component(out, c, gaussian_smooth(channel_of(image, c), sigma));
  return out;
}

ScalarNsResult scalar_ns_inverse(const Eigen::ArrayXXd& T, double tol, int maxit) {
  if (T.size() == 0) throw InvalidArgument("empty spectrum");
  if (!(T.minCoeff() > 0.0)) throw InvalidArgument("scalar Newton-Schulz needs T > 0");
  ScalarNsResult out;
  out.y = Eigen::ArrayXXd::Constant(T.rows(), T.cols(), 2.0 / (T.minCoeff() + T.maxCoeff()));
  for (int k = 0;; ++k) {
    out.iterations = k;
    if ((1.0 - T * out.y).abs().maxCoeff() <= tol || k == maxit) break;
    out.y = out.y * (2.0 - T * out.y);
  }
  return out;
}

DeblurResult deblur_fft_ns(const DeblurProblem& problem) {
  const QMatrix& X = problem.image;
  if (!is_power_of_two(X.rows()) || !is_power_of_two(X.cols()))
    throw NonPowerOfTwo("image dimensions must be powers of two");
  if (!(problem.lambda > 0.0)) throw InvalidArgument("lambda must be > 0");

  const Eigen::MatrixXd h = center_psf(gaussian_psf(problem.psf_radius, problem.psf_sigma), X.rows(), X.cols());
  const Eigen::MatrixXcd hhat = fft2_real(h);

  DeblurResult out;
  out.blurred = circular_blur(X, h);
  NormalRng rng(problem.seed);
  for (int c = 1; c < 4; ++c) {
    const Eigen::MatrixXd clean = channel_of(out.blurred, c);
    const double power = clean.squaredNorm() / static_cast<double>(clean.size());
    const double sd = std::sqrt(power / std::pow(10.0, problem.snr_db / 10.0));
    Eigen::MatrixXd noisy = clean;
    for (Index t = 0; t < noisy.size(); ++t) noisy.data()[t] += sd * rng.normal();
    set_component(out.blurred, c, noisy);
  }

  detail::Stopwatch clock;
  const Eigen::ArrayXXd T = hhat.cwiseAbs2().array() + problem.lambda;
  const ScalarNsResult inv = scalar_ns_inverse(T, problem.tol, problem.maxit);
  out.iterations = inv.iterations;
  out.restored = QMatrix(X.rows(), X.cols());
  out.closed_form = QMatrix(X.rows(), X.cols());
  double res2 = 0, rhs2 = 0;
  for (int c = 0; c < 4; ++c) {
    const Eigen::ArrayXXcd rhs = hhat.conjugate().cwiseProduct(fft2_real(channel_of(out.blurred, c))).array();
    const Eigen::ArrayXXcd xhat = rhs * inv.y;
    res2 += (T * xhat - rhs).abs2().sum();
    rhs2 += rhs.abs2().sum();
    set_component(out.restored, c, ifft2(xhat.matrix()).real());
    set_component(out.closed_form, c, ifft2((rhs / T).matrix()).real());
  }
  out.residual = rhs2 > 0 ? std::sqrt(res2 / rhs2) : 0.0;
  out.wall_time = clock.seconds();

  out.psnr_blurred = psnr(X, out.blurred);
  out.psnr_restored = psnr(X, out.restored);
  out.psnr_closed_form = psnr(X, out.closed_form);
  return out;
}

}  // namespace quatpinv
