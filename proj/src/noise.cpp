#include "tomokit/noise.hpp"

#include "tomokit/states.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace tomokit {

void NoiseConfig::validate() const {
  if (zeta < 0.0 || zeta > 1.0) fail("BadZeta", "zeta must lie in [0, 1]");
  if (nth_conv < 0.0) fail("NegativeParameter", "convolution nth must be >= 0");
  if (std::abs(translate_x) > 1.0 || std::abs(translate_y) > 1.0)
    fail("BadFraction", "translation fractions must satisfy |f| <= 1");
  if (additive_sigma < 0.0) fail("NegativeParameter", "additive sigma must be >= 0");
  if (salt_prop < 0.0 || salt_prop > 1.0 || pepper_prop < 0.0 || pepper_prop > 1.0)
    fail("BadProportion", "salt/pepper proportions must lie in [0, 1]");
  if (salt_prop + pepper_prop > 1.0) fail("BadProportion", "salt + pepper proportions exceed 1");
}

NoiseConfig noise_config_zero() {
  NoiseConfig cfg;
  cfg.zeta = 0.0;
  cfg.nth_conv = 0.0;
  cfg.rotation_deg = 0.0;
  cfg.translate_x = 0.0;
  cfg.translate_y = 0.0;
  cfg.additive_sigma = 0.0;
  cfg.salt_prop = 0.0;
  cfg.pepper_prop = 0.0;
  return cfg;
}

DensityMatrix mix_with_random(const DensityMatrix& rho, double zeta, std::uint64_t seed) {
  if (zeta < 0.0 || zeta > 1.0) fail("BadZeta", "zeta must lie in [0, 1]");
  if (zeta == 0.0) return rho;
  DensityMatrix rand = random_dm(rho.dim(), rho.dim(), seed);
  if (zeta == 1.0) return rand;
  ComplexMatrix mixed = (1.0 - zeta) * rho.matrix() + zeta * rand.matrix();
  return DensityMatrix::unchecked(std::move(mixed));
}

namespace {

int reflect_index(int i, int n) {
  // reflect-101-style fold without repeating the edge sample period
  if (n == 1) return 0;
  int period = 2 * n - 2;
  i = ((i % period) + period) % period;
  return i < n ? i : period - i;
}

double grid_step(const PhaseSpaceImage& img) {
  if (img.xgrid.size() >= 2) return img.xgrid[1] - img.xgrid[0];
  return 1.0;  // no grid metadata: treat pixels as unit cells
}

}  // namespace

PhaseSpaceImage gaussian_convolution(const PhaseSpaceImage& img, double nth) {
  if (nth < 0.0) fail("NegativeParameter", "convolution nth must be >= 0");
  if (nth == 0.0) return img;

  double step = grid_step(img);
  double sigma_px = std::sqrt(nth / 2.0) / step;
  int radius = std::max(1, static_cast<int>(std::ceil(4.0 * sigma_px)));

  std::vector<double> kernel(2 * radius + 1);
  double sum = 0.0;
  for (int d = -radius; d <= radius; ++d) {
    kernel[d + radius] = std::exp(-0.5 * double(d) * double(d) / (sigma_px * sigma_px));
    sum += kernel[d + radius];
  }
  for (double& k : kernel) k /= sum;

  // separable passes; reflection acts per axis so this equals the full 2D sum
  PhaseSpaceImage out = img;
  RealMatrix tmp(img.height, img.width);
  for (int i = 0; i < img.height; ++i)
    for (int j = 0; j < img.width; ++j) {
      double acc = 0.0;
      for (int d = -radius; d <= radius; ++d)
        acc += kernel[d + radius] * img.pixels(i, reflect_index(j - d, img.width));
      tmp(i, j) = acc;
    }
  for (int i = 0; i < img.height; ++i)
    for (int j = 0; j < img.width; ++j) {
      double acc = 0.0;
      for (int d = -radius; d <= radius; ++d)
        acc += kernel[d + radius] * tmp(reflect_index(i - d, img.height), j);
      out.pixels(i, j) = acc;
    }
  return out;
}

PhaseSpaceImage affine_transform(const PhaseSpaceImage& img, Interval rotation_deg, Interval tx,
                                 Interval ty, std::uint64_t seed) {
  rotation_deg.require_ordered("rotation range");
  tx.require_ordered("tx range");
  ty.require_ordered("ty range");
  if (std::max(std::abs(tx.lo), std::abs(tx.hi)) > 1.0 ||
      std::max(std::abs(ty.lo), std::abs(ty.hi)) > 1.0)
    fail("BadFraction", "translation fractions must satisfy |f| <= 1");

  Rng rng(seed);
  double angle = rng.uniform(rotation_deg) * kPi / 180.0;
  double shift_x = rng.uniform(tx) * img.width;   // fractions of image extent, in pixels
  double shift_y = rng.uniform(ty) * img.height;

  double c = std::cos(angle);
  double s = std::sin(angle);
  double cx = 0.5 * (img.width - 1);
  double cy = 0.5 * (img.height - 1);

  // Forward bilinear splatting: each pixel's mass is rotated about the center,
  // shifted, and distributed over the four surrounding cells. Mass leaving the
  // frame is dropped, so the pixel sum never increases.
  PhaseSpaceImage out = img;
  out.pixels.setZero();
  for (int i = 0; i < img.height; ++i) {
    for (int j = 0; j < img.width; ++j) {
      double v = img.pixels(i, j);
      if (v == 0.0) continue;
      double x = j - cx;
      double y = i - cy;
      double dst_x = c * x - s * y + cx + shift_x;
      double dst_y = s * x + c * y + cy + shift_y;

      int j0 = static_cast<int>(std::floor(dst_x));
      int i0 = static_cast<int>(std::floor(dst_y));
      double fx = dst_x - j0;
      double fy = dst_y - i0;

      auto put = [&](int ii, int jj, double w) {
        if (ii >= 0 && ii < img.height && jj >= 0 && jj < img.width) out.pixels(ii, jj) += w * v;
      };
      put(i0, j0, (1.0 - fy) * (1.0 - fx));
      put(i0, j0 + 1, (1.0 - fy) * fx);
      put(i0 + 1, j0, fy * (1.0 - fx));
      put(i0 + 1, j0 + 1, fy * fx);
    }
  }
  return out;
}

PhaseSpaceImage affine_transform(const PhaseSpaceImage& img, double rotation_deg, double tx,
                                 double ty, std::uint64_t seed) {
  return affine_transform(img, Interval(-rotation_deg, rotation_deg), Interval(-tx, tx),
                          Interval(-ty, ty), seed);
}

PhaseSpaceImage additive_gaussian(const PhaseSpaceImage& img, double sigma, std::uint64_t seed) {
  if (sigma < 0.0) fail("NegativeParameter", "additive sigma must be >= 0");
  if (sigma == 0.0) return img;
  PhaseSpaceImage out = img;
  Rng rng(seed);
  for (int i = 0; i < img.height; ++i)
    for (int j = 0; j < img.width; ++j)
      out.pixels(i, j) = std::max(0.0, img.pixels(i, j) + sigma * rng.normal());
  return out;
}

PhaseSpaceImage salt_pepper(const PhaseSpaceImage& img, double salt_prop, double pepper_prop,
                            std::uint64_t seed) {
  if (salt_prop < 0.0 || salt_prop > 1.0 || pepper_prop < 0.0 || pepper_prop > 1.0)
    fail("BadProportion", "salt/pepper proportions must lie in [0, 1]");
  if (salt_prop + pepper_prop > 1.0) fail("BadProportion", "salt + pepper proportions exceed 1");

  std::size_t n = static_cast<std::size_t>(img.height) * img.width;
  std::size_t n_salt = static_cast<std::size_t>(std::llround(salt_prop * double(n)));
  std::size_t n_pepper = static_cast<std::size_t>(std::llround(pepper_prop * double(n)));
  if (n_salt + n_pepper > n) n_pepper = n - n_salt;
  if (n_salt == 0 && n_pepper == 0) return img;

  // partial Fisher-Yates: first n_salt + n_pepper slots are a uniform draw
  // without replacement
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  Rng rng(seed);
  std::size_t picks = n_salt + n_pepper;
  for (std::size_t i = 0; i < picks; ++i)
    std::swap(idx[i], idx[i + rng.uniform_int(n - i)]);

  PhaseSpaceImage out = img;
  double maxval = img.pixels.maxCoeff();
  for (std::size_t i = 0; i < n_salt; ++i)
    out.pixels(idx[i] / img.width, idx[i] % img.width) = maxval;
  for (std::size_t i = n_salt; i < picks; ++i)
    out.pixels(idx[i] / img.width, idx[i] % img.width) = 0.0;
  return out;
}

PhaseSpaceImage apply_pipeline(const PhaseSpaceImage& img, const NoiseConfig& cfg) {
  cfg.validate();
  PhaseSpaceImage out = gaussian_convolution(img, cfg.nth_conv);
  out = affine_transform(out, cfg.rotation_deg, cfg.translate_x, cfg.translate_y,
                         Rng::derive(cfg.seed, 1));
  out = additive_gaussian(out, cfg.additive_sigma, Rng::derive(cfg.seed, 2));
  out = salt_pepper(out, cfg.salt_prop, cfg.pepper_prop, Rng::derive(cfg.seed, 3));
  return out;
}

}  // namespace tomokit
