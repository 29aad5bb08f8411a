// State-preparation noise (random-state mixing) and the four-stage
// measurement-image noise pipeline with its default parameter set.
#pragma once

#include "tomokit/measurement.hpp"

namespace tomokit {

// Pipeline parameters. Defaults are the standard synthetic-data values:
// zeta 0.2, n_th 2.0, rotation 20 deg, translation (0.1, 0.1), additive
// sigma 0.01, salt 0.0, pepper 0.1. Rotation/translation entries are range
// bounds: each application draws from [-v, +v].
struct NoiseConfig {
  double zeta = 0.2;
  double nth_conv = 2.0;
  double rotation_deg = 20.0;
  double translate_x = 0.1;
  double translate_y = 0.1;
  double additive_sigma = 0.01;
  double salt_prop = 0.0;
  double pepper_prop = 0.1;
  std::uint64_t seed = 0;

  void validate() const;
};

// All-zero-strength config (identity pipeline).
NoiseConfig noise_config_zero();

// rho_mix = (1 - zeta) rho + zeta rho_rand with a seeded full-rank Ginibre state.
DensityMatrix mix_with_random(const DensityMatrix& rho, double zeta, std::uint64_t seed);

// Isotropic Gaussian blur with physical phase-space variance nth/2, converted
// to pixel units via the grid spacing. Reflective boundaries; the kernel is
// normalized so interior-supported mass is preserved.
PhaseSpaceImage gaussian_convolution(const PhaseSpaceImage& img, double nth);

// Rotation about the image center by an angle drawn from `rotation_deg` and a
// translation drawn from `tx`/`ty` (fractions of the image extent, |f| <= 1).
// Bilinear interpolation, zero fill outside the frame. Degenerate intervals
// give a deterministic transform.
PhaseSpaceImage affine_transform(const PhaseSpaceImage& img, Interval rotation_deg, Interval tx,
                                 Interval ty, std::uint64_t seed);

// Symmetric-range convenience: bounds v become the interval [-v, +v].
PhaseSpaceImage affine_transform(const PhaseSpaceImage& img, double rotation_deg, double tx,
                                 double ty, std::uint64_t seed);

// i.i.d. N(0, sigma^2) per pixel, clamped at 0 from below.
PhaseSpaceImage additive_gaussian(const PhaseSpaceImage& img, double sigma, std::uint64_t seed);

// round(salt_prop * n) pixels set to the image maximum and a disjoint
// round(pepper_prop * n) set to 0, chosen uniformly without replacement.
PhaseSpaceImage salt_pepper(const PhaseSpaceImage& img, double salt_prop, double pepper_prop,
                            std::uint64_t seed);

// Convolution -> affine -> additive -> salt/pepper, with per-stage substream
// seeds derived from cfg.seed (stage index i uses Rng::derive(cfg.seed, i)).
PhaseSpaceImage apply_pipeline(const PhaseSpaceImage& img, const NoiseConfig& cfg);

}  // namespace tomokit
