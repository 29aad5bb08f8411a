// The two reconstruction solvers: Cholesky-parametrized maximum-likelihood
// gradient ascent, and adversarial generator/discriminator reconstruction
// where gradients flow through the Born-rule physics layer.
#pragma once

#include "tomokit/grad.hpp"

#include <optional>
#include <string>

namespace tomokit {

enum class OptimizerKind { Adam, Sgd };

struct MLEConfig {
  int max_epochs = 1000;
  double lr = 0.01;
  OptimizerKind optimizer = OptimizerKind::Adam;
  double floor = 1e-12;
  std::optional<DensityMatrix> warm_start;  // empty = maximally mixed init
  int record_every = 10;
  double tol_grad = 1e-7;  // 0 disables early stopping
  std::uint64_t seed = 0;

  void validate() const;
};

// Generator input is the measurement-statistics vector itself.
enum class LatentSource { MeasurementVector };

struct GANConfig {
  int epochs = 1000;
  LatentSource latent_source = LatentSource::MeasurementVector;
  std::vector<int> gen_layers = {512};        // hidden sizes; output is dim^2
  std::vector<int> disc_layers = {128, 64, 32};  // hidden sizes; a 1-unit sigmoid head is appended
  double lr_gen = 0.001;
  double lr_disc = 0.001;
  int record_every = 10;
  std::uint64_t seed = 0;

  void validate() const;
};

struct ReconstructionResult {
  DensityMatrix reconstructed_dm;
  std::vector<std::pair<int, double>> fidelity_history;  // only when a reference is given
  std::vector<std::pair<int, double>> loss_history;      // MLE: -loglik; GAN: generator loss
  std::vector<std::pair<int, double>> disc_loss_history; // GAN only
  double wall_time_s = 0.0;
  std::string config_echo;
};

// Maximizes the log-likelihood of `data` (counts or exact expectations) over
// the packed Cholesky parameters. Stops at max_epochs or when the gradient
// norm falls below tol_grad. Throws NonFiniteLoss (with the epoch) on divergence.
ReconstructionResult mle_reconstruct(const std::vector<double>& data, const MeasurementSet& set,
                                     const MLEConfig& cfg,
                                     const DensityMatrix* reference = nullptr);

// Adversarial reconstruction: the generator maps the measurement vector to
// Cholesky parameters, the proposed state's Born expectations are compared
// against the data by the discriminator, and both nets update 1:1 per epoch
// (discriminator first). The returned state is the epoch-best by generator loss.
ReconstructionResult gan_reconstruct(const std::vector<double>& data, const MeasurementSet& set,
                                     const GANConfig& cfg,
                                     const DensityMatrix* reference = nullptr);

// Adversarial-loop health check: trains the discriminator alone for 50 steps
// to separate `data` from a fixed shuffled copy of itself; returns the final
// two-sample classification accuracy in [0, 1].
double discriminator_pretrain_sanity(const GANConfig& cfg, const std::vector<double>& data,
                                     std::uint64_t seed);

}  // namespace tomokit
