#include "tomokit/tomography.hpp"

#include "tomokit/noise.hpp"
#include "tomokit/states.hpp"

#include "test_helpers.hpp"

#include <doctest.h>

#include <cmath>

using namespace tomokit;
using tomokit::testing::expect_error;

TEST_SUITE_BEGIN("tomography");

TEST_CASE("mle converges immediately when initialized at the optimum") {
  MeasurementSet set = number_operators(8);
  DensityMatrix mixed = cholesky_to_dm(CholeskyParams::identity(8));
  std::vector<double> data = expectation(mixed, set).values;

  MLEConfig cfg;
  ReconstructionResult res = mle_reconstruct(data, set, cfg, &mixed);
  CHECK(res.loss_history.size() == 1);
  CHECK(res.loss_history[0].first == 0);
  CHECK(res.fidelity_history[0].second >= 1.0 - 1e-12);
  CHECK(fidelity(res.reconstructed_dm, mixed) >= 1.0 - 1e-12);
}

TEST_CASE("mle recovers a coherent state from exact Husimi data") {
  auto grid = linspace(-4.0, 4.0, 10);
  MeasurementSet set = husimi_operators(8, grid, grid);
  DensityMatrix truth = coherent(8, Complex(0.8, -0.3));
  std::vector<double> data = expectation(truth, set).values;

  MLEConfig cfg;
  cfg.max_epochs = 1200;
  ReconstructionResult res = mle_reconstruct(data, set, cfg, &truth);
  CHECK(fidelity(res.reconstructed_dm, truth) >= 0.99);

  // log-likelihood never ends below where it started
  CHECK(res.loss_history.back().second <= res.loss_history.front().second);
  CHECK_NOTHROW(make_density_matrix(res.reconstructed_dm.matrix(), 1e-10));
}

TEST_CASE("mle gradient ascent is monotone on exact data") {
  MeasurementSet set = number_operators(6);
  DensityMatrix truth = thermal(6, 1.2);
  std::vector<double> data = expectation(truth, set).values;
  MLEConfig cfg;
  cfg.max_epochs = 200;
  cfg.record_every = 1;
  ReconstructionResult res = mle_reconstruct(data, set, cfg, nullptr);
  for (std::size_t i = 50; i < res.loss_history.size(); ++i)
    CHECK(res.loss_history[i].second <= res.loss_history[i - 50].second + 1e-6);
}

TEST_CASE("mle trajectories are reproducible") {
  auto grid = linspace(-4.0, 4.0, 8);
  MeasurementSet set = husimi_operators(8, grid, grid);
  DensityMatrix noisy = mix_with_random(num_state(8, builtin_num_table().amplitudes[1]), 0.2, 5);
  std::vector<double> data = expectation(noisy, set).values;

  MLEConfig cfg;
  cfg.max_epochs = 120;
  cfg.seed = 3;
  ReconstructionResult a = mle_reconstruct(data, set, cfg, &noisy);
  ReconstructionResult b = mle_reconstruct(data, set, cfg, &noisy);
  REQUIRE(a.fidelity_history.size() == b.fidelity_history.size());
  for (std::size_t i = 0; i < a.fidelity_history.size(); ++i) {
    CHECK(a.fidelity_history[i].first == b.fidelity_history[i].first);
    CHECK(a.fidelity_history[i].second == b.fidelity_history[i].second);
  }
  CHECK((a.reconstructed_dm.matrix() - b.reconstructed_dm.matrix()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("mle supports warm starts, SGD, and early stopping") {
  MeasurementSet set = number_operators(6);
  DensityMatrix truth = thermal(6, 0.8);
  std::vector<double> data = expectation(truth, set).values;

  MLEConfig cfg;
  cfg.warm_start = truth;
  cfg.max_epochs = 50;
  ReconstructionResult warm = mle_reconstruct(data, set, cfg, &truth);
  CHECK(warm.loss_history.size() <= 2);  // gradient already below tolerance

  MLEConfig sgd;
  sgd.optimizer = OptimizerKind::Sgd;
  sgd.lr = 0.5;
  sgd.max_epochs = 400;
  ReconstructionResult res = mle_reconstruct(data, set, sgd, &truth);
  CHECK(fidelity(res.reconstructed_dm, truth) >= 0.99);
}

TEST_CASE("mle rejects inconsistent input and non-finite losses") {
  MeasurementSet set = number_operators(4);
  CHECK(expect_error([&] { mle_reconstruct({1.0, 2.0}, set, MLEConfig{}, nullptr); },
                     "LengthMismatch"));

  std::vector<double> bad = {1.0, std::numeric_limits<double>::infinity(), 0.0, 0.0};
  CHECK(expect_error([&] { mle_reconstruct(bad, set, MLEConfig{}, nullptr); }, "NonFiniteLoss"));

  MLEConfig cfg;
  cfg.lr = 0.0;
  CHECK(expect_error([&] { mle_reconstruct({1, 1, 1, 1}, set, cfg, nullptr); }, "NegativeParameter"));
}

TEST_CASE("gan reconstructs a fock state from exact Husimi data") {
  auto grid = linspace(-3.0, 3.0, 8);
  MeasurementSet set = husimi_operators(4, grid, grid);
  DensityMatrix truth = fock(4, 1);
  std::vector<double> data = expectation(truth, set).values;

  GANConfig cfg;
  cfg.epochs = 600;
  cfg.seed = 11;
  ReconstructionResult res = gan_reconstruct(data, set, cfg, &truth);
  CHECK(fidelity(res.reconstructed_dm, truth) >= 0.8);
  CHECK_NOTHROW(make_density_matrix(res.reconstructed_dm.matrix(), 1e-10));

  for (const auto& [epoch, loss] : res.loss_history) CHECK(std::isfinite(loss));
  for (const auto& [epoch, loss] : res.disc_loss_history) CHECK(std::isfinite(loss));
}

TEST_CASE("gan histories are reproducible under the seed") {
  auto grid = linspace(-3.0, 3.0, 6);
  MeasurementSet set = husimi_operators(4, grid, grid);
  std::vector<double> data = expectation(coherent(4, Complex(0.5, 0.2)), set).values;

  GANConfig cfg;
  cfg.epochs = 60;
  cfg.seed = 21;
  DensityMatrix ref = coherent(4, Complex(0.5, 0.2));
  ReconstructionResult a = gan_reconstruct(data, set, cfg, &ref);
  ReconstructionResult b = gan_reconstruct(data, set, cfg, &ref);
  REQUIRE(a.fidelity_history.size() == b.fidelity_history.size());
  for (std::size_t i = 0; i < a.fidelity_history.size(); ++i)
    CHECK(a.fidelity_history[i].second == b.fidelity_history[i].second);
  CHECK(a.loss_history.size() == b.loss_history.size());
}

TEST_CASE("gan validates its configuration") {
  MeasurementSet set = number_operators(4);
  std::vector<double> data = expectation(fock(4, 0), set).values;
  GANConfig bad;
  bad.lr_gen = 0.0;
  CHECK(expect_error([&] { gan_reconstruct(data, set, bad, nullptr); }, "NegativeParameter"));
  CHECK(expect_error([&] { gan_reconstruct({1.0}, set, GANConfig{}, nullptr); }, "LengthMismatch"));
}

TEST_CASE("discriminator sanity check") {
  GANConfig cfg;

  // identical real/fake inputs cannot be separated
  std::vector<double> constant(16, 0.25);
  CHECK(discriminator_pretrain_sanity(cfg, constant, 3) == doctest::Approx(0.5));

  // disjoint one-hot pair is linearly separable
  std::vector<double> one_hot(16, 0.0);
  one_hot[0] = 1.0;
  double acc = discriminator_pretrain_sanity(cfg, one_hot, 1);
  CHECK(acc == doctest::Approx(1.0));

  // deterministic
  CHECK(discriminator_pretrain_sanity(cfg, one_hot, 1) == acc);
}

TEST_SUITE_END();
