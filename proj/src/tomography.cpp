#include "tomokit/tomography.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

namespace tomokit {

namespace {

using json = nlohmann::json;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

[[noreturn]] void nonfinite(const std::string& actor, int epoch) {
  throw Error("NonFiniteLoss", actor + " loss became non-finite at epoch " + std::to_string(epoch));
}

}  // namespace

void MLEConfig::validate() const {
  if (max_epochs < 0) fail("NegativeParameter", "max_epochs must be >= 0");
  if (!(lr > 0.0)) fail("NegativeParameter", "learning rate must be > 0");
  if (!(floor > 0.0)) fail("NegativeParameter", "probability floor must be > 0");
  if (record_every < 1) fail("NegativeParameter", "record_every must be >= 1");
  if (tol_grad < 0.0) fail("NegativeParameter", "tol_grad must be >= 0");
}

void GANConfig::validate() const {
  if (epochs < 0) fail("NegativeParameter", "epochs must be >= 0");
  if (!(lr_gen > 0.0) || !(lr_disc > 0.0)) fail("NegativeParameter", "learning rates must be > 0");
  if (record_every < 1) fail("NegativeParameter", "record_every must be >= 1");
  for (int w : gen_layers)
    if (w < 1) fail("ShapeMismatch", "generator layer widths must be >= 1");
  for (int w : disc_layers)
    if (w < 1) fail("ShapeMismatch", "discriminator layer widths must be >= 1");
}

ReconstructionResult mle_reconstruct(const std::vector<double>& data, const MeasurementSet& set,
                                     const MLEConfig& cfg, const DensityMatrix* reference) {
  cfg.validate();
  if (data.size() != set.size())
    fail("LengthMismatch", "data has " + std::to_string(data.size()) + " entries, set has " +
                               std::to_string(set.size()) + " operators");

  auto t0 = Clock::now();
  const int dim = set.dim;

  CholeskyParams t = cfg.warm_start ? dm_to_cholesky(*cfg.warm_start, 1e-10)
                                    : CholeskyParams::identity(dim);
  RealVector params = pack_params(t);
  AdamState adam;

  ReconstructionResult result;
  auto record = [&](int epoch, double neg_ll, const CholeskyParams& cur) {
    result.loss_history.emplace_back(epoch, neg_ll);
    if (reference) result.fidelity_history.emplace_back(epoch, fidelity(cholesky_to_dm(cur), *reference));
  };

  int epoch = 0;
  bool recorded = false;
  for (;; ++epoch) {
    CholeskyParams cur = unpack_params(dim, params);
    double ll = loglik(cur, data, set, cfg.floor);
    if (!std::isfinite(ll)) nonfinite("mle", epoch);

    recorded = false;
    if (epoch % cfg.record_every == 0 || epoch == cfg.max_epochs) {
      record(epoch, -ll, cur);
      recorded = true;
    }
    if (epoch == cfg.max_epochs) break;

    RealVector grad = loglik_grad(cur, data, set, cfg.floor);
    if (!grad.allFinite()) nonfinite("mle", epoch);
    if (cfg.tol_grad > 0.0 && grad.norm() < cfg.tol_grad) {
      if (!recorded) record(epoch, -ll, cur);
      break;
    }

    // ascent: feed the negated gradient to the descent-form updates
    if (cfg.optimizer == OptimizerKind::Adam) {
      adam_step(params, -grad, adam, cfg.lr);
    } else {
      params += cfg.lr * grad;
    }
  }

  result.reconstructed_dm = cholesky_to_dm(unpack_params(dim, params));
  result.wall_time_s = seconds_since(t0);

  json echo;
  echo["solver"] = "mle";
  echo["max_epochs"] = cfg.max_epochs;
  echo["lr"] = cfg.lr;
  echo["optimizer"] = cfg.optimizer == OptimizerKind::Adam ? "adam" : "sgd";
  echo["floor"] = cfg.floor;
  echo["init"] = cfg.warm_start ? "warm_start" : "maximally_mixed";
  echo["record_every"] = cfg.record_every;
  echo["tol_grad"] = cfg.tol_grad;
  echo["seed"] = cfg.seed;
  echo["stopped_epoch"] = epoch;
  result.config_echo = echo.dump();
  return result;
}

namespace {

struct Discriminator {
  std::vector<DenseLayer> layers;
  RealVector flat;
  AdamState adam;

  double output(const RealVector& x, ForwardTape* tape = nullptr) {
    auto [out, t] = dense_forward(layers, x);
    if (tape) *tape = std::move(t);
    return out(0);
  }
};

Discriminator make_discriminator(const GANConfig& cfg, int inputs, Rng& rng) {
  std::vector<int> sizes{inputs};
  sizes.insert(sizes.end(), cfg.disc_layers.begin(), cfg.disc_layers.end());
  sizes.push_back(1);
  std::vector<Activation> acts(cfg.disc_layers.size(), Activation::LeakyReLU);
  acts.push_back(Activation::Sigmoid);
  Discriminator d;
  d.layers = make_dense_net(sizes, acts, rng);
  d.flat = flatten_net(d.layers);
  return d;
}

// One discriminator update on the binary cross-entropy
// L_D = -(ln D(real) + ln(1 - D(fake))); returns the pre-update loss.
double update_discriminator(Discriminator& d, const RealVector& real, const RealVector& fake,
                            double lr) {
  ForwardTape tape_real, tape_fake;
  double d_real = d.output(real, &tape_real);
  double d_fake = d.output(fake, &tape_fake);
  double loss = -(std::log(d_real) + std::log(1.0 - d_fake));

  RealVector up_real(1), up_fake(1);
  up_real(0) = -1.0 / d_real;
  up_fake(0) = 1.0 / (1.0 - d_fake);
  auto [grads_real, in_real] = dense_backward(d.layers, tape_real, up_real);
  auto [grads_fake, in_fake] = dense_backward(d.layers, tape_fake, up_fake);
  (void)in_real;
  (void)in_fake;
  RealVector grad = flatten_grads(grads_real) + flatten_grads(grads_fake);

  adam_step(d.flat, grad, d.adam, lr);
  unflatten_net(d.flat, d.layers);
  return loss;
}

}  // namespace

ReconstructionResult gan_reconstruct(const std::vector<double>& data, const MeasurementSet& set,
                                     const GANConfig& cfg, const DensityMatrix* reference) {
  cfg.validate();
  if (data.size() != set.size())
    fail("LengthMismatch", "data has " + std::to_string(data.size()) + " entries, set has " +
                               std::to_string(set.size()) + " operators");

  auto t0 = Clock::now();
  const int dim = set.dim;
  const int n_outcomes = static_cast<int>(data.size());
  const int n_params = param_count(dim);

  RealVector real_vec(n_outcomes);
  for (int k = 0; k < n_outcomes; ++k) real_vec(k) = data[static_cast<std::size_t>(k)];

  Rng rng(cfg.seed);
  std::vector<int> gen_sizes{n_outcomes};
  gen_sizes.insert(gen_sizes.end(), cfg.gen_layers.begin(), cfg.gen_layers.end());
  gen_sizes.push_back(n_params);
  std::vector<Activation> gen_acts(cfg.gen_layers.size(), Activation::LeakyReLU);
  gen_acts.push_back(Activation::Identity);
  std::vector<DenseLayer> gen = make_dense_net(gen_sizes, gen_acts, rng);
  // start the proposal at the maximally mixed state: output bias = pack(I)
  gen.back().biases = pack_params(CholeskyParams::identity(dim));
  RealVector gen_flat = flatten_net(gen);
  AdamState gen_adam;

  Discriminator disc = make_discriminator(cfg, n_outcomes, rng);

  ReconstructionResult result;
  double best_gen_loss = std::numeric_limits<double>::infinity();

  for (int epoch = 0;; ++epoch) {
    auto [gen_out, gen_tape] = dense_forward(gen, real_vec);
    if (!gen_out.allFinite()) nonfinite("generator", epoch);
    CholeskyParams t = unpack_params(dim, gen_out);
    DensityMatrix rho_g = cholesky_to_dm(t);
    ExpectationVector fake = expectation(rho_g, set);
    RealVector fake_vec(n_outcomes);
    for (int k = 0; k < n_outcomes; ++k) fake_vec(k) = fake.values[static_cast<std::size_t>(k)];

    bool at_record = epoch % cfg.record_every == 0 || epoch == cfg.epochs;
    if (at_record && reference)
      result.fidelity_history.emplace_back(epoch, fidelity(rho_g, *reference));

    // generator loss under the current discriminator (pre-update, for
    // epoch-best tracking and the recorded histories)
    double d_fake_now = disc.output(fake_vec);
    double gen_loss_now = -std::log(d_fake_now);
    if (!std::isfinite(gen_loss_now)) nonfinite("generator", epoch);
    if (gen_loss_now < best_gen_loss) {
      best_gen_loss = gen_loss_now;
      result.reconstructed_dm = rho_g;
    }

    if (epoch == cfg.epochs) {
      if (at_record) result.loss_history.emplace_back(epoch, gen_loss_now);
      break;
    }

    double disc_loss = update_discriminator(disc, real_vec, fake_vec, cfg.lr_disc);
    if (!std::isfinite(disc_loss)) nonfinite("discriminator", epoch);

    // generator step: backprop -ln D(data_G) through the refreshed
    // discriminator, the Born-rule Jacobian, and the generator net
    ForwardTape fake_tape;
    double d_fake = disc.output(fake_vec, &fake_tape);
    double gen_loss = -std::log(d_fake);
    if (!std::isfinite(gen_loss)) nonfinite("generator", epoch);

    if (at_record) {
      result.loss_history.emplace_back(epoch, gen_loss);
      result.disc_loss_history.emplace_back(epoch, disc_loss);
    }

    RealVector up(1);
    up(0) = -1.0 / d_fake;
    auto [disc_param_grads, data_grad] = dense_backward(disc.layers, fake_tape, up);
    (void)disc_param_grads;  // the generator step leaves D untouched

    RealMatrix jac = expectation_jacobian(t, set);
    RealVector gen_out_grad = jac.transpose() * data_grad;
    auto [gen_grads, gen_in_grad] = dense_backward(gen, gen_tape, gen_out_grad);
    (void)gen_in_grad;

    adam_step(gen_flat, flatten_grads(gen_grads), gen_adam, cfg.lr_gen);
    if (!gen_flat.allFinite()) nonfinite("generator", epoch);
    unflatten_net(gen_flat, gen);
  }

  result.wall_time_s = seconds_since(t0);

  json echo;
  echo["solver"] = "gan";
  echo["epochs"] = cfg.epochs;
  echo["latent_source"] = "measurement_vector";
  echo["gen_layers"] = cfg.gen_layers;
  echo["disc_layers"] = cfg.disc_layers;
  echo["lr_gen"] = cfg.lr_gen;
  echo["lr_disc"] = cfg.lr_disc;
  echo["record_every"] = cfg.record_every;
  echo["seed"] = cfg.seed;
  echo["best_generator_loss"] = best_gen_loss;
  result.config_echo = echo.dump();
  return result;
}

double discriminator_pretrain_sanity(const GANConfig& cfg, const std::vector<double>& data,
                                     std::uint64_t seed) {
  cfg.validate();
  if (data.empty()) fail("LengthMismatch", "sanity check needs a non-empty data vector");

  const int n = static_cast<int>(data.size());
  RealVector real(n);
  for (int k = 0; k < n; ++k) real(k) = data[static_cast<std::size_t>(k)];

  // fixed shuffled copy as the "fake" sample
  std::vector<int> perm(n);
  for (int i = 0; i < n; ++i) perm[i] = i;
  Rng shuffle_rng(Rng::derive(seed, 1));
  for (int i = n - 1; i > 0; --i)
    std::swap(perm[i], perm[shuffle_rng.uniform_int(static_cast<std::uint64_t>(i) + 1)]);
  RealVector fake(n);
  for (int k = 0; k < n; ++k) fake(k) = real(perm[k]);

  Rng rng(seed);
  Discriminator disc = make_discriminator(cfg, n, rng);
  // fixed internal rate; 50 steps must suffice on separable toy pairs
  for (int step = 0; step < 50; ++step) update_discriminator(disc, real, fake, 0.01);

  double acc = 0.0;
  if (disc.output(real) > 0.5) acc += 0.5;
  if (disc.output(fake) <= 0.5) acc += 0.5;
  return acc;
}

}  // namespace tomokit
