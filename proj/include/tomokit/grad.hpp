// Differentiation kernel shared by both solvers: analytic gradients of the
// log-likelihood and of Born expectations with respect to the packed Cholesky
// parameters, a central-difference oracle, and dense layers with
// reverse-mode backpropagation.
#pragma once

#include "tomokit/measurement.hpp"

#include <functional>
#include <utility>
#include <vector>

namespace tomokit {

// --- Cholesky parameter packing -------------------------------------------
//
// The free real parameters of a dim x dim lower-triangular T are packed as
//   [ Re(strict lower, row-major) | Im(strict lower, row-major) | diagonal ]
// for a total of dim^2 values. This order is fixed; checkpoints depend on it.

int param_count(int dim);
RealVector pack_params(const CholeskyParams& t);
CholeskyParams unpack_params(int dim, const RealVector& packed);

// --- likelihood -------------------------------------------------------------
//
// loglik(T) = sum_k n_k ln(max(Tr(rho(T) O_k), floor)) with rho(T) = TT^dag/Tr.
// Weights may be integer counts or real-valued exact expectations.

double loglik(const CholeskyParams& t, const std::vector<double>& weights,
              const MeasurementSet& set, double floor = 1e-12);

// Exact gradient of loglik with respect to the packed parameters.
RealVector loglik_grad(const CholeskyParams& t, const std::vector<double>& weights,
                       const MeasurementSet& set, double floor = 1e-12);

// J(k, i) = d Tr(rho(T) O_k) / d theta_i; rows contract with an upstream
// gradient to carry it through the Born-rule physics layer.
RealMatrix expectation_jacobian(const CholeskyParams& t, const MeasurementSet& set);

// Central differences (f(x + h e_i) - f(x - h e_i)) / 2h per coordinate.
RealVector finite_diff_grad(const std::function<double(const RealVector&)>& f, const RealVector& x,
                            double h);

std::vector<double> weights_from(const CountVector& counts);
std::vector<double> weights_from(const ExpectationVector& p);

// --- dense network ----------------------------------------------------------

enum class Activation { LeakyReLU, Sigmoid, Identity };

inline constexpr double kLeakySlope = 0.2;
// Sigmoid pre-activations are clamped to +-30 so BCE losses stay finite.
inline constexpr double kSigmoidClamp = 30.0;

struct DenseLayer {
  RealMatrix weights;  // out x in
  RealVector biases;
  Activation activation = Activation::Identity;
};

// Layer sizes in -> hidden... -> out with the given activations per layer.
// Xavier-uniform initialization from the seeded stream.
std::vector<DenseLayer> make_dense_net(const std::vector<int>& sizes,
                                       const std::vector<Activation>& activations, Rng& rng);

struct ForwardTape {
  RealVector input;
  std::vector<RealVector> pre_activations;
  std::vector<RealVector> outputs;
};

std::pair<RealVector, ForwardTape> dense_forward(const std::vector<DenseLayer>& layers,
                                                 const RealVector& x);

struct LayerGrads {
  RealMatrix weights;
  RealVector biases;
};

// Reverse-mode gradients for every layer parameter and for the input.
std::pair<std::vector<LayerGrads>, RealVector> dense_backward(const std::vector<DenseLayer>& layers,
                                                              const ForwardTape& tape,
                                                              const RealVector& upstream);

// Flat parameter views so nets can share the Adam update with the MLE path.
RealVector flatten_net(const std::vector<DenseLayer>& layers);
void unflatten_net(const RealVector& flat, std::vector<DenseLayer>& layers);
RealVector flatten_grads(const std::vector<LayerGrads>& grads);

// --- Adam -------------------------------------------------------------------

struct AdamState {
  RealVector m;
  RealVector v;
  long step = 0;
};

inline constexpr double kAdamBeta1 = 0.9;
inline constexpr double kAdamBeta2 = 0.999;
inline constexpr double kAdamEps = 1e-8;

// One descent step (subtract to minimize; callers maximizing pass -grad).
void adam_step(RealVector& params, const RealVector& grads, AdamState& state, double lr,
               double beta1 = kAdamBeta1, double beta2 = kAdamBeta2, double eps = kAdamEps);

}  // namespace tomokit
