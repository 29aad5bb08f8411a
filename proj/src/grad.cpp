#include "tomokit/grad.hpp"

#include <algorithm>
#include <cmath>

namespace tomokit {

int param_count(int dim) { return dim * dim; }

RealVector pack_params(const CholeskyParams& t) {
  const int n = t.dim();
  RealVector packed(param_count(n));
  int idx = 0;
  for (int i = 1; i < n; ++i)
    for (int j = 0; j < i; ++j) packed(idx++) = t.lower()(i, j).real();
  for (int i = 1; i < n; ++i)
    for (int j = 0; j < i; ++j) packed(idx++) = t.lower()(i, j).imag();
  for (int i = 0; i < n; ++i) packed(idx++) = t.lower()(i, i).real();
  return packed;
}

CholeskyParams unpack_params(int dim, const RealVector& packed) {
  if (packed.size() != param_count(dim))
    fail("LengthMismatch", "packed parameter vector has length " + std::to_string(packed.size()) +
                               ", expected " + std::to_string(param_count(dim)));
  ComplexMatrix t = ComplexMatrix::Zero(dim, dim);
  int idx = 0;
  const int strict = dim * (dim - 1) / 2;
  for (int i = 1; i < dim; ++i)
    for (int j = 0; j < i; ++j) {
      t(i, j) = Complex(packed(idx), packed(idx + strict));
      ++idx;
    }
  idx = 2 * strict;
  for (int i = 0; i < dim; ++i) t(i, i) = Complex(packed(idx++), 0.0);
  return CholeskyParams(t);
}

namespace {

// Packs the real-coordinate gradient corresponding to a Wirtinger gradient
// G = dF/d(conj T): d/dRe = 2 Re G, d/dIm = 2 Im G, d/d(diag) = 2 Re G_ii.
RealVector pack_wirtinger(const ComplexMatrix& g) {
  const int n = static_cast<int>(g.rows());
  RealVector packed(n * n);
  int idx = 0;
  for (int i = 1; i < n; ++i)
    for (int j = 0; j < i; ++j) packed(idx++) = 2.0 * g(i, j).real();
  for (int i = 1; i < n; ++i)
    for (int j = 0; j < i; ++j) packed(idx++) = 2.0 * g(i, j).imag();
  for (int i = 0; i < n; ++i) packed(idx++) = 2.0 * g(i, i).real();
  return packed;
}

void check_lengths(std::size_t weights, std::size_t operators) {
  if (weights != operators)
    fail("LengthMismatch", "data has " + std::to_string(weights) + " entries but the set has " +
                               std::to_string(operators) + " operators");
}

}  // namespace

double loglik(const CholeskyParams& t, const std::vector<double>& weights,
              const MeasurementSet& set, double floor) {
  check_lengths(weights.size(), set.size());
  if (!(floor > 0.0)) fail("NegativeParameter", "probability floor must be > 0");
  DensityMatrix rho = cholesky_to_dm(t);
  ExpectationVector p = expectation(rho, set);
  double ll = 0.0;
  for (std::size_t k = 0; k < weights.size(); ++k)
    if (weights[k] != 0.0) ll += weights[k] * std::log(std::max(p.values[k], floor));
  return ll;
}

RealVector loglik_grad(const CholeskyParams& t, const std::vector<double>& weights,
                       const MeasurementSet& set, double floor) {
  check_lengths(weights.size(), set.size());
  if (!(floor > 0.0)) fail("NegativeParameter", "probability floor must be > 0");

  const int n = t.dim();
  ComplexMatrix s = t.lower() * t.lower().adjoint();
  double trace = s.trace().real();
  if (!(trace > 1e-30)) fail("DegenerateT", "Tr(TT^dag) underflows");

  // d loglik / d conj(T) = (W T - M T) / Tr(TT^dag) with
  // W = sum_k (n_k / p_k) O_k over unclamped outcomes, M = sum of their n_k.
  ComplexMatrix w_op = ComplexMatrix::Zero(n, n);
  double total_weight = 0.0;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    if (weights[k] == 0.0) continue;
    double p_k = (s.cwiseProduct(set.operators[k].transpose()).sum()).real() / trace;
    if (p_k <= floor) continue;  // clamped log has zero slope
    w_op += (weights[k] / p_k) * set.operators[k];
    total_weight += weights[k];
  }
  ComplexMatrix g = (w_op * t.lower() - total_weight * t.lower()) / trace;
  return pack_wirtinger(g);
}

RealMatrix expectation_jacobian(const CholeskyParams& t, const MeasurementSet& set) {
  const int n = t.dim();
  if (n != set.dim) fail("DimensionMismatch", "parameter dim vs measurement dim");
  ComplexMatrix s = t.lower() * t.lower().adjoint();
  double trace = s.trace().real();
  if (!(trace > 1e-30)) fail("DegenerateT", "Tr(TT^dag) underflows");

  RealMatrix jac(set.size(), param_count(n));
  for (std::size_t k = 0; k < set.size(); ++k) {
    double p_k = (s.cwiseProduct(set.operators[k].transpose()).sum()).real() / trace;
    ComplexMatrix g = (set.operators[k] * t.lower() - p_k * t.lower()) / trace;
    jac.row(static_cast<Eigen::Index>(k)) = pack_wirtinger(g).transpose();
  }
  return jac;
}

RealVector finite_diff_grad(const std::function<double(const RealVector&)>& f, const RealVector& x,
                            double h) {
  if (!(h > 0.0)) fail("NegativeParameter", "finite-difference step must be > 0");
  RealVector grad(x.size());
  RealVector probe = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    probe(i) = x(i) + h;
    double up = f(probe);
    probe(i) = x(i) - h;
    double down = f(probe);
    probe(i) = x(i);
    grad(i) = (up - down) / (2.0 * h);
  }
  return grad;
}

std::vector<double> weights_from(const CountVector& counts) {
  std::vector<double> w(counts.counts.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = static_cast<double>(counts.counts[i]);
  return w;
}

std::vector<double> weights_from(const ExpectationVector& p) { return p.values; }

// --- dense network ----------------------------------------------------------

namespace {

double apply_activation(Activation act, double z) {
  switch (act) {
    case Activation::LeakyReLU: return z >= 0.0 ? z : kLeakySlope * z;
    case Activation::Sigmoid: {
      double zc = std::clamp(z, -kSigmoidClamp, kSigmoidClamp);
      return 1.0 / (1.0 + std::exp(-zc));
    }
    case Activation::Identity: return z;
  }
  return z;
}

double activation_slope(Activation act, double z) {
  switch (act) {
    case Activation::LeakyReLU: return z >= 0.0 ? 1.0 : kLeakySlope;
    case Activation::Sigmoid: {
      double zc = std::clamp(z, -kSigmoidClamp, kSigmoidClamp);
      double sig = 1.0 / (1.0 + std::exp(-zc));
      return sig * (1.0 - sig);
    }
    case Activation::Identity: return 1.0;
  }
  return 1.0;
}

}  // namespace

std::vector<DenseLayer> make_dense_net(const std::vector<int>& sizes,
                                       const std::vector<Activation>& activations, Rng& rng) {
  if (sizes.size() < 2 || activations.size() != sizes.size() - 1)
    fail("ShapeMismatch", "layer size/activation lists are inconsistent");
  std::vector<DenseLayer> layers;
  layers.reserve(sizes.size() - 1);
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    DenseLayer layer;
    int in = sizes[l];
    int out = sizes[l + 1];
    double bound = std::sqrt(6.0 / double(in + out));
    layer.weights.resize(out, in);
    for (int i = 0; i < out; ++i)
      for (int j = 0; j < in; ++j) layer.weights(i, j) = rng.uniform(-bound, bound);
    layer.biases = RealVector::Zero(out);
    layer.activation = activations[l];
    layers.push_back(std::move(layer));
  }
  return layers;
}

std::pair<RealVector, ForwardTape> dense_forward(const std::vector<DenseLayer>& layers,
                                                 const RealVector& x) {
  ForwardTape tape;
  tape.input = x;
  RealVector current = x;
  for (const DenseLayer& layer : layers) {
    if (layer.weights.cols() != current.size())
      fail("ShapeMismatch", "layer expects input " + std::to_string(layer.weights.cols()) +
                                ", got " + std::to_string(current.size()));
    RealVector z = layer.weights * current + layer.biases;
    RealVector a(z.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) a(i) = apply_activation(layer.activation, z(i));
    tape.pre_activations.push_back(std::move(z));
    tape.outputs.push_back(a);
    current = std::move(a);
  }
  return {current, tape};
}

std::pair<std::vector<LayerGrads>, RealVector> dense_backward(const std::vector<DenseLayer>& layers,
                                                              const ForwardTape& tape,
                                                              const RealVector& upstream) {
  if (layers.empty() || tape.outputs.size() != layers.size())
    fail("ShapeMismatch", "tape does not match the network");
  if (upstream.size() != tape.outputs.back().size())
    fail("ShapeMismatch", "upstream gradient has wrong length");

  std::vector<LayerGrads> grads(layers.size());
  RealVector delta = upstream;
  for (int l = static_cast<int>(layers.size()) - 1; l >= 0; --l) {
    const DenseLayer& layer = layers[l];
    const RealVector& z = tape.pre_activations[l];
    RealVector dz(z.size());
    for (Eigen::Index i = 0; i < z.size(); ++i)
      dz(i) = delta(i) * activation_slope(layer.activation, z(i));

    const RealVector& layer_input = l == 0 ? tape.input : tape.outputs[l - 1];
    grads[l].weights = dz * layer_input.transpose();
    grads[l].biases = dz;
    delta = layer.weights.transpose() * dz;
  }
  return {std::move(grads), std::move(delta)};
}

RealVector flatten_net(const std::vector<DenseLayer>& layers) {
  Eigen::Index total = 0;
  for (const auto& l : layers) total += l.weights.size() + l.biases.size();
  RealVector flat(total);
  Eigen::Index at = 0;
  for (const auto& l : layers) {
    flat.segment(at, l.weights.size()) = Eigen::Map<const RealVector>(l.weights.data(), l.weights.size());
    at += l.weights.size();
    flat.segment(at, l.biases.size()) = l.biases;
    at += l.biases.size();
  }
  return flat;
}

void unflatten_net(const RealVector& flat, std::vector<DenseLayer>& layers) {
  Eigen::Index at = 0;
  for (auto& l : layers) {
    Eigen::Map<RealVector>(l.weights.data(), l.weights.size()) = flat.segment(at, l.weights.size());
    at += l.weights.size();
    l.biases = flat.segment(at, l.biases.size());
    at += l.biases.size();
  }
  if (at != flat.size()) fail("ShapeMismatch", "flat parameter vector does not match the network");
}

RealVector flatten_grads(const std::vector<LayerGrads>& grads) {
  Eigen::Index total = 0;
  for (const auto& g : grads) total += g.weights.size() + g.biases.size();
  RealVector flat(total);
  Eigen::Index at = 0;
  for (const auto& g : grads) {
    flat.segment(at, g.weights.size()) = Eigen::Map<const RealVector>(g.weights.data(), g.weights.size());
    at += g.weights.size();
    flat.segment(at, g.biases.size()) = g.biases;
    at += g.biases.size();
  }
  return flat;
}

void adam_step(RealVector& params, const RealVector& grads, AdamState& state, double lr,
               double beta1, double beta2, double eps) {
  if (params.size() != grads.size()) fail("ShapeMismatch", "parameter/gradient length mismatch");
  if (!(lr > 0.0)) fail("NegativeParameter", "learning rate must be > 0");
  if (state.m.size() != params.size()) {
    state.m = RealVector::Zero(params.size());
    state.v = RealVector::Zero(params.size());
    state.step = 0;
  }
  ++state.step;
  state.m = beta1 * state.m + (1.0 - beta1) * grads;
  state.v = beta2 * state.v + (1.0 - beta2) * grads.cwiseProduct(grads);
  double bc1 = 1.0 - std::pow(beta1, double(state.step));
  double bc2 = 1.0 - std::pow(beta2, double(state.step));
  RealVector denom = (state.v / bc2).cwiseSqrt();
  denom.array() += eps;
  params -= (lr / bc1) * state.m.cwiseQuotient(denom);
}

}  // namespace tomokit
