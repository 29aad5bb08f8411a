#include "tomokit/measurement.hpp"

#include "tomokit/states.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace tomokit {

namespace {

// Strictly increasing with uniform spacing; returns the spacing.
double check_grid(const std::vector<double>& grid, const char* axis) {
  if (grid.size() < 2) fail("NonMonotonicGrid", std::string(axis) + " grid needs at least 2 points");
  double step = grid[1] - grid[0];
  if (!(step > 0.0)) fail("NonMonotonicGrid", std::string(axis) + " grid is not strictly increasing");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    double d = grid[i] - grid[i - 1];
    if (!(d > 0.0)) fail("NonMonotonicGrid", std::string(axis) + " grid is not strictly increasing");
    if (std::abs(d - step) > 1e-9 * std::max(1.0, std::abs(step)))
      fail("NonUniformGrid", std::string(axis) + " grid spacing is not uniform");
  }
  return step;
}

}  // namespace

std::vector<double> linspace(double lo, double hi, int n) {
  if (n < 2) fail("NonMonotonicGrid", "linspace needs n >= 2");
  std::vector<double> grid(n);
  double step = (hi - lo) / double(n - 1);
  for (int i = 0; i < n; ++i) grid[i] = lo + step * i;
  grid[n - 1] = hi;
  return grid;
}

MeasurementSet husimi_operators(int dim, const std::vector<double>& xgrid,
                                const std::vector<double>& pgrid) {
  if (dim < 1) fail("DimensionTooSmall", "husimi operators need dim >= 1");
  double dx = check_grid(xgrid, "x");
  double dp = check_grid(pgrid, "p");
  // cell area in the beta plane: beta = (x + ip)/sqrt(2) halves the (x, p)
  // area, which keeps sum_k Tr(rho O_k) a Riemann sum of Q (at most 1)
  double weight = dx * dp / (2.0 * kPi);

  MeasurementSet set;
  set.dim = dim;
  set.kind = MeasurementKind::HusimiGrid;
  set.xgrid = xgrid;
  set.pgrid = pgrid;
  set.operators.reserve(xgrid.size() * pgrid.size());
  double sqrt_weight = std::sqrt(weight);
  for (double p : pgrid) {
    for (double x : xgrid) {
      Complex beta(x / std::sqrt(2.0), p / std::sqrt(2.0));
      ComplexVector ket = sqrt_weight * coherent_amplitudes(dim, beta);
      set.operators.emplace_back(ket * ket.adjoint());
    }
  }
  return set;
}

MeasurementSet number_operators(int dim) {
  if (dim < 1) fail("DimensionTooSmall", "number operators need dim >= 1");
  MeasurementSet set;
  set.dim = dim;
  set.kind = MeasurementKind::PhotonNumber;
  set.operators.reserve(dim);
  for (int n = 0; n < dim; ++n) {
    ComplexMatrix op = ComplexMatrix::Zero(dim, dim);
    op(n, n) = Complex(1.0, 0.0);
    set.operators.push_back(std::move(op));
  }
  return set;
}

MeasurementSet custom_operators(int dim, std::vector<ComplexMatrix> operators, double tol) {
  if (operators.empty()) fail("EmptyRange", "custom measurement set has no operators");
  for (std::size_t k = 0; k < operators.size(); ++k) {
    const ComplexMatrix& op = operators[k];
    if (op.rows() != dim || op.cols() != dim)
      fail("DimensionMismatch", "operator " + std::to_string(k) + " is not " + std::to_string(dim) +
                                    "x" + std::to_string(dim));
    if ((op - op.adjoint()).cwiseAbs().maxCoeff() > tol)
      fail("NonHermitian", "operator " + std::to_string(k) + " is not Hermitian");
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(op, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -tol)
      fail("NotPositive", "operator " + std::to_string(k) + " has negative eigenvalues");
  }
  MeasurementSet set;
  set.dim = dim;
  set.kind = MeasurementKind::Custom;
  set.operators = std::move(operators);
  return set;
}

ExpectationVector expectation(const DensityMatrix& rho, const MeasurementSet& set) {
  if (rho.dim() != set.dim)
    fail("DimensionMismatch",
         "state dim " + std::to_string(rho.dim()) + " vs measurement dim " + std::to_string(set.dim));
  ExpectationVector out;
  out.set_kind = set.kind;
  out.values.reserve(set.size());
  for (const ComplexMatrix& op : set.operators) {
    // Tr(rho O) = sum_ij rho_ij O_ji without forming the product
    Complex tr = rho.matrix().cwiseProduct(op.transpose()).sum();
    out.values.push_back(tr.real());
  }
  return out;
}

CountVector sample_counts(const ExpectationVector& p, std::uint64_t shots, std::uint64_t seed) {
  std::vector<double> cdf(p.values.size());
  double total = 0.0;
  for (std::size_t k = 0; k < p.values.size(); ++k) {
    total += std::max(0.0, p.values[k]);
    cdf[k] = total;
  }
  if (!(total > 0.0)) fail("ZeroMass", "expectation vector has no positive mass");

  CountVector out;
  out.counts.assign(p.values.size(), 0);
  out.shots = shots;
  Rng rng(seed);
  for (std::uint64_t s = 0; s < shots; ++s) {
    double u = rng.uniform() * total;
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    std::size_t k = std::min(static_cast<std::size_t>(it - cdf.begin()), cdf.size() - 1);
    ++out.counts[k];
  }
  return out;
}

PhaseSpaceImage husimi_image(const DensityMatrix& rho, const MeasurementSet& set) {
  if (set.kind != MeasurementKind::HusimiGrid)
    fail("WrongKind", "husimi_image needs a HusimiGrid measurement set");
  ExpectationVector values = expectation(rho, set);

  PhaseSpaceImage img;
  img.height = static_cast<int>(set.pgrid.size());
  img.width = static_cast<int>(set.xgrid.size());
  img.xgrid = set.xgrid;
  img.pgrid = set.pgrid;
  img.pixels.resize(img.height, img.width);
  for (int i = 0; i < img.height; ++i)
    for (int j = 0; j < img.width; ++j) img.pixels(i, j) = values.values[i * img.width + j];
  return img;
}

}  // namespace tomokit
