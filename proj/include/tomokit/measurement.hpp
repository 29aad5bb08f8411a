// Measurement-operator sets (Husimi-Q grid, photon number, custom), Born-rule
// expectation values, finite-shot sampling, and phase-space image rasters.
#pragma once

#include "tomokit/quantum_core.hpp"

#include <optional>
#include <vector>

namespace tomokit {

enum class MeasurementKind { HusimiGrid, PhotonNumber, Custom };

// Real-valued raster of quasi-probabilities. Pixel (i, j) corresponds to
// phase-space point (pgrid[i], xgrid[j]).
struct PhaseSpaceImage {
  int height = 0;
  int width = 0;
  RealMatrix pixels;  // height x width
  std::vector<double> xgrid;
  std::vector<double> pgrid;
};

// Ordered operator list {O_k}, all Hermitian PSD. For HusimiGrid sets the
// ordering is row-major over (p, x): k = ip * len(xgrid) + ix.
struct MeasurementSet {
  int dim = 0;
  MeasurementKind kind = MeasurementKind::Custom;
  std::vector<ComplexMatrix> operators;
  std::vector<double> xgrid;  // HusimiGrid only
  std::vector<double> pgrid;

  std::size_t size() const { return operators.size(); }
};

// O_k = (dA/pi) |beta_k><beta_k| with beta = (x + i p)/sqrt(2) and dA the cell
// area the (x, p) grid induces in the beta plane (dx dp / 2), so expectation
// vectors are Riemann-sum probabilities of the Husimi Q function. The coherent
// projectors keep their truncated (unnormalized) coefficients so expectations
// reproduce the analytic (dA/pi) exp(-|beta - alpha|^2) values on the
// low-photon subspace. Grids must be strictly increasing and uniform.
MeasurementSet husimi_operators(int dim, const std::vector<double>& xgrid,
                                const std::vector<double>& pgrid);

// O_n = |n><n|; completeness holds exactly.
MeasurementSet number_operators(int dim);

// User-supplied operators; validates Hermiticity and positivity at `tol`.
MeasurementSet custom_operators(int dim, std::vector<ComplexMatrix> operators,
                                double tol = kDefaultTol);

struct ExpectationVector {
  std::vector<double> values;
  MeasurementKind set_kind = MeasurementKind::Custom;
};

// Born rule p_k = Re Tr(rho O_k).
ExpectationVector expectation(const DensityMatrix& rho, const MeasurementSet& set);

struct CountVector {
  std::vector<std::uint64_t> counts;
  std::uint64_t shots = 0;
};

// Multinomial draw over outcomes with probabilities p / sum(p); negative
// roundoff values are clipped to zero before normalization.
CountVector sample_counts(const ExpectationVector& p, std::uint64_t shots, std::uint64_t seed);

// Reshapes a HusimiGrid expectation vector into its raster.
PhaseSpaceImage husimi_image(const DensityMatrix& rho, const MeasurementSet& set);

// Uniform grid helper: n points from lo to hi inclusive.
std::vector<double> linspace(double lo, double hi, int n);

}  // namespace tomokit
