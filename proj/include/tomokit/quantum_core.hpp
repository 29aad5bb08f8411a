// Density matrices on a truncated Fock space, the Cholesky reparametrization
// rho = T T^dag / Tr(T T^dag), state fidelity, and bosonic mode operators.
#pragma once

#include "tomokit/common.hpp"

namespace tomokit {

// Hermitian, positive-semidefinite, unit-trace matrix. Construct through
// DensityMatrix::validated (checked) or the factory functions in this library
// whose outputs are physical by construction.
class DensityMatrix {
 public:
  DensityMatrix() = default;

  // Checks Hermiticity, positivity and trace against `tol`, then symmetrizes
  // to (m + m^dag)/2 and rescales the trace to exactly 1.
  // Throws NonHermitian / NotPositive / BadTrace naming the measured violation.
  static DensityMatrix validated(const ComplexMatrix& m, double tol = kDefaultTol);

  // No checks; caller guarantees physicality (used where it holds by construction).
  static DensityMatrix unchecked(ComplexMatrix m, bool truncation_warning = false);

  int dim() const { return static_cast<int>(m_.rows()); }
  const ComplexMatrix& matrix() const { return m_; }

  // Set when a constructor discarded non-negligible amplitude at the Fock cutoff.
  bool truncation_warning() const { return trunc_warn_; }

  double purity() const;

 private:
  ComplexMatrix m_;
  bool trunc_warn_ = false;
};

// make_density_matrix of the module contract; alias of DensityMatrix::validated.
DensityMatrix make_density_matrix(const ComplexMatrix& m, double tol = kDefaultTol);

// Lower-triangular factor T. Entries above the diagonal are exactly zero.
// Every canonical producer (dm_to_cholesky, unpack_params, identity) emits a
// real diagonal, fixing the U(1) column-phase gauge of rho = TT^dag/Tr in the
// packed parameter space; the constructor itself accepts diagonal phases so
// gauge transformations T -> u T stay representable.
class CholeskyParams {
 public:
  CholeskyParams() = default;

  // Zeroes the strict upper triangle; other entries are kept as given.
  explicit CholeskyParams(const ComplexMatrix& lower);

  static CholeskyParams identity(int dim);

  int dim() const { return static_cast<int>(t_.rows()); }
  const ComplexMatrix& lower() const { return t_; }

 private:
  ComplexMatrix t_;
};

// rho = T T^dag / Tr(T T^dag). Physical for every T with Tr(TT^dag) > 0;
// throws DegenerateT when the trace underflows (< 1e-30).
DensityMatrix cholesky_to_dm(const CholeskyParams& t);

// Factors rho + epsilon*I (LLT) as a warm start for the solvers. The round-trip
// fidelity degrades as ~1 - dim*epsilon for rank-deficient states, so keep
// epsilon a few orders below the target accuracy.
CholeskyParams dm_to_cholesky(const DensityMatrix& rho, double epsilon = 1e-12);

// Uhlmann fidelity (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2, clamped to [0, 1].
// Matrix square roots use Hermitian eigendecompositions with eigenvalues
// clamped at zero.
double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma);

// Truncated annihilation operator a and number operator a^dag a.
struct BosonicOperators {
  int dim = 0;
  ComplexMatrix annihilation;
  ComplexMatrix number;

  static BosonicOperators make(int dim);
};

// exp(A) by scaling-and-squaring of a truncated Taylor series (series residual
// target 1e-12). Intended for the skew-Hermitian generators below.
ComplexMatrix matrix_exp(const ComplexMatrix& a);

// D(alpha) = exp(alpha a^dag - conj(alpha) a). Unitary on the truncated space;
// accurate on the low-photon subspace, degrading near the cutoff.
ComplexMatrix displacement_operator(const BosonicOperators& ops, Complex alpha);

// S(z) = exp((conj(z) a^2 - z a^dag^2) / 2).
ComplexMatrix squeeze_operator(const BosonicOperators& ops, Complex z);

}  // namespace tomokit
