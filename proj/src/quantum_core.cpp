#include "tomokit/quantum_core.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <sstream>

namespace tomokit {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace

DensityMatrix DensityMatrix::validated(const ComplexMatrix& m, double tol) {
  if (m.rows() != m.cols() || m.rows() < 1)
    fail("DimensionMismatch", "density matrix must be square, got " + std::to_string(m.rows()) + "x" +
                                  std::to_string(m.cols()));

  double herm_dev = (m - m.adjoint()).cwiseAbs().maxCoeff();
  if (herm_dev > tol)
    fail("NonHermitian", "max |m_ij - conj(m_ji)| = " + fmt(herm_dev) + " exceeds tol " + fmt(tol));

  Complex tr = m.trace();
  if (std::abs(tr - Complex(1.0, 0.0)) > tol)
    fail("BadTrace", "|Tr - 1| = " + fmt(std::abs(tr - Complex(1.0, 0.0))) + " exceeds tol " + fmt(tol));

  ComplexMatrix sym = 0.5 * (m + m.adjoint().eval());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(sym, Eigen::EigenvaluesOnly);
  double min_eig = es.eigenvalues().minCoeff();
  if (min_eig < -tol)
    fail("NotPositive", "min eigenvalue " + fmt(min_eig) + " below -tol " + fmt(-tol));

  sym /= sym.trace().real();
  return unchecked(std::move(sym));
}

DensityMatrix DensityMatrix::unchecked(ComplexMatrix m, bool truncation_warning) {
  DensityMatrix dm;
  dm.m_ = std::move(m);
  dm.trunc_warn_ = truncation_warning;
  return dm;
}

double DensityMatrix::purity() const { return (m_ * m_).trace().real(); }

DensityMatrix make_density_matrix(const ComplexMatrix& m, double tol) {
  return DensityMatrix::validated(m, tol);
}

CholeskyParams::CholeskyParams(const ComplexMatrix& lower) {
  if (lower.rows() != lower.cols() || lower.rows() < 1)
    fail("DimensionMismatch", "Cholesky factor must be square");
  t_ = lower;
  const int n = dim();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) t_(i, j) = Complex(0.0, 0.0);
}

CholeskyParams CholeskyParams::identity(int dim) {
  return CholeskyParams(ComplexMatrix::Identity(dim, dim));
}

DensityMatrix cholesky_to_dm(const CholeskyParams& t) {
  ComplexMatrix s = t.lower() * t.lower().adjoint();
  s = 0.5 * (s + s.adjoint().eval());  // kill roundoff asymmetry from the gemm
  double trace = s.trace().real();
  if (!(trace > 1e-30)) fail("DegenerateT", "Tr(TT^dag) = " + fmt(trace) + " underflows");
  s /= trace;
  return DensityMatrix::unchecked(std::move(s));
}

CholeskyParams dm_to_cholesky(const DensityMatrix& rho, double epsilon) {
  const int n = rho.dim();
  ComplexMatrix regularized = rho.matrix() + epsilon * ComplexMatrix::Identity(n, n);
  Eigen::LLT<ComplexMatrix> llt(regularized);
  if (llt.info() != Eigen::Success)
    fail("FactorizationFailed", "rho + epsilon*I is not factorizable (epsilon = " + fmt(epsilon) + ")");
  return CholeskyParams(ComplexMatrix(llt.matrixL()));
}

namespace {

// Square-root factor L with L L^dag = rho, from the clamped eigendecomposition.
// Eigenvalues below the solver's noise floor are zeroed: sqrt would amplify
// spurious +1e-16 values of rank-deficient states into 1e-8 columns.
ComplexMatrix sqrt_factor(const DensityMatrix& rho) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(rho.matrix());
  double cutoff = 1e-14 * std::max(es.eigenvalues().maxCoeff(), 0.0);
  RealVector vals = es.eigenvalues();
  for (Eigen::Index i = 0; i < vals.size(); ++i) vals(i) = vals(i) > cutoff ? vals(i) : 0.0;
  return es.eigenvectors() * vals.cwiseSqrt().asDiagonal();
}

}  // namespace

double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (rho.dim() != sigma.dim())
    fail("DimensionMismatch",
         "fidelity of dim " + std::to_string(rho.dim()) + " vs " + std::to_string(sigma.dim()));

  // Tr sqrt(sqrt(rho) sigma sqrt(rho)) is the trace norm of L_sigma^dag L_rho
  // for any square-root factors; singular values avoid the accuracy loss of
  // eigendecomposing the squared product.
  ComplexMatrix cross = sqrt_factor(sigma).adjoint() * sqrt_factor(rho);
  Eigen::JacobiSVD<ComplexMatrix> svd(cross);
  double root_sum = svd.singularValues().sum();

  double f = root_sum * root_sum;
  if (f < 0.0) f = 0.0;
  if (f > 1.0) f = 1.0;
  return f;
}

BosonicOperators BosonicOperators::make(int dim) {
  if (dim < 1) fail("DimensionMismatch", "bosonic operators need dim >= 1");
  BosonicOperators ops;
  ops.dim = dim;
  ops.annihilation = ComplexMatrix::Zero(dim, dim);
  for (int n = 1; n < dim; ++n) ops.annihilation(n - 1, n) = Complex(std::sqrt(double(n)), 0.0);
  ops.number = ComplexMatrix::Zero(dim, dim);
  for (int n = 0; n < dim; ++n) ops.number(n, n) = Complex(double(n), 0.0);
  return ops;
}

ComplexMatrix matrix_exp(const ComplexMatrix& a) {
  const int n = static_cast<int>(a.rows());
  double norm = a.cwiseAbs().rowwise().sum().maxCoeff();  // induced inf-norm

  // scale so the series argument has norm <= 0.5, then square back up
  int squarings = 0;
  if (norm > 0.5) {
    squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
    if (squarings > 60) squarings = 60;
  }
  ComplexMatrix b = a / std::pow(2.0, squarings);

  ComplexMatrix result = ComplexMatrix::Identity(n, n);
  ComplexMatrix term = ComplexMatrix::Identity(n, n);
  for (int k = 1; k <= 40; ++k) {
    term = (term * b) / double(k);
    result += term;
    if (term.cwiseAbs().maxCoeff() < 1e-16) break;
  }
  for (int s = 0; s < squarings; ++s) result = result * result;
  return result;
}

ComplexMatrix displacement_operator(const BosonicOperators& ops, Complex alpha) {
  if (ops.dim < 2) fail("DimensionMismatch", "displacement needs dim >= 2");
  ComplexMatrix gen = alpha * ops.annihilation.adjoint() - std::conj(alpha) * ops.annihilation;
  return matrix_exp(gen);
}

ComplexMatrix squeeze_operator(const BosonicOperators& ops, Complex z) {
  if (ops.dim < 2) fail("DimensionMismatch", "squeeze needs dim >= 2");
  ComplexMatrix a2 = ops.annihilation * ops.annihilation;
  ComplexMatrix gen = 0.5 * (std::conj(z) * a2 - z * a2.adjoint());
  return matrix_exp(gen);
}

}  // namespace tomokit
