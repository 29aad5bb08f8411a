#include "tomokit/quantum_core.hpp"
#include "tomokit/states.hpp"

#include "test_helpers.hpp"

#include <doctest.h>

using namespace tomokit;
using tomokit::testing::expect_error;
using tomokit::testing::random_cholesky;

namespace {

ComplexMatrix basis_projector(int dim, int n) {
  ComplexMatrix m = ComplexMatrix::Zero(dim, dim);
  m(n, n) = Complex(1.0, 0.0);
  return m;
}

}  // namespace

TEST_SUITE_BEGIN("quantum_core");

TEST_CASE("make_density_matrix accepts physical matrices") {
  DensityMatrix mixed = make_density_matrix(0.5 * ComplexMatrix::Identity(2, 2));
  CHECK(mixed.dim() == 2);
  CHECK(std::abs(mixed.matrix()(0, 0) - Complex(0.5, 0.0)) < 1e-15);

  DensityMatrix ground = make_density_matrix(basis_projector(2, 0));
  CHECK(std::abs(ground.matrix()(0, 0) - Complex(1.0, 0.0)) < 1e-15);
}

TEST_CASE("make_density_matrix rejects unphysical input by name") {
  // eigenvalues of [[0.5, 0.6], [0.6, 0.5]] are 1.1 and -0.1
  ComplexMatrix indefinite(2, 2);
  indefinite << Complex(0.5, 0), Complex(0.6, 0), Complex(0.6, 0), Complex(0.5, 0);
  CHECK(expect_error([&] { make_density_matrix(indefinite); }, "NotPositive"));

  ComplexMatrix skew(2, 2);
  skew << Complex(0.5, 0), Complex(0.1, 0.2), Complex(0.1, -0.1), Complex(0.5, 0);
  CHECK(expect_error([&] { make_density_matrix(skew); }, "NonHermitian"));

  CHECK(expect_error([&] { make_density_matrix(ComplexMatrix::Identity(3, 3)); }, "BadTrace"));
}

TEST_CASE("cholesky_to_dm reference points") {
  DensityMatrix mixed = cholesky_to_dm(CholeskyParams::identity(4));
  CHECK((mixed.matrix() - 0.25 * ComplexMatrix::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-15);

  ComplexMatrix t = ComplexMatrix::Zero(3, 3);
  t(0, 0) = Complex(3.0, 0.0);
  DensityMatrix pure = cholesky_to_dm(CholeskyParams(t));
  CHECK((pure.matrix() - basis_projector(3, 0)).cwiseAbs().maxCoeff() < 1e-15);

  CHECK(expect_error([&] { cholesky_to_dm(CholeskyParams(ComplexMatrix::Zero(2, 2))); },
                     "DegenerateT"));
}

TEST_CASE("random factors always map to physical states") {
  Rng rng(41);
  for (int trial = 0; trial < 100; ++trial) {
    CholeskyParams t = random_cholesky(8, rng);
    DensityMatrix rho = cholesky_to_dm(t);
    CHECK_NOTHROW(make_density_matrix(rho.matrix(), 1e-12));
  }
  // broader dimension sweep at the standard tolerance
  for (int trial = 0; trial < 1000; ++trial) {
    int dim = 2 << (trial % 3);  // 2, 4, 8
    DensityMatrix rho = cholesky_to_dm(random_cholesky(dim, rng));
    CHECK_NOTHROW(make_density_matrix(rho.matrix(), 1e-10));
  }
}

TEST_CASE("cholesky normalization gauge: scaling T changes nothing") {
  Rng rng(7);
  CholeskyParams t = random_cholesky(6, rng);
  DensityMatrix base = cholesky_to_dm(t);
  for (Complex scale : {Complex(2.5, 0.0), Complex(-0.3, 0.0), Complex(0.0, 1.0), Complex(0.6, -0.8)}) {
    DensityMatrix scaled = cholesky_to_dm(CholeskyParams(scale * t.lower()));
    CHECK((scaled.matrix() - base.matrix()).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("dm_to_cholesky round trips") {
  DensityMatrix mixed = cholesky_to_dm(CholeskyParams::identity(4));
  CholeskyParams t = dm_to_cholesky(mixed, 1e-12);
  ComplexMatrix off = t.lower() - t.lower()(0, 0) * ComplexMatrix::Identity(4, 4);
  CHECK(off.cwiseAbs().maxCoeff() < 1e-6);  // proportional to identity

  DensityMatrix excited = fock(4, 1);  // rank deficient
  double f = fidelity(cholesky_to_dm(dm_to_cholesky(excited, 1e-10)), excited);
  CHECK(f >= 1.0 - 1e-9);

  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    DensityMatrix rho = random_dm(8, 8, 1000 + trial);
    double rf = fidelity(cholesky_to_dm(dm_to_cholesky(rho, 1e-10)), rho);
    CHECK(rf >= 1.0 - 1e-9);
  }
}

TEST_CASE("fidelity reference values") {
  DensityMatrix ground = fock(2, 0);
  DensityMatrix excited = fock(2, 1);
  DensityMatrix mixed = cholesky_to_dm(CholeskyParams::identity(2));

  CHECK(fidelity(ground, excited) < 1e-12);
  CHECK(fidelity(ground, mixed) == doctest::Approx(0.5).epsilon(1e-9));

  for (int seed = 0; seed < 10; ++seed) {
    DensityMatrix rho = random_dm(6, 6, seed);
    CHECK(fidelity(rho, rho) >= 1.0 - 1e-9);
    CHECK(fidelity(rho, rho) <= 1.0);
  }

  CHECK(expect_error([&] { fidelity(ground, fock(3, 0)); }, "DimensionMismatch"));
}

TEST_CASE("fidelity is symmetric and matches the pure-state reduction") {
  for (int seed = 0; seed < 10; ++seed) {
    DensityMatrix a = random_dm(6, 6, 100 + seed);
    DensityMatrix b = random_dm(6, 3, 200 + seed);
    CHECK(std::abs(fidelity(a, b) - fidelity(b, a)) < 1e-10);

    DensityMatrix psi = coherent(6, Complex(0.4 + 0.05 * seed, -0.2));
    // pure rho reduces Eq.-style fidelity to <psi|sigma|psi>
    Complex overlap = (psi.matrix() * b.matrix()).trace();
    CHECK(std::abs(fidelity(psi, b) - overlap.real()) < 1e-9);
  }
}

TEST_CASE("displacement operator") {
  BosonicOperators ops = BosonicOperators::make(32);

  CHECK((displacement_operator(ops, Complex(0, 0)) - ComplexMatrix::Identity(32, 32))
            .cwiseAbs()
            .maxCoeff() < 1e-12);

  // analytic coherent amplitudes e^{-|a|^2/2} a^n / sqrt(n!)
  Complex alpha(0.6, 0.8);  // |alpha| = 1
  ComplexVector displaced = displacement_operator(ops, alpha).col(0);
  ComplexVector analytic = coherent_amplitudes(32, alpha);
  CHECK((displaced - analytic).cwiseAbs().maxCoeff() < 1e-8);

  for (double mag : {0.5, 1.0, 2.0}) {
    ComplexMatrix round_trip =
        displacement_operator(ops, Complex(mag, 0.3)) * displacement_operator(ops, Complex(-mag, -0.3));
    ComplexMatrix err = round_trip - ComplexMatrix::Identity(32, 32);
    CHECK(err.topLeftCorner(16, 16).cwiseAbs().maxCoeff() < 1e-6);
  }
}

TEST_CASE("squeeze operator") {
  BosonicOperators ops = BosonicOperators::make(32);

  CHECK((squeeze_operator(ops, Complex(0, 0)) - ComplexMatrix::Identity(32, 32)).cwiseAbs().maxCoeff() <
        1e-12);

  ComplexVector squeezed = squeeze_operator(ops, Complex(0.5, 0.0)).col(0);
  for (int n = 1; n < 32; n += 2) CHECK(std::abs(squeezed(n)) < 1e-15);

  double mean_n = 0.0;
  for (int n = 0; n < 32; ++n) mean_n += n * std::norm(squeezed(n));
  CHECK(mean_n == doctest::Approx(std::sinh(0.5) * std::sinh(0.5)).epsilon(1e-6));
}

TEST_CASE("bosonic operator structure") {
  BosonicOperators ops = BosonicOperators::make(5);
  for (int n = 1; n < 5; ++n)
    CHECK(std::abs(ops.annihilation(n - 1, n) - Complex(std::sqrt(double(n)), 0.0)) < 1e-15);
  CHECK((ops.number - ops.annihilation.adjoint() * ops.annihilation).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_SUITE_END();
