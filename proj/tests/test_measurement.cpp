#include "tomokit/measurement.hpp"

#include "tomokit/states.hpp"

#include "test_helpers.hpp"

#include <doctest.h>

#include <cmath>

using namespace tomokit;
using tomokit::testing::expect_error;

TEST_SUITE_BEGIN("measurement");

TEST_CASE("husimi operator grid") {
  auto grid = linspace(-5.0, 5.0, 20);
  MeasurementSet set = husimi_operators(32, grid, grid);
  CHECK(set.size() == 400);

  double cell = (grid[1] - grid[0]) * (grid[1] - grid[0]) / (2.0 * kPi);
  for (std::size_t k = 0; k < set.size(); ++k) {
    double x = set.xgrid[k % 20];
    double p = set.pgrid[k / 20];
    double trace = set.operators[k].trace().real();
    CHECK(trace <= cell + 1e-12);
    if (x * x + p * p <= 2.0 * 9.0)  // |beta| <= 3
      CHECK(std::abs(trace - cell) < 1e-6);
  }

  MeasurementSet small = husimi_operators(8, linspace(-1, 1, 2), linspace(-1, 1, 2));
  CHECK(small.size() == 4);

  CHECK(expect_error([] { husimi_operators(8, {1.0, 0.5}, {0.0, 1.0}); }, "NonMonotonicGrid"));
  CHECK(expect_error([] { husimi_operators(8, {0.0, 0.5, 2.0}, {0.0, 1.0}); }, "NonUniformGrid"));
  CHECK(expect_error([] { husimi_operators(8, {0.0}, {0.0, 1.0}); }, "NonMonotonicGrid"));
}

TEST_CASE("husimi operators are rank-one and positive") {
  MeasurementSet set = husimi_operators(16, linspace(-2, 2, 3), linspace(-2, 2, 3));
  for (const ComplexMatrix& op : set.operators) {
    CHECK((op - op.adjoint()).cwiseAbs().maxCoeff() < 1e-14);
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(op, Eigen::EigenvaluesOnly);
    CHECK(es.eigenvalues().minCoeff() > -1e-14);
    // rank one: only a single eigenvalue leaves zero
    CHECK(es.eigenvalues()(14) < 1e-14);
  }
}

TEST_CASE("number operators resolve the identity") {
  MeasurementSet set = number_operators(4);
  CHECK(set.size() == 4);
  ComplexMatrix sum = ComplexMatrix::Zero(4, 4);
  for (const ComplexMatrix& op : set.operators) sum += op;
  CHECK((sum - ComplexMatrix::Identity(4, 4)).cwiseAbs().maxCoeff() == 0.0);

  ExpectationVector p = expectation(fock(4, 2), set);
  CHECK(p.values == std::vector<double>{0.0, 0.0, 1.0, 0.0});
}

TEST_CASE("photon-number expectation of a thermal state is geometric") {
  DensityMatrix warm = thermal(32, 2.0);
  ExpectationVector p = expectation(warm, number_operators(32));
  double q = 2.0 / 3.0;
  double norm = (1.0 - std::pow(q, 32.0));
  double sum = 0.0;
  for (int n = 0; n < 32; ++n) {
    double pmf = (1.0 - q) * std::pow(q, double(n)) / norm;
    CHECK(std::abs(p.values[n] - pmf) < 1e-6);
    sum += p.values[n];
  }
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("coherent-state Husimi expectations match the closed form") {
  auto grid = linspace(-5.0, 5.0, 20);
  MeasurementSet set = husimi_operators(32, grid, grid);
  double cell = (grid[1] - grid[0]) * (grid[1] - grid[0]) / (2.0 * kPi);

  Complex alpha(1.0, 0.0);
  ExpectationVector p = expectation(coherent(32, alpha), set);
  double total = 0.0;
  for (std::size_t k = 0; k < set.size(); ++k) {
    Complex beta(set.xgrid[k % 20] / std::sqrt(2.0), set.pgrid[k / 20] / std::sqrt(2.0));
    double expected = cell * std::exp(-std::norm(beta - alpha));
    CHECK(std::abs(p.values[k] - expected) < 1e-6);
    total += p.values[k];
  }
  CHECK(total <= 1.0 + 1e-6);  // Riemann sum of Q is at most 1
}

TEST_CASE("maximally mixed state sees a flat number distribution") {
  DensityMatrix mixed = cholesky_to_dm(CholeskyParams::identity(8));
  ExpectationVector p = expectation(mixed, number_operators(8));
  for (double v : p.values) CHECK(v == doctest::Approx(0.125).epsilon(1e-12));

  CHECK(expect_error([&] { expectation(mixed, number_operators(4)); }, "DimensionMismatch"));
}

TEST_CASE("expectation is linear in the state") {
  auto grid = linspace(-4.0, 4.0, 6);
  MeasurementSet set = husimi_operators(12, grid, grid);
  DensityMatrix rho1 = coherent(12, Complex(0.8, 0.1));
  DensityMatrix rho2 = thermal(12, 1.0);
  for (double a : {0.0, 0.3, 0.7, 1.0}) {
    DensityMatrix mix = DensityMatrix::unchecked(a * rho1.matrix() + (1.0 - a) * rho2.matrix());
    ExpectationVector pm = expectation(mix, set);
    ExpectationVector p1 = expectation(rho1, set);
    ExpectationVector p2 = expectation(rho2, set);
    for (std::size_t k = 0; k < pm.values.size(); ++k)
      CHECK(std::abs(pm.values[k] - (a * p1.values[k] + (1.0 - a) * p2.values[k])) < 1e-10);
  }
}

TEST_CASE("expectations of positive operators stay positive") {
  auto grid = linspace(-3.0, 3.0, 5);
  MeasurementSet set = husimi_operators(10, grid, grid);
  for (int seed = 0; seed < 10; ++seed) {
    ExpectationVector p = expectation(random_dm(10, 10, seed), set);
    for (double v : p.values) CHECK(v >= -1e-10);
  }
}

TEST_CASE("count sampling") {
  ExpectationVector sure;
  sure.values = {1.0, 0.0, 0.0};
  CountVector c = sample_counts(sure, 100, 1);
  CHECK(c.counts == std::vector<std::uint64_t>{100, 0, 0});
  CHECK(c.shots == 100);

  ExpectationVector uniform;
  uniform.values = {0.25, 0.25, 0.25, 0.25};
  CountVector a = sample_counts(uniform, 1000, 42);
  CountVector b = sample_counts(uniform, 1000, 42);
  CHECK(a.counts == b.counts);

  CountVector big = sample_counts(uniform, 1000000, 7);
  double sigma = std::sqrt(1e6 * 0.25 * 0.75);
  for (std::uint64_t count : big.counts)
    CHECK(std::abs(double(count) - 250000.0) < 5.0 * sigma);

  ExpectationVector empty;
  empty.values = {0.0, 0.0};
  CHECK(expect_error([&] { sample_counts(empty, 10, 0); }, "ZeroMass"));
}

TEST_CASE("sampled frequencies converge to the probabilities") {
  ExpectationVector p;
  p.values = {0.5, 0.3, 0.15, 0.05};
  int failures = 0;
  for (int seed = 0; seed < 100; ++seed) {
    CountVector c = sample_counts(p, 1000000, 9000 + seed);
    for (std::size_t k = 0; k < p.values.size(); ++k) {
      double bound = 5.0 * std::sqrt(p.values[k] * (1.0 - p.values[k]) / 1e6) + 1e-6;
      if (std::abs(double(c.counts[k]) / 1e6 - p.values[k]) > bound) {
        ++failures;
        break;
      }
    }
  }
  CHECK(failures <= 1);  // >= 99% of seeds inside the 5-sigma band
}

TEST_CASE("husimi images") {
  auto grid = linspace(-5.0, 5.0, 20);
  MeasurementSet set = husimi_operators(32, grid, grid);

  // blob location oracle: argmax of the analytic Gaussian over the grid
  Complex alpha(2.0, 0.0);
  PhaseSpaceImage img = husimi_image(coherent(32, alpha), set);
  int best_i = 0, best_j = 0;
  double best = -1.0;
  int oracle_i = 0, oracle_j = 0;
  double oracle_best = -1.0;
  for (int i = 0; i < 20; ++i)
    for (int j = 0; j < 20; ++j) {
      if (img.pixels(i, j) > best) {
        best = img.pixels(i, j);
        best_i = i;
        best_j = j;
      }
      Complex beta(grid[j] / std::sqrt(2.0), grid[i] / std::sqrt(2.0));
      double analytic = std::exp(-std::norm(beta - alpha));
      if (analytic > oracle_best) {
        oracle_best = analytic;
        oracle_i = i;
        oracle_j = j;
      }
    }
  CHECK(best_i == oracle_i);
  CHECK(best_j == oracle_j);

  // vacuum blob sits at the origin pixels
  PhaseSpaceImage vac = husimi_image(fock(32, 0), set);
  int vi = 0, vj = 0;
  double vbest = -1.0;
  for (int i = 0; i < 20; ++i)
    for (int j = 0; j < 20; ++j)
      if (vac.pixels(i, j) > vbest) {
        vbest = vac.pixels(i, j);
        vi = i;
        vj = j;
      }
  CHECK((vi == 9 || vi == 10));
  CHECK((vj == 9 || vj == 10));

  // even cat: two dominant blobs, image symmetric under x -> -x
  PhaseSpaceImage catimg = husimi_image(cat(32, Complex(2, 0), Parity::Even), set);
  for (int i = 0; i < 20; ++i)
    for (int j = 0; j < 20; ++j)
      CHECK(std::abs(catimg.pixels(i, j) - catimg.pixels(i, 19 - j)) < 1e-9);

  CHECK(expect_error([&] { husimi_image(fock(4, 0), number_operators(4)); }, "WrongKind"));
}

TEST_CASE("custom operator validation") {
  std::vector<ComplexMatrix> ops;
  ops.push_back(ComplexMatrix::Identity(3, 3));
  MeasurementSet ok = custom_operators(3, ops);
  CHECK(ok.kind == MeasurementKind::Custom);

  ComplexMatrix negative = -ComplexMatrix::Identity(3, 3);
  CHECK(expect_error([&] { custom_operators(3, {negative}); }, "NotPositive"));
}

TEST_SUITE_END();
