#include "tomokit/states.hpp"

#include "tomokit/measurement.hpp"

#include "test_helpers.hpp"

#include <doctest.h>

#include <cmath>

using namespace tomokit;
using tomokit::testing::expect_error;

TEST_SUITE_BEGIN("states");

TEST_CASE("fock states") {
  DensityMatrix ground = fock(4, 0);
  CHECK(std::abs(ground.matrix()(0, 0) - Complex(1, 0)) < 1e-15);

  DensityMatrix two = fock(4, 2);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      CHECK(std::abs(two.matrix()(i, j) - (i == 2 && j == 2 ? Complex(1, 0) : Complex(0, 0))) < 1e-15);

  CHECK(expect_error([] { fock(4, 5); }, "IndexOutOfRange"));
}

TEST_CASE("coherent states have truncated Poisson statistics") {
  CHECK(fidelity(coherent(8, Complex(0, 0)), fock(8, 0)) >= 1.0 - 1e-12);

  DensityMatrix alpha_one = coherent(32, Complex(1, 0));
  CHECK(alpha_one.matrix()(0, 0).real() == doctest::Approx(std::exp(-1.0)).epsilon(1e-9));

  // truncated Poisson mean by direct summation
  double norm = 0.0, mean = 0.0, p = std::exp(-1.0);
  for (int n = 0; n < 32; ++n) {
    norm += p;
    mean += n * p;
    p /= double(n + 1);
  }
  double trace_n = 0.0;
  for (int n = 0; n < 32; ++n) trace_n += n * alpha_one.matrix()(n, n).real();
  CHECK(trace_n == doctest::Approx(mean / norm).epsilon(1e-12));
  CHECK(trace_n == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("coherent photon distribution matches the Poisson pmf pointwise") {
  for (double mag : {0.5, 1.5, 2.8}) {  // |alpha|^2 <= dim/4 at dim 32
    DensityMatrix rho = coherent(32, Complex(mag, 0.4));
    double mean_photons = mag * mag + 0.16;
    double pmf = std::exp(-mean_photons);
    for (int n = 0; n < 32; ++n) {
      CHECK(std::abs(rho.matrix()(n, n).real() - pmf) < 1e-8);
      pmf *= mean_photons / double(n + 1);
    }
  }
}

TEST_CASE("thermal states") {
  CHECK(fidelity(thermal(8, 0.0), fock(8, 0)) >= 1.0 - 1e-12);

  DensityMatrix warm = thermal(32, 2.0);
  // geometric series: rho_00 = (1/3) / (1 - (2/3)^32)
  double exact = (1.0 / 3.0) / (1.0 - std::pow(2.0 / 3.0, 32));
  CHECK(warm.matrix()(0, 0).real() == doctest::Approx(exact).epsilon(1e-12));
  CHECK(std::abs(warm.matrix()(0, 0).real() - 1.0 / 3.0) < 1e-6);

  CHECK(warm.purity() < thermal(32, 0.5).purity());

  for (int n = 1; n < 32; ++n)
    CHECK(warm.matrix()(n, n).real() < warm.matrix()(n - 1, n - 1).real());

  CHECK(expect_error([] { thermal(8, -0.1); }, "NegativeParameter"));
}

TEST_CASE("cat states") {
  CHECK(fidelity(cat(8, Complex(0, 0), Parity::Even), fock(8, 0)) >= 1.0 - 1e-12);

  DensityMatrix even = cat(32, Complex(2, 0), Parity::Even);
  for (int n = 1; n < 32; n += 2) CHECK(std::abs(even.matrix()(n, n)) < 1e-15);

  DensityMatrix odd = cat(32, Complex(2, 0), Parity::Odd);
  CHECK(fidelity(even, odd) <= 1e-10);

  CHECK(expect_error([] { cat(8, Complex(0, 0), Parity::Odd); }, "DegenerateCat"));
}

TEST_CASE("binomial code words") {
  // N = 0, S = 0: equal weights on |0> and |1>
  DensityMatrix plus = binomial(8, 0, 0);
  CHECK(plus.matrix()(0, 0).real() == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(plus.matrix()(1, 1).real() == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(plus.matrix()(0, 1).real() == doctest::Approx(0.5).epsilon(1e-12));

  DensityMatrix spaced = binomial(16, 2, 1);
  for (int n = 0; n < 16; ++n) {
    bool on_lattice = n % 2 == 0 && n <= 6;
    if (!on_lattice) CHECK(std::abs(spaced.matrix()(n, n)) < 1e-15);
  }

  for (int n = 0; n < 4; ++n)
    for (int s = 0; s < 4; ++s) {
      if ((n + 1) * (s + 1) >= 16) continue;
      CHECK(binomial(16, n, s).matrix().trace().real() == doctest::Approx(1.0).epsilon(1e-12));
    }

  CHECK(expect_error([] { binomial(8, 3, 2); }, "DimensionTooSmall"));
}

TEST_CASE("num states") {
  ComplexVector single(1);
  single << Complex(1, 0);
  CHECK(fidelity(num_state(4, single), fock(4, 0)) >= 1.0 - 1e-12);

  ComplexVector scaled(2);
  scaled << Complex(0, 0), Complex(2, 0);
  CHECK(fidelity(num_state(4, scaled), fock(4, 1)) >= 1.0 - 1e-12);

  for (const auto& amps : builtin_num_table().amplitudes)
    CHECK(num_state(32, amps).purity() == doctest::Approx(1.0).epsilon(1e-12));

  CHECK(expect_error([] { num_state(4, ComplexVector::Zero(3)); }, "ZeroVector"));
}

TEST_CASE("gkp states") {
  DensityMatrix zero = gkp(32, 0.3, GkpLogical::Zero, 3);
  CHECK(zero.purity() >= 1.0 - 1e-9);

  // logical overlap shrinks as the peaks narrow
  double prev = 1.0;
  for (double delta : {0.5, 0.4, 0.3}) {
    double overlap = fidelity(gkp(48, delta, GkpLogical::Zero, 3), gkp(48, delta, GkpLogical::One, 3));
    CHECK(overlap < prev);
    prev = overlap;
  }

  // lattice structure: local maxima of Q(x + i0) along the x axis
  DensityMatrix rho = gkp(32, 0.3, GkpLogical::Zero, 3);
  std::vector<double> q;
  for (double x : linspace(-5.0, 5.0, 40)) {
    ComplexVector beta = coherent_amplitudes(32, Complex(x / std::sqrt(2.0), 0.0));
    q.push_back((beta.adjoint() * rho.matrix() * beta).value().real());
  }
  // plateau-tolerant: the even grid puts the central peak between two points
  int maxima = 0;
  for (std::size_t i = 1; i + 1 < q.size(); ++i)
    if (q[i] >= q[i - 1] && q[i] > q[i + 1]) ++maxima;
  CHECK(maxima >= 3);

  CHECK(expect_error([] { gkp(4, 0.3, GkpLogical::Zero, 3); }, "DimensionTooSmall"));
  CHECK(expect_error([] { gkp(32, -0.1, GkpLogical::Zero, 3); }, "NegativeParameter"));
}

TEST_CASE("random density matrices") {
  DensityMatrix a = random_dm(8, 8, 123);
  DensityMatrix b = random_dm(8, 8, 123);
  CHECK((a.matrix() - b.matrix()).cwiseAbs().maxCoeff() == 0.0);  // bit-identical

  CHECK(random_dm(8, 1, 5).purity() == doctest::Approx(1.0).epsilon(1e-12));

  for (int seed = 0; seed < 200; ++seed)
    CHECK_NOTHROW(make_density_matrix(random_dm(8, 8, seed).matrix(), 1e-10));

  CHECK(expect_error([] { random_dm(4, 5, 0); }, "BadRank"));
  CHECK(expect_error([] { random_dm(4, 0, 0); }, "BadRank"));
}

TEST_CASE("every constructor output is a valid state") {
  std::vector<DensityMatrix> states = {
      fock(32, 3),
      coherent(32, Complex(1.2, -0.5)),
      thermal(32, 1.7),
      cat(32, Complex(2, 1), Parity::Odd),
      binomial(32, 2, 2),
      num_state(32, builtin_num_table().amplitudes[1]),
      gkp(32, 0.35, GkpLogical::One, 3),
      random_dm(32, 16, 9),
  };
  for (const DensityMatrix& rho : states) CHECK_NOTHROW(make_density_matrix(rho.matrix(), 1e-10));

  // pure families
  for (std::size_t i : {0u, 1u, 3u, 4u, 5u, 6u})
    CHECK(states[i].purity() >= 1.0 - 1e-9);
}

TEST_CASE("batch generation") {
  BatchSpec spec;
  spec.family = StateFamily::Cat;
  spec.alpha_mag = Interval(0.0, 10.0);

  StateBatch batch = generate_batch(spec, 1000, 32, 7);
  CHECK(batch.states.size() == 1000);
  for (const StateLabel& label : batch.labels) {
    CHECK(std::abs(label.params.at("alpha")) <= 10.0);
    CHECK(label.family == StateFamily::Cat);
  }
  for (int i = 0; i < 1000; i += 97) CHECK_NOTHROW(make_density_matrix(batch.states[i].matrix(), 1e-10));

  StateBatch again = generate_batch(spec, 50, 32, 7);
  for (int i = 0; i < 50; ++i)
    CHECK((again.states[i].matrix() - batch.states[i].matrix()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("degenerate batch ranges reproduce the direct constructor") {
  BatchSpec spec;
  spec.family = StateFamily::Coherent;
  spec.alpha_mag = Interval(2.0, 2.0);
  spec.alpha_phase = Interval(0.0, 0.0);
  StateBatch batch = generate_batch(spec, 1, 16, 99);
  CHECK(fidelity(batch.states[0], coherent(16, Complex(2, 0))) >= 1.0 - 1e-12);

  BatchSpec bad;
  bad.family = StateFamily::Coherent;
  bad.alpha_mag = Interval(3.0, 1.0);
  CHECK(expect_error([&] { generate_batch(bad, 1, 16, 0); }, "EmptyRange"));
}

TEST_CASE("labels replay into the same states") {
  for (StateFamily family : {StateFamily::Fock, StateFamily::Coherent, StateFamily::Thermal,
                             StateFamily::Cat, StateFamily::Binomial, StateFamily::Num,
                             StateFamily::Gkp}) {
    BatchSpec spec;
    spec.family = family;
    StateBatch batch = generate_batch(spec, 3, 32, 5);
    for (int i = 0; i < 3; ++i) {
      DensityMatrix replayed = state_from_label(batch.labels[i], 32);
      CHECK((replayed.matrix() - batch.states[i].matrix()).cwiseAbs().maxCoeff() == 0.0);
    }
  }
}

TEST_CASE("num table parsing") {
  NumStateTable table = parse_num_table("# comment\nfoo 0.6,0 0.8,0\nbar 1,0 0,0 0,1\n");
  CHECK(table.size() == 2);
  CHECK(table.names[0] == "foo");
  CHECK(table.find("bar").size() == 3);
  CHECK(expect_error([&] { table.find("baz"); }, "IndexOutOfRange"));
  CHECK(expect_error([] { parse_num_table("name 1.0\n"); }, "IoError"));
  CHECK(expect_error([] { parse_num_table(""); }, "IoError"));
}

TEST_SUITE_END();
