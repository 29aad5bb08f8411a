// Constructors for the optical state families (Fock, coherent, thermal, cat,
// binomial-code, num, GKP, random mixed) plus seeded batch generators.
#pragma once

#include "tomokit/quantum_core.hpp"

#include <map>
#include <string>
#include <vector>

namespace tomokit {

enum class StateFamily { Fock, Coherent, Thermal, Cat, Binomial, Num, Gkp, RandomMixed };

enum class Parity { Even, Odd };
enum class GkpLogical { Zero, One };

const char* family_name(StateFamily f);
StateFamily family_from_name(const std::string& name);

// Family tag plus the concrete parameters the state was built with.
// `variant` holds the num-table entry name when family == Num.
struct StateLabel {
  StateFamily family = StateFamily::Fock;
  std::map<std::string, Complex> params;
  std::string variant;
};

// --- direct constructors -------------------------------------------------

DensityMatrix fock(int dim, int n);

// Truncated coherent-state coefficients e^{-|a|^2/2} a^n / sqrt(n!). Not
// renormalized; the dropped tail weight is returned through `discarded` when
// given. Shared by the state constructor and the Husimi projectors.
ComplexVector coherent_amplitudes(int dim, Complex alpha, double* discarded = nullptr);

DensityMatrix coherent(int dim, Complex alpha);

DensityMatrix thermal(int dim, double nth);

// (|alpha> +- |-alpha>)/sqrt(N_pm), normalization computed before truncation.
DensityMatrix cat(int dim, Complex alpha, Parity parity);

// Binomial code word: amplitudes sqrt(C(N+1,m)/2^(N+1)) on levels m*(S+1).
DensityMatrix binomial(int dim, int photons_n, int spacing_s);

// Pure state from a caller-supplied Fock amplitude vector (normalized here).
DensityMatrix num_state(int dim, const ComplexVector& amplitudes);

// Finite-energy square-lattice GKP state: sum over s in [-S, S] of
// exp(-pi delta^2 s^2) D(mu_s) S(r)|0> with r = -ln(delta) and real
// displacement mu_s = (2s + b) sqrt(pi)/sqrt(2), b = 0 (Zero) / 1 (One).
DensityMatrix gkp(int dim, double delta, GkpLogical logical, int lattice_halfwidth);

// Ginibre construction G G^dag / Tr(G G^dag) with G dim x rank.
DensityMatrix random_dm(int dim, int rank, std::uint64_t seed);

// --- num-state amplitude tables ------------------------------------------

// Text format: one line per state, "name re,im re,im ..." (blank lines and
// lines starting with '#' are skipped).
struct NumStateTable {
  std::vector<std::string> names;
  std::vector<ComplexVector> amplitudes;

  std::size_t size() const { return names.size(); }
  const ComplexVector& find(const std::string& name) const;
};

NumStateTable parse_num_table(const std::string& text);
NumStateTable load_num_table(const std::string& path);

// Stand-in amplitude vectors shipped with the library (also in data/num_states.txt).
const NumStateTable& builtin_num_table();

// --- batch generation -----------------------------------------------------

// Parameter ranges for randomized batches. Defaults are the documented
// standard-dataset ranges. Magnitudes are drawn uniformly, phases uniformly
// on [0, 2*pi), integer parameters uniformly over the inclusive range.
struct BatchSpec {
  StateFamily family = StateFamily::Coherent;

  IntInterval fock_n{0, 10};
  Interval alpha_mag{0.0, 3.0};
  Interval alpha_phase{0.0, 2.0 * kPi};
  Interval thermal_nth{0.1, 3.0};
  IntInterval binomial_n{1, 3};
  IntInterval binomial_s{0, 2};
  Interval gkp_delta{0.25, 0.45};
  int gkp_halfwidth = 3;
  Parity cat_parity = Parity::Even;
  int random_rank = 0;  // 0 = full rank
  const NumStateTable* num_table = nullptr;  // null = builtin

  void validate() const;
};

struct StateBatch {
  std::vector<DensityMatrix> states;
  std::vector<StateLabel> labels;
  std::uint64_t seed = 0;
};

// Draws per-state parameters from independent substreams (seed, index), so
// regeneration is bit-identical and generation may be parallelized.
StateBatch generate_batch(const BatchSpec& spec, int n_states, int dim, std::uint64_t seed);

// Single randomized draw from the spec's ranges; `state_seed` feeds the
// RandomMixed family. Draw order within `rng` is part of the format contract.
std::pair<DensityMatrix, StateLabel> draw_state(const BatchSpec& spec, int dim, Rng& rng,
                                                std::uint64_t state_seed);

// Rebuilds the state a label describes (used for provenance checks).
// `state_seed` is only consulted for the RandomMixed family.
DensityMatrix state_from_label(const StateLabel& label, int dim, const NumStateTable* table = nullptr,
                               std::uint64_t state_seed = 0);

}  // namespace tomokit
