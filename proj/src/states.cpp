#include "tomokit/states.hpp"

#include "tomokit/threading.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace tomokit {

namespace {

// |psi><psi| from an unnormalized truncated amplitude vector. `discarded` is
// the probability weight lost to truncation (pre-truncation norm of 1 assumed).
DensityMatrix pure_from_amplitudes(const ComplexVector& v, double discarded, double warn_threshold) {
  double norm2 = v.squaredNorm();
  if (!(norm2 > 0.0)) fail("ZeroVector", "state amplitudes have zero norm");
  ComplexVector psi = v / std::sqrt(norm2);
  ComplexMatrix rho = psi * psi.adjoint();
  return DensityMatrix::unchecked(std::move(rho), discarded > warn_threshold);
}

}  // namespace

const char* family_name(StateFamily f) {
  switch (f) {
    case StateFamily::Fock: return "fock";
    case StateFamily::Coherent: return "coherent";
    case StateFamily::Thermal: return "thermal";
    case StateFamily::Cat: return "cat";
    case StateFamily::Binomial: return "binomial";
    case StateFamily::Num: return "num";
    case StateFamily::Gkp: return "gkp";
    case StateFamily::RandomMixed: return "random";
  }
  return "unknown";
}

StateFamily family_from_name(const std::string& name) {
  static const std::pair<const char*, StateFamily> table[] = {
      {"fock", StateFamily::Fock},       {"coherent", StateFamily::Coherent},
      {"thermal", StateFamily::Thermal}, {"cat", StateFamily::Cat},
      {"binomial", StateFamily::Binomial}, {"num", StateFamily::Num},
      {"gkp", StateFamily::Gkp},         {"random", StateFamily::RandomMixed},
  };
  for (const auto& [n, f] : table)
    if (name == n) return f;
  fail("EmptyRange", "unknown state family '" + name + "'");
}

DensityMatrix fock(int dim, int n) {
  if (dim < 1) fail("DimensionTooSmall", "fock needs dim >= 1");
  if (n < 0 || n >= dim)
    fail("IndexOutOfRange", "fock level " + std::to_string(n) + " outside [0, " + std::to_string(dim) + ")");
  ComplexMatrix rho = ComplexMatrix::Zero(dim, dim);
  rho(n, n) = Complex(1.0, 0.0);
  return DensityMatrix::unchecked(std::move(rho));
}

ComplexVector coherent_amplitudes(int dim, Complex alpha, double* discarded) {
  ComplexVector c(dim);
  c(0) = Complex(std::exp(-0.5 * std::norm(alpha)), 0.0);
  for (int n = 1; n < dim; ++n) c(n) = c(n - 1) * alpha / std::sqrt(double(n));
  if (discarded) *discarded = std::max(0.0, 1.0 - c.squaredNorm());
  return c;
}

DensityMatrix coherent(int dim, Complex alpha) {
  if (dim < 1) fail("DimensionTooSmall", "coherent needs dim >= 1");
  double discarded = 0.0;
  ComplexVector c = coherent_amplitudes(dim, alpha, &discarded);
  return pure_from_amplitudes(c, discarded, 1e-6);
}

DensityMatrix thermal(int dim, double nth) {
  if (dim < 1) fail("DimensionTooSmall", "thermal needs dim >= 1");
  if (nth < 0.0) fail("NegativeParameter", "thermal occupancy nth must be >= 0");
  ComplexMatrix rho = ComplexMatrix::Zero(dim, dim);
  double q = nth / (1.0 + nth);
  double p = 1.0;  // q^n, renormalized below
  double sum = 0.0;
  for (int n = 0; n < dim; ++n) {
    rho(n, n) = Complex(p, 0.0);
    sum += p;
    p *= q;
  }
  rho /= sum;
  return DensityMatrix::unchecked(std::move(rho));
}

DensityMatrix cat(int dim, Complex alpha, Parity parity) {
  if (dim < 2) fail("DimensionTooSmall", "cat needs dim >= 2");
  double sign = parity == Parity::Even ? 1.0 : -1.0;
  if (parity == Parity::Odd && std::abs(alpha) < 1e-8)
    fail("DegenerateCat", "odd cat is undefined at alpha = 0 (normalization vanishes)");
  double norm_pm = 2.0 * (1.0 + sign * std::exp(-2.0 * std::norm(alpha)));
  ComplexVector plus = coherent_amplitudes(dim, alpha);
  ComplexVector minus = coherent_amplitudes(dim, -alpha);
  ComplexVector c = (plus + sign * minus) / std::sqrt(norm_pm);
  double discarded = std::max(0.0, 1.0 - c.squaredNorm());
  return pure_from_amplitudes(c, discarded, 1e-6);
}

DensityMatrix binomial(int dim, int photons_n, int spacing_s) {
  if (photons_n < 0 || spacing_s < 0) fail("NegativeParameter", "binomial N and S must be >= 0");
  if ((photons_n + 1) * (spacing_s + 1) >= dim)
    fail("DimensionTooSmall", "binomial needs (N+1)(S+1) < dim, got (" + std::to_string(photons_n + 1) +
                                  ")(" + std::to_string(spacing_s + 1) + ") vs dim " + std::to_string(dim));
  ComplexVector c = ComplexVector::Zero(dim);
  double binom = 1.0;  // C(N+1, m), updated iteratively
  double scale = std::pow(2.0, -(photons_n + 1));
  for (int m = 0; m <= photons_n + 1; ++m) {
    c(m * (spacing_s + 1)) = Complex(std::sqrt(binom * scale), 0.0);
    binom *= double(photons_n + 1 - m) / double(m + 1);
  }
  return pure_from_amplitudes(c, 0.0, 1.0);
}

DensityMatrix num_state(int dim, const ComplexVector& amplitudes) {
  if (amplitudes.size() > static_cast<Eigen::Index>(dim))
    fail("DimensionMismatch", "num amplitudes longer than dim (" + std::to_string(amplitudes.size()) +
                                  " > " + std::to_string(dim) + ")");
  ComplexVector c = ComplexVector::Zero(dim);
  c.head(amplitudes.size()) = amplitudes;
  return pure_from_amplitudes(c, 0.0, 1.0);
}

DensityMatrix gkp(int dim, double delta, GkpLogical logical, int lattice_halfwidth) {
  if (delta <= 0.0) fail("NegativeParameter", "gkp peak width delta must be > 0");
  if (dim < 8) fail("DimensionTooSmall", "gkp needs dim >= 8");
  if (lattice_halfwidth < 1) fail("EmptyRange", "gkp lattice halfwidth must be >= 1");

  // Build in an enlarged working space, then project back down. The truncated
  // displacement generator exponentiates to a unitary, so far lattice
  // components that should leave a dim-sized space would otherwise reflect off
  // the cutoff instead of (correctly) losing their weight.
  const int work_dim = 2 * dim + 16;
  BosonicOperators ops = BosonicOperators::make(work_dim);
  double r = -std::log(delta);
  ComplexVector squeezed_vac = squeeze_operator(ops, Complex(r, 0.0)).col(0);

  double b = logical == GkpLogical::Zero ? 0.0 : 1.0;
  ComplexVector psi_work = ComplexVector::Zero(work_dim);
  for (int s = -lattice_halfwidth; s <= lattice_halfwidth; ++s) {
    double weight = std::exp(-kPi * delta * delta * double(s) * double(s));
    double mu = (2.0 * s + b) * std::sqrt(kPi) / std::sqrt(2.0);
    psi_work += weight * (displacement_operator(ops, Complex(mu, 0.0)) * squeezed_vac);
  }

  double work_norm2 = psi_work.squaredNorm();
  if (!(work_norm2 > 0.0)) fail("ZeroVector", "gkp superposition collapsed to zero");
  psi_work /= std::sqrt(work_norm2);

  ComplexVector psi = psi_work.head(dim);
  double kept = psi.squaredNorm();
  if (!(kept > 0.0)) fail("ZeroVector", "gkp state has no weight below the cutoff");
  psi /= std::sqrt(kept);

  ComplexMatrix rho = psi * psi.adjoint();
  return DensityMatrix::unchecked(std::move(rho), 1.0 - kept > 1e-4);
}

DensityMatrix random_dm(int dim, int rank, std::uint64_t seed) {
  if (rank < 1 || rank > dim)
    fail("BadRank", "rank " + std::to_string(rank) + " outside [1, " + std::to_string(dim) + "]");
  Rng rng(seed);
  ComplexMatrix g(dim, rank);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < rank; ++j) g(i, j) = rng.complex_normal();
  ComplexMatrix s = g * g.adjoint();
  s = 0.5 * (s + s.adjoint().eval());
  s /= s.trace().real();
  return DensityMatrix::unchecked(std::move(s));
}

const ComplexVector& NumStateTable::find(const std::string& name) const {
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return amplitudes[i];
  fail("IndexOutOfRange", "num table has no entry '" + name + "'");
}

NumStateTable parse_num_table(const std::string& text) {
  NumStateTable table;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream fields(line);
    std::string name;
    if (!(fields >> name)) continue;
    std::vector<Complex> amps;
    std::string pair;
    while (fields >> pair) {
      auto comma = pair.find(',');
      if (comma == std::string::npos)
        fail("IoError", "num table entry '" + name + "': expected re,im pair, got '" + pair + "'");
      amps.emplace_back(std::stod(pair.substr(0, comma)), std::stod(pair.substr(comma + 1)));
    }
    if (amps.empty()) fail("IoError", "num table entry '" + name + "' has no amplitudes");
    table.names.push_back(name);
    ComplexVector v(amps.size());
    for (std::size_t i = 0; i < amps.size(); ++i) v(static_cast<Eigen::Index>(i)) = amps[i];
    table.amplitudes.push_back(std::move(v));
  }
  if (table.names.empty()) fail("IoError", "num table is empty");
  return table;
}

NumStateTable load_num_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("IoError", "cannot open num table '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_num_table(buf.str());
}

const NumStateTable& builtin_num_table() {
  // Stand-in amplitude vectors for numerically-optimized code states. The
  // shipped data/num_states.txt mirrors these entries.
  static const NumStateTable table = parse_num_table(
      "M1 0.7071067811865476,0 0,0 0,0 0,0 0.7071067811865476,0\n"
      "M2 0.5,0 0,0 0.5,0 0,0 0.6,0 0,0 0.3741657386773941,0\n"
      "M3 0.5,0 0,0 0,0 0.7071067811865476,0 0,0 0,0 0.5,0\n");
  return table;
}

void BatchSpec::validate() const {
  fock_n.require_ordered("fock_n");
  alpha_mag.require_ordered("alpha_mag");
  alpha_phase.require_ordered("alpha_phase");
  thermal_nth.require_ordered("thermal_nth");
  binomial_n.require_ordered("binomial_n");
  binomial_s.require_ordered("binomial_s");
  gkp_delta.require_ordered("gkp_delta");
  if (fock_n.lo < 0) fail("EmptyRange", "fock_n range must be non-negative");
  if (alpha_mag.lo < 0) fail("EmptyRange", "alpha magnitude range must be non-negative");
  if (thermal_nth.lo < 0) fail("EmptyRange", "thermal nth range must be non-negative");
  if (gkp_delta.lo <= 0) fail("EmptyRange", "gkp delta range must be positive");
}

std::pair<DensityMatrix, StateLabel> draw_state(const BatchSpec& spec, int dim, Rng& rng,
                                                std::uint64_t state_seed) {
  StateLabel label;
  label.family = spec.family;
  switch (spec.family) {
    case StateFamily::Fock: {
      int n = rng.uniform_int(spec.fock_n);
      label.params["n"] = Complex(double(n), 0.0);
      return {fock(dim, n), label};
    }
    case StateFamily::Coherent: {
      double mag = rng.uniform(spec.alpha_mag);
      double phase = rng.uniform(spec.alpha_phase);
      Complex alpha = std::polar(mag, phase);
      label.params["alpha"] = alpha;
      return {coherent(dim, alpha), label};
    }
    case StateFamily::Thermal: {
      double nth = rng.uniform(spec.thermal_nth);
      label.params["nth"] = Complex(nth, 0.0);
      return {thermal(dim, nth), label};
    }
    case StateFamily::Cat: {
      double mag = rng.uniform(spec.alpha_mag);
      double phase = rng.uniform(spec.alpha_phase);
      Complex alpha = std::polar(mag, phase);
      label.params["alpha"] = alpha;
      label.params["parity"] = Complex(spec.cat_parity == Parity::Even ? 0.0 : 1.0, 0.0);
      return {cat(dim, alpha, spec.cat_parity), label};
    }
    case StateFamily::Binomial: {
      int n = rng.uniform_int(spec.binomial_n);
      int s = rng.uniform_int(spec.binomial_s);
      label.params["N"] = Complex(double(n), 0.0);
      label.params["S"] = Complex(double(s), 0.0);
      return {binomial(dim, n, s), label};
    }
    case StateFamily::Num: {
      const NumStateTable& table = spec.num_table ? *spec.num_table : builtin_num_table();
      std::size_t idx = rng.uniform_int(table.size());
      label.params["index"] = Complex(double(idx), 0.0);
      label.variant = table.names[idx];
      return {num_state(dim, table.amplitudes[idx]), label};
    }
    case StateFamily::Gkp: {
      double delta = rng.uniform(spec.gkp_delta);
      GkpLogical logical = rng.uniform_int(2) == 0 ? GkpLogical::Zero : GkpLogical::One;
      label.params["delta"] = Complex(delta, 0.0);
      label.params["logical"] = Complex(logical == GkpLogical::Zero ? 0.0 : 1.0, 0.0);
      label.params["halfwidth"] = Complex(double(spec.gkp_halfwidth), 0.0);
      return {gkp(dim, delta, logical, spec.gkp_halfwidth), label};
    }
    case StateFamily::RandomMixed: {
      int rank = spec.random_rank > 0 ? spec.random_rank : dim;
      label.params["rank"] = Complex(double(rank), 0.0);
      return {random_dm(dim, rank, state_seed), label};
    }
  }
  fail("EmptyRange", "unhandled state family");
}

StateBatch generate_batch(const BatchSpec& spec, int n_states, int dim, std::uint64_t seed) {
  spec.validate();
  if (n_states < 1) fail("EmptyRange", "n_states must be >= 1");

  StateBatch batch;
  batch.seed = seed;
  batch.states.resize(n_states);
  batch.labels.resize(n_states);

  parallel_for(static_cast<std::size_t>(n_states), [&](std::size_t i) {
    std::uint64_t sub = Rng::derive(seed, i);
    Rng rng(sub);
    auto [state, label] = draw_state(spec, dim, rng, Rng::derive(sub, 1));
    batch.states[i] = std::move(state);
    batch.labels[i] = std::move(label);
  });
  return batch;
}

DensityMatrix state_from_label(const StateLabel& label, int dim, const NumStateTable* table,
                               std::uint64_t state_seed) {
  auto get = [&](const char* key) -> Complex {
    auto it = label.params.find(key);
    if (it == label.params.end()) fail("IndexOutOfRange", std::string("label missing param '") + key + "'");
    return it->second;
  };
  auto get_int = [&](const char* key) { return static_cast<int>(std::lround(get(key).real())); };

  switch (label.family) {
    case StateFamily::Fock: return fock(dim, get_int("n"));
    case StateFamily::Coherent: return coherent(dim, get("alpha"));
    case StateFamily::Thermal: return thermal(dim, get("nth").real());
    case StateFamily::Cat:
      return cat(dim, get("alpha"), get_int("parity") == 0 ? Parity::Even : Parity::Odd);
    case StateFamily::Binomial: return binomial(dim, get_int("N"), get_int("S"));
    case StateFamily::Num: {
      const NumStateTable& t = table ? *table : builtin_num_table();
      return num_state(dim, t.find(label.variant));
    }
    case StateFamily::Gkp:
      return gkp(dim, get("delta").real(), get_int("logical") == 0 ? GkpLogical::Zero : GkpLogical::One,
                 get_int("halfwidth"));
    case StateFamily::RandomMixed: return random_dm(dim, get_int("rank"), state_seed);
  }
  fail("EmptyRange", "unhandled state family in label");
}

}  // namespace tomokit
