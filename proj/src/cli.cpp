#include "tomokit/cli.hpp"

#include "tomokit/dataset.hpp"
#include "tomokit/threading.hpp"
#include "tomokit/tomography.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>

namespace tomokit::cli {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

// --- small parsers ----------------------------------------------------------

Interval parse_interval(const std::string& s, const char* what) {
  auto colon = s.find(':');
  try {
    if (colon == std::string::npos) {
      double v = std::stod(s);
      return Interval(v, v);
    }
    Interval r(std::stod(s.substr(0, colon)), std::stod(s.substr(colon + 1)));
    r.require_ordered(what);
    return r;
  } catch (const Error&) {
    throw;
  } catch (const std::exception&) {
    fail("EmptyRange", std::string(what) + ": cannot parse '" + s + "' (expected v or lo:hi)");
  }
}

IntInterval parse_int_interval(const std::string& s, const char* what) {
  Interval r = parse_interval(s, what);
  IntInterval ir(static_cast<int>(std::llround(r.lo)), static_cast<int>(std::llround(r.hi)));
  ir.require_ordered(what);
  return ir;
}

std::vector<double> parse_grid(const std::string& s, const char* what) {
  auto c1 = s.find(':');
  auto c2 = s.rfind(':');
  if (c1 == std::string::npos || c2 == c1)
    fail("NonMonotonicGrid", std::string(what) + ": expected lo:hi:n, got '" + s + "'");
  try {
    return linspace(std::stod(s.substr(0, c1)), std::stod(s.substr(c1 + 1, c2 - c1 - 1)),
                    std::stoi(s.substr(c2 + 1)));
  } catch (const Error&) {
    throw;
  } catch (const std::exception&) {
    fail("NonMonotonicGrid", std::string(what) + ": cannot parse '" + s + "'");
  }
}

// "path" or "path:index"; directories resolve through the dataset format.
struct StateRef {
  fs::path path;
  int index = 0;
  bool use_noisy = false;
};

StateRef parse_state_ref(const std::string& s) {
  StateRef ref;
  auto colon = s.rfind(':');
  if (colon != std::string::npos && colon + 1 < s.size() &&
      s.find_first_not_of("0123456789", colon + 1) == std::string::npos) {
    ref.path = s.substr(0, colon);
    ref.index = std::stoi(s.substr(colon + 1));
  } else {
    ref.path = s;
  }
  return ref;
}

DensityMatrix load_state(const StateRef& ref) {
  if (!fs::exists(ref.path)) fail("IoError", "state '" + ref.path.string() + "' does not exist");
  if (fs::is_directory(ref.path)) {
    DatasetRecord rec = load_record(ref.path, ref.index);
    return ref.use_noisy ? rec.noisy_dm : rec.clean_dm;
  }
  return read_dm_blob(ref.path);
}

void apply_param_override(BatchSpec& spec, const std::string& kv) {
  auto eq = kv.find('=');
  if (eq == std::string::npos) fail("EmptyRange", "--param expects key=value, got '" + kv + "'");
  std::string key = kv.substr(0, eq);
  std::string value = kv.substr(eq + 1);
  if (key == "n") spec.fock_n = parse_int_interval(value, "n");
  else if (key == "alpha-mag" || key == "alpha_mag") spec.alpha_mag = parse_interval(value, "alpha-mag");
  else if (key == "alpha-phase" || key == "alpha_phase") spec.alpha_phase = parse_interval(value, "alpha-phase");
  else if (key == "nth") spec.thermal_nth = parse_interval(value, "nth");
  else if (key == "N") spec.binomial_n = parse_int_interval(value, "N");
  else if (key == "S") spec.binomial_s = parse_int_interval(value, "S");
  else if (key == "delta") spec.gkp_delta = parse_interval(value, "delta");
  else if (key == "halfwidth") spec.gkp_halfwidth = std::stoi(value);
  else if (key == "rank") spec.random_rank = std::stoi(value);
  else if (key == "parity") spec.cat_parity = value == "odd" ? Parity::Odd : Parity::Even;
  else fail("EmptyRange", "unknown --param key '" + key + "'");
}

std::string fmt_g(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// --- generate ----------------------------------------------------------------

struct GenerateOpts {
  std::string family;
  int n = 1;
  int dim = 32;
  std::uint64_t seed = 0;
  std::string out = "dataset_out";
  std::string grid = "-5:5:20";
  std::string xgrid, pgrid;
  std::string alpha_mag, alpha_phase, fock_n, nth, binomial_n, binomial_s, delta, parity;
  std::vector<std::string> params;
  std::string noise_config;
  std::string num_table;
  bool clean = false;
};

int cmd_generate(const GenerateOpts& o) {
  BatchSpec spec;
  spec.family = family_from_name(o.family);
  if (!o.alpha_mag.empty()) spec.alpha_mag = parse_interval(o.alpha_mag, "alpha-mag");
  if (!o.alpha_phase.empty()) spec.alpha_phase = parse_interval(o.alpha_phase, "alpha-phase");
  if (!o.fock_n.empty()) spec.fock_n = parse_int_interval(o.fock_n, "fock-n");
  if (!o.nth.empty()) spec.thermal_nth = parse_interval(o.nth, "nth");
  if (!o.binomial_n.empty()) spec.binomial_n = parse_int_interval(o.binomial_n, "binomial-n");
  if (!o.binomial_s.empty()) spec.binomial_s = parse_int_interval(o.binomial_s, "binomial-s");
  if (!o.delta.empty()) spec.gkp_delta = parse_interval(o.delta, "delta");
  if (!o.parity.empty()) spec.cat_parity = o.parity == "odd" ? Parity::Odd : Parity::Even;
  for (const std::string& kv : o.params) apply_param_override(spec, kv);

  NumStateTable table;
  if (!o.num_table.empty()) {
    table = load_num_table(o.num_table);
    spec.num_table = &table;
  }

  DatasetSpec ds_spec;
  ds_spec.families = {spec};
  ds_spec.n_per_family = o.n;
  ds_spec.dim = o.dim;
  ds_spec.xgrid = parse_grid(o.xgrid.empty() ? o.grid : o.xgrid, "xgrid");
  ds_spec.pgrid = parse_grid(o.pgrid.empty() ? o.grid : o.pgrid, "pgrid");
  ds_spec.noise = o.clean ? noise_config_zero()
                          : (o.noise_config.empty() ? NoiseConfig{} : load_noise_config(o.noise_config));

  Dataset ds = generate_dataset(ds_spec, o.seed);
  save_dataset(ds, o.out);
  export_labels_csv(ds, fs::path(o.out) / "labels.csv");

  std::cout << "family=" << o.family << " n=" << o.n << " dim=" << o.dim
            << " train=" << ds.manifest.n_train << " test=" << ds.manifest.n_test << " out=" << o.out
            << "\n";
  return 0;
}

// --- measure ------------------------------------------------------------------

struct MeasureOpts {
  std::string in;
  std::string use = "clean";
  std::string operators = "husimi";
  int dim = 0;  // 0 = take from the state
  std::string xgrid = "-5:5:20";
  std::string pgrid = "-5:5:20";
  std::uint64_t shots = 0;
  std::uint64_t seed = 0;
  std::string out = "measure_out";
};

int cmd_measure(const MeasureOpts& o) {
  StateRef ref = parse_state_ref(o.in);
  ref.use_noisy = o.use == "noisy";
  DensityMatrix state = load_state(ref);

  MeasurementSpec spec;
  spec.dim = o.dim > 0 ? o.dim : state.dim();
  if (spec.dim != state.dim())
    fail("DimensionMismatch", "state dim " + std::to_string(state.dim()) + " vs requested dim " +
                                  std::to_string(spec.dim));
  if (o.operators == "husimi") {
    spec.kind = MeasurementKind::HusimiGrid;
    spec.xgrid = parse_grid(o.xgrid, "xgrid");
    spec.pgrid = parse_grid(o.pgrid, "pgrid");
  } else if (o.operators == "number") {
    spec.kind = MeasurementKind::PhotonNumber;
  } else {
    fail("WrongKind", "--operators must be husimi or number");
  }

  MeasurementSet set = spec.build();
  ExpectationVector values = expectation(state, set);

  atomic_write_dir(o.out, [&](const fs::path& tmp) {
    write_expectation_csv(tmp / "expectations.csv", values, spec);
    if (o.shots > 0) {
      CountVector counts = sample_counts(values, o.shots, o.seed);
      write_counts_csv(tmp / "counts.csv", counts, spec);
    }
    if (spec.kind == MeasurementKind::HusimiGrid) {
      write_pgm(tmp / "preview.pgm", husimi_image(state, set));
    } else {
      PhaseSpaceImage strip;
      strip.height = 1;
      strip.width = spec.dim;
      strip.pixels.resize(1, spec.dim);
      for (int k = 0; k < spec.dim; ++k) strip.pixels(0, k) = values.values[k];
      write_pgm(tmp / "preview.pgm", strip);
    }
  });

  std::cout << "measured kind=" << o.operators << " outcomes=" << values.values.size()
            << " out=" << o.out << "\n";
  return 0;
}

// --- noise ---------------------------------------------------------------------

struct NoiseOpts {
  std::string in_state;
  std::string in_image;
  std::string config;
  double zeta = -1.0;  // <0 = from config
  std::uint64_t seed = 0;
  bool demo_exaggerated = false;
  std::string out = "noise_out";
};

int cmd_noise(const NoiseOpts& o) {
  if (o.in_state.empty() && o.in_image.empty())
    fail("IoError", "noise needs --in-state and/or --in-image");

  NoiseConfig cfg = o.config.empty() ? NoiseConfig{} : load_noise_config(o.config);
  cfg.seed = o.seed;
  double zeta = o.zeta >= 0.0 ? o.zeta : cfg.zeta;
  if (zeta < 0.0 || zeta > 1.0) fail("BadZeta", "zeta must lie in [0, 1]");
  cfg.validate();

  std::optional<DensityMatrix> mixed;
  if (!o.in_state.empty())
    mixed = mix_with_random(load_state(parse_state_ref(o.in_state)), zeta, Rng::derive(o.seed, 0));

  std::optional<PhaseSpaceImage> input_image;
  if (!o.in_image.empty()) input_image = read_image_csv(o.in_image);

  atomic_write_dir(o.out, [&](const fs::path& tmp) {
    json manifest;
    manifest["config"] = json::parse(noise_config_to_json(cfg));
    manifest["zeta"] = zeta;
    manifest["seed"] = o.seed;

    if (mixed) {
      write_dm_blob(tmp / "mixed.dm", *mixed);
      manifest["in_state"] = o.in_state;
      manifest["mix_seed"] = Rng::derive(o.seed, 0);
    }
    if (input_image) {
      PhaseSpaceImage noisy = apply_pipeline(*input_image, cfg);
      write_image_csv(tmp / "noisy.csv", noisy);
      write_pgm(tmp / "noisy.pgm", noisy);
      manifest["in_image"] = o.in_image;

      if (o.demo_exaggerated) {
        // deliberately heavy parameters so each stage is visible on its own
        json demo;
        demo["n_th"] = 4.0;
        demo["rotation"] = 30.0;
        demo["translation"] = {0.15, 0.15};
        demo["additive_std"] = 0.05;
        demo["salt"] = 0.02;
        demo["pepper"] = 0.2;
        manifest["demo"] = demo;

        write_pgm(tmp / "demo0_input.pgm", *input_image);
        write_pgm(tmp / "demo1_convolution.pgm", gaussian_convolution(*input_image, 4.0));
        write_pgm(tmp / "demo2_affine.pgm",
                  affine_transform(*input_image, Interval(30.0, 30.0), Interval(0.15, 0.15),
                                   Interval(0.15, 0.15), Rng::derive(o.seed, 1)));
        write_pgm(tmp / "demo3_additive.pgm",
                  additive_gaussian(*input_image, 0.05, Rng::derive(o.seed, 2)));
        write_pgm(tmp / "demo4_salt_pepper.pgm",
                  salt_pepper(*input_image, 0.02, 0.2, Rng::derive(o.seed, 3)));
      }
    }
    atomic_write_file(tmp / "manifest.json", manifest.dump(2) + "\n");
  });

  std::cout << "noise applied out=" << o.out << "\n";
  return 0;
}

// --- reconstruct -----------------------------------------------------------------

struct ReconstructOpts {
  std::string method;
  std::string data;
  bool counts = false;
  std::string operators;  // empty = from data header
  int dim = 0;
  std::string xgrid, pgrid;
  std::string config;
  int epochs = -1;
  double lr = -1.0;
  std::uint64_t seed = 0;
  bool have_seed = false;
  std::string reference;
  std::string out = "reconstruct_out";
};

void write_history_csv(const fs::path& path, const ReconstructionResult& r, bool with_fidelity) {
  std::ostringstream out;
  out << "epoch,loss" << (with_fidelity ? ",fidelity\n" : "\n");
  std::size_t fi = 0;
  for (const auto& [epoch, loss] : r.loss_history) {
    out << epoch << "," << fmt_g(loss);
    if (with_fidelity) {
      while (fi < r.fidelity_history.size() && r.fidelity_history[fi].first < epoch) ++fi;
      if (fi < r.fidelity_history.size() && r.fidelity_history[fi].first == epoch)
        out << "," << fmt_g(r.fidelity_history[fi].second);
      else
        out << ",";
    }
    out << "\n";
  }
  atomic_write_file(path, out.str());
}

int cmd_reconstruct(const ReconstructOpts& o) {
  std::vector<double> weights;
  MeasurementSpec spec;
  if (o.counts) {
    auto [counts, csv_spec] = read_counts_csv(o.data);
    weights = weights_from(counts);
    spec = csv_spec;
    if (o.method == "gan") {
      // the adversarial solver consumes frequencies, not raw counts
      double shots = double(counts.shots);
      if (!(shots > 0)) fail("ZeroMass", "counts file has zero shots");
      for (double& w : weights) w /= shots;
    }
  } else {
    auto [values, csv_spec] = read_expectation_csv(o.data);
    weights = values.values;
    spec = csv_spec;
  }

  if (!o.operators.empty()) {
    spec.kind = o.operators == "husimi" ? MeasurementKind::HusimiGrid : MeasurementKind::PhotonNumber;
    if (o.dim > 0) spec.dim = o.dim;
    if (!o.xgrid.empty()) spec.xgrid = parse_grid(o.xgrid, "xgrid");
    if (!o.pgrid.empty()) spec.pgrid = parse_grid(o.pgrid, "pgrid");
  }
  if (spec.dim <= 0) fail("DimensionMismatch", "no Hilbert dimension available; pass --dim");
  MeasurementSet set = spec.build();
  if (weights.size() != set.size())
    fail("LengthMismatch", "data rows (" + std::to_string(weights.size()) + ") vs operators (" +
                               std::to_string(set.size()) + ")");

  std::optional<DensityMatrix> reference;
  if (!o.reference.empty()) reference = load_state(parse_state_ref(o.reference));
  const DensityMatrix* ref_ptr = reference ? &*reference : nullptr;

  ReconstructionResult result;
  json cfg_json = o.config.empty() ? json::object() : json::parse(read_text_file(o.config));
  if (o.method == "mle") {
    MLEConfig cfg;
    if (cfg_json.contains("max_epochs")) cfg.max_epochs = cfg_json["max_epochs"].get<int>();
    if (cfg_json.contains("lr")) cfg.lr = cfg_json["lr"].get<double>();
    if (cfg_json.contains("optimizer"))
      cfg.optimizer = cfg_json["optimizer"] == "sgd" ? OptimizerKind::Sgd : OptimizerKind::Adam;
    if (cfg_json.contains("floor")) cfg.floor = cfg_json["floor"].get<double>();
    if (cfg_json.contains("record_every")) cfg.record_every = cfg_json["record_every"].get<int>();
    if (cfg_json.contains("tol_grad")) cfg.tol_grad = cfg_json["tol_grad"].get<double>();
    if (cfg_json.contains("seed")) cfg.seed = cfg_json["seed"].get<std::uint64_t>();
    if (o.epochs >= 0) cfg.max_epochs = o.epochs;
    if (o.lr > 0) cfg.lr = o.lr;
    if (o.have_seed) cfg.seed = o.seed;
    result = mle_reconstruct(weights, set, cfg, ref_ptr);
  } else if (o.method == "gan") {
    GANConfig cfg;
    if (cfg_json.contains("epochs")) cfg.epochs = cfg_json["epochs"].get<int>();
    if (cfg_json.contains("gen_layers")) cfg.gen_layers = cfg_json["gen_layers"].get<std::vector<int>>();
    if (cfg_json.contains("disc_layers"))
      cfg.disc_layers = cfg_json["disc_layers"].get<std::vector<int>>();
    if (cfg_json.contains("lr_gen")) cfg.lr_gen = cfg_json["lr_gen"].get<double>();
    if (cfg_json.contains("lr_disc")) cfg.lr_disc = cfg_json["lr_disc"].get<double>();
    if (cfg_json.contains("record_every")) cfg.record_every = cfg_json["record_every"].get<int>();
    if (cfg_json.contains("seed")) cfg.seed = cfg_json["seed"].get<std::uint64_t>();
    if (o.epochs >= 0) cfg.epochs = o.epochs;
    if (o.lr > 0) cfg.lr_gen = cfg.lr_disc = o.lr;
    if (o.have_seed) cfg.seed = o.seed;
    result = gan_reconstruct(weights, set, cfg, ref_ptr);
  } else {
    fail("WrongKind", "--method must be mle or gan");
  }

  double final_fidelity = ref_ptr ? fidelity(result.reconstructed_dm, *ref_ptr) : -1.0;

  atomic_write_dir(o.out, [&](const fs::path& tmp) {
    write_dm_blob(tmp / "reconstructed.dm", result.reconstructed_dm);
    write_history_csv(tmp / "history.csv", result, ref_ptr != nullptr);
    json manifest;
    manifest["method"] = o.method;
    manifest["config"] = json::parse(result.config_echo);
    manifest["wall_time_s"] = result.wall_time_s;
    manifest["final_loss"] = result.loss_history.empty() ? 0.0 : result.loss_history.back().second;
    if (ref_ptr) manifest["final_fidelity"] = final_fidelity;
    atomic_write_file(tmp / "result.json", manifest.dump(2) + "\n");
  });

  if (ref_ptr)
    std::cout << "final fidelity " << fmt_g(final_fidelity) << " out=" << o.out << "\n";
  else
    std::cout << "reconstruction written to " << o.out << "\n";
  return 0;
}

// --- benchmark -------------------------------------------------------------------

struct BenchmarkOpts {
  std::string scenario = "num";
  int runs = 5;
  int epochs = 1000;
  int dim = 32;
  std::string grid = "-5:5:20";
  double zeta = 0.2;
  double threshold = 0.9;
  std::uint64_t seed = 0;
  std::string out = "benchmark_out";
};

DensityMatrix scenario_state(const std::string& scenario, int dim) {
  if (scenario == "num") return num_state(dim, builtin_num_table().find("M2"));
  if (scenario == "coherent") return coherent(dim, Complex(1.0, 0.0));
  if (scenario == "fock") return fock(dim, 1);
  if (scenario == "cat") return cat(dim, Complex(2.0, 0.0), Parity::Even);
  fail("WrongKind", "unknown scenario '" + scenario + "' (num, coherent, fock, cat)");
}

struct RunOutcome {
  std::vector<std::pair<int, double>> fidelity;
  double wall_time = 0.0;
  bool failed = false;
  std::string error;
};

int cmd_benchmark(const BenchmarkOpts& o) {
  if (o.runs < 1) fail("EmptyRange", "--runs must be >= 1");
  DensityMatrix truth = scenario_state(o.scenario, o.dim);
  std::vector<double> axis = parse_grid(o.grid, "grid");
  MeasurementSet set = husimi_operators(o.dim, axis, axis);

  // one mixed target per run; both methods reconstruct the same target
  std::vector<DensityMatrix> targets;
  std::vector<std::vector<double>> data;
  for (int r = 0; r < o.runs; ++r) {
    targets.push_back(mix_with_random(truth, o.zeta, Rng::derive(o.seed, 100, r)));
    data.push_back(expectation(targets.back(), set).values);
  }

  const int n_tasks = 2 * o.runs;
  std::vector<RunOutcome> outcomes(n_tasks);
  parallel_for(static_cast<std::size_t>(n_tasks), [&](std::size_t task) {
    int method = static_cast<int>(task) / o.runs;  // 0 = mle, 1 = gan
    int r = static_cast<int>(task) % o.runs;
    RunOutcome& oc = outcomes[task];
    try {
      if (method == 0) {
        MLEConfig cfg;
        cfg.max_epochs = o.epochs;
        cfg.record_every = 10;
        cfg.tol_grad = 0.0;  // full-length curves keep every run aligned
        cfg.seed = Rng::derive(o.seed, 1, r);
        ReconstructionResult res = mle_reconstruct(data[r], set, cfg, &targets[r]);
        oc.fidelity = res.fidelity_history;
        oc.wall_time = res.wall_time_s;
      } else {
        GANConfig cfg;
        cfg.epochs = o.epochs;
        cfg.record_every = 10;
        cfg.seed = Rng::derive(o.seed, 2, r);
        ReconstructionResult res = gan_reconstruct(data[r], set, cfg, &targets[r]);
        oc.fidelity = res.fidelity_history;
        oc.wall_time = res.wall_time_s;
      }
    } catch (const Error& e) {
      oc.failed = true;
      oc.error = e.what();
    }
  });

  // common epoch axis from the first successful run
  std::vector<int> epochs_axis;
  for (const RunOutcome& oc : outcomes)
    if (!oc.failed) {
      for (const auto& [e, f] : oc.fidelity) epochs_axis.push_back(e);
      break;
    }
  if (epochs_axis.empty()) fail("NonFiniteLoss", "every benchmark run failed");

  auto stats = [&](int method) {
    std::vector<double> mean(epochs_axis.size(), 0.0), sd(epochs_axis.size(), 0.0);
    int good = 0;
    for (int r = 0; r < o.runs; ++r) {
      const RunOutcome& oc = outcomes[method * o.runs + r];
      if (oc.failed) continue;
      ++good;
      for (std::size_t t = 0; t < epochs_axis.size(); ++t) mean[t] += oc.fidelity[t].second;
    }
    for (double& m : mean) m /= std::max(1, good);
    if (good > 1) {
      for (int r = 0; r < o.runs; ++r) {
        const RunOutcome& oc = outcomes[method * o.runs + r];
        if (oc.failed) continue;
        for (std::size_t t = 0; t < epochs_axis.size(); ++t) {
          double d = oc.fidelity[t].second - mean[t];
          sd[t] += d * d;
        }
      }
      for (double& s : sd) s = std::sqrt(s / (good - 1));
    }
    return std::make_pair(mean, sd);
  };
  auto [mle_mean, mle_sd] = stats(0);
  auto [gan_mean, gan_sd] = stats(1);

  auto method_json = [&](int method, const std::vector<double>& mean) {
    json mj;
    json finals = json::array();
    json iters = json::array();
    json errors = json::array();
    for (int r = 0; r < o.runs; ++r) {
      const RunOutcome& oc = outcomes[method * o.runs + r];
      if (oc.failed) {
        finals.push_back(nullptr);
        iters.push_back(nullptr);
        errors.push_back(oc.error);
        continue;
      }
      finals.push_back(oc.fidelity.back().second);
      int hit = -1;
      for (const auto& [e, f] : oc.fidelity)
        if (f >= o.threshold) {
          hit = e;
          break;
        }
      iters.push_back(hit);
    }
    mj["final_fidelities"] = finals;
    mj["final_mean"] = mean.back();
    mj["iterations_to_threshold"] = iters;
    if (!errors.empty()) mj["failures"] = errors;
    return mj;
  };

  atomic_write_dir(o.out, [&](const fs::path& tmp) {
    std::ostringstream curves;
    curves << "epoch,mle_mean,mle_std,gan_mean,gan_std\n";
    for (std::size_t t = 0; t < epochs_axis.size(); ++t)
      curves << epochs_axis[t] << "," << fmt_g(mle_mean[t]) << "," << fmt_g(mle_sd[t]) << ","
             << fmt_g(gan_mean[t]) << "," << fmt_g(gan_sd[t]) << "\n";
    atomic_write_file(tmp / "curves.csv", curves.str());

    json report;
    report["scenario"] = o.scenario;
    report["dim"] = o.dim;
    report["grid"] = o.grid;
    report["zeta"] = o.zeta;
    report["runs"] = o.runs;
    report["epochs"] = o.epochs;
    report["threshold"] = o.threshold;
    report["seed"] = o.seed;
    report["mle"] = method_json(0, mle_mean);
    report["gan"] = method_json(1, gan_mean);
    atomic_write_file(tmp / "report.json", report.dump(2) + "\n");

    // wall times live outside report.json so the report stays bit-reproducible
    json timings;
    json mle_times = json::array(), gan_times = json::array();
    for (int r = 0; r < o.runs; ++r) mle_times.push_back(outcomes[r].wall_time);
    for (int r = 0; r < o.runs; ++r) gan_times.push_back(outcomes[o.runs + r].wall_time);
    timings["mle_wall_s"] = mle_times;
    timings["gan_wall_s"] = gan_times;
    atomic_write_file(tmp / "timings.json", timings.dump(2) + "\n");
  });

  std::cout << "benchmark scenario=" << o.scenario << " runs=" << o.runs << " epochs=" << o.epochs
            << " mle_final=" << fmt_g(mle_mean.back()) << " gan_final=" << fmt_g(gan_mean.back())
            << " out=" << o.out << "\n";
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"tomokit - optical quantum state tomography toolkit"};
  app.require_subcommand(1);

  GenerateOpts gen;
  CLI::App* g = app.add_subcommand("generate", "Generate a labeled state/image dataset");
  g->add_option("--family", gen.family, "fock|coherent|thermal|cat|binomial|num|gkp|random")->required();
  g->add_option("--n", gen.n, "states to generate");
  g->add_option("--dim", gen.dim, "Hilbert-space truncation");
  g->add_option("--seed", gen.seed, "RNG seed");
  g->add_option("--out", gen.out, "output dataset directory");
  g->add_option("--grid", gen.grid, "phase-space grid lo:hi:n (both axes)");
  g->add_option("--xgrid", gen.xgrid, "x grid lo:hi:n");
  g->add_option("--pgrid", gen.pgrid, "p grid lo:hi:n");
  g->add_option("--alpha-mag", gen.alpha_mag, "|alpha| range lo:hi");
  g->add_option("--alpha-phase", gen.alpha_phase, "arg(alpha) range lo:hi");
  g->add_option("--fock-n", gen.fock_n, "fock level range lo:hi");
  g->add_option("--nth", gen.nth, "thermal occupancy range lo:hi");
  g->add_option("--binomial-n", gen.binomial_n, "binomial N range lo:hi");
  g->add_option("--binomial-s", gen.binomial_s, "binomial S range lo:hi");
  g->add_option("--delta", gen.delta, "gkp delta range lo:hi");
  g->add_option("--parity", gen.parity, "cat parity even|odd");
  g->add_option("--param", gen.params, "generic key=value override (repeatable)");
  g->add_option("--noise-config", gen.noise_config, "noise config JSON (default: standard values)");
  g->add_option("--num-table", gen.num_table, "num-state amplitude table file");
  g->add_flag("--clean", gen.clean, "disable all noise");

  MeasureOpts meas;
  CLI::App* m = app.add_subcommand("measure", "Compute Born-rule measurement data for a state");
  m->add_option("--in", meas.in, "state: .dm blob or dataset dir[:index]")->required();
  m->add_option("--use", meas.use, "clean|noisy record matrix (dataset inputs)");
  m->add_option("--operators", meas.operators, "husimi|number");
  m->add_option("--dim", meas.dim, "operator dimension (default: state dim)");
  m->add_option("--xgrid", meas.xgrid, "x grid lo:hi:n");
  m->add_option("--pgrid", meas.pgrid, "p grid lo:hi:n");
  m->add_option("--shots", meas.shots, "finite-shot count sampling");
  m->add_option("--seed", meas.seed, "sampling seed");
  m->add_option("--out", meas.out, "output directory");

  NoiseOpts noi;
  CLI::App* n = app.add_subcommand("noise", "Apply state mixing and/or the image noise pipeline");
  n->add_option("--in-state", noi.in_state, "state to mix: .dm blob or dataset dir[:index]");
  n->add_option("--in-image", noi.in_image, "image CSV to push through the pipeline");
  n->add_option("--config", noi.config, "noise config JSON (default: standard values)");
  n->add_option("--zeta", noi.zeta, "override mixing weight");
  n->add_option("--seed", noi.seed, "noise seed");
  n->add_flag("--demo-exaggerated", noi.demo_exaggerated, "emit per-stage demo images");
  n->add_option("--out", noi.out, "output directory");

  ReconstructOpts rec;
  CLI::App* r = app.add_subcommand("reconstruct", "Run MLE or GAN tomography on measurement data");
  r->add_option("--method", rec.method, "mle|gan")->required();
  r->add_option("--data", rec.data, "expectation/count CSV")->required();
  r->add_flag("--counts", rec.counts, "input CSV holds counts");
  r->add_option("--operators", rec.operators, "husimi|number (default: from CSV header)");
  r->add_option("--dim", rec.dim, "operator dimension");
  r->add_option("--xgrid", rec.xgrid, "x grid lo:hi:n");
  r->add_option("--pgrid", rec.pgrid, "p grid lo:hi:n");
  r->add_option("--config", rec.config, "solver config JSON");
  r->add_option("--epochs", rec.epochs, "override epoch budget");
  r->add_option("--lr", rec.lr, "override learning rate(s)");
  auto* seed_opt = r->add_option("--seed", rec.seed, "solver seed");
  r->add_option("--reference", rec.reference, "true state for fidelity reporting");
  r->add_option("--out", rec.out, "output directory");

  BenchmarkOpts ben;
  CLI::App* b = app.add_subcommand("benchmark", "Compare MLE and GAN on a fixed scenario");
  b->add_option("--scenario", ben.scenario, "num|coherent|fock|cat");
  b->add_option("--runs", ben.runs, "reconstruction runs per method");
  b->add_option("--epochs", ben.epochs, "training epochs");
  b->add_option("--dim", ben.dim, "Hilbert-space truncation");
  b->add_option("--grid", ben.grid, "phase-space grid lo:hi:n");
  b->add_option("--zeta", ben.zeta, "state-preparation mixing weight");
  b->add_option("--threshold", ben.threshold, "fidelity threshold for iterations-to-threshold");
  b->add_option("--seed", ben.seed, "master seed");
  b->add_option("--out", ben.out, "output directory");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*g) return cmd_generate(gen);
    if (*m) return cmd_measure(meas);
    if (*n) {
      return cmd_noise(noi);
    }
    if (*r) {
      rec.have_seed = seed_opt->count() > 0;
      return cmd_reconstruct(rec);
    }
    if (*b) return cmd_benchmark(ben);
  } catch (const Error& e) {
    std::cerr << "error " << e.what() << "\n";
    return e.name() == "NonFiniteLoss" ? 3 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

int run(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args);
}

}  // namespace tomokit::cli
