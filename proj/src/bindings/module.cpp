// Python bindings for the core operations: state construction, measurement,
// noise, and the two reconstruction solvers.
#include "tomokit/dataset.hpp"
#include "tomokit/tomography.hpp"

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

namespace py = pybind11;
using namespace tomokit;

namespace {

Parity parity_from(const std::string& s) {
  if (s == "even") return Parity::Even;
  if (s == "odd") return Parity::Odd;
  fail("DegenerateCat", "parity must be 'even' or 'odd'");
}

std::vector<std::pair<int, double>> history_copy(const std::vector<std::pair<int, double>>& h) {
  return h;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Optical quantum state tomography: truncated-Fock-space states, "
            "Husimi-Q/photon-number measurement synthesis, noise models, and "
            "MLE/GAN reconstruction.";

  py::register_exception<Error>(m, "TomokitError");

  py::class_<DensityMatrix>(m, "DensityMatrix")
      .def_property_readonly("dim", &DensityMatrix::dim)
      .def_property_readonly("matrix", [](const DensityMatrix& dm) { return dm.matrix(); })
      .def_property_readonly("truncation_warning", &DensityMatrix::truncation_warning)
      .def("purity", &DensityMatrix::purity)
      .def("__repr__", [](const DensityMatrix& dm) {
        return "<DensityMatrix dim=" + std::to_string(dm.dim()) + ">";
      });

  py::class_<MeasurementSet>(m, "MeasurementSet")
      .def_property_readonly("dim", [](const MeasurementSet& s) { return s.dim; })
      .def_property_readonly("size", [](const MeasurementSet& s) { return s.size(); })
      .def_property_readonly("operators", [](const MeasurementSet& s) { return s.operators; });

  py::class_<PhaseSpaceImage>(m, "PhaseSpaceImage")
      .def_property_readonly("pixels", [](const PhaseSpaceImage& img) { return img.pixels; })
      .def_property_readonly("xgrid", [](const PhaseSpaceImage& img) { return img.xgrid; })
      .def_property_readonly("pgrid", [](const PhaseSpaceImage& img) { return img.pgrid; });

  py::class_<NoiseConfig>(m, "NoiseConfig")
      .def(py::init<>())
      .def_readwrite("zeta", &NoiseConfig::zeta)
      .def_readwrite("n_th", &NoiseConfig::nth_conv)
      .def_readwrite("rotation", &NoiseConfig::rotation_deg)
      .def_readwrite("translate_x", &NoiseConfig::translate_x)
      .def_readwrite("translate_y", &NoiseConfig::translate_y)
      .def_readwrite("additive_std", &NoiseConfig::additive_sigma)
      .def_readwrite("salt", &NoiseConfig::salt_prop)
      .def_readwrite("pepper", &NoiseConfig::pepper_prop)
      .def_readwrite("seed", &NoiseConfig::seed);

  // states
  m.def("make_density_matrix", &make_density_matrix, py::arg("matrix"), py::arg("tol") = kDefaultTol);
  m.def("fock", &fock, py::arg("dim"), py::arg("n"));
  m.def("coherent", &coherent, py::arg("dim"), py::arg("alpha"));
  m.def("thermal", &thermal, py::arg("dim"), py::arg("nth"));
  m.def(
      "cat",
      [](int dim, Complex alpha, const std::string& parity) {
        return cat(dim, alpha, parity_from(parity));
      },
      py::arg("dim"), py::arg("alpha"), py::arg("parity") = "even");
  m.def("binomial", &binomial, py::arg("dim"), py::arg("n"), py::arg("s"));
  m.def(
      "num_state",
      [](int dim, const std::vector<Complex>& amps) {
        ComplexVector v(amps.size());
        for (std::size_t i = 0; i < amps.size(); ++i) v(static_cast<Eigen::Index>(i)) = amps[i];
        return num_state(dim, v);
      },
      py::arg("dim"), py::arg("amplitudes"));
  m.def(
      "gkp",
      [](int dim, double delta, const std::string& logical, int halfwidth) {
        return gkp(dim, delta, logical == "one" ? GkpLogical::One : GkpLogical::Zero, halfwidth);
      },
      py::arg("dim"), py::arg("delta"), py::arg("logical") = "zero", py::arg("halfwidth") = 3);
  m.def("random_dm", &random_dm, py::arg("dim"), py::arg("rank"), py::arg("seed"));
  m.def("fidelity", &fidelity, py::arg("rho"), py::arg("sigma"));

  // measurement
  m.def("husimi_operators", &husimi_operators, py::arg("dim"), py::arg("xgrid"), py::arg("pgrid"));
  m.def("number_operators", &number_operators, py::arg("dim"));
  m.def(
      "expectation",
      [](const DensityMatrix& rho, const MeasurementSet& set) {
        return expectation(rho, set).values;
      },
      py::arg("rho"), py::arg("set"));
  m.def(
      "sample_counts",
      [](const std::vector<double>& p, std::uint64_t shots, std::uint64_t seed) {
        ExpectationVector v;
        v.values = p;
        return sample_counts(v, shots, seed).counts;
      },
      py::arg("probabilities"), py::arg("shots"), py::arg("seed"));
  m.def("husimi_image", &husimi_image, py::arg("rho"), py::arg("set"));
  m.def("linspace", &linspace, py::arg("lo"), py::arg("hi"), py::arg("n"));

  // noise
  m.def("mix_with_random", &mix_with_random, py::arg("rho"), py::arg("zeta"), py::arg("seed"));
  m.def("gaussian_convolution", &gaussian_convolution, py::arg("image"), py::arg("nth"));
  m.def(
      "affine_transform",
      [](const PhaseSpaceImage& img, double rot, double tx, double ty, std::uint64_t seed) {
        return affine_transform(img, rot, tx, ty, seed);
      },
      py::arg("image"), py::arg("rotation_deg"), py::arg("tx"), py::arg("ty"), py::arg("seed"));
  m.def("additive_gaussian", &additive_gaussian, py::arg("image"), py::arg("sigma"), py::arg("seed"));
  m.def("salt_pepper", &salt_pepper, py::arg("image"), py::arg("salt"), py::arg("pepper"),
        py::arg("seed"));
  m.def("apply_pipeline", &apply_pipeline, py::arg("image"), py::arg("config"));

  // tomography
  py::class_<ReconstructionResult>(m, "ReconstructionResult")
      .def_property_readonly("reconstructed_dm",
                             [](const ReconstructionResult& r) { return r.reconstructed_dm; })
      .def_property_readonly("fidelity_history",
                             [](const ReconstructionResult& r) { return history_copy(r.fidelity_history); })
      .def_property_readonly("loss_history",
                             [](const ReconstructionResult& r) { return history_copy(r.loss_history); })
      .def_property_readonly("wall_time_s", [](const ReconstructionResult& r) { return r.wall_time_s; })
      .def_property_readonly("config_echo", [](const ReconstructionResult& r) { return r.config_echo; });

  m.def(
      "mle_reconstruct",
      [](const std::vector<double>& data, const MeasurementSet& set, int max_epochs, double lr,
         const std::string& optimizer, double floor, int record_every, double tol_grad,
         std::uint64_t seed, const DensityMatrix* reference) {
        MLEConfig cfg;
        cfg.max_epochs = max_epochs;
        cfg.lr = lr;
        cfg.optimizer = optimizer == "sgd" ? OptimizerKind::Sgd : OptimizerKind::Adam;
        cfg.floor = floor;
        cfg.record_every = record_every;
        cfg.tol_grad = tol_grad;
        cfg.seed = seed;
        return mle_reconstruct(data, set, cfg, reference);
      },
      py::arg("data"), py::arg("set"), py::arg("max_epochs") = 1000, py::arg("lr") = 0.01,
      py::arg("optimizer") = "adam", py::arg("floor") = 1e-12, py::arg("record_every") = 10,
      py::arg("tol_grad") = 1e-7, py::arg("seed") = 0, py::arg("reference") = nullptr);

  m.def(
      "gan_reconstruct",
      [](const std::vector<double>& data, const MeasurementSet& set, int epochs,
         const std::vector<int>& gen_layers, const std::vector<int>& disc_layers, double lr_gen,
         double lr_disc, int record_every, std::uint64_t seed, const DensityMatrix* reference) {
        GANConfig cfg;
        cfg.epochs = epochs;
        cfg.gen_layers = gen_layers;
        cfg.disc_layers = disc_layers;
        cfg.lr_gen = lr_gen;
        cfg.lr_disc = lr_disc;
        cfg.record_every = record_every;
        cfg.seed = seed;
        return gan_reconstruct(data, set, cfg, reference);
      },
      py::arg("data"), py::arg("set"), py::arg("epochs") = 1000,
      py::arg("gen_layers") = std::vector<int>{512},
      py::arg("disc_layers") = std::vector<int>{128, 64, 32}, py::arg("lr_gen") = 0.001,
      py::arg("lr_disc") = 0.001, py::arg("record_every") = 10, py::arg("seed") = 0,
      py::arg("reference") = nullptr);

  // dataset
  m.def(
      "standard_dataset",
      [](int dim, const std::vector<double>& xgrid, const std::vector<double>& pgrid,
         const NoiseConfig& noise, std::uint64_t seed, const std::filesystem::path& out) {
        Dataset ds = standard_dataset(dim, xgrid, pgrid, noise, seed);
        save_dataset(ds, out);
        return ds.manifest.n_records;
      },
      py::arg("dim"), py::arg("xgrid"), py::arg("pgrid"), py::arg("noise"), py::arg("seed"),
      py::arg("out"));
}
