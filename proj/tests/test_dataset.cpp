#include "tomokit/dataset.hpp"

#include "test_helpers.hpp"

#include <doctest.h>

#include <fstream>

using namespace tomokit;
using tomokit::testing::expect_error;

namespace {

namespace fs = std::filesystem;

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("tomokit_test_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

DatasetSpec mini_spec() {
  DatasetSpec spec;
  spec.dim = 8;
  spec.xgrid = linspace(-4.0, 4.0, 8);
  spec.pgrid = linspace(-4.0, 4.0, 8);
  spec.n_per_family = 5;
  spec.noise = NoiseConfig{};
  BatchSpec coherent_spec;
  coherent_spec.family = StateFamily::Coherent;
  coherent_spec.alpha_mag = Interval(0.0, 1.5);
  BatchSpec fock_spec;
  fock_spec.family = StateFamily::Fock;
  fock_spec.fock_n = IntInterval(0, 5);
  spec.families = {coherent_spec, fock_spec};
  return spec;
}

bool same_bytes(const fs::path& a, const fs::path& b) {
  std::ifstream fa(a, std::ios::binary), fb(b, std::ios::binary);
  std::string sa((std::istreambuf_iterator<char>(fa)), std::istreambuf_iterator<char>());
  std::string sb((std::istreambuf_iterator<char>(fb)), std::istreambuf_iterator<char>());
  return !sa.empty() && sa == sb;
}

}  // namespace

TEST_SUITE_BEGIN("dataset");

TEST_CASE("generation layout and stratified split") {
  Dataset ds = generate_dataset(mini_spec(), 7);
  CHECK(ds.records.size() == 10);
  CHECK(ds.manifest.n_records == 10);
  CHECK(ds.manifest.n_train == 8);  // round(0.8 * 5) per family
  CHECK(ds.manifest.n_test == 2);
  CHECK(ds.manifest.families == std::vector<std::string>{"coherent", "fock"});

  for (int f = 0; f < 2; ++f) {
    int train = 0;
    for (int i = 0; i < 5; ++i)
      if (ds.records[f * 5 + i].split == Split::Train) ++train;
    CHECK(train == 4);
  }
  for (const DatasetRecord& rec : ds.records) {
    CHECK(rec.image.height == 8);
    CHECK(rec.image.width == 8);
    CHECK_NOTHROW(make_density_matrix(rec.noisy_dm.matrix(), 1e-10));
  }
}

TEST_CASE("provenance replay reproduces every record") {
  Dataset ds = generate_dataset(mini_spec(), 19);
  for (const DatasetRecord& rec : ds.records) {
    auto [noisy, image] = replay_record(rec, ds.manifest);
    CHECK((noisy.matrix() - rec.noisy_dm.matrix()).cwiseAbs().maxCoeff() == 0.0);
    CHECK((image.pixels - rec.image.pixels).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("save/load round trip is lossless") {
  TempDir tmp("roundtrip");
  Dataset ds = generate_dataset(mini_spec(), 3);
  fs::path dir = tmp.path / "ds";
  save_dataset(ds, dir);

  Dataset back = load_dataset(dir);
  CHECK(back.manifest.n_records == ds.manifest.n_records);
  CHECK(back.manifest.dim == ds.manifest.dim);
  CHECK(back.manifest.seed == ds.manifest.seed);
  CHECK(back.manifest.xgrid == ds.manifest.xgrid);
  REQUIRE(back.records.size() == ds.records.size());
  for (std::size_t i = 0; i < ds.records.size(); ++i) {
    const DatasetRecord& a = ds.records[i];
    const DatasetRecord& b = back.records[i];
    CHECK(a.label.family == b.label.family);
    CHECK(a.label.variant == b.label.variant);
    CHECK(a.label.params.size() == b.label.params.size());
    for (const auto& [key, value] : a.label.params) {
      CHECK(b.label.params.count(key) == 1);
      CHECK(b.label.params.at(key) == value);  // bit-exact floats
    }
    CHECK(a.split == b.split);
    CHECK(a.state_seed == b.state_seed);
    CHECK(a.mix_seed == b.mix_seed);
    CHECK(a.pipeline_seed == b.pipeline_seed);
    CHECK((a.clean_dm.matrix() - b.clean_dm.matrix()).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a.noisy_dm.matrix() - b.noisy_dm.matrix()).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a.image.pixels - b.image.pixels).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("regeneration is byte-identical") {
  TempDir tmp("regen");
  Dataset a = generate_dataset(mini_spec(), 11);
  Dataset b = generate_dataset(mini_spec(), 11);
  save_dataset(a, tmp.path / "a");
  save_dataset(b, tmp.path / "b");
  CHECK(same_bytes(tmp.path / "a" / "records.bin", tmp.path / "b" / "records.bin"));
  CHECK(same_bytes(tmp.path / "a" / "manifest.json", tmp.path / "b" / "manifest.json"));
}

TEST_CASE("corruption is reported, not crashed on") {
  TempDir tmp("corrupt");
  Dataset ds = generate_dataset(mini_spec(), 3);
  fs::path dir = tmp.path / "ds";
  save_dataset(ds, dir);

  // truncate the record stream
  auto size = fs::file_size(dir / "records.bin");
  fs::resize_file(dir / "records.bin", size - 5);
  CHECK(expect_error([&] { load_dataset(dir); }, "ChecksumMismatch"));

  // flip a payload byte
  save_dataset(ds, tmp.path / "ds2");
  {
    std::fstream f(tmp.path / "ds2" / "records.bin",
                   std::ios::binary | std::ios::in | std::ios::out);
    f.seekp(100);
    char byte = 0;
    f.read(&byte, 1);
    f.seekp(100);
    byte = static_cast<char>(byte ^ 0x40);
    f.write(&byte, 1);
  }
  CHECK(expect_error([&] { load_dataset(tmp.path / "ds2"); }, "ChecksumMismatch"));
}

TEST_CASE("manifest loads without touching record payloads") {
  TempDir tmp("manifest");
  Dataset ds = generate_dataset(mini_spec(), 3);
  fs::path dir = tmp.path / "ds";
  save_dataset(ds, dir);
  fs::remove(dir / "records.bin");

  DatasetManifest m = load_manifest(dir);
  CHECK(m.n_records == 10);
  CHECK(m.n_train == 8);
  CHECK(m.dim == 8);
}

TEST_CASE("single records stream out without a full load") {
  TempDir tmp("stream");
  Dataset ds = generate_dataset(mini_spec(), 3);
  fs::path dir = tmp.path / "ds";
  save_dataset(ds, dir);

  DatasetRecord rec = load_record(dir, 7);
  CHECK((rec.clean_dm.matrix() - ds.records[7].clean_dm.matrix()).cwiseAbs().maxCoeff() == 0.0);
  CHECK(rec.split == ds.records[7].split);
  CHECK(expect_error([&] { load_record(dir, 10); }, "IndexOutOfRange"));
}

TEST_CASE("label export") {
  TempDir tmp("labels");
  Dataset ds = generate_dataset(mini_spec(), 3);
  export_labels_csv(ds, tmp.path / "labels.csv");
  std::ifstream in(tmp.path / "labels.csv");
  std::string line;
  int rows = 0;
  while (std::getline(in, line))
    if (!line.empty()) ++rows;
  CHECK(rows == 11);  // header + 10 records
}

TEST_SUITE_END();
