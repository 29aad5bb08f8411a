#include "tomokit/dataset.hpp"

#include "tomokit/threading.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

namespace tomokit {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

DatasetRecord make_record(const BatchSpec& family_spec, const DatasetSpec& spec,
                          const MeasurementSet& set, std::uint64_t master_seed,
                          std::size_t global_index, Split split) {
  DatasetRecord rec;
  std::uint64_t base = Rng::derive(master_seed, global_index);
  Rng param_rng(Rng::derive(base, 0));
  rec.state_seed = Rng::derive(base, 1);
  rec.mix_seed = Rng::derive(base, 2);
  rec.pipeline_seed = Rng::derive(base, 3);
  rec.split = split;

  auto [state, label] = draw_state(family_spec, spec.dim, param_rng, rec.state_seed);
  rec.clean_dm = std::move(state);
  rec.label = std::move(label);
  rec.noisy_dm = mix_with_random(rec.clean_dm, spec.noise.zeta, rec.mix_seed);

  NoiseConfig stage_cfg = spec.noise;
  stage_cfg.seed = rec.pipeline_seed;
  rec.image = apply_pipeline(husimi_image(rec.noisy_dm, set), stage_cfg);
  return rec;
}

}  // namespace

Dataset generate_dataset(const DatasetSpec& spec, std::uint64_t seed) {
  if (spec.families.empty()) fail("EmptyRange", "dataset spec names no families");
  if (spec.n_per_family < 1) fail("EmptyRange", "n_per_family must be >= 1");
  if (spec.train_fraction < 0.0 || spec.train_fraction > 1.0)
    fail("BadFraction", "train_fraction must lie in [0, 1]");
  spec.noise.validate();
  for (const BatchSpec& f : spec.families) f.validate();

  MeasurementSet set = husimi_operators(spec.dim, spec.xgrid, spec.pgrid);

  Dataset ds;
  std::size_t total = spec.families.size() * static_cast<std::size_t>(spec.n_per_family);
  ds.records.resize(total);
  int train_per_family = static_cast<int>(std::llround(spec.train_fraction * spec.n_per_family));

  parallel_for(total, [&](std::size_t r) {
    std::size_t family_idx = r / spec.n_per_family;
    int within = static_cast<int>(r % spec.n_per_family);
    Split split = within < train_per_family ? Split::Train : Split::Test;
    ds.records[r] = make_record(spec.families[family_idx], spec, set, seed, r, split);
  });

  DatasetManifest& m = ds.manifest;
  m.n_records = static_cast<int>(total);
  m.dim = spec.dim;
  m.xgrid = spec.xgrid;
  m.pgrid = spec.pgrid;
  m.noise = spec.noise;
  m.seed = seed;
  m.n_train = train_per_family * static_cast<int>(spec.families.size());
  m.n_test = m.n_records - m.n_train;
  for (const BatchSpec& f : spec.families) m.families.emplace_back(family_name(f.family));
  m.n_per_family = spec.n_per_family;
  return ds;
}

Dataset standard_dataset(int dim, const std::vector<double>& xgrid,
                         const std::vector<double>& pgrid, const NoiseConfig& noise,
                         std::uint64_t seed) {
  DatasetSpec spec;
  spec.dim = dim;
  spec.xgrid = xgrid;
  spec.pgrid = pgrid;
  spec.noise = noise;
  spec.n_per_family = 1000;
  spec.train_fraction = 0.8;
  const StateFamily families[] = {StateFamily::Fock,     StateFamily::Coherent,
                                  StateFamily::Thermal,  StateFamily::Cat,
                                  StateFamily::Binomial, StateFamily::Num,
                                  StateFamily::Gkp};
  for (StateFamily f : families) {
    BatchSpec b;  // defaults are the documented standard ranges
    b.family = f;
    spec.families.push_back(b);
  }
  return generate_dataset(spec, seed);
}

std::pair<DensityMatrix, PhaseSpaceImage> replay_record(const DatasetRecord& rec,
                                                        const DatasetManifest& manifest) {
  DensityMatrix clean = state_from_label(rec.label, manifest.dim, nullptr, rec.state_seed);
  DensityMatrix noisy = mix_with_random(clean, manifest.noise.zeta, rec.mix_seed);
  MeasurementSet set = husimi_operators(manifest.dim, manifest.xgrid, manifest.pgrid);
  NoiseConfig cfg = manifest.noise;
  cfg.seed = rec.pipeline_seed;
  PhaseSpaceImage image = apply_pipeline(husimi_image(noisy, set), cfg);
  return {std::move(noisy), std::move(image)};
}

// --- serialization ----------------------------------------------------------

namespace {

class PayloadWriter {
 public:
  void u64(std::uint64_t v) { raw(&v, sizeof(v)); }
  void f64(double v) { raw(&v, sizeof(v)); }
  void str(const std::string& s) {
    u64(s.size());
    raw(s.data(), s.size());
  }
  void matrix(const ComplexMatrix& m) {
    u64(static_cast<std::uint64_t>(m.rows()));
    u64(static_cast<std::uint64_t>(m.cols()));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      for (Eigen::Index j = 0; j < m.cols(); ++j) {
        f64(m(i, j).real());
        f64(m(i, j).imag());
      }
  }
  const std::vector<unsigned char>& bytes() const { return buf_; }

 private:
  void raw(const void* p, std::size_t n) {
    const unsigned char* c = static_cast<const unsigned char*>(p);
    buf_.insert(buf_.end(), c, c + n);
  }
  std::vector<unsigned char> buf_;
};

class PayloadReader {
 public:
  PayloadReader(const unsigned char* data, std::size_t len) : data_(data), len_(len) {}

  std::uint64_t u64() {
    std::uint64_t v;
    raw(&v, sizeof(v));
    return v;
  }
  double f64() {
    double v;
    raw(&v, sizeof(v));
    return v;
  }
  std::string str() {
    std::uint64_t n = u64();
    need(n);
    std::string s(reinterpret_cast<const char*>(data_ + at_), n);
    at_ += n;
    return s;
  }
  ComplexMatrix matrix() {
    std::uint64_t rows = u64();
    std::uint64_t cols = u64();
    if (rows > 65536 || cols > 65536) fail("ChecksumMismatch", "implausible matrix size in record");
    ComplexMatrix m(rows, cols);
    for (std::uint64_t i = 0; i < rows; ++i)
      for (std::uint64_t j = 0; j < cols; ++j) {
        double re = f64();
        double im = f64();
        m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = Complex(re, im);
      }
    return m;
  }
  bool exhausted() const { return at_ == len_; }

 private:
  void need(std::size_t n) {
    if (at_ + n > len_) fail("ChecksumMismatch", "record payload truncated");
  }
  void raw(void* p, std::size_t n) {
    need(n);
    std::memcpy(p, data_ + at_, n);
    at_ += n;
  }
  const unsigned char* data_;
  std::size_t len_;
  std::size_t at_ = 0;
};

void write_record(std::ofstream& out, const DatasetRecord& rec) {
  PayloadWriter w;
  w.u64(static_cast<std::uint64_t>(rec.label.family));
  w.u64(rec.split == Split::Train ? 0 : 1);
  w.u64(rec.state_seed);
  w.u64(rec.mix_seed);
  w.u64(rec.pipeline_seed);
  w.u64(rec.label.params.size());
  for (const auto& [key, value] : rec.label.params) {
    w.str(key);
    w.f64(value.real());
    w.f64(value.imag());
  }
  w.str(rec.label.variant);
  w.matrix(rec.clean_dm.matrix());
  w.matrix(rec.noisy_dm.matrix());
  w.u64(static_cast<std::uint64_t>(rec.image.height));
  w.u64(static_cast<std::uint64_t>(rec.image.width));
  for (int i = 0; i < rec.image.height; ++i)
    for (int j = 0; j < rec.image.width; ++j) w.f64(rec.image.pixels(i, j));

  std::uint64_t len = w.bytes().size();
  std::uint32_t crc = crc32(w.bytes().data(), w.bytes().size());
  out.write(reinterpret_cast<const char*>(&len), sizeof(len));
  out.write(reinterpret_cast<const char*>(w.bytes().data()), static_cast<std::streamsize>(len));
  out.write(reinterpret_cast<const char*>(&crc), sizeof(crc));
}

DatasetRecord read_record(std::ifstream& in, const DatasetManifest& manifest, int index) {
  std::uint64_t len = 0;
  if (!in.read(reinterpret_cast<char*>(&len), sizeof(len)))
    fail("ChecksumMismatch", "records.bin truncated at record " + std::to_string(index));
  if (len > (1ull << 32)) fail("ChecksumMismatch", "implausible record length");
  std::vector<unsigned char> payload(len);
  if (!in.read(reinterpret_cast<char*>(payload.data()), static_cast<std::streamsize>(len)))
    fail("ChecksumMismatch", "records.bin truncated at record " + std::to_string(index));
  std::uint32_t crc_stored = 0;
  if (!in.read(reinterpret_cast<char*>(&crc_stored), sizeof(crc_stored)))
    fail("ChecksumMismatch", "records.bin truncated at record " + std::to_string(index));
  if (crc32(payload.data(), payload.size()) != crc_stored)
    fail("ChecksumMismatch", "record " + std::to_string(index) + " failed its checksum");

  PayloadReader r(payload.data(), payload.size());
  DatasetRecord rec;
  rec.label.family = static_cast<StateFamily>(r.u64());
  rec.split = r.u64() == 0 ? Split::Train : Split::Test;
  rec.state_seed = r.u64();
  rec.mix_seed = r.u64();
  rec.pipeline_seed = r.u64();
  std::uint64_t n_params = r.u64();
  for (std::uint64_t i = 0; i < n_params; ++i) {
    std::string key = r.str();
    double re = r.f64();
    double im = r.f64();
    rec.label.params[key] = Complex(re, im);
  }
  rec.label.variant = r.str();
  rec.clean_dm = DensityMatrix::unchecked(r.matrix());
  rec.noisy_dm = DensityMatrix::unchecked(r.matrix());
  rec.image.height = static_cast<int>(r.u64());
  rec.image.width = static_cast<int>(r.u64());
  rec.image.xgrid = manifest.xgrid;
  rec.image.pgrid = manifest.pgrid;
  rec.image.pixels.resize(rec.image.height, rec.image.width);
  for (int i = 0; i < rec.image.height; ++i)
    for (int j = 0; j < rec.image.width; ++j) rec.image.pixels(i, j) = r.f64();
  if (!r.exhausted()) fail("ChecksumMismatch", "record " + std::to_string(index) + " has trailing bytes");
  return rec;
}

json manifest_to_json(const DatasetManifest& m) {
  json j;
  j["format_version"] = m.format_version;
  j["n_records"] = m.n_records;
  j["dim"] = m.dim;
  j["xgrid"] = m.xgrid;
  j["pgrid"] = m.pgrid;
  j["noise"] = json::parse(noise_config_to_json(m.noise));
  j["seed"] = m.seed;
  j["n_train"] = m.n_train;
  j["n_test"] = m.n_test;
  j["families"] = m.families;
  j["n_per_family"] = m.n_per_family;
  return j;
}

DatasetManifest manifest_from_json(const json& j) {
  DatasetManifest m;
  try {
    m.format_version = j.at("format_version").get<int>();
    if (m.format_version != 1)
      fail("FormatVersionMismatch",
           "dataset format version " + std::to_string(m.format_version) + " is not supported");
    m.n_records = j.at("n_records").get<int>();
    m.dim = j.at("dim").get<int>();
    m.xgrid = j.at("xgrid").get<std::vector<double>>();
    m.pgrid = j.at("pgrid").get<std::vector<double>>();
    m.noise = noise_config_from_json(j.at("noise").dump());
    m.seed = j.at("seed").get<std::uint64_t>();
    m.n_train = j.at("n_train").get<int>();
    m.n_test = j.at("n_test").get<int>();
    m.families = j.at("families").get<std::vector<std::string>>();
    m.n_per_family = j.at("n_per_family").get<int>();
  } catch (const json::exception& e) {
    fail("IoError", std::string("bad dataset manifest: ") + e.what());
  }
  return m;
}

}  // namespace

void save_dataset(const Dataset& ds, const fs::path& dir) {
  atomic_write_dir(dir, [&](const fs::path& tmp) {
    {
      std::ofstream out(tmp / "records.bin", std::ios::binary);
      if (!out) fail("IoError", "cannot write records.bin");
      for (const DatasetRecord& rec : ds.records) write_record(out, rec);
      if (!out) fail("IoError", "short write to records.bin");
    }
    std::ofstream mf(tmp / "manifest.json");
    if (!mf) fail("IoError", "cannot write manifest.json");
    mf << manifest_to_json(ds.manifest).dump(2) << "\n";
  });
}

DatasetManifest load_manifest(const fs::path& dir) {
  fs::path file = dir / "manifest.json";
  json j;
  try {
    j = json::parse(read_text_file(file));
  } catch (const json::exception& e) {
    fail("IoError", file.string() + ": " + e.what());
  }
  return manifest_from_json(j);
}

Dataset load_dataset(const fs::path& dir) {
  Dataset ds;
  ds.manifest = load_manifest(dir);
  std::ifstream in(dir / "records.bin", std::ios::binary);
  if (!in) fail("IoError", "cannot open " + (dir / "records.bin").string());
  ds.records.reserve(ds.manifest.n_records);
  for (int i = 0; i < ds.manifest.n_records; ++i) ds.records.push_back(read_record(in, ds.manifest, i));
  return ds;
}

DatasetRecord load_record(const fs::path& dir, int index) {
  DatasetManifest manifest = load_manifest(dir);
  if (index < 0 || index >= manifest.n_records)
    fail("IndexOutOfRange", "record " + std::to_string(index) + " outside [0, " +
                                std::to_string(manifest.n_records) + ")");
  std::ifstream in(dir / "records.bin", std::ios::binary);
  if (!in) fail("IoError", "cannot open " + (dir / "records.bin").string());
  for (int i = 0; i < index; ++i) {
    std::uint64_t len = 0;
    if (!in.read(reinterpret_cast<char*>(&len), sizeof(len)))
      fail("ChecksumMismatch", "records.bin truncated at record " + std::to_string(i));
    in.seekg(static_cast<std::streamoff>(len) + sizeof(std::uint32_t), std::ios::cur);
  }
  return read_record(in, manifest, index);
}

void export_labels_csv(const Dataset& ds, const fs::path& path) {
  std::ostringstream out;
  out << "index,family,split,variant,params\n";
  for (std::size_t i = 0; i < ds.records.size(); ++i) {
    const DatasetRecord& rec = ds.records[i];
    out << i << "," << family_name(rec.label.family) << ","
        << (rec.split == Split::Train ? "train" : "test") << "," << rec.label.variant << ",";
    bool first = true;
    for (const auto& [key, value] : rec.label.params) {
      if (!first) out << ";";
      first = false;
      char buf[80];
      std::snprintf(buf, sizeof(buf), "%s=%.17g%+.17gj", key.c_str(), value.real(), value.imag());
      out << buf;
    }
    out << "\n";
  }
  atomic_write_file(path, out.str());
}

}  // namespace tomokit
