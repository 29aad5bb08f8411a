#include "tomokit/io.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

namespace tomokit {

namespace fs = std::filesystem;
using json = nlohmann::json;

std::uint32_t crc32(const unsigned char* data, std::size_t len) {
  static const auto table = [] {
    std::array<std::uint32_t, 256> t{};
    for (std::uint32_t i = 0; i < 256; ++i) {
      std::uint32_t c = i;
      for (int k = 0; k < 8; ++k) c = (c & 1) ? 0xEDB88320u ^ (c >> 1) : c >> 1;
      t[i] = c;
    }
    return t;
  }();
  std::uint32_t crc = 0xFFFFFFFFu;
  for (std::size_t i = 0; i < len; ++i) crc = table[(crc ^ data[i]) & 0xFFu] ^ (crc >> 8);
  return crc ^ 0xFFFFFFFFu;
}

namespace {

constexpr char kDmMagic[8] = {'T', 'M', 'K', 'D', 'M', 'v', '1', '\n'};

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string grid_to_string(const std::vector<double>& g) {
  // uniform grids serialize as lo:hi:n
  return format_double(g.front()) + ":" + format_double(g.back()) + ":" + std::to_string(g.size());
}

std::vector<double> grid_from_string(const std::string& s) {
  auto c1 = s.find(':');
  auto c2 = s.rfind(':');
  if (c1 == std::string::npos || c2 == c1) fail("IoError", "bad grid spec '" + s + "'");
  double lo = std::stod(s.substr(0, c1));
  double hi = std::stod(s.substr(c1 + 1, c2 - c1 - 1));
  int n = std::stoi(s.substr(c2 + 1));
  return linspace(lo, hi, n);
}

const char* kind_name(MeasurementKind k) {
  switch (k) {
    case MeasurementKind::HusimiGrid: return "husimi";
    case MeasurementKind::PhotonNumber: return "number";
    case MeasurementKind::Custom: return "custom";
  }
  return "custom";
}

void write_spec_header(std::ostream& out, const MeasurementSpec& spec, const char* what) {
  out << "# tomokit-" << what << " v1\n";
  out << "# kind=" << kind_name(spec.kind) << "\n";
  out << "# dim=" << spec.dim << "\n";
  if (spec.kind == MeasurementKind::HusimiGrid) {
    out << "# xgrid=" << grid_to_string(spec.xgrid) << "\n";
    out << "# pgrid=" << grid_to_string(spec.pgrid) << "\n";
  }
}

// parses "# key=value" header lines and value lines from a CSV body
struct ParsedCsv {
  std::map<std::string, std::string> header;
  std::vector<std::string> rows;
};

ParsedCsv parse_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) fail("IoError", "cannot open '" + path.string() + "'");
  ParsedCsv parsed;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      auto eq = line.find('=');
      if (eq != std::string::npos) {
        std::string key = line.substr(2, eq - 2);
        parsed.header[key] = line.substr(eq + 1);
      }
      continue;
    }
    parsed.rows.push_back(line);
  }
  return parsed;
}

MeasurementSpec spec_from_header(const std::map<std::string, std::string>& header,
                                 const fs::path& path) {
  MeasurementSpec spec;
  auto need = [&](const char* key) -> const std::string& {
    auto it = header.find(key);
    if (it == header.end()) fail("IoError", path.string() + ": missing header '" + std::string(key) + "'");
    return it->second;
  };
  const std::string& kind = need("kind");
  if (kind == "husimi") {
    spec.kind = MeasurementKind::HusimiGrid;
    spec.xgrid = grid_from_string(need("xgrid"));
    spec.pgrid = grid_from_string(need("pgrid"));
  } else if (kind == "number") {
    spec.kind = MeasurementKind::PhotonNumber;
  } else {
    fail("IoError", path.string() + ": unsupported measurement kind '" + kind + "'");
  }
  spec.dim = std::stoi(need("dim"));
  return spec;
}

}  // namespace

MeasurementSet MeasurementSpec::build() const {
  switch (kind) {
    case MeasurementKind::HusimiGrid: return husimi_operators(dim, xgrid, pgrid);
    case MeasurementKind::PhotonNumber: return number_operators(dim);
    case MeasurementKind::Custom: break;
  }
  fail("WrongKind", "cannot rebuild a custom measurement set from a spec");
}

void write_dm_blob(const fs::path& path, const DensityMatrix& dm) {
  const int n = dm.dim();
  std::vector<unsigned char> payload(sizeof(std::uint64_t) + std::size_t(n) * n * 2 * sizeof(double));
  std::uint64_t dim64 = static_cast<std::uint64_t>(n);
  std::memcpy(payload.data(), &dim64, sizeof(dim64));
  double* out = reinterpret_cast<double*>(payload.data() + sizeof(dim64));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      *out++ = dm.matrix()(i, j).real();
      *out++ = dm.matrix()(i, j).imag();
    }
  std::uint32_t crc = crc32(payload.data(), payload.size());

  std::ofstream file(path, std::ios::binary);
  if (!file) fail("IoError", "cannot write '" + path.string() + "'");
  file.write(kDmMagic, sizeof(kDmMagic));
  file.write(reinterpret_cast<const char*>(payload.data()), static_cast<std::streamsize>(payload.size()));
  file.write(reinterpret_cast<const char*>(&crc), sizeof(crc));
  if (!file) fail("IoError", "short write to '" + path.string() + "'");
}

DensityMatrix read_dm_blob(const fs::path& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) fail("IoError", "cannot open '" + path.string() + "'");
  char magic[8];
  if (!file.read(magic, sizeof(magic)) || std::memcmp(magic, kDmMagic, sizeof(magic)) != 0)
    fail("FormatVersionMismatch", path.string() + " is not a tomokit density-matrix blob");
  std::uint64_t dim64 = 0;
  if (!file.read(reinterpret_cast<char*>(&dim64), sizeof(dim64)) || dim64 == 0 || dim64 > 4096)
    fail("ChecksumMismatch", path.string() + ": corrupt header");
  std::size_t n = static_cast<std::size_t>(dim64);
  std::vector<unsigned char> payload(sizeof(dim64) + n * n * 2 * sizeof(double));
  std::memcpy(payload.data(), &dim64, sizeof(dim64));
  if (!file.read(reinterpret_cast<char*>(payload.data() + sizeof(dim64)),
                 static_cast<std::streamsize>(payload.size() - sizeof(dim64))))
    fail("ChecksumMismatch", path.string() + ": truncated payload");
  std::uint32_t crc_stored = 0;
  if (!file.read(reinterpret_cast<char*>(&crc_stored), sizeof(crc_stored)))
    fail("ChecksumMismatch", path.string() + ": missing checksum");
  if (crc32(payload.data(), payload.size()) != crc_stored)
    fail("ChecksumMismatch", path.string() + ": checksum mismatch");

  ComplexMatrix m(n, n);
  const double* in = reinterpret_cast<const double*>(payload.data() + sizeof(dim64));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double re = *in++;
      double im = *in++;
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = Complex(re, im);
    }
  return DensityMatrix::unchecked(std::move(m));
}

void write_expectation_csv(const fs::path& path, const ExpectationVector& values,
                           const MeasurementSpec& spec) {
  std::ostringstream out;
  write_spec_header(out, spec, "expectation");
  for (double v : values.values) out << format_double(v) << "\n";
  atomic_write_file(path, out.str());
}

std::pair<ExpectationVector, MeasurementSpec> read_expectation_csv(const fs::path& path) {
  ParsedCsv parsed = parse_csv(path);
  MeasurementSpec spec = spec_from_header(parsed.header, path);
  ExpectationVector values;
  values.set_kind = spec.kind;
  values.values.reserve(parsed.rows.size());
  for (const std::string& row : parsed.rows) values.values.push_back(std::stod(row));
  return {std::move(values), std::move(spec)};
}

void write_counts_csv(const fs::path& path, const CountVector& counts, const MeasurementSpec& spec) {
  std::ostringstream out;
  write_spec_header(out, spec, "counts");
  out << "# shots=" << counts.shots << "\n";
  for (std::uint64_t c : counts.counts) out << c << "\n";
  atomic_write_file(path, out.str());
}

std::pair<CountVector, MeasurementSpec> read_counts_csv(const fs::path& path) {
  ParsedCsv parsed = parse_csv(path);
  MeasurementSpec spec = spec_from_header(parsed.header, path);
  CountVector counts;
  auto shots_it = parsed.header.find("shots");
  for (const std::string& row : parsed.rows) counts.counts.push_back(std::stoull(row));
  counts.shots = shots_it != parsed.header.end()
                     ? std::stoull(shots_it->second)
                     : std::accumulate(counts.counts.begin(), counts.counts.end(), std::uint64_t(0));
  return {std::move(counts), std::move(spec)};
}

void write_image_csv(const fs::path& path, const PhaseSpaceImage& img) {
  MeasurementSpec spec;
  spec.kind = MeasurementKind::HusimiGrid;
  spec.dim = 0;  // images carry no Hilbert dimension
  spec.xgrid = img.xgrid;
  spec.pgrid = img.pgrid;
  ExpectationVector values;
  values.set_kind = MeasurementKind::HusimiGrid;
  values.values.reserve(static_cast<std::size_t>(img.height) * img.width);
  for (int i = 0; i < img.height; ++i)
    for (int j = 0; j < img.width; ++j) values.values.push_back(img.pixels(i, j));
  write_expectation_csv(path, values, spec);
}

PhaseSpaceImage read_image_csv(const fs::path& path) {
  auto [values, spec] = read_expectation_csv(path);
  if (spec.kind != MeasurementKind::HusimiGrid)
    fail("WrongKind", path.string() + " does not hold a phase-space image");
  PhaseSpaceImage img;
  img.height = static_cast<int>(spec.pgrid.size());
  img.width = static_cast<int>(spec.xgrid.size());
  if (values.values.size() != static_cast<std::size_t>(img.height) * img.width)
    fail("ChecksumMismatch", path.string() + ": value count does not match the grid");
  img.xgrid = spec.xgrid;
  img.pgrid = spec.pgrid;
  img.pixels.resize(img.height, img.width);
  for (int i = 0; i < img.height; ++i)
    for (int j = 0; j < img.width; ++j) img.pixels(i, j) = values.values[i * img.width + j];
  return img;
}

void write_pgm(const fs::path& path, const PhaseSpaceImage& img) {
  double maxv = img.pixels.maxCoeff();
  std::ostringstream out;
  out << "P2\n" << img.width << " " << img.height << "\n65535\n";
  for (int i = 0; i < img.height; ++i) {
    for (int j = 0; j < img.width; ++j) {
      long v = maxv > 0.0 ? std::lround(img.pixels(i, j) / maxv * 65535.0) : 0;
      if (v < 0) v = 0;
      if (v > 65535) v = 65535;
      out << v << (j + 1 == img.width ? "" : " ");
    }
    out << "\n";
  }
  atomic_write_file(path, out.str());
}

std::string noise_config_to_json(const NoiseConfig& cfg) {
  json j;
  j["zeta"] = cfg.zeta;
  j["n_th"] = cfg.nth_conv;
  j["rotation"] = cfg.rotation_deg;
  j["translation"] = {cfg.translate_x, cfg.translate_y};
  j["additive_std"] = cfg.additive_sigma;
  j["salt"] = cfg.salt_prop;
  j["pepper"] = cfg.pepper_prop;
  j["seed"] = cfg.seed;
  return j.dump(2) + "\n";
}

NoiseConfig noise_config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    fail("IoError", std::string("bad noise config JSON: ") + e.what());
  }
  NoiseConfig cfg;
  try {
    cfg.zeta = j.at("zeta").get<double>();
    cfg.nth_conv = j.at("n_th").get<double>();
    cfg.rotation_deg = j.at("rotation").get<double>();
    cfg.translate_x = j.at("translation").at(0).get<double>();
    cfg.translate_y = j.at("translation").at(1).get<double>();
    cfg.additive_sigma = j.at("additive_std").get<double>();
    cfg.salt_prop = j.at("salt").get<double>();
    cfg.pepper_prop = j.at("pepper").get<double>();
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
  } catch (const json::exception& e) {
    fail("IoError", std::string("noise config is missing fields: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

NoiseConfig load_noise_config(const fs::path& path) {
  return noise_config_from_json(read_text_file(path));
}

void atomic_write_dir(const fs::path& final_path,
                      const std::function<void(const fs::path&)>& fill) {
  if (fs::exists(final_path)) fail("IoError", "output path '" + final_path.string() + "' already exists");
  fs::path tmp = final_path;
  tmp += ".partial";
  std::error_code ec;
  fs::remove_all(tmp, ec);
  fs::create_directories(tmp);
  try {
    fill(tmp);
  } catch (...) {
    fs::remove_all(tmp, ec);
    throw;
  }
  fs::rename(tmp, final_path);
}

void atomic_write_file(const fs::path& final_path, const std::string& contents) {
  fs::path tmp = final_path;
  tmp += ".partial";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) fail("IoError", "cannot write '" + tmp.string() + "'");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) fail("IoError", "short write to '" + tmp.string() + "'");
  }
  fs::rename(tmp, final_path);
}

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("IoError", "cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace tomokit
