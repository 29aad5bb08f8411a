// On-disk formats: density-matrix blobs, expectation/count CSVs with grid
// metadata, 16-bit portable graymap previews, noise-config JSON, and the
// write-to-temp/atomic-rename helpers the CLI relies on.
#pragma once

#include "tomokit/noise.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

namespace tomokit {

std::uint32_t crc32(const unsigned char* data, std::size_t len);

// --- density-matrix blob ("TMKDMv1\n", u64 dim, row-major re/im f64, u32 crc)

void write_dm_blob(const std::filesystem::path& path, const DensityMatrix& dm);
DensityMatrix read_dm_blob(const std::filesystem::path& path);

// --- measurement geometry, shared between CSV headers and the CLI ----------

struct MeasurementSpec {
  MeasurementKind kind = MeasurementKind::PhotonNumber;
  int dim = 0;
  std::vector<double> xgrid;
  std::vector<double> pgrid;

  MeasurementSet build() const;
};

// One value per line; '#' header lines carry the measurement spec.
void write_expectation_csv(const std::filesystem::path& path, const ExpectationVector& values,
                           const MeasurementSpec& spec);
std::pair<ExpectationVector, MeasurementSpec> read_expectation_csv(const std::filesystem::path& path);

void write_counts_csv(const std::filesystem::path& path, const CountVector& counts,
                      const MeasurementSpec& spec);
std::pair<CountVector, MeasurementSpec> read_counts_csv(const std::filesystem::path& path);

// Image <-> CSV uses the expectation format with a husimi spec.
void write_image_csv(const std::filesystem::path& path, const PhaseSpaceImage& img);
PhaseSpaceImage read_image_csv(const std::filesystem::path& path);

// ASCII P2 graymap, 16-bit, normalized to the pixel maximum.
void write_pgm(const std::filesystem::path& path, const PhaseSpaceImage& img);

// --- noise-config JSON ------------------------------------------------------
// Keys follow the default-parameter table: zeta, n_th, rotation, translation,
// additive_std, salt, pepper (+ seed).

std::string noise_config_to_json(const NoiseConfig& cfg);
NoiseConfig noise_config_from_json(const std::string& text);
NoiseConfig load_noise_config(const std::filesystem::path& path);

// --- atomic output ----------------------------------------------------------

// Creates `<final>.partial`, hands it to `fill`, then renames onto `final_path`.
// Nothing is left behind if `fill` throws. Fails with IoError if the target exists.
void atomic_write_dir(const std::filesystem::path& final_path,
                      const std::function<void(const std::filesystem::path&)>& fill);
void atomic_write_file(const std::filesystem::path& final_path, const std::string& contents);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace tomokit
