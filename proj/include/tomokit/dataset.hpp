// Seeded generation of labeled state/image datasets and their on-disk format:
// a directory holding manifest.json plus records.bin (little-endian payloads
// with a CRC-32 per record).
#pragma once

#include "tomokit/io.hpp"
#include "tomokit/states.hpp"

namespace tomokit {

enum class Split { Train, Test };

struct DatasetRecord {
  StateLabel label;
  DensityMatrix clean_dm;
  DensityMatrix noisy_dm;  // after random-state mixing
  PhaseSpaceImage image;   // after the measurement-noise pipeline
  Split split = Split::Train;
  // Substream seeds for provenance replay.
  std::uint64_t state_seed = 0;
  std::uint64_t mix_seed = 0;
  std::uint64_t pipeline_seed = 0;
};

struct DatasetManifest {
  int format_version = 1;
  int n_records = 0;
  int dim = 0;
  std::vector<double> xgrid;
  std::vector<double> pgrid;
  NoiseConfig noise;
  std::uint64_t seed = 0;
  int n_train = 0;
  int n_test = 0;
  std::vector<std::string> families;
  int n_per_family = 0;
};

struct Dataset {
  DatasetManifest manifest;
  std::vector<DatasetRecord> records;
};

struct DatasetSpec {
  std::vector<BatchSpec> families;
  int n_per_family = 1000;
  int dim = 32;
  std::vector<double> xgrid;
  std::vector<double> pgrid;
  NoiseConfig noise;
  double train_fraction = 0.8;  // stratified per family
};

// Deterministic under `seed`: record r derives its parameter, state, mixing
// and pipeline streams from Rng::derive(seed, r, {0..3}). Records are ordered
// family-major; the first train_fraction of each family block is Train.
Dataset generate_dataset(const DatasetSpec& spec, std::uint64_t seed);

// The bundled reference dataset: 1000 states for each of the seven labeled
// families (fock, coherent, thermal, cat, binomial, num, gkp) with state and
// measurement noise applied, split 5600/1400.
Dataset standard_dataset(int dim, const std::vector<double>& xgrid,
                         const std::vector<double>& pgrid, const NoiseConfig& noise,
                         std::uint64_t seed);

// Recomputes a record's noisy state and image from its label and stored seeds.
std::pair<DensityMatrix, PhaseSpaceImage> replay_record(const DatasetRecord& rec,
                                                        const DatasetManifest& manifest);

void save_dataset(const Dataset& ds, const std::filesystem::path& dir);
Dataset load_dataset(const std::filesystem::path& dir);
// Reads manifest.json only; record payloads stay untouched.
DatasetManifest load_manifest(const std::filesystem::path& dir);
// Streams to one record, skipping the others' payloads.
DatasetRecord load_record(const std::filesystem::path& dir, int index);

void export_labels_csv(const Dataset& ds, const std::filesystem::path& path);

}  // namespace tomokit
