#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bgt/dataset.hpp"
#include "bgt/models.hpp"

namespace bgt {

// On-disk description of one dataset: a source label, a payoff conversion
// factor in dollars per point, and file paths relative to the manifest.
struct DatasetManifest {
  std::string source;
  double unit_factor = 0.01;
  std::vector<std::string> games;
  std::string observations;
};

Game load_game(const std::filesystem::path& path);
void save_game(const Game& g, const std::filesystem::path& path);

DatasetManifest load_manifest(const std::filesystem::path& path);

std::vector<Observation> load_observations_csv(const std::filesystem::path& path);
void save_observations_csv(std::span<const Observation> obs,
                           const std::filesystem::path& path);

// Loads the manifest, rescales every game to expected cents (manifest
// unit_factor wins over per-file factors), aggregates observations, validates.
Dataset load_dataset(const std::filesystem::path& manifest_path);

// Writes games/, observations.csv and manifest.json under dir such that
// loading the returned manifest reproduces `data` exactly.
std::filesystem::path save_dataset(const Dataset& data,
                                   const std::filesystem::path& dir);

// Plain union of the sources (games must have distinct ids).
Dataset combine_datasets(const std::vector<Dataset>& sources);

// Uniform sample without replacement of n_per unit observations from each
// source, combined into one dataset of n_per * |sources| observations.
Dataset subsample_combine(const std::vector<Dataset>& sources, int n_per,
                          std::uint64_t seed);

// Game features a dataset can be conditioned on: dominance solvability depth
// (weak unless suffixed s), non-solvable, and equilibrium structure.
enum class FeatureFilter { D1, D2, D2s, DS, DSs, ND, Psne1, Msne1, MultiEqm };

FeatureFilter filter_from_name(const std::string& name);
const std::vector<std::pair<std::string, FeatureFilter>>& filter_names();

bool game_has_feature(const Game& g, FeatureFilter filter);

// Union of the sources restricted to games with the feature (plus their
// observations); no subsampling.
Dataset filter_by_feature(const std::vector<Dataset>& sources, FeatureFilter filter);

// Round-robin plays over `games` drawn i.i.d. from the model's predictions;
// each play contributes a row and a column observation (n_obs odd: last play
// contributes the row one only).
Dataset generate_synthetic(const Model& model, std::span<const double> theta,
                           const std::vector<Game>& games, int n_obs,
                           std::uint64_t seed);

}  // namespace bgt
