#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"

#include "scenepred/config.hpp"
#include "scenepred/kinematics.hpp"
#include "scenepred/raster.hpp"
#include "scenepred/scenesim.hpp"

namespace scenepred {

inline constexpr const char* kToolVersion = "1.0.0";
inline constexpr int kFormatVersion = 1;

// Binary raster encodings. PPM/PGM rows run top to bottom; PFM rows run
// bottom to top as the format prescribes, little-endian float32, scale -1.
std::string encode_ppm(const Frame& frame);
std::string encode_pgm(const LabelMap& labels);
std::string encode_pfm(const Grid<double>& values);
Frame decode_ppm(const std::string& bytes, const std::string& origin = "<memory>");
LabelMap decode_pgm(const std::string& bytes, const std::string& origin = "<memory>");
Grid<double> decode_pfm(const std::string& bytes, const std::string& origin = "<memory>");

/// Reads a whole file; throws IoError naming the path.
std::string read_file(const std::filesystem::path& path);
/// Writes via a temporary sibling and rename; throws IoError.
void write_file_atomic(const std::filesystem::path& path, const std::string& bytes);

Frame read_ppm(const std::filesystem::path& path);
LabelMap read_pgm(const std::filesystem::path& path);
Grid<double> read_pfm(const std::filesystem::path& path);

nlohmann::json read_json(const std::filesystem::path& path);
/// Pretty-printed with a trailing newline.
std::string dump_json(const nlohmann::json& j);

nlohmann::json to_json(const Vec3& v);
Vec3 vec3_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ObjectState& s);
ObjectState object_state_from_json(const nlohmann::json& j);

/// Ground-truth triplet as stored on disk, with the configuration that
/// produced it.
struct StoredTriplet {
  Triplet triplet;
  Config config;
  std::filesystem::path directory;
};

/// Writes frame{0,1,2}.ppm, depth{0,1,2}.pfm, labels{0,1,2}.pgm and meta.json.
void save_triplet(const std::filesystem::path& dir, const Triplet& triplet, const Config& config);
StoredTriplet load_triplet(const std::filesystem::path& dir);

/// Triplet directories (scene_*/triplet_*) under a dataset root, sorted.
std::vector<std::filesystem::path> list_triplets(const std::filesystem::path& root);

}  // namespace scenepred
