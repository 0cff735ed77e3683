#pragma once
#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "skyrm/bipartite.hpp"
#include "skyrm/mesh.hpp"
#include "skyrm/noise.hpp"
#include "skyrm/qstate.hpp"
#include "skyrm/texture.hpp"

namespace skyrm {

inline constexpr const char* kVersion = "0.1.0";

using Json = nlohmann::json;

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

// Density-matrix container: <path> is a JSON header {version, factors,
// storage, data_file}; the sibling data file holds little-endian binary64
// (re, im) pairs: dense entries row-major, or the weight list followed by
// the stacked factor columns.
void save_qdm(const DensityMatrix& rho, const std::string& path);
DensityMatrix load_qdm(const std::string& path);

// Texture table: header `i,j,x,xp,sx,sy,sz,s0,defined`, row-major points,
// floats at 17 significant digits.
std::string stokes_csv(const StokesField& field);
void save_stokes_csv(const StokesField& field, const std::string& path);
StokesField load_stokes_csv(const std::string& path);

Json texture_report_json(const TextureReport& report);
Json nested_report_json(const NestedReport& report);

// `param...,Q_raw,Q_rounded,class,residual,seed,error`; failed points carry
// empty report fields and the error text.
std::string sweep_csv(const SweepResult& result);

// `phi,Q_raw,Q_rounded,class` (single-parameter scan table).
std::string phase_scan_csv(const SweepResult& result);

Json mesh_program_json(const MeshProgram& program);
MeshProgram mesh_program_from_json(const Json& j);

// Provenance record: version, command, config, master seed, and the SHA-256
// digest of every output file (computed when the manifest is written).
struct RunManifest {
    std::string command;
    Json config;
    std::uint64_t seed = 0;
    std::vector<std::string> outputs;  // paths relative to the manifest dir
};

Json run_manifest_json(const RunManifest& manifest, const std::string& base_dir);
void write_run_manifest(const RunManifest& manifest, const std::string& path);

}  // namespace skyrm
