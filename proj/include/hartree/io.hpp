#pragma once

#include <filesystem>
#include <string>

#include "hartree/solver.hpp"

namespace hartree {

class io_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Field snapshot: one JSON header line {"n":..,"L":..,"label":..} followed by
/// n^3 little-endian 64-bit floats in x-major order. Extension `.fld`.
void write_field(const std::filesystem::path& path, const Field& u,
                 const std::string& label);
Field read_field(const std::filesystem::path& path, std::string* label = nullptr);

/// JSON sidecar for a solve: {family, m, c, N, energy, multiplier, residual,
/// iterations}.
void write_result_sidecar(const std::filesystem::path& path, const ProblemSpec& spec,
                          const GroundStateResult& result);

/// FNV-1a over a canonical string; used for manifest config hashes.
std::uint64_t fnv1a64(const std::string& data);

/// Appends an artifact entry {file, config_hash} to out_dir/manifest.json.
void manifest_add(const std::filesystem::path& out_dir, const std::string& file,
                  std::uint64_t config_hash);

}  // namespace hartree
