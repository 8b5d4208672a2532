#include "hartree/io.hpp"

#include <nlohmann/json.hpp>

#include <bit>
#include <fstream>

namespace hartree {

using nlohmann::json;

namespace {
std::string family_name(ProblemSpec::Family f) {
  switch (f) {
    case ProblemSpec::Family::original: return "original";
    case ProblemSpec::Family::rescaled: return "rescaled";
    case ProblemSpec::Family::limit: return "limit";
    case ProblemSpec::Family::massless: return "massless";
  }
  return "unknown";
}
}  // namespace

void write_field(const std::filesystem::path& path, const Field& u,
                 const std::string& label) {
  static_assert(std::endian::native == std::endian::little,
                "snapshot format is little-endian");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("write_field: cannot open " + path.string());
  json header = {{"n", u.grid->points_per_dim}, {"L", u.grid->half_width},
                 {"label", label}};
  out << header.dump() << "\n";
  out.write(reinterpret_cast<const char*>(u.values.data()),
            static_cast<std::streamsize>(u.values.size() * sizeof(double)));
  if (!out) throw io_error("write_field: write failed for " + path.string());
}

Field read_field(const std::filesystem::path& path, std::string* label) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("read_field: cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw io_error("read_field: missing header line");
  json header = json::parse(line, nullptr, false);
  if (header.is_discarded() || !header.contains("n") || !header.contains("L")) {
    throw io_error("read_field: corrupt header in " + path.string());
  }
  int n = header["n"].get<int>();
  double L = header["L"].get<double>();
  if (label && header.contains("label")) *label = header["label"].get<std::string>();
  Field u(share_grid(make_grid(L, n)));
  in.read(reinterpret_cast<char*>(u.values.data()),
          static_cast<std::streamsize>(u.values.size() * sizeof(double)));
  if (in.gcount() != static_cast<std::streamsize>(u.values.size() * sizeof(double))) {
    throw io_error("read_field: truncated data in " + path.string());
  }
  for (double v : u.values) {
    if (!std::isfinite(v)) throw io_error("read_field: non-finite sample");
  }
  return u;
}

void write_result_sidecar(const std::filesystem::path& path, const ProblemSpec& spec,
                          const GroundStateResult& result) {
  json j = {
      {"family", family_name(spec.family)},
      {"m", spec.m},
      {"c", spec.c},
      {"N", spec.constraint_mass()},
      {"energy",
       {{"kinetic", result.energy.kinetic},
        {"potential", result.energy.potential},
        {"total", result.energy.total}}},
      {"multiplier", result.multiplier},
      {"residual", result.residual_norm},
      {"iterations", result.iterations},
      {"converged", result.converged},
  };
  std::ofstream out(path);
  if (!out) throw io_error("write_result_sidecar: cannot open " + path.string());
  out << j.dump(2) << "\n";
}

std::uint64_t fnv1a64(const std::string& data) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

void manifest_add(const std::filesystem::path& out_dir, const std::string& file,
                  std::uint64_t config_hash) {
  auto path = out_dir / "manifest.json";
  json manifest;
  {
    std::ifstream in(path);
    if (in) {
      manifest = json::parse(in, nullptr, false);
      if (manifest.is_discarded()) manifest = json();
    }
  }
  if (!manifest.contains("artifacts")) manifest["artifacts"] = json::array();
  manifest["artifacts"].push_back({{"file", file}, {"config_hash", config_hash}});
  std::ofstream out(path);
  if (!out) throw io_error("manifest_add: cannot open " + path.string());
  out << manifest.dump(2) << "\n";
}

}  // namespace hartree
