#include "fractal_spectra/pipeline.hpp"

#include <cstdio>
#include <cstring>
#include <stdexcept>

namespace fractal_spectra {

std::string RunConfig::mesh_params() const {
  char buf[256];
  std::snprintf(buf, sizeof buf, "level=%d|depth=%d|norm=%s|target=%.17g|min_angle=%.17g", level,
                depth, to_string(normalization.mode).c_str(), normalization.target, min_angle_deg);
  return buf;
}

std::string RunConfig::spectrum_params() const {
  return mesh_params() + "|mass=" + to_string(mass) + "|count=" + std::to_string(count);
}

SurfaceMesh build_mesh(const RunConfig& cfg, const ArtifactCache& cache) {
  const std::string name = cache.name("mesh", cfg.mesh_params(), "json");
  if (auto hit = cache.load(name)) return surface_mesh_from_json(nlohmann::json::parse(*hit));
  AssemblyOptions opt;
  opt.level = cfg.level;
  opt.depth = cfg.depth;
  opt.normalization = cfg.normalization;
  opt.quality.min_angle_deg = cfg.min_angle_deg;
  SurfaceMesh mesh = assemble(opt);
  cache.store(name, to_json(mesh).dump());
  return mesh;
}

namespace {

constexpr char kMagic[8] = {'F', 'S', 'S', 'P', 'E', 'C', '0', '1'};

template <class T>
void put(std::string& s, const T& v) {
  s.append(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get(const std::string& s, std::size_t& pos) {
  if (pos + sizeof(T) > s.size()) throw std::runtime_error("truncated spectrum cache");
  T v;
  std::memcpy(&v, s.data() + pos, sizeof v);
  pos += sizeof v;
  return v;
}

}  // namespace

std::string serialize_spectrum(const Spectrum& sp) {
  std::string s(kMagic, sizeof kMagic);
  put<std::uint64_t>(s, sp.size());
  put<std::uint64_t>(s, static_cast<std::uint64_t>(sp.eigenvectors.rows()));
  put<double>(s, sp.shift);
  put<std::int64_t>(s, sp.iterations);
  put<std::uint64_t>(s, sp.method.size());
  s += sp.method;
  for (double v : sp.eigenvalues) put(s, v);
  for (double v : sp.residuals) put(s, v);
  s.append(reinterpret_cast<const char*>(sp.eigenvectors.data()),
           sizeof(double) * static_cast<std::size_t>(sp.eigenvectors.size()));
  return s;
}

Spectrum deserialize_spectrum(const std::string& s) {
  if (s.size() < sizeof kMagic || std::memcmp(s.data(), kMagic, sizeof kMagic) != 0)
    throw std::runtime_error("not a spectrum cache file");
  std::size_t pos = sizeof kMagic;
  Spectrum sp;
  const auto k = get<std::uint64_t>(s, pos);
  const auto n = get<std::uint64_t>(s, pos);
  sp.shift = get<double>(s, pos);
  sp.iterations = static_cast<int>(get<std::int64_t>(s, pos));
  const auto len = get<std::uint64_t>(s, pos);
  if (pos + len > s.size()) throw std::runtime_error("truncated spectrum cache");
  sp.method = s.substr(pos, len);
  pos += len;
  for (std::uint64_t i = 0; i < k; ++i) sp.eigenvalues.push_back(get<double>(s, pos));
  for (std::uint64_t i = 0; i < k; ++i) sp.residuals.push_back(get<double>(s, pos));
  const std::size_t bytes = sizeof(double) * n * k;
  if (pos + bytes != s.size()) throw std::runtime_error("spectrum cache has the wrong size");
  sp.eigenvectors.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k));
  std::memcpy(sp.eigenvectors.data(), s.data() + pos, bytes);
  return sp;
}

Solved solve(const RunConfig& cfg, const ArtifactCache& cache, const SolverOptions& opt) {
  Solved out;
  out.mesh = build_mesh(cfg, cache);
  out.ops = assemble_matrices(out.mesh, cfg.mass);
  const std::string name = cache.name("spectrum", cfg.spectrum_params(), "bin");
  if (auto hit = cache.load(name)) {
    out.spectrum = deserialize_spectrum(*hit);
    if (out.spectrum.size() == cfg.count &&
        static_cast<std::size_t>(out.spectrum.eigenvectors.rows()) == out.ops.n) {
      out.from_cache = true;
      return out;
    }
  }
  out.spectrum = solve_lowest(out.ops, cfg.count, opt);
  cache.store(name, serialize_spectrum(out.spectrum));
  return out;
}

}  // namespace fractal_spectra
