#include "fractal_spectra/cache.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#ifndef FRACTAL_SPECTRA_VERSION
#define FRACTAL_SPECTRA_VERSION "dev"
#endif

namespace fractal_spectra {

const char* library_version() { return FRACTAL_SPECTRA_VERSION; }

std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::filesystem::path cache_root() {
  if (const char* p = std::getenv("FRACTAL_SPECTRA_CACHE"); p && *p) return p;
  if (const char* p = std::getenv("XDG_CACHE_HOME"); p && *p)
    return std::filesystem::path(p) / "fractal_spectra";
  if (const char* p = std::getenv("HOME"); p && *p)
    return std::filesystem::path(p) / ".cache" / "fractal_spectra";
  return ".fractal_spectra_cache";
}

ArtifactCache::ArtifactCache(std::filesystem::path root, bool enabled)
    : root_(std::move(root)), enabled_(enabled) {}

std::string ArtifactCache::name(std::string_view kind, std::string_view params,
                                std::string_view ext) const {
  std::string salted(params);
  salted += "|version=";
  salted += library_version();
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(fnv1a64(salted)));
  return std::string(kind) + "-" + hex + "." + std::string(ext);
}

std::optional<std::string> ArtifactCache::load(const std::string& name) const {
  if (!enabled_) return std::nullopt;
  std::ifstream in(root_ / name, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void ArtifactCache::store(const std::string& name, std::string_view content) const {
  if (!enabled_) return;
  std::filesystem::create_directories(root_);
  const auto tmp = root_ / (name + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw std::runtime_error("cannot write cache file " + tmp.string());
  }
  std::filesystem::rename(tmp, root_ / name);
}

}  // namespace fractal_spectra
