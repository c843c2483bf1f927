#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

namespace fractal_spectra {

std::uint64_t fnv1a64(std::string_view data);

// Directory for cached artifacts: $FRACTAL_SPECTRA_CACHE, else
// $XDG_CACHE_HOME/fractal_spectra, else ~/.cache/fractal_spectra.
std::filesystem::path cache_root();

// Content-addressed store. Names are "<kind>-<16 hex digits>.<ext>" where the
// hash covers every parameter that influences the artifact plus the version.
class ArtifactCache {
 public:
  explicit ArtifactCache(std::filesystem::path root, bool enabled = true);

  std::string name(std::string_view kind, std::string_view params, std::string_view ext) const;
  std::optional<std::string> load(const std::string& name) const;
  // Writes through a temporary file and a rename, so readers never see a
  // partial artifact. No-op when disabled.
  void store(const std::string& name, std::string_view content) const;

  bool enabled() const { return enabled_; }
  const std::filesystem::path& root() const { return root_; }

 private:
  std::filesystem::path root_;
  bool enabled_;
};

const char* library_version();

}  // namespace fractal_spectra
