#pragma once

#include <filesystem>
#include <string>

#include "fractal_spectra/assembly.hpp"
#include "fractal_spectra/cache.hpp"
#include "fractal_spectra/eigensolver.hpp"
#include "fractal_spectra/fem.hpp"

namespace fractal_spectra {

struct RunConfig {
  int level = 4;
  int depth = 0;
  NormalizationSpec normalization{Normalization::chain, 2.0};
  double min_angle_deg = 20.0;
  MassKind mass = MassKind::consistent;
  std::size_t count = 120;
  double cluster_tol = 1e-4;
  std::filesystem::path out = ".";
  bool use_cache = true;

  // Canonical text of every parameter that shapes the mesh.
  std::string mesh_params() const;
  std::string spectrum_params() const;
};

struct Solved {
  SurfaceMesh mesh;
  OperatorPair ops;
  Spectrum spectrum;
  bool from_cache = false;
};

SurfaceMesh build_mesh(const RunConfig& cfg, const ArtifactCache& cache);
Solved solve(const RunConfig& cfg, const ArtifactCache& cache, const SolverOptions& opt = {});

std::string serialize_spectrum(const Spectrum& s);
Spectrum deserialize_spectrum(const std::string& bytes);

}  // namespace fractal_spectra
