// Command-line driver: build, spectrum, analyze, extrapolate, render.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "fractal_spectra/error.hpp"
#include "fractal_spectra/face_geometry.hpp"
#include "fractal_spectra/pipeline.hpp"
#include "fractal_spectra/spectral_analysis.hpp"
#include "fractal_spectra/symmetry.hpp"

namespace fs = std::filesystem;
using namespace fractal_spectra;

namespace {

struct Options {
  RunConfig cfg;
  std::string norm = "chain";
  std::string mass = "consistent";
  bool no_cache = false;
  std::vector<int> levels;
  std::string input;
  double area = 0.0;
  std::vector<std::size_t> indices{0, 1, 4, 15};
  bool matrices = false;
};

void add_mesh_flags(CLI::App* app, Options& o) {
  app->add_option("--level", o.cfg.level, "SG level m")->check(CLI::NonNegativeNumber)->capture_default_str();
  app->add_option("--depth", o.cfg.depth, "midpoint subdivision depth")->check(CLI::NonNegativeNumber)->capture_default_str();
  app->add_option("--norm", o.norm, "normalization: chain | straight")->capture_default_str();
  app->add_option("--target", o.cfg.normalization.target, "normalized length")->capture_default_str();
  app->add_option("--min-angle", o.cfg.min_angle_deg, "minimum angle of planar triangulations (degrees)")->capture_default_str();
  app->add_option("--out", o.cfg.out, "output directory")->capture_default_str();
  app->add_flag("--no-cache", o.no_cache, "ignore and do not write the artifact cache");
}

void add_spectrum_flags(CLI::App* app, Options& o) {
  app->add_option("--count", o.cfg.count, "number of eigenvalues")->check(CLI::PositiveNumber)->capture_default_str();
  app->add_option("--tol", o.cfg.cluster_tol, "relative cluster gap tolerance")->capture_default_str();
  app->add_option("--mass", o.mass, "mass matrix: consistent | lumped")->capture_default_str();
}

void finalize(Options& o) {
  o.cfg.normalization.mode = parse_normalization(o.norm);
  o.cfg.mass = parse_mass_kind(o.mass);
  o.cfg.use_cache = !o.no_cache;
  fs::create_directories(o.cfg.out);
}

ArtifactCache cache_for(const Options& o) { return ArtifactCache(cache_root(), o.cfg.use_cache); }

void write_file(const fs::path& p, const std::string& s) {
  std::ofstream out(p, std::ios::binary);
  out << s;
  if (!out) throw std::runtime_error("cannot write " + p.string());
}

template <class F>
void write_with(const fs::path& p, F&& f) {
  std::ostringstream ss;
  f(ss);
  write_file(p, ss.str());
}

std::string fixed2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", std::abs(v) < 0.005 ? 0.0 : v);
  return buf;
}

// Cluster table with irrep labels when the mesh carries octahedral labels.
ClusterSet labelled_clusters(const Solved& s, double tol) {
  ClusterSet set = cluster_multiplicities(s.spectrum.eigenvalues, tol);
  try {
    const SymmetryAction act = build_symmetry_action(s.mesh);
    // The last cluster may be cut by the eigenvalue count.
    for (auto& c : set.clusters)
      c.irrep = c.end() < s.spectrum.size()
                    ? classify_eigenspace(c, s.spectrum.eigenvectors, act, s.ops.mass).label
                    : "truncated";
  } catch (const GluingError&) {
  }
  return set;
}

int cmd_build(Options& o) {
  const SurfaceMesh mesh = build_mesh(o.cfg, cache_for(o));
  const MeshAudit a = audit_mesh(mesh, octahedral_expectations(o.cfg.level));
  write_file(o.cfg.out / "mesh.json", to_json(mesh).dump(1) + "\n");
  const std::vector<double> deficit = curvature_audit(mesh);
  write_with(o.cfg.out / "audit.csv", [&](std::ostream& os) {
    os << "vertex,role,deficit\n";
    char buf[64];
    for (std::size_t v = 0; v < deficit.size(); ++v) {
      std::snprintf(buf, sizeof buf, "%.17g", deficit[v]);
      os << v << ',' << to_string(mesh.roles[v]) << ',' << buf << '\n';
    }
  });
  write_with(o.cfg.out / "net.svg", [&](std::ostream& os) { write_net_svg(mesh, os); });
  std::printf("level %d depth %d: %zu vertices (%zu cones), %zu edges, %zu triangles, chi %ld\n",
              mesh.level, mesh.depth, a.vertices, a.cone_vertices, a.edges, a.triangles, a.euler);
  std::printf("total deficit %.12f pi, area %.10f, min angle %.2f deg\n",
              a.total_deficit / std::numbers::pi, total_area(mesh), a.min_angle * 180 / std::numbers::pi);
  if (!a.passed()) {
    std::fprintf(stderr, "audit failed: %s\n", a.failures.front().c_str());
    return 1;
  }
  std::printf("audit passed\n");
  return 0;
}

int cmd_spectrum(Options& o) {
  const Solved s = solve(o.cfg, cache_for(o));
  write_with(o.cfg.out / "spectrum.csv", [&](std::ostream& os) { write_spectrum_csv(s.spectrum, os); });
  const ClusterSet set = labelled_clusters(s, o.cfg.cluster_tol);
  write_with(o.cfg.out / "clusters.csv", [&](std::ostream& os) { write_clusters_csv(set, os); });
  if (o.matrices) {
    write_with(o.cfg.out / "stiffness.mtx", [&](std::ostream& os) { write_matrix_market(s.ops.stiffness, os); });
    write_with(o.cfg.out / "mass.mtx", [&](std::ostream& os) { write_matrix_market(s.ops.mass, os); });
  }
  std::printf("%zu eigenvalues on %zu vertices (%s%s)\n", s.spectrum.size(), s.ops.n,
              s.spectrum.method.c_str(), s.from_cache ? ", cached" : "");
  for (const auto& c : set.clusters) {
    if (c.start >= 40) break;
    std::printf("  %3zu-%-3zu %10s (%zu) %s\n", c.start, c.end() - 1, fixed2(c.mean).c_str(), c.size,
                c.irrep.c_str());
  }
  if (!set.flagged.empty()) std::printf("warning: %zu clusters larger than 3\n", set.flagged.size());
  return 0;
}

// Reads a spectrum table (index,eigenvalue,...) or a cluster table with
// levelN columns.
std::vector<std::vector<std::string>> read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

void print_extrapolation(const std::vector<int>& levels, const std::vector<std::vector<double>>& values,
                         const std::vector<std::string>& labels, const std::vector<SequenceFit>& fits) {
  std::printf("%-9s", "#");
  for (int l : levels) std::printf(" %9s", ("level " + std::to_string(l)).c_str());
  std::printf(" %9s\n", "extrap");
  for (std::size_t r = 0; r < values.size(); ++r) {
    std::printf("%-9s", labels[r].c_str());
    for (double v : values[r]) std::printf(" %9s", fixed2(v).c_str());
    std::printf(" %9s  %s\n", fits[r].ok ? fixed2(fits[r].limit).c_str() : "-", fits[r].note.c_str());
  }
}

int extrapolate_table(const Options& o) {
  const auto rows = read_csv(o.input);
  if (rows.empty()) throw std::runtime_error("empty table");
  const auto& head = rows.front();
  std::vector<int> levels;
  std::vector<std::size_t> cols;
  for (std::size_t c = 0; c < head.size(); ++c)
    if (head[c].rfind("level", 0) == 0) {
      const int l = std::stoi(head[c].substr(5));
      if (o.levels.empty() || std::find(o.levels.begin(), o.levels.end(), l) != o.levels.end())
        levels.push_back(l), cols.push_back(c);
    }
  if (levels.size() < 3) {
    std::printf("fewer than 3 levels: extrapolation skipped\n");
    return 0;
  }
  std::vector<std::vector<double>> values;
  std::vector<std::string> labels;
  std::vector<SequenceFit> fits;
  std::ostringstream csv;
  csv << "start,end";
  for (int l : levels) csv << ",level" << l;
  csv << ",limit,ratio,residual,note\n";
  char buf[96];
  for (std::size_t r = 1; r < rows.size(); ++r) {
    std::vector<double> v;
    for (std::size_t c : cols) v.push_back(std::stod(rows[r].at(c)));
    const SequenceFit f = extrapolate_sequence(levels, v);
    csv << rows[r][0] << ',' << rows[r][1];
    for (double x : v) std::snprintf(buf, sizeof buf, ",%.17g", x), csv << buf;
    if (f.ok)
      std::snprintf(buf, sizeof buf, ",%.17g,%.17g,%.17g", f.limit, f.ratio, f.residual), csv << buf;
    else
      csv << ",,,";
    csv << ',' << f.note << '\n';
    labels.push_back(rows[r][0] == rows[r][1] ? rows[r][0] : rows[r][0] + "-" + rows[r][1]);
    values.push_back(v);
    fits.push_back(f);
  }
  write_file(o.cfg.out / "extrapolation.csv", csv.str());
  print_extrapolation(levels, values, labels, fits);
  return 0;
}

int extrapolate_levels(Options& o) {
  if (o.levels.size() < 3) {
    std::printf("fewer than 3 levels: extrapolation skipped\n");
    return 0;
  }
  std::vector<LevelSpectrum> spectra;
  for (int l : o.levels) {
    RunConfig c = o.cfg;
    c.level = l;
    spectra.push_back({l, solve(c, cache_for(o)).spectrum.eigenvalues});
  }
  const auto rows = extrapolate(spectra, o.cfg.cluster_tol);
  write_with(o.cfg.out / "extrapolation.csv",
             [&](std::ostream& os) { write_extrapolation_csv(spectra, rows, os); });
  std::vector<std::vector<double>> values;
  std::vector<std::string> labels;
  std::vector<SequenceFit> fits;
  for (const auto& r : rows) {
    labels.push_back(r.size == 1 ? std::to_string(r.start)
                                 : std::to_string(r.start) + "-" + std::to_string(r.end_index()));
    values.push_back(r.values);
    fits.push_back(r.fit);
  }
  print_extrapolation(o.levels, values, labels, fits);
  return 0;
}

int cmd_extrapolate(Options& o) { return o.input.empty() ? extrapolate_levels(o) : extrapolate_table(o); }

int cmd_analyze(Options& o) {
  std::vector<double> ev;
  double area = o.area;
  ClusterSet set;
  if (!o.input.empty()) {
    std::ifstream in(o.input);
    if (!in) throw std::runtime_error("cannot read " + o.input);
    ev = read_spectrum_csv(in);
    if (!(area > 0)) throw std::runtime_error("--area is required with --input");
    set = cluster_multiplicities(ev, o.cfg.cluster_tol);
  } else {
    const Solved s = solve(o.cfg, cache_for(o));
    ev = s.spectrum.eigenvalues;
    area = total_area(s.mesh);
    set = labelled_clusters(s, o.cfg.cluster_tol);
  }
  const CountingData cd = counting_function(ev, area);
  write_with(o.cfg.out / "counting.csv", [&](std::ostream& os) { write_counting_csv(cd, 1000, os); });
  write_with(o.cfg.out / "counting.svg", [&](std::ostream& os) { write_counting_svg(cd, os); });
  write_with(o.cfg.out / "remainder.svg", [&](std::ostream& os) { write_remainder_svg(cd, os); });
  write_with(o.cfg.out / "clusters.csv", [&](std::ostream& os) { write_clusters_csv(set, os); });
  // The final cluster may be cut off by the eigenvalue count.
  const std::size_t complete = set.clusters.empty() ? 0 : set.clusters.size() - 1;
  write_with(o.cfg.out / "multiplicity.svg",
             [&](std::ostream& os) { write_multiplicity_svg(set, complete, os); });
  const MultiplicityStats st = multiplicity_stats(set, complete);
  std::printf("area %.10f, Weyl slope %.6f, fitted slope %.6f\n", area, cd.weyl_slope(), fitted_slope(cd));
  std::printf("%zu complete clusters: multiplicity fractions 1: %.4f  2: %.4f  3: %.4f  (>3: %zu)\n",
              st.clusters, st.fractions[0], st.fractions[1], st.fractions[2], st.other);
  std::printf("motif 3-3-1-1-3 at:");
  for (std::size_t p : find_motif(set)) std::printf(" %zu", p);
  std::printf("\n");
  std::size_t labelled = 0, unclassified = 0;
  for (const auto& c : set.clusters) {
    if (c.irrep.empty() || c.irrep == "truncated") continue;
    ++labelled;
    if (c.irrep == "unclassified") ++unclassified;
  }
  if (labelled) std::printf("irreps: %zu clusters labelled, %zu unclassified\n", labelled, unclassified);
  if (o.levels.size() >= 3) return extrapolate_levels(o);
  if (!o.levels.empty()) std::printf("fewer than 3 levels: extrapolation skipped\n");
  return 0;
}

int cmd_render(Options& o) {
  const ArtifactCache cache = cache_for(o);
  const FaceNet face = build_face(o.cfg.level, o.cfg.normalization);
  const FaceLayout layout = layout_face(face);
  write_with(o.cfg.out / "face_layout.svg", [&](std::ostream& os) { write_layout_svg(layout, os); });
  write_with(o.cfg.out / "face_layout.csv", [&](std::ostream& os) { write_layout_csv(layout, face, os); });
  write_file(o.cfg.out / "face.json", to_json(face).dump(1) + "\n");
  std::size_t top = 0;
  for (std::size_t k : o.indices) top = std::max(top, k + 1);
  RunConfig c = o.cfg;
  c.count = std::max<std::size_t>(top, 1);  // only what is drawn
  const Solved s = solve(c, cache);
  write_with(o.cfg.out / "net.svg", [&](std::ostream& os) { write_net_svg(s.mesh, os); });
  for (std::size_t k : o.indices) {
    const Eigen::VectorXd v = s.spectrum.eigenvectors.col(static_cast<Eigen::Index>(k));
    const std::string stem = "eigenfunction_" + std::to_string(k);
    write_with(o.cfg.out / (stem + ".svg"), [&](std::ostream& os) { write_eigenfunction_svg(s.mesh, v, os); });
    write_with(o.cfg.out / (stem + ".csv"), [&](std::ostream& os) {
      os << "triangle,corner,vertex,x,y,value\n";
      const auto vals = export_eigenfunction(s.mesh, v);
      char buf[128];
      for (std::size_t t = 0; t < vals.size(); ++t)
        for (int i = 0; i < 3; ++i) {
          std::snprintf(buf, sizeof buf, "%zu,%d,%u,%.17g,%.17g,%.17g\n", t, i, s.mesh.triangles[t].v[i],
                        s.mesh.net[t][i].x, s.mesh.net[t][i].y, vals[t][i]);
          os << buf;
        }
    });
    const double lambda = s.spectrum.eigenvalues[k];
    std::printf("eigenfunction %zu: lambda = %.6f\n", k, std::abs(lambda) < 5e-7 ? 0.0 : lambda);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectra of polyhedral surfaces with Sierpinski-gasket curvature"};
  app.require_subcommand(1);
  Options o;

  auto* build = app.add_subcommand("build", "assemble the surface, audit curvature, write mesh and net");
  add_mesh_flags(build, o);

  auto* spectrum = app.add_subcommand("spectrum", "lowest eigenvalues with clusters and irreps");
  add_mesh_flags(spectrum, o);
  add_spectrum_flags(spectrum, o);
  spectrum->add_flag("--matrices", o.matrices, "also write stiffness.mtx and mass.mtx");

  auto* analyze = app.add_subcommand("analyze", "counting function, multiplicities, motifs, irreps");
  add_mesh_flags(analyze, o);
  add_spectrum_flags(analyze, o);
  analyze->add_option("--input", o.input, "spectrum CSV instead of computing one");
  analyze->add_option("--area", o.area, "surface area for --input");
  analyze->add_option("--levels", o.levels, "levels for extrapolation")->delimiter(',');

  auto* extrap = app.add_subcommand("extrapolate", "exponential extrapolation across levels");
  add_mesh_flags(extrap, o);
  add_spectrum_flags(extrap, o);
  extrap->add_option("--levels", o.levels, "comma-separated levels")->delimiter(',');
  extrap->add_option("--input", o.input, "table with levelN columns instead of computing spectra");

  auto* render = app.add_subcommand("render", "face layout, net and eigenfunction heatmaps");
  add_mesh_flags(render, o);
  add_spectrum_flags(render, o);
  render->add_option("--index", o.indices, "eigenfunction indices")->delimiter(',');

  CLI11_PARSE(app, argc, argv);
  try {
    finalize(o);
    if (*build) return cmd_build(o);
    if (*spectrum) return cmd_spectrum(o);
    if (*analyze) return cmd_analyze(o);
    if (*extrap) return cmd_extrapolate(o);
    if (*render) return cmd_render(o);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
