#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include "fractal_spectra/assembly.hpp"
#include "fractal_spectra/eigensolver.hpp"
#include "fractal_spectra/fem.hpp"
#include "fractal_spectra/spectral_analysis.hpp"
#include "fractal_spectra/symmetry.hpp"
#include "reference_tables.hpp"

using namespace fractal_spectra;

namespace {

constexpr double pi = std::numbers::pi;

struct Problem {
  SurfaceMesh mesh;
  OperatorPair ops;
  Spectrum spectrum;
};

Problem solve_level(int level, int depth, std::size_t count) {
  Problem p;
  p.mesh = assemble({level, depth, {Normalization::chain, 2.0}, {}});
  p.ops = assemble_matrices(p.mesh);
  p.spectrum = solve_lowest(p.ops, std::min(count, p.ops.n - 1));
  return p;
}

// Depth 0 has only 70 vertices, too few for 30 complete clusters.
const Problem& level2() {
  static const Problem p = solve_level(2, 1, 120);
  return p;
}

// Two-point Gauss rule per interval between jumps: exact for the linear
// pieces of D and never evaluates D at a discontinuity.
double quadrature_integral(const CountingData& c, double t) {
  std::vector<double> cuts{0.0};
  for (double l : c.eigenvalues)
    if (l > 0 && l < t) cuts.push_back(l);
  cuts.push_back(t);
  const double g = 0.5 / std::sqrt(3.0);
  double s = 0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = cuts[i], h = cuts[i + 1] - a;
    const int parts = 64;
    for (int k = 0; k < parts; ++k) {
      const double lo = a + h * k / parts, w = h / parts, m = lo + 0.5 * w;
      s += 0.5 * w * (c.D(m - g * w) + c.D(m + g * w));
    }
  }
  return s;
}

}  // namespace

TEST_SUITE("spectral_analysis") {

TEST_CASE("counting function") {
  const CountingData c = counting_function({0.0, 1.0, 1.0, 2.5}, 4 * pi);
  CHECK(c.N(0.0) == 1);
  CHECK(c.N(std::nextafter(1.0, 0.0)) == 1);
  CHECK(c.N(1.0) == 3);
  CHECK(c.N(10.0) == 4);
  CHECK(c.weyl_slope() == doctest::Approx(1.0));
  CHECK(c.D(2.0) == doctest::Approx(1.0));
  CHECK_THROWS(c.A(0.0));
  CHECK_THROWS(counting_function({1.0, 0.0}, 1.0));
  // Continuity of A across a jump.
  CHECK(c.A(std::nextafter(1.0, 0.0)) == doctest::Approx(c.A(1.0)).epsilon(1e-12));
}

TEST_CASE("a spectrum on the Weyl line keeps D in [-1, 0]") {
  const double area = 3.0, step = 4 * pi / area;
  std::vector<double> ev{0.0};
  for (int j = 1; j < 50; ++j) ev.push_back(step * (j + 1));
  const CountingData c = counting_function(ev, area);
  for (double t = ev[1]; t < ev.back(); t += step / 37) {
    CHECK(c.D(t) <= 1e-12);
    CHECK(c.D(t) > -1 - 1e-12);
  }
}

TEST_CASE("the running mean is exact") {
  const Problem& p = level2();
  const CountingData c = counting_function(p.spectrum.eigenvalues, total_area(p.mesh));
  for (double t : {0.3, 1.7, 5.0, 12.345, p.spectrum.eigenvalues.back()})
    CHECK(std::abs(c.integral_D(t) - quadrature_integral(c, t)) <= 1e-10 * std::max(1.0, std::abs(c.integral_D(t))));
}

TEST_CASE("counting slope follows the Weyl law at level 4") {
  // One subdivision keeps the discretization error well below the check.
  const Problem p = solve_level(4, 1, 120);
  const CountingData c = counting_function(p.spectrum.eigenvalues, total_area(p.mesh));
  CHECK(std::abs(fitted_slope(c) - c.weyl_slope()) <= 0.1 * c.weyl_slope());
  // Without it, P1 eigenvalues sit above the true ones and N lags.
  const Problem coarse = solve_level(4, 0, 120);
  const CountingData cc = counting_function(coarse.spectrum.eigenvalues, total_area(coarse.mesh));
  CHECK(fitted_slope(cc) < fitted_slope(c));
}

TEST_CASE("clustering") {
  const ClusterSet distinct = cluster_multiplicities({0, 1, 2, 3, 4});
  CHECK(distinct.multiplicities() == std::vector<std::size_t>(5, 1));
  const ClusterSet cs = cluster_multiplicities({0, 1, 1 + 1e-6, 1 + 2e-6, 5, 5, 5, 5, 9});
  CHECK(cs.multiplicities() == std::vector<std::size_t>{1, 3, 4, 1});
  CHECK(cs.flagged == std::vector<std::size_t>{2});
  CHECK(cs.clusters[1].mean == doctest::Approx(1 + 1e-6));
  // Relative gap above 1.
  CHECK(cluster_multiplicities({100, 100.009}).clusters.size() == 1);
  CHECK(cluster_multiplicities({100, 100.011}).clusters.size() == 2);
}

TEST_CASE("level 4 opening multiplicities") {
  const Problem p = solve_level(4, 0, 30);
  const auto mult = cluster_multiplicities(p.spectrum.eigenvalues).multiplicities();
  const std::vector<std::size_t> expected{1, 3, 2, 3, 3, 3, 1};
  REQUIRE(mult.size() >= expected.size());
  CHECK(std::vector<std::size_t>(mult.begin(), mult.begin() + 7) == expected);
}

TEST_CASE("clusters are stable under a finer tolerance") {
  for (int m = 2; m <= 4; ++m) {
    CAPTURE(m);
    const Problem p = solve_level(m, 0, 160);
    const ClusterSet a = cluster_multiplicities(p.spectrum.eigenvalues, 1e-4);
    const ClusterSet b = cluster_multiplicities(p.spectrum.eigenvalues, 5e-5);
    const std::size_t k = std::min<std::size_t>({50, a.clusters.size() - 1, b.clusters.size() - 1});
    for (std::size_t i = 0; i < k; ++i) {
      CHECK(a.clusters[i].start == b.clusters[i].start);
      CHECK(a.clusters[i].size == b.clusters[i].size);
    }
  }
}

TEST_CASE("multiplicity statistics") {
  const ClusterSet cs = cluster_multiplicities({0, 1, 1, 1, 2, 2, 3, 4, 4, 4, 4});
  const MultiplicityStats st = multiplicity_stats(cs, 10);
  CHECK(st.clusters == 5);
  CHECK(st.eigenvalues == 11);
  CHECK(st.cluster_counts == std::array<std::size_t, 3>{2, 1, 1});
  CHECK(st.other == 1);
  CHECK(st.fractions[0] == doctest::Approx(2.0 / 11));
  CHECK(st.fractions[2] == doctest::Approx(3.0 / 11));
}

TEST_CASE("motif search") {
  CHECK(find_motif(std::vector<std::size_t>{1, 3, 1, 2, 1}, {1}) == std::vector<std::size_t>{0, 4, 7});
  CHECK(find_motif(std::vector<std::size_t>{1, 3, 2, 3, 1, 1, 3}).empty());
  CHECK(find_motif(std::vector<std::size_t>{1, 2, 3, 3, 1, 1, 3}) == std::vector<std::size_t>{3});

  const auto rows = load_reference_tables(reference_tables_path());
  std::vector<std::size_t> sizes;
  std::size_t next = 0;
  for (const auto& r : rows) {
    REQUIRE(r.start == next);
    sizes.push_back(r.size());
    next = r.end + 1;
  }
  const auto starts = find_motif(sizes);
  for (std::size_t s : {9u, 38u, 105u, 198u})
    CHECK(std::find(starts.begin(), starts.end(), s) != starts.end());
}

TEST_CASE("motif on the computed spectrum") {
  const Problem p = solve_level(4, 1, 60);
  const auto starts = find_motif(cluster_multiplicities(p.spectrum.eigenvalues));
  CHECK(std::find(starts.begin(), starts.end(), 9u) != starts.end());
}

TEST_CASE("exponential extrapolation") {
  const SequenceFit three = extrapolate_sequence({5, 6, 7}, {8.30, 8.28, 8.27});
  REQUIRE(three.ok);
  CHECK(three.limit == doctest::Approx(8.26).epsilon(1e-9));
  CHECK(three.ratio == doctest::Approx(0.5).epsilon(1e-9));

  const SequenceFit four = extrapolate_sequence({4, 5, 6, 7}, {8.38, 8.30, 8.28, 8.27});
  REQUIRE(four.ok);
  CHECK(std::abs(four.limit - 8.26) <= 0.1);
  CHECK(four.ratio > 0);
  CHECK(four.ratio < 1);
  for (int m = 4; m <= 7; ++m) {
    const double model = four.limit + four.amplitude * std::pow(four.ratio, m);
    const double data = std::array{8.38, 8.30, 8.28, 8.27}[static_cast<std::size_t>(m - 4)];
    CHECK(std::abs(model - data) <= four.residual + 1e-12);
  }

  const SequenceFit flat = extrapolate_sequence({4, 5, 6, 7}, {1.37, 1.37, 1.37, 1.37});
  REQUIRE(flat.ok);
  CHECK(flat.limit == doctest::Approx(1.37));
  CHECK(flat.amplitude == 0.0);

  CHECK_FALSE(extrapolate_sequence({4, 5, 6, 7}, {8.3, 8.2, 8.3, 8.2}).ok);
  CHECK_FALSE(extrapolate_sequence({4, 5, 6}, {1.0, 2.0, 4.0}).ok);
  CHECK_THROWS(extrapolate_sequence({4, 6, 7}, {1.0, 2.0, 3.0}));
}

TEST_CASE("extrapolation aligns cluster ranges") {
  std::vector<LevelSpectrum> levels{
      {4, {0, 1.5, 1.5, 1.5, 4.0, 4.0, 5.0}},
      {5, {0, 1.4, 1.4, 1.4, 3.9, 3.9, 4.9}},
      {6, {0, 1.35, 1.35, 1.35, 3.85, 3.9, 4.8}}};
  const auto rows = extrapolate(levels);
  REQUIRE(rows.size() == 5);
  CHECK(rows[1].start == 1);
  CHECK(rows[1].size == 3);
  CHECK(rows[1].aligned);
  CHECK(rows[1].fit.ok);
  CHECK(rows[1].fit.limit == doctest::Approx(1.3).epsilon(1e-9));
  // The top level splits 4-5, so no range covers it with every level.
  CHECK_FALSE(rows[2].aligned);
  CHECK_FALSE(rows[2].fit.ok);
  std::ostringstream os;
  write_extrapolation_csv(levels, rows, os);
  CHECK(os.str().find("start,end") == 0);
}

TEST_CASE("irreps of the level 2 eigenspaces") {
  const Problem& p = level2();
  const SymmetryAction act = build_symmetry_action(p.mesh);
  const ClusterSet cs = cluster_multiplicities(p.spectrum.eigenvalues);
  REQUIRE(cs.clusters.size() > 30);
  std::set<std::string> singletons;
  for (std::size_t c = 0; c < 30; ++c) {
    const Cluster& cl = cs.clusters[c];
    const Classification k = classify_eigenspace(cl, p.spectrum.eigenvectors, act, p.ops.mass);
    CAPTURE(c);
    CAPTURE(k.label);
    const auto it = std::find_if(kCharacterTable.begin(), kCharacterTable.end(),
                                 [&](const Irrep& r) { return k.label == r.name; });
    REQUIRE(it != kCharacterTable.end());
    CHECK(static_cast<std::size_t>(it->degree) == cl.size);
    CHECK(k.mismatch <= 1e-6);
    if (c == 0) CHECK(k.label == "A1");
    if (cl.size == 2) CHECK(k.label == "E");
    if (cl.size == 1 && c > 0) singletons.insert(k.label);
  }
  CHECK(singletons.count("A1") == 1);
  CHECK(singletons.count("A2") == 1);
}

TEST_CASE("degree-2 eigenfunctions are invariant under the half turns") {
  const Problem& p = level2();
  const SymmetryAction act = build_symmetry_action(p.mesh);
  const ClusterSet cs = cluster_multiplicities(p.spectrum.eigenvalues);
  std::size_t pairs = 0;
  for (std::size_t c = 0; c + 1 < cs.clusters.size(); ++c) {
    const Cluster& cl = cs.clusters[c];
    if (cl.size != 2) continue;
    ++pairs;
    for (std::size_t g = 0; g < act.order(); ++g) {
      if (act.classes[g] != SymmetryClass::half_turn) continue;
      for (std::size_t k = cl.start; k < cl.end(); ++k)
        CHECK(symmetry_residual(p.spectrum.eigenvectors.col(static_cast<Eigen::Index>(k)),
                                act.vertex_map[g], p.ops.mass) <= 1e-6);
    }
  }
  CHECK(pairs >= 3);
}

TEST_CASE("eigenfunctions on the net") {
  const Problem& p = level2();
  const auto constant = export_eigenfunction(p.mesh, p.spectrum.eigenvectors.col(0));
  const double c0 = constant[0][0];
  for (const auto& t : constant)
    for (double v : t) CHECK(v == doctest::Approx(c0).epsilon(1e-8));

  const Eigen::VectorXd v = p.spectrum.eigenvectors.col(5);
  const auto values = export_eigenfunction(p.mesh, v);
  REQUIRE(values.size() == p.mesh.triangles.size());
  for (std::size_t t = 0; t < values.size(); ++t)
    for (int i = 0; i < 3; ++i) CHECK(values[t][i] == v[p.mesh.triangles[t].v[i]]);
  std::ostringstream svg;
  write_eigenfunction_svg(p.mesh, v, svg);
  CHECK(svg.str().find("<svg") != std::string::npos);
}

TEST_CASE("cluster csv") {
  std::ostringstream os;
  write_clusters_csv(cluster_multiplicities({0, 1, 1, 2}), os);
  CHECK(os.str() == "start,end,mean,multiplicity,irrep\n0,0,0,1,\n1,2,1,2,\n3,3,2,1,\n");
}

}  // TEST_SUITE
