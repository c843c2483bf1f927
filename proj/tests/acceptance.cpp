// One PASS/FAIL line per acceptance criterion. Exit status 1 if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <numeric>
#include <string>
#include <vector>

#include "fractal_spectra/assembly.hpp"
#include "fractal_spectra/btable.hpp"
#include "fractal_spectra/eigensolver.hpp"
#include "fractal_spectra/fem.hpp"
#include "fractal_spectra/spectral_analysis.hpp"
#include "fractal_spectra/symmetry.hpp"
#include "fractal_spectra/torus.hpp"
#include "reference_tables.hpp"

using namespace fractal_spectra;

namespace {

constexpr double pi = std::numbers::pi;
const NormalizationSpec kNorm{Normalization::chain, 2.0};

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
  void note(const std::string& what) { detail += (detail.empty() ? "" : "; ") + what; }
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

double rel(double got, double want) { return std::abs(got - want) / std::abs(want); }

struct Solution {
  SurfaceMesh mesh;
  OperatorPair ops;
  Spectrum spectrum;
  ClusterSet clusters;
};

Solution solve_level(int level, int depth, std::size_t count) {
  Solution s;
  s.mesh = assemble({level, depth, kNorm, {}});
  s.ops = assemble_matrices(s.mesh);
  s.spectrum = solve_lowest(s.ops, count);
  s.clusters = cluster_multiplicities(s.spectrum.eigenvalues);
  return s;
}

// Cluster beginning at eigenvalue index `start`, or nullptr.
const Cluster* cluster_at(const ClusterSet& cs, std::size_t start) {
  for (const auto& c : cs.clusters)
    if (c.start == start) return &c;
  return nullptr;
}

struct Expected {
  std::size_t start, size;
  double value;
};

void check_row(Outcome& out, const ClusterSet& cs, const Expected& e, double tol) {
  const std::string range = std::to_string(e.start) + (e.size > 1 ? "-" + std::to_string(e.start + e.size - 1) : "");
  const Cluster* c = cluster_at(cs, e.start);
  if (!c || c->size != e.size) {
    out.require(false, "no cluster of size " + std::to_string(e.size) + " at " + range);
    return;
  }
  const double r = e.value == 0 ? std::abs(c->mean) : rel(c->mean, e.value);
  const bool ok = e.value == 0 ? r < 1e-8 : r <= tol;
  const std::string msg = range + " " + fmt(e.value == 0 ? "%.1e" : "%.4f", c->mean) + " vs " + fmt("%.2f", e.value) +
                          (e.value == 0 ? "" : " (" + fmt("%+.2f%%", 100 * (c->mean - e.value) / e.value) + ")");
  if (ok) out.note(msg);
  else out.require(false, msg);
}

Outcome criterion1() {
  Outcome out;
  std::size_t total = 0;
  for (int m = 1; m <= 8; ++m) {
    const TheoremReport r = verify_theorem_conditions(build_btable(m));
    for (const auto& c : r.conditions) {
      total += c.violations;
      out.require(c.passed && c.violations == 0, "m=" + std::to_string(m) + " " + c.name);
    }
    for (const char* name : {"sum", "vertex", "corner", "symmetry", "digits"})
      out.require(r[name].passed, std::string("missing ") + name);
  }
  out.note("m=1..8, 5 conditions, " + std::to_string(total) + " violations");
  return out;
}

Outcome criterion2() {
  Outcome out;
  const BTable t = build_btable(3);
  const struct { const char* w; int j; std::int64_t b; } want[] = {
      {"000", 0, 27}, {"001", 0, 12}, {"010", 0, 9}, {"011", 0, 3}, {"011", 1, 0}, {"022", 2, 0}};
  for (const auto& e : want) {
    const std::int64_t got = t(Word::from_string(e.w), e.j);
    const std::string s = std::string("b(") + e.w + "," + std::to_string(e.j) + ")=" + std::to_string(got);
    if (got == e.b) out.note(s);
    else out.require(false, s + " expected " + std::to_string(e.b));
  }
  return out;
}

Outcome criterion3() {
  Outcome out;
  for (int m = 0; m <= 4; ++m) {
    const SurfaceMesh mesh = assemble({m, 0, kNorm, {}});
    const auto deficit = curvature_audit(mesh);
    const double expected = 2 * pi / std::pow(3.0, m + 1);
    std::size_t cones = 0;
    double worst = 0;
    for (std::size_t v = 0; v < deficit.size(); ++v)
      if (mesh.roles[v] == VertexRole::cone) {
        ++cones;
        worst = std::max(worst, std::abs(deficit[v] - expected));
      } else {
        out.require(std::abs(deficit[v]) <= 1e-9, "flat vertex with deficit at m=" + std::to_string(m));
      }
    const double sum = std::accumulate(deficit.begin(), deficit.end(), 0.0);
    const std::size_t want = 2 * static_cast<std::size_t>(std::pow(3, m + 1));
    out.require(worst <= 1e-9, "m=" + std::to_string(m) + " cone error " + fmt("%.2e", worst));
    out.require(cones == want, "m=" + std::to_string(m) + " " + std::to_string(cones) + " cones");
    out.require(std::abs(sum - 4 * pi) <= 1e-8, "m=" + std::to_string(m) + " sum " + fmt("%.12f", sum / pi) + " pi");
    out.note("m=" + std::to_string(m) + ": " + std::to_string(cones) + " cones, err " + fmt("%.1e", worst));
  }
  return out;
}

Outcome criterion4() {
  Outcome out;
  const double side = 2.0;
  const SurfaceMesh mesh = subdivide(flat_torus(side, 6), 3);
  const OperatorPair ops = assemble_matrices(mesh);
  const Spectrum s = solve_lowest(ops, 13);
  const auto exact = torus_eigenvalues(side, 13);
  double worst = 0;
  for (std::size_t k = 1; k <= 10; ++k) worst = std::max(worst, rel(s.eigenvalues[k], exact[k]));
  out.require(worst <= 0.01, "max relative error " + fmt("%.4f", worst));
  const auto got = cluster_multiplicities(s.eigenvalues).multiplicities();
  const auto want = cluster_multiplicities(exact, 1e-12).multiplicities();
  out.require(got == want, "multiplicities differ from the analytic spectrum");
  out.note(std::to_string(ops.n) + " vertices, max error " + fmt("%.2f%%", 100 * worst) + ", multiplicities " +
           std::to_string(got[1]) + "," + std::to_string(got[2]) + "," + std::to_string(got[3]));
  return out;
}

Outcome criterion5(const Solution& s4) {
  Outcome out;
  for (const Expected& e : {Expected{0, 1, 0.0}, {1, 3, 1.37}, {4, 2, 3.93}, {6, 3, 4.37}, {9, 3, 8.38}, {15, 1, 9.41}})
    check_row(out, s4.clusters, e, 0.03);
  return out;
}

Outcome criterion6(const Solution& s5) {
  Outcome out;
  for (const Expected& e : {Expected{1, 3, 1.37}, {4, 2, 3.92}, {15, 1, 9.34}}) check_row(out, s5.clusters, e, 0.03);
  return out;
}

Outcome criterion7(const Solution& s5) {
  Outcome out;
  const std::size_t complete = s5.clusters.clusters.size() - 1;  // the last may be truncated
  if (complete < 111) {
    out.require(false, "only " + std::to_string(complete) + " complete clusters");
    return out;
  }
  const MultiplicityStats st = multiplicity_stats(s5.clusters, 111);
  const double want[3] = {1.0 / 12, 1.0 / 6, 3.0 / 4};
  for (int k = 0; k < 3; ++k)
    out.require(std::abs(st.fractions[k] - want[k]) <= 0.05, "fraction " + std::to_string(k + 1) + " off");
  out.require(st.other == 0, std::to_string(st.other) + " oversized clusters");
  out.note("level 5, 111 clusters (" + std::to_string(st.eigenvalues) + " eigenvalues): " +
           fmt("%.4f", st.fractions[0]) + " / " + fmt("%.4f", st.fractions[1]) + " / " + fmt("%.4f", st.fractions[2]));
  return out;
}

std::string join(const std::vector<std::size_t>& v) {
  std::string s = "{";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s + "}";
}

Outcome criterion8(const Solution& s4) {
  Outcome out;
  std::vector<std::size_t> sizes;
  for (const auto& r : load_reference_tables(reference_tables_path())) sizes.push_back(r.size());
  const auto tabulated = find_motif(sizes);
  out.require(tabulated == std::vector<std::size_t>{9, 38, 105, 198}, "reference table motif " + join(tabulated));
  out.note("reference tables " + join(tabulated));

  const auto ours = find_motif(s4.clusters);
  const bool at9 = std::find(ours.begin(), ours.end(), 9u) != ours.end();
  out.require(at9, "level 4 depth 0 motif starts " + join(ours));
  if (!at9) {
    std::string m;
    for (std::size_t c = 0; c < 9 && c < s4.clusters.clusters.size(); ++c)
      m += (c ? "," : "") + std::to_string(s4.clusters.clusters[c].size);
    out.note("level 4 depth 0 cluster sizes " + m);
    const Solution fine = solve_level(4, 1, 60);
    out.note("with one subdivision the motif starts at " + join(find_motif(fine.clusters)));
  }
  return out;
}

Outcome criterion9() {
  Outcome out;
  const auto rows = load_reference_tables(reference_tables_path());
  const struct { std::size_t start, end; double extrap; } want[] = {{1, 3, 1.37}, {9, 11, 8.26}, {25, 27, 20.71}};
  for (const auto& w : want) {
    const auto it = std::find_if(rows.begin(), rows.end(),
                                 [&](const TableRow& r) { return r.start == w.start && r.end == w.end; });
    if (it == rows.end()) {
      out.require(false, "row missing");
      continue;
    }
    const SequenceFit f = extrapolate_sequence({4, 5, 6, 7}, std::vector<double>(it->value.begin(), it->value.end()));
    const std::string label = std::to_string(w.start) + "-" + std::to_string(w.end) + " " +
                              (f.ok ? fmt("%.3f", f.limit) : std::string("no fit")) + " vs " + fmt("%.2f", w.extrap);
    if (f.ok && std::abs(f.limit - w.extrap) <= 0.1) out.note(label);
    else out.require(false, label);
  }
  return out;
}

Outcome criterion10() {
  Outcome out;
  double row = 0, mass = 0;
  for (int m = 0; m <= 4; ++m) {
    const SurfaceMesh mesh = assemble({m, 0, kNorm, {}});
    const OperatorPair ops = assemble_matrices(mesh);
    const Eigen::VectorXd one = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(ops.n));
    row = std::max(row, (ops.stiffness * one).cwiseAbs().maxCoeff());
    mass = std::max(mass, rel(one.dot(ops.mass * one), total_area(mesh)));
    const SymmetryAction act = build_symmetry_action(mesh);
    out.require(act.order() == 24 && relations_hold(act), "group at m=" + std::to_string(m));
  }
  out.require(row <= 1e-10, "row sum " + fmt("%.1e", row));
  out.require(mass <= 1e-10, "mass " + fmt("%.1e", mass));

  const SurfaceMesh m3 = assemble({3, 0, kNorm, {}});
  const Spectrum a = solve_lowest(assemble_matrices(m3), 40);
  const Spectrum b = solve_lowest(assemble_matrices(scaled(m3, 1.7)), 40);
  double scale = 0;
  for (std::size_t k = 1; k < 40; ++k) scale = std::max(scale, rel(b.eigenvalues[k] * 1.7 * 1.7, a.eigenvalues[k]));
  out.require(scale <= 1e-8, "scaling " + fmt("%.1e", scale));

  const SurfaceMesh m1 = assemble({1, 0, kNorm, {}});
  const Spectrum c = solve_lowest(assemble_matrices(m1), 17);
  const Spectrum d = solve_lowest(assemble_matrices(subdivide(m1)), 17);
  std::size_t raised = 0;
  for (std::size_t k = 1; k < 17; ++k) raised += d.eigenvalues[k] > c.eigenvalues[k] * (1 + 1e-12);
  out.require(raised == 0, std::to_string(raised) + " eigenvalues rose under subdivision");
  out.note("row sum " + fmt("%.1e", row) + ", mass " + fmt("%.1e", mass) + ", scaling " + fmt("%.1e", scale) +
           ", |G|=24 with relations, monotone at m=1");
  return out;
}

}  // namespace

int main() {
  using clock = std::chrono::steady_clock;
  int failures = 0;
  // `setup_s` is time already spent on a shared solve.
  auto report = [&](int n, const char* what, double limit_s, const std::function<Outcome()>& f,
                    double setup_s = 0) {
    const auto t0 = clock::now();
    Outcome o;
    try {
      o = f();
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    const double secs = setup_s + std::chrono::duration<double>(clock::now() - t0).count();
    if (limit_s > 0 && secs > limit_s) o.require(false, "took " + fmt("%.1f", secs) + " s");
    failures += !o.pass;
    std::printf("criterion %2d %s  %s [%.1f s]: %s\n", n, o.pass ? "PASS" : "FAIL", what, secs, o.detail.c_str());
    std::fflush(stdout);
  };

  report(1, "b-table conditions", 10, criterion1);
  report(2, "printed b-values", 0, criterion2);
  report(3, "curvature", 60, criterion3);
  report(4, "torus oracle", 60, criterion4);

  Solution s4, s5;
  double t4 = 0, t5 = 0;
  {
    const auto t0 = clock::now();
    s4 = solve_level(4, 0, 120);
    t4 = std::chrono::duration<double>(clock::now() - t0).count();
    const auto t1 = clock::now();
    s5 = solve_level(5, 0, 330);
    t5 = std::chrono::duration<double>(clock::now() - t1).count();
  }
  report(5, "level 4 spectrum", 300, [&] { return criterion5(s4); }, t4);
  report(6, "level 5 spectrum", 1200, [&] { return criterion6(s5); }, t5);
  report(7, "multiplicity statistics", 0, [&] { return criterion7(s5); });
  report(8, "motif", 0, [&] { return criterion8(s4); });
  report(9, "extrapolation", 0, criterion9);
  report(10, "property suites", 0, criterion10);
  std::printf("%d of 10 criteria failed\n", failures);
  return failures ? 1 : 0;
}
