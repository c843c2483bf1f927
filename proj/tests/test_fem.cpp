#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>

#include "fractal_spectra/assembly.hpp"
#include "fractal_spectra/eigensolver.hpp"
#include "fractal_spectra/error.hpp"
#include "fractal_spectra/fem.hpp"
#include "fractal_spectra/spectral_analysis.hpp"
#include "fractal_spectra/symmetry.hpp"
#include "fractal_spectra/torus.hpp"

using namespace fractal_spectra;

namespace {

SurfaceMesh single_element(double a, double b, double c) {
  SurfaceMesh m;
  m.roles.assign(3, VertexRole::steiner);
  m.keys.resize(3);
  m.triangles.push_back({{0, 1, 2}, {a, b, c}});
  m.face.push_back(-1);
  m.net.push_back({});
  return m;
}

double dense(const SparseMatrix& a, int i, int j) { return a.coeff(i, j); }

std::vector<double> lowest(const SurfaceMesh& mesh, std::size_t count) {
  return solve_lowest(assemble_matrices(mesh), count).eigenvalues;
}

}  // namespace

TEST_SUITE("fem") {

TEST_CASE("unit equilateral element") {
  const OperatorPair ops = assemble_matrices(single_element(1, 1, 1));
  const double r3 = std::sqrt(3.0);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      CHECK(dense(ops.stiffness, i, j) == doctest::Approx(i == j ? 1 / r3 : -1 / (2 * r3)).epsilon(1e-14));
      CHECK(dense(ops.mass, i, j) == doctest::Approx(i == j ? r3 / 24 : r3 / 48).epsilon(1e-14));
    }
}

TEST_CASE("lumped mass puts a third of the area on each corner") {
  const OperatorPair ops = assemble_matrices(single_element(3, 4, 5), MassKind::lumped);
  for (int i = 0; i < 3; ++i) CHECK(dense(ops.mass, i, i) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(ops.mass.nonZeros() == 3);
}

TEST_CASE("right triangle stiffness") {
  // Right angle opposite the hypotenuse: that edge carries no coupling.
  const OperatorPair ops = assemble_matrices(single_element(5, 4, 3));
  CHECK(std::abs(dense(ops.stiffness, 1, 2)) < 1e-15);
  CHECK(dense(ops.stiffness, 0, 1) == doctest::Approx(-0.5 * (4.0 / 3.0)).epsilon(1e-14));
  CHECK(dense(ops.stiffness, 0, 2) == doctest::Approx(-0.5 * (3.0 / 4.0)).epsilon(1e-14));
}

TEST_CASE("degenerate elements are rejected") {
  CHECK_THROWS_AS(assemble_matrices(single_element(1, 1, 2)), DegenerateElement);
  CHECK_THROWS_AS(assemble_matrices(single_element(1, 1, 2 - 1e-14)), DegenerateElement);
  CHECK_NOTHROW(assemble_matrices(single_element(1, 1, 2 - 1e-9)));
}

TEST_CASE("row sums vanish and mass integrates the area") {
  for (int m = 0; m <= 4; ++m) {
    const SurfaceMesh mesh = assemble(m, m < 3 ? 1 : 0);
    for (MassKind kind : {MassKind::consistent, MassKind::lumped}) {
      const OperatorPair ops = assemble_matrices(mesh, kind);
      const Eigen::VectorXd ones = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(ops.n));
      CHECK((ops.stiffness * ones).cwiseAbs().maxCoeff() <= 1e-10);
      CHECK(ones.dot(ops.mass * ones) == doctest::Approx(total_area(mesh)).epsilon(1e-10));
      CHECK((SparseMatrix(ops.stiffness.transpose()) - ops.stiffness).norm() == 0.0);
      CHECK((SparseMatrix(ops.mass.transpose()) - ops.mass).norm() == 0.0);
    }
  }
}

TEST_CASE("ground state is the constant function") {
  const SurfaceMesh mesh = assemble(2);
  const OperatorPair ops = assemble_matrices(mesh);
  const Spectrum s = solve_lowest(ops, 5);
  CHECK(std::abs(s.eigenvalues[0]) < 1e-8);
  CHECK(s.eigenvalues[1] > 1e-3);
  const Eigen::VectorXd v = s.eigenvectors.col(0);
  CHECK(v.minCoeff() > 0);
  CHECK(v.maxCoeff() - v.minCoeff() < 1e-8);
  CHECK(v.dot(ops.mass * v) == doctest::Approx(1.0).epsilon(1e-10));
  for (double r : s.residuals) CHECK(r <= 1e-8);
}

TEST_CASE("flat torus matches the analytic spectrum") {
  const double side = 2.0;
  const std::vector<double> exact = torus_eigenvalues(side, 13);
  CHECK(exact[0] == 0.0);
  for (int k = 1; k <= 4; ++k) CHECK(exact[k] == doctest::Approx(std::pow(std::numbers::pi, 2)).epsilon(1e-14));
  const SurfaceMesh mesh = subdivide(flat_torus(side, 6), 3);
  CHECK(audit_mesh(mesh, {0, -1.0, 0, 1e-9}).passed());
  const std::vector<double> ev = lowest(mesh, 13);
  for (std::size_t k = 1; k < 13; ++k) CHECK(std::abs(ev[k] - exact[k]) <= 0.01 * exact[k]);
  const ClusterSet cs = cluster_multiplicities(ev, 1e-6);
  REQUIRE(cs.clusters.size() >= 4);
  CHECK(cs.clusters[1].size == 4);
  CHECK(cs.clusters[2].size == 4);
  CHECK(cs.clusters[3].size == 4);
}

TEST_CASE("torus errors shrink about fourfold per subdivision") {
  const SurfaceMesh base = flat_torus(1.0, 4);
  const auto rows = fem_convergence_probe(base, {0, 1, 2, 3}, 6);
  REQUIRE(rows.size() == 4);
  const double exact = 4 * std::pow(std::numbers::pi, 2);
  std::vector<double> err;
  for (const auto& r : rows) {
    CHECK(std::abs(r.eigenvalues[0]) < 1e-8);
    err.push_back(r.eigenvalues[1] - exact);
  }
  for (std::size_t d = 1; d < err.size(); ++d) {
    CHECK(err[d] > 0);
    CHECK(err[d - 1] / err[d] == doctest::Approx(4.0).epsilon(0.15));
  }
}

TEST_CASE("subdivision never raises an eigenvalue") {
  const auto rows = fem_convergence_probe(assemble(1), {0, 1, 2, 3}, 12);
  for (std::size_t d = 1; d < rows.size(); ++d)
    for (std::size_t k = 1; k < 12; ++k)
      CHECK(rows[d].eigenvalues[k] <= rows[d - 1].eigenvalues[k] * (1 + 1e-10));
}

TEST_CASE("eigenvalues ignore vertex labels") {
  const SurfaceMesh mesh = assemble(3);
  std::vector<std::uint32_t> perm(mesh.vertex_count());
  std::iota(perm.begin(), perm.end(), 0u);
  std::mt19937 rng(7);
  std::shuffle(perm.begin(), perm.end(), rng);
  const auto a = lowest(mesh, 30), b = lowest(relabeled(mesh, perm), 30);
  for (std::size_t k = 1; k < 30; ++k) CHECK(b[k] == doctest::Approx(a[k]).epsilon(1e-8));
}

TEST_CASE("eigenvalues scale as one over length squared") {
  const SurfaceMesh mesh = assemble(3);
  const auto a = lowest(mesh, 30), b = lowest(scaled(mesh, 2.5), 30);
  for (std::size_t k = 1; k < 30; ++k) CHECK(b[k] == doctest::Approx(a[k] / 6.25).epsilon(1e-8));
}

TEST_CASE("sparse and dense solvers agree") {
  const OperatorPair ops = assemble_matrices(assemble(4));
  SolverOptions sparse;
  sparse.dense_limit = 0;
  const Spectrum a = solve_lowest(ops, 16, sparse);
  SolverOptions dense_opt;
  dense_opt.dense_limit = ops.n;
  const Spectrum b = solve_lowest(ops, 16, dense_opt);
  CHECK(a.method != b.method);
  for (std::size_t k = 1; k < 16; ++k) CHECK(a.eigenvalues[k] == doctest::Approx(b.eigenvalues[k]).epsilon(1e-9));
  for (double r : a.residuals) CHECK(r <= 1e-8);
  CHECK(count_below(ops, 0.5 * (a.eigenvalues[15] + a.eigenvalues[14])) == 15);
}

TEST_CASE("level 4 lowest nonzero eigenvalue") {
  const SurfaceMesh mesh = assemble({4, 0, {Normalization::chain, 2.0}, {}});
  const auto ev = lowest(mesh, 8);
  for (std::size_t k = 1; k <= 3; ++k) CHECK(std::abs(ev[k] - 1.37) <= 0.03 * 1.37);
  CHECK(ev[4] - ev[3] > 1.0);
}

TEST_CASE("symmetries map eigenspaces to themselves") {
  const SurfaceMesh mesh = assemble({2, 0, {Normalization::chain, 2.0}, {}});
  const OperatorPair ops = assemble_matrices(mesh);
  const Spectrum s = solve_lowest(ops, 60);
  const SymmetryAction act = build_symmetry_action(mesh);
  const ClusterSet cs = cluster_multiplicities(s.eigenvalues);
  for (std::size_t c = 0; c + 1 < cs.clusters.size(); ++c) {
    const Cluster& cl = cs.clusters[c];
    const auto cols = s.eigenvectors.middleCols(static_cast<Eigen::Index>(cl.start), static_cast<Eigen::Index>(cl.size));
    for (const auto& map : act.vertex_map)
      for (Eigen::Index k = 0; k < cols.cols(); ++k) {
        const Eigen::VectorXd pv = transported(cols.col(k), map);
        const Eigen::VectorXd proj = cols * (cols.transpose() * (ops.mass * pv));
        const Eigen::VectorXd r = pv - proj;
        CHECK(std::sqrt(r.dot(ops.mass * r)) <= 1e-6);
      }
  }
}

TEST_CASE("solver argument checks") {
  const OperatorPair ops = assemble_matrices(assemble(0));
  CHECK_THROWS_AS(solve_lowest(ops, 0), std::invalid_argument);
  CHECK_THROWS_AS(solve_lowest(ops, 6), std::invalid_argument);
  CHECK(solve_lowest(ops, 5).size() == 5);
}

TEST_CASE("exports") {
  const OperatorPair ops = assemble_matrices(assemble(0));
  std::ostringstream mm;
  write_matrix_market(ops.stiffness, mm);
  CHECK(mm.str().rfind("%%MatrixMarket", 0) == 0);
  const Spectrum s = solve_lowest(ops, 5);
  std::stringstream csv;
  write_spectrum_csv(s, csv);
  const auto back = read_spectrum_csv(csv);
  REQUIRE(back.size() == 5);
  for (std::size_t k = 0; k < 5; ++k) CHECK(back[k] == s.eigenvalues[k]);
  CHECK(parse_mass_kind(to_string(MassKind::lumped)) == MassKind::lumped);
}

}  // TEST_SUITE
