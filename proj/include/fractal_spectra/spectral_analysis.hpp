#pragma once

#include <array>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "fractal_spectra/fem.hpp"
#include "fractal_spectra/surface_mesh.hpp"
#include "fractal_spectra/symmetry.hpp"

namespace fractal_spectra {

// Counting function N(t) = #{lambda_j <= t}, its Weyl remainder
// D(t) = N(t) - (A / 4 pi) t and the running mean A(t) = (1/t) int_0^t D.
struct CountingData {
  std::vector<double> eigenvalues;  // ascending
  double area = 0.0;

  std::size_t N(double t) const;
  double D(double t) const;
  double integral_D(double t) const;  // exact, piecewise quadratic
  double A(double t) const;           // t > 0
  double weyl_slope() const;
};

CountingData counting_function(const std::vector<double>& eigenvalues, double area);

// Least-squares slope of N through the origin, sampled at the eigenvalues.
double fitted_slope(const CountingData& c);

// Samples t, N, D, A on a uniform grid over (0, t_max].
void write_counting_csv(const CountingData& c, std::size_t samples, std::ostream& os);
// N(t) against the Weyl line, and D(t) with A(t).
void write_counting_svg(const CountingData& c, std::ostream& os);
void write_remainder_svg(const CountingData& c, std::ostream& os);

struct Cluster {
  std::size_t start = 0;  // index of the first member
  std::size_t size = 0;
  double mean = 0.0;
  std::string irrep;  // empty until classified

  std::size_t end() const { return start + size; }
};

struct ClusterSet {
  double rel_tol = 1e-4;
  std::vector<Cluster> clusters;
  std::vector<std::size_t> flagged;  // clusters larger than 3

  std::vector<std::size_t> multiplicities() const;
};

// Greedy gap clustering: lambda_{i+1} joins the current cluster when
// lambda_{i+1} - lambda_i <= rel_tol * max(1, lambda_i).
ClusterSet cluster_multiplicities(const std::vector<double>& eigenvalues, double rel_tol = 1e-4);

// Fraction of eigenvalues (counted with multiplicity) lying in clusters of
// size 1, 2, 3 among the first `clusters` clusters. Oversized clusters
// are counted in `other`.
struct MultiplicityStats {
  std::size_t clusters = 0;
  std::size_t eigenvalues = 0;
  std::array<std::size_t, 3> cluster_counts{};
  std::array<double, 3> fractions{};
  std::size_t other = 0;
};

MultiplicityStats multiplicity_stats(const ClusterSet& set, std::size_t clusters);

// Eigenvalue indices where a run of consecutive cluster sizes equals motif.
std::vector<std::size_t> find_motif(const std::vector<std::size_t>& multiplicities,
                                    const std::vector<std::size_t>& motif = {3, 3, 1, 1, 3});
std::vector<std::size_t> find_motif(const ClusterSet& set,
                                    const std::vector<std::size_t>& motif = {3, 3, 1, 1, 3});

// lambda(m) = limit + amplitude * ratio^m.
struct SequenceFit {
  bool ok = false;
  double limit = 0.0, amplitude = 0.0, ratio = 0.0;
  double residual = 0.0;  // max |model - data| at the inputs
  std::string note;
};

// Three points: Aitken's delta-squared. Four or more: least squares over all
// three parameters (ratio by bounded 1-D search, the rest linear), started
// from the Aitken ratio of the last three points. Levels must be consecutive.
SequenceFit extrapolate_sequence(const std::vector<int>& levels, const std::vector<double>& values);

struct ExtrapolationRow {
  std::size_t start = 0, size = 0;
  std::vector<double> values;  // cluster mean per level
  SequenceFit fit;
  bool aligned = true;  // every level has a cluster on exactly this range

  std::size_t end_index() const { return start + size - 1; }
};

struct LevelSpectrum {
  int level = 0;
  std::vector<double> eigenvalues;
};

// Clusters of the highest level define the index ranges; each level
// contributes the mean over the range. Ranges some level splits differently
// are reported with aligned = false and no fit.
std::vector<ExtrapolationRow> extrapolate(const std::vector<LevelSpectrum>& levels,
                                          double rel_tol = 1e-4);

void write_extrapolation_csv(const std::vector<LevelSpectrum>& levels,
                             const std::vector<ExtrapolationRow>& rows, std::ostream& os);

struct Classification {
  std::string label;  // irrep name, sum such as "A1+T2", or "unclassified"
  std::array<double, kClassCount> character{};
  double mismatch = 0.0;  // distance of the character from the label's
};

// Character of the symmetry action restricted to the span of the cluster's
// eigenvectors, trace(V^T M P_g V) averaged per class, decomposed against
// the character table.
Classification classify_eigenspace(const Cluster& cluster, const Eigen::MatrixXd& eigenvectors,
                                   const SymmetryAction& action, const SparseMatrix& mass,
                                   double tol = 1e-3);

// The eigenvector carried along by a group element: (P v)[g(i)] = v[i].
Eigen::VectorXd transported(const Eigen::VectorXd& v, const std::vector<std::uint32_t>& map);

// ||P_g v - v||_M / ||v||_M for one element.
double symmetry_residual(const Eigen::VectorXd& v, const std::vector<std::uint32_t>& map,
                         const SparseMatrix& mass);

void write_clusters_csv(const ClusterSet& set, std::ostream& os);
void write_multiplicity_svg(const ClusterSet& set, std::size_t clusters, std::ostream& os);

// Values at the corners of every net triangle.
std::vector<std::array<double, 3>> export_eigenfunction(const SurfaceMesh& mesh,
                                                        const Eigen::VectorXd& v);
void write_eigenfunction_svg(const SurfaceMesh& mesh, const Eigen::VectorXd& v, std::ostream& os);

}  // namespace fractal_spectra
