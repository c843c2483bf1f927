#pragma once

#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "fractal_spectra/fem.hpp"

namespace fractal_spectra {

struct SolverOptions {
  // Problems up to this size use the dense generalized solver.
  std::size_t dense_limit = 1000;
  double tolerance = 1e-8;  // on ||K v - lambda M v|| / ||v||
  int max_iterations = 500;
  // Spectral shift for the sparse path; 0 picks -1 / (total mass).
  double shift = 0.0;
  // Extra subspace vectors beyond the requested count (sparse path).
  std::size_t guard = 0;  // 0 picks max(count, 20)
};

struct Spectrum {
  std::vector<double> eigenvalues;  // ascending
  Eigen::MatrixXd eigenvectors;     // mass-orthonormal columns
  std::vector<double> residuals;
  std::string method;
  double shift = 0.0;
  int iterations = 0;

  std::size_t size() const { return eigenvalues.size(); }
};

// The `count` smallest eigenpairs of K v = lambda M v. Each eigenvector is
// signed so that its first entry of magnitude above 1e-8 max|v| is positive.
// Throws SolverError when not converged, FactorizationError on a failed
// factorization.
Spectrum solve_lowest(const OperatorPair& ops, std::size_t count, const SolverOptions& opt = {});

// Residual norms ||K v - lambda M v|| / ||v|| of every returned pair.
std::vector<double> residual_norms(const OperatorPair& ops, const Spectrum& s);

// Number of eigenvalues below tau, by Sylvester's law of inertia applied to
// an LDL^T factorization of K - tau M.
std::size_t count_below(const OperatorPair& ops, double tau);

struct ConvergenceRow {
  int depth = 0;
  std::size_t vertices = 0;
  std::vector<double> eigenvalues;
};

// Solves the same surface at each subdivision depth (ascending from the
// mesh's own depth).
std::vector<ConvergenceRow> fem_convergence_probe(const SurfaceMesh& mesh,
                                                  const std::vector<int>& depths,
                                                  std::size_t count, MassKind kind = MassKind::consistent,
                                                  const SolverOptions& opt = {});

// index,eigenvalue,residual with 17 significant digits.
void write_spectrum_csv(const Spectrum& s, std::ostream& os);
std::vector<double> read_spectrum_csv(std::istream& is);

}  // namespace fractal_spectra
