#include "fractal_spectra/eigensolver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <random>
#include <sstream>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>

#include "fractal_spectra/error.hpp"

namespace fractal_spectra {

namespace {

void fix_signs(Eigen::MatrixXd& v) {
  for (Eigen::Index c = 0; c < v.cols(); ++c) {
    const double big = v.col(c).cwiseAbs().maxCoeff();
    for (Eigen::Index r = 0; r < v.rows(); ++r)
      if (std::abs(v(r, c)) > 1e-8 * big) {
        if (v(r, c) < 0) v.col(c) *= -1;
        break;
      }
  }
}

double residual(const OperatorPair& ops, const Eigen::VectorXd& x, double lambda) {
  return (ops.stiffness * x - lambda * (ops.mass * x)).norm() / x.norm();
}

Spectrum solve_dense(const OperatorPair& ops, std::size_t count) {
  const Eigen::MatrixXd k(ops.stiffness), m(ops.mass);
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(k, m);
  if (es.info() != Eigen::Success) throw FactorizationError("dense generalized eigensolver failed");
  Spectrum s;
  s.method = "dense";
  const auto c = static_cast<Eigen::Index>(count);
  s.eigenvectors = es.eigenvectors().leftCols(c);
  s.eigenvalues.assign(es.eigenvalues().data(), es.eigenvalues().data() + c);
  return s;
}

// Makes the columns of q orthonormal in the M inner product. Block
// Cholesky QR applied twice; classical Gram-Schmidt (twice) as a fallback
// when the Gram matrix is too ill-conditioned. Returns false if a column
// collapses.
bool m_orthonormalize(const SparseMatrix& mass, Eigen::MatrixXd& q) {
  bool block = true;
  for (int pass = 0; pass < 2 && block; ++pass) {
    Eigen::MatrixXd g = q.transpose() * (mass * q);
    g = 0.5 * (g + g.transpose());
    Eigen::LLT<Eigen::MatrixXd> llt(g);
    const Eigen::VectorXd d = g.diagonal();
    block = llt.info() == Eigen::Success && d.minCoeff() > 1e-20 * d.maxCoeff();
    if (block) q = llt.matrixU().solve<Eigen::OnTheRight>(q);
  }
  if (block) return q.allFinite();
  for (Eigen::Index j = 0; j < q.cols(); ++j) {
    const double before = std::sqrt(q.col(j).dot(mass * q.col(j)));
    for (int pass = 0; pass < 2 && j > 0; ++pass) {
      const Eigen::VectorXd mq = mass * q.col(j);
      const Eigen::VectorXd h = q.leftCols(j).transpose() * mq;
      q.col(j) -= q.leftCols(j) * h;
    }
    const double after = std::sqrt(q.col(j).dot(mass * q.col(j)));
    if (!(after > 1e-12 * before)) return false;
    q.col(j) /= after;
  }
  return true;
}

Spectrum solve_sparse(const OperatorPair& ops, std::size_t count, const SolverOptions& opt) {
  const Eigen::Index n = static_cast<Eigen::Index>(ops.n);
  const double total_mass = ops.mass.sum();
  const double shift = opt.shift != 0.0 ? opt.shift : -1.0 / total_mass;
  if (!(shift < 0)) throw std::invalid_argument("sparse solver needs a negative shift");
  const SparseMatrix a = ops.stiffness - shift * ops.mass;
  Eigen::SimplicialLDLT<SparseMatrix> ldlt(a);
  if (ldlt.info() != Eigen::Success) throw FactorizationError("LDL^T of K - sigma M failed");

  const std::size_t guard = opt.guard ? opt.guard : std::max<std::size_t>(count, 20);
  const Eigen::Index p = std::min<Eigen::Index>(n, static_cast<Eigen::Index>(count + guard));
  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  Eigen::MatrixXd x(n, p);
  for (Eigen::Index c = 0; c < p; ++c)
    for (Eigen::Index r = 0; r < n; ++r) x(r, c) = c == 0 ? 1.0 : uni(rng);

  Spectrum s;
  s.method = "shift-invert subspace";
  s.shift = shift;
  double worst = 0;
  Eigen::VectorXd theta;
  for (int it = 1; it <= opt.max_iterations; ++it) {
    Eigen::MatrixXd q = ldlt.solve(ops.mass * x);
    if (ldlt.info() != Eigen::Success) throw FactorizationError("back substitution failed");
    if (!m_orthonormalize(ops.mass, q))
      throw SolverError("subspace collapsed", it, std::numeric_limits<double>::infinity());
    s.iterations = it;
    // The Rayleigh-Ritz step dominates for wide blocks; run it on every
    // third iteration only.
    if (it % 3 != 0 && it != opt.max_iterations) {
      x = std::move(q);
      continue;
    }
    const Eigen::MatrixXd kq = ops.stiffness * q;
    Eigen::MatrixXd h = q.transpose() * kq;
    h = 0.5 * (h + h.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> rr(h);
    theta = rr.eigenvalues();
    x = q * rr.eigenvectors();
    worst = 0;
    for (std::size_t i = 0; i < count; ++i)
      worst = std::max(worst, residual(ops, x.col(static_cast<Eigen::Index>(i)), theta(static_cast<Eigen::Index>(i))));
    if (worst <= opt.tolerance) break;
  }
  if (!(worst <= opt.tolerance))
    throw SolverError("shift-invert iteration did not converge", s.iterations, worst);

  const auto c = static_cast<Eigen::Index>(count);
  s.eigenvectors = x.leftCols(c);
  s.eigenvalues.assign(theta.data(), theta.data() + c);

  // Ritz values bound the eigenvalues from above, so more inertia below tau
  // than Ritz values below tau means an eigenvalue was missed.
  const double top = s.eigenvalues.back();
  const double tau = top + 1e-6 * std::max(1.0, std::abs(top));
  const std::size_t ritz_below =
      static_cast<std::size_t>(std::count_if(theta.data(), theta.data() + theta.size(),
                                             [tau](double t) { return t < tau; }));
  const std::size_t inertia = count_below(ops, tau);
  if (inertia > ritz_below)
    throw SolverError("inertia count " + std::to_string(inertia) + " exceeds the " +
                          std::to_string(ritz_below) + " Ritz values found below the top",
                      s.iterations, worst);
  return s;
}

}  // namespace

std::size_t count_below(const OperatorPair& ops, double tau) {
  const SparseMatrix a = ops.stiffness - tau * ops.mass;
  Eigen::SimplicialLDLT<SparseMatrix> ldlt(a);
  if (ldlt.info() != Eigen::Success) throw FactorizationError("LDL^T of K - tau M failed");
  const Eigen::VectorXd d = ldlt.vectorD();
  return static_cast<std::size_t>((d.array() < 0).count());
}

std::vector<double> residual_norms(const OperatorPair& ops, const Spectrum& s) {
  std::vector<double> r;
  for (std::size_t i = 0; i < s.size(); ++i)
    r.push_back(residual(ops, s.eigenvectors.col(static_cast<Eigen::Index>(i)), s.eigenvalues[i]));
  return r;
}

Spectrum solve_lowest(const OperatorPair& ops, std::size_t count, const SolverOptions& opt) {
  if (count < 1 || count >= ops.n)
    throw std::invalid_argument("eigenvalue count must be in [1, n)");
  // A subspace wider than a third of the problem gains nothing over the
  // dense solver.
  const std::size_t width = count + (opt.guard ? opt.guard : std::max<std::size_t>(count, 20));
  const bool dense = ops.n <= opt.dense_limit || 3 * width > ops.n;
  Spectrum s = dense ? solve_dense(ops, count) : solve_sparse(ops, count, opt);
  fix_signs(s.eigenvectors);
  s.residuals = residual_norms(ops, s);
  const double worst = *std::max_element(s.residuals.begin(), s.residuals.end());
  if (!(worst <= opt.tolerance))
    throw SolverError("residual above tolerance", s.iterations, worst);
  return s;
}

std::vector<ConvergenceRow> fem_convergence_probe(const SurfaceMesh& mesh,
                                                  const std::vector<int>& depths,
                                                  std::size_t count, MassKind kind,
                                                  const SolverOptions& opt) {
  std::vector<ConvergenceRow> rows;
  SurfaceMesh cur = mesh;
  for (int d : depths) {
    if (d < cur.depth) throw std::invalid_argument("depths must ascend from the mesh depth");
    cur = subdivide(std::move(cur), d - cur.depth);
    const OperatorPair ops = assemble_matrices(cur, kind);
    rows.push_back({d, cur.vertex_count(), solve_lowest(ops, count, opt).eigenvalues});
  }
  return rows;
}

void write_spectrum_csv(const Spectrum& s, std::ostream& os) {
  os << "index,eigenvalue,residual\n";
  char buf[96];
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double r = i < s.residuals.size() ? s.residuals[i] : 0.0;
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g\n", i, s.eigenvalues[i], r);
    os << buf;
  }
}

std::vector<double> read_spectrum_csv(std::istream& is) {
  std::vector<double> out;
  std::string line;
  std::getline(is, line);
  if (line.rfind("index,eigenvalue", 0) != 0) throw std::invalid_argument("not a spectrum CSV");
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string idx, val;
    std::getline(ss, idx, ',');
    std::getline(ss, val, ',');
    out.push_back(std::stod(val));
  }
  return out;
}

}  // namespace fractal_spectra
