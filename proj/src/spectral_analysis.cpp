#include "fractal_spectra/spectral_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "fractal_spectra/svg.hpp"

namespace fractal_spectra {

// ---- counting function ----------------------------------------------------

std::size_t CountingData::N(double t) const {
  return static_cast<std::size_t>(std::upper_bound(eigenvalues.begin(), eigenvalues.end(), t) -
                                  eigenvalues.begin());
}

double CountingData::weyl_slope() const { return area / (4 * std::numbers::pi); }

double CountingData::D(double t) const { return static_cast<double>(N(t)) - weyl_slope() * t; }

double CountingData::integral_D(double t) const {
  // int_0^t N = sum over lambda <= t of (t - lambda).
  double s = 0;
  for (double l : eigenvalues) {
    if (l > t) break;
    s += t - std::max(l, 0.0);
  }
  return s - weyl_slope() * t * t / 2;
}

double CountingData::A(double t) const {
  if (!(t > 0)) throw std::invalid_argument("A(t) needs t > 0");
  return integral_D(t) / t;
}

CountingData counting_function(const std::vector<double>& eigenvalues, double area) {
  if (!std::is_sorted(eigenvalues.begin(), eigenvalues.end()))
    throw std::invalid_argument("eigenvalues must ascend");
  return {eigenvalues, area};
}

double fitted_slope(const CountingData& c) {
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < c.eigenvalues.size(); ++i) {
    const double t = c.eigenvalues[i];
    sxy += t * static_cast<double>(c.N(t));
    sxx += t * t;
  }
  return sxx > 0 ? sxy / sxx : 0.0;
}

void write_counting_csv(const CountingData& c, std::size_t samples, std::ostream& os) {
  os << "t,N,D,A\n";
  if (c.eigenvalues.empty() || samples == 0) return;
  const double top = c.eigenvalues.back();
  char buf[128];
  for (std::size_t i = 1; i <= samples; ++i) {
    const double t = top * static_cast<double>(i) / static_cast<double>(samples);
    std::snprintf(buf, sizeof buf, "%.17g,%zu,%.17g,%.17g\n", t, c.N(t), c.D(t), c.A(t));
    os << buf;
  }
}

void write_counting_svg(const CountingData& c, std::ostream& os) {
  PlotSeries n{"N(t)", {}, "#1f77b4", true}, w{"Weyl term", {}, "#ff7f0e", false};
  const double top = c.eigenvalues.empty() ? 1.0 : c.eigenvalues.back();
  for (std::size_t i = 0; i < c.eigenvalues.size(); ++i)
    n.points.push_back({c.eigenvalues[i], static_cast<double>(i + 1)});
  w.points = {{0, 0}, {top, c.weyl_slope() * top}};
  write_line_plot(os, "Eigenvalue counting function", "t", {n, w});
}

void write_remainder_svg(const CountingData& c, std::ostream& os) {
  PlotSeries d{"D(t)", {}, "#1f77b4", false}, a{"A(t)", {}, "#d62728", false};
  const double top = c.eigenvalues.empty() ? 1.0 : c.eigenvalues.back();
  const std::size_t samples = std::max<std::size_t>(400, 4 * c.eigenvalues.size());
  for (std::size_t i = 1; i <= samples; ++i) {
    const double t = top * static_cast<double>(i) / static_cast<double>(samples);
    d.points.push_back({t, c.D(t)});
    a.points.push_back({t, c.A(t)});
  }
  write_line_plot(os, "Weyl remainder and its average", "t", {d, a});
}

// ---- clusters ----------------------------------------------------------------

std::vector<std::size_t> ClusterSet::multiplicities() const {
  std::vector<std::size_t> m;
  for (const auto& c : clusters) m.push_back(c.size);
  return m;
}

ClusterSet cluster_multiplicities(const std::vector<double>& ev, double rel_tol) {
  if (!(rel_tol > 0)) throw std::invalid_argument("cluster tolerance must be positive");
  ClusterSet set;
  set.rel_tol = rel_tol;
  for (std::size_t i = 0; i < ev.size(); ++i) {
    if (i > 0 && ev[i] - ev[i - 1] <= rel_tol * std::max(1.0, std::abs(ev[i - 1]))) {
      ++set.clusters.back().size;
      continue;
    }
    set.clusters.push_back({i, 1, 0.0, {}});
  }
  for (std::size_t k = 0; k < set.clusters.size(); ++k) {
    Cluster& c = set.clusters[k];
    double s = 0;
    for (std::size_t i = c.start; i < c.end(); ++i) s += ev[i];
    c.mean = s / static_cast<double>(c.size);
    if (c.size > 3) set.flagged.push_back(k);
  }
  return set;
}

MultiplicityStats multiplicity_stats(const ClusterSet& set, std::size_t clusters) {
  MultiplicityStats st;
  st.clusters = std::min(clusters, set.clusters.size());
  for (std::size_t k = 0; k < st.clusters; ++k) {
    const std::size_t m = set.clusters[k].size;
    st.eigenvalues += m;
    if (m >= 1 && m <= 3)
      ++st.cluster_counts[m - 1];
    else
      ++st.other;
  }
  for (int m = 1; m <= 3; ++m)
    st.fractions[m - 1] = st.eigenvalues
                              ? static_cast<double>(m * st.cluster_counts[m - 1]) / st.eigenvalues
                              : 0.0;
  return st;
}

std::vector<std::size_t> find_motif(const std::vector<std::size_t>& mult,
                                    const std::vector<std::size_t>& motif) {
  std::vector<std::size_t> starts;
  if (motif.empty()) return starts;
  std::size_t index = 0;
  for (std::size_t k = 0; k + motif.size() <= mult.size(); index += mult[k], ++k)
    if (std::equal(motif.begin(), motif.end(), mult.begin() + static_cast<std::ptrdiff_t>(k)))
      starts.push_back(index);
  return starts;
}

std::vector<std::size_t> find_motif(const ClusterSet& set, const std::vector<std::size_t>& motif) {
  return find_motif(set.multiplicities(), motif);
}

void write_clusters_csv(const ClusterSet& set, std::ostream& os) {
  os << "start,end,mean,multiplicity,irrep\n";
  char buf[128];
  for (const auto& c : set.clusters) {
    std::snprintf(buf, sizeof buf, "%zu,%zu,%.17g,%zu,", c.start, c.end() - 1, c.mean, c.size);
    os << buf << c.irrep << '\n';
  }
}

void write_multiplicity_svg(const ClusterSet& set, std::size_t clusters, std::ostream& os) {
  const MultiplicityStats st = multiplicity_stats(set, clusters);
  std::vector<double> values(st.cluster_counts.begin(), st.cluster_counts.end());
  values.push_back(static_cast<double>(st.other));
  write_bar_chart(os, "Cluster multiplicities (first " + std::to_string(st.clusters) + " clusters)",
                  {"1", "2", "3", ">3"}, values);
}

// ---- extrapolation -----------------------------------------------------------

namespace {

struct LinearFit {
  double limit = 0, amplitude = 0, sse = 0;
};

LinearFit fit_fixed_ratio(const std::vector<int>& m, const std::vector<double>& y, double rho) {
  // Least squares for y = L + c x with x = rho^m.
  const double n = static_cast<double>(y.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double x = std::pow(rho, m[i]);
    sx += x, sy += y[i], sxx += x * x, sxy += x * y[i];
  }
  LinearFit f;
  const double det = n * sxx - sx * sx;
  f.amplitude = det != 0 ? (n * sxy - sx * sy) / det : 0.0;
  f.limit = (sy - f.amplitude * sx) / n;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double r = f.limit + f.amplitude * std::pow(rho, m[i]) - y[i];
    f.sse += r * r;
  }
  return f;
}

double max_misfit(const std::vector<int>& m, const std::vector<double>& y, const SequenceFit& f) {
  double w = 0;
  for (std::size_t i = 0; i < y.size(); ++i)
    w = std::max(w, std::abs(f.limit + f.amplitude * std::pow(f.ratio, m[i]) - y[i]));
  return w;
}

}  // namespace

SequenceFit extrapolate_sequence(const std::vector<int>& levels, const std::vector<double>& y) {
  SequenceFit f;
  if (levels.size() != y.size()) throw std::invalid_argument("one value per level");
  if (y.size() < 3) {
    f.note = "fewer than 3 levels";
    return f;
  }
  for (std::size_t i = 1; i < levels.size(); ++i)
    if (levels[i] != levels[i - 1] + 1) throw std::invalid_argument("levels must be consecutive");

  const std::size_t n = y.size();
  const double scale = std::max(1.0, std::abs(y.back()));
  bool constant = true;
  for (double v : y) constant = constant && std::abs(v - y.back()) <= 1e-10 * scale;  // below solver precision
  if (constant) {
    f.ok = true;
    f.limit = y.back();
    f.note = "constant";
    return f;
  }
  const double d1 = y[n - 2] - y[n - 3], d2 = y[n - 1] - y[n - 2];
  const double aitken_ratio = d1 != 0 ? d2 / d1 : std::numeric_limits<double>::infinity();
  if (n == 3) {
    if (!(aitken_ratio > 0 && aitken_ratio < 1)) {
      f.note = "not geometrically convergent";
      return f;
    }
    f.ratio = aitken_ratio;
    f.limit = y[2] + d2 * aitken_ratio / (1 - aitken_ratio);
    f.amplitude = (y[2] - f.limit) / std::pow(f.ratio, levels[2]);
    f.ok = true;
    f.note = "aitken";
    f.residual = max_misfit(levels, y, f);
    return f;
  }
  for (std::size_t i = 2; i < n; ++i) {
    const double a = y[i - 1] - y[i - 2], b = y[i] - y[i - 1];
    if (a * b < 0) {
      f.note = "non-monotone";
      return f;
    }
  }
  // The model is linear in (limit, amplitude) for fixed ratio: scan the
  // ratio, then refine the best bracket by golden section.
  const int grid = 1000;
  auto sse = [&](double r) { return fit_fixed_ratio(levels, y, r).sse; };
  double best_r = aitken_ratio > 0 && aitken_ratio < 1 ? aitken_ratio : 0.5;
  double best = sse(best_r);
  for (int k = 1; k < grid; ++k) {
    const double r = static_cast<double>(k) / grid;
    if (const double s = sse(r); s < best) best = s, best_r = r;
  }
  double lo = std::max(1e-9, best_r - 1.0 / grid), hi = std::min(1 - 1e-9, best_r + 1.0 / grid);
  const double g = (std::sqrt(5.0) - 1) / 2;
  double a = hi - g * (hi - lo), b = lo + g * (hi - lo);
  double fa = sse(a), fb = sse(b);
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    if (fa < fb) {
      hi = b, b = a, fb = fa, a = hi - g * (hi - lo), fa = sse(a);
    } else {
      lo = a, a = b, fa = fb, b = lo + g * (hi - lo), fb = sse(b);
    }
  }
  const double r = fa < fb ? a : b;
  if (r > 1 - 1e-3) {
    f.note = "ratio at 1: no geometric convergence";
    return f;
  }
  const LinearFit lf = fit_fixed_ratio(levels, y, r);
  f.ok = true;
  f.ratio = r;
  f.limit = lf.limit;
  f.amplitude = lf.amplitude;
  f.note = "least squares";
  f.residual = max_misfit(levels, y, f);
  return f;
}

std::vector<ExtrapolationRow> extrapolate(const std::vector<LevelSpectrum>& levels, double rel_tol) {
  std::vector<ExtrapolationRow> rows;
  if (levels.empty()) return rows;
  std::vector<ClusterSet> sets;
  std::vector<int> lv;
  for (const auto& l : levels) {
    sets.push_back(cluster_multiplicities(l.eigenvalues, rel_tol));
    lv.push_back(l.level);
  }
  for (const Cluster& c : sets.back().clusters) {
    ExtrapolationRow row;
    row.start = c.start;
    row.size = c.size;
    bool covered = true;
    for (std::size_t k = 0; k < levels.size(); ++k) {
      const auto& ev = levels[k].eigenvalues;
      if (c.end() > ev.size()) {
        covered = false;
        break;
      }
      double s = 0;
      for (std::size_t i = c.start; i < c.end(); ++i) s += ev[i];
      row.values.push_back(s / static_cast<double>(c.size));
      const auto& cl = sets[k].clusters;
      // Intact only if some cluster at this level starts and ends here.
      const bool intact = std::any_of(cl.begin(), cl.end(), [&](const Cluster& q) {
        return q.start == c.start && q.size == c.size;
      });
      row.aligned = row.aligned && intact;
    }
    if (!covered) break;
    if (row.aligned && levels.size() >= 3)
      row.fit = extrapolate_sequence(lv, row.values);
    else
      row.fit.note = levels.size() < 3 ? "fewer than 3 levels" : "multiplicities differ between levels";
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_extrapolation_csv(const std::vector<LevelSpectrum>& levels,
                             const std::vector<ExtrapolationRow>& rows, std::ostream& os) {
  os << "start,end";
  for (const auto& l : levels) os << ",level" << l.level;
  os << ",limit,ratio,residual,note\n";
  char buf[96];
  for (const auto& r : rows) {
    os << r.start << ',' << r.end_index();
    for (double v : r.values) {
      std::snprintf(buf, sizeof buf, ",%.17g", v);
      os << buf;
    }
    if (r.fit.ok) {
      std::snprintf(buf, sizeof buf, ",%.17g,%.17g,%.17g", r.fit.limit, r.fit.ratio, r.fit.residual);
      os << buf;
    } else {
      os << ",,,";
    }
    os << ',' << r.fit.note << '\n';
  }
}

// ---- symmetry classification --------------------------------------------------

Eigen::VectorXd transported(const Eigen::VectorXd& v, const std::vector<std::uint32_t>& map) {
  Eigen::VectorXd w(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) w(map[static_cast<std::size_t>(i)]) = v(i);
  return w;
}

double symmetry_residual(const Eigen::VectorXd& v, const std::vector<std::uint32_t>& map,
                         const SparseMatrix& mass) {
  const Eigen::VectorXd d = transported(v, map) - v;
  return std::sqrt(d.dot(mass * d) / v.dot(mass * v));
}

Classification classify_eigenspace(const Cluster& cluster, const Eigen::MatrixXd& vecs,
                                   const SymmetryAction& action, const SparseMatrix& mass,
                                   double tol) {
  Classification out;
  if (cluster.end() > static_cast<std::size_t>(vecs.cols()))
    throw std::invalid_argument("cluster exceeds the computed eigenvectors");
  const Eigen::MatrixXd v = vecs.middleCols(static_cast<Eigen::Index>(cluster.start),
                                            static_cast<Eigen::Index>(cluster.size));
  const Eigen::MatrixXd mv = mass * v;
  std::array<double, kClassCount> sum{};
  for (std::size_t g = 0; g < action.order(); ++g) {
    double tr = 0;
    for (Eigen::Index k = 0; k < v.cols(); ++k) tr += mv.col(k).dot(transported(v.col(k), action.vertex_map[g]));
    sum[static_cast<int>(action.classes[g])] += tr;
  }
  for (int c = 0; c < kClassCount; ++c) out.character[c] = sum[c] / kClassSizes[c];

  std::array<int, 5> mult{};
  bool integral = true;
  for (std::size_t r = 0; r < kCharacterTable.size(); ++r) {
    double s = 0;
    for (int c = 0; c < kClassCount; ++c)
      s += kClassSizes[c] * out.character[c] * kCharacterTable[r].character[c];
    s /= static_cast<double>(action.order());
    mult[r] = static_cast<int>(std::lround(s));
    integral = integral && std::abs(s - mult[r]) <= tol && mult[r] >= 0;
  }
  std::array<double, kClassCount> rebuilt{};
  for (std::size_t r = 0; r < kCharacterTable.size(); ++r)
    for (int c = 0; c < kClassCount; ++c) rebuilt[c] += mult[r] * kCharacterTable[r].character[c];
  for (int c = 0; c < kClassCount; ++c)
    out.mismatch = std::max(out.mismatch, std::abs(rebuilt[c] - out.character[c]));
  if (!integral || out.mismatch > tol) {
    out.label = "unclassified";
    return out;
  }
  for (std::size_t r = 0; r < kCharacterTable.size(); ++r) {
    if (mult[r] == 0) continue;
    if (!out.label.empty()) out.label += "+";
    if (mult[r] > 1) out.label += std::to_string(mult[r]);
    out.label += kCharacterTable[r].name;
  }
  return out;
}

// ---- eigenfunction export ---------------------------------------------------------

std::vector<std::array<double, 3>> export_eigenfunction(const SurfaceMesh& mesh,
                                                        const Eigen::VectorXd& v) {
  if (static_cast<std::size_t>(v.size()) != mesh.vertex_count())
    throw std::invalid_argument("eigenvector size does not match the mesh");
  std::vector<std::array<double, 3>> out;
  out.reserve(mesh.triangles.size());
  for (const auto& t : mesh.triangles) out.push_back({v(t.v[0]), v(t.v[1]), v(t.v[2])});
  return out;
}

void write_eigenfunction_svg(const SurfaceMesh& mesh, const Eigen::VectorXd& v, std::ostream& os) {
  if (mesh.net.size() != mesh.triangles.size()) throw std::invalid_argument("mesh has no net layout");
  const auto values = export_eigenfunction(mesh, v);
  const double big = std::max(v.cwiseAbs().maxCoeff(), 1e-300);
  std::vector<Vec2> all;
  for (const auto& p : mesh.net) all.insert(all.end(), p.begin(), p.end());
  auto [lo, hi] = bounding_box(all);
  SvgCanvas c(lo, hi, 1000);
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const double mean = (values[t][0] + values[t][1] + values[t][2]) / 3;
    const std::string col = diverging_color(mean / big);
    c.polygon(mesh.net[t], col, col, 0.2);
  }
  c.write(os);
}

}  // namespace fractal_spectra
