#include "fractal_spectra/planar_mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <stdexcept>

#include "fractal_spectra/error.hpp"

namespace fractal_spectra {

namespace {

using LD = long double;

constexpr double kHugFraction = 0.1;

LD orient(Vec2 a, Vec2 b, Vec2 c) {
  return static_cast<LD>(b.x - a.x) * (c.y - a.y) - static_cast<LD>(b.y - a.y) * (c.x - a.x);
}

// Positive when d lies inside the circle through a, b, c (counterclockwise).
LD incircle(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
  const LD ax = static_cast<LD>(a.x) - d.x, ay = static_cast<LD>(a.y) - d.y;
  const LD bx = static_cast<LD>(b.x) - d.x, by = static_cast<LD>(b.y) - d.y;
  const LD cx = static_cast<LD>(c.x) - d.x, cy = static_cast<LD>(c.y) - d.y;
  return (ax * ax + ay * ay) * (bx * cy - cx * by) - (bx * bx + by * by) * (ax * cy - cx * ay) +
         (cx * cx + cy * cy) * (ax * by - bx * ay);
}

double tri_min_angle(Vec2 a, Vec2 b, Vec2 c) {
  const double la = norm(b - c), lb = norm(c - a), lc = norm(a - b);
  return std::min({angle_from_lengths(la, lb, lc), angle_from_lengths(lb, lc, la),
                   angle_from_lengths(lc, la, lb)});
}

double longest_edge(Vec2 a, Vec2 b, Vec2 c) {
  return std::max({norm(b - c), norm(c - a), norm(a - b)});
}

Vec2 circumcenter(Vec2 a, Vec2 b, Vec2 c) {
  const LD bx = static_cast<LD>(b.x) - a.x, by = static_cast<LD>(b.y) - a.y;
  const LD cx = static_cast<LD>(c.x) - a.x, cy = static_cast<LD>(c.y) - a.y;
  const LD d = 2 * (bx * cy - by * cx);
  const LD b2 = bx * bx + by * by, c2 = cx * cx + cy * cy;
  return {static_cast<double>(a.x + (cy * b2 - by * c2) / d),
          static_cast<double>(a.y + (bx * c2 - cx * b2) / d)};
}

using Tri = std::array<int, 3>;
using EdgeKey = std::pair<int, int>;

EdgeKey edge_key(int a, int b) { return a < b ? EdgeKey{a, b} : EdgeKey{b, a}; }

class Refiner {
 public:
  Refiner(std::span<const Vec2> boundary, std::span<const char> splittable,
          const QualityOptions& opt)
      : opt_(opt) {
    const std::size_t n = boundary.size();
    if (n < 3 || splittable.size() != n)
      throw std::invalid_argument("polygon needs >= 3 points and one flag per segment");
    pts_.assign(boundary.begin(), boundary.end());
    parents_.assign(n, {-1, -1});
    split_t_.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      segs_.push_back({static_cast<int>(i), static_cast<int>((i + 1) % n), splittable[i] != 0});
    double diam = 0;
    for (const Vec2& p : pts_) diam = std::max(diam, norm(p - pts_[0]));
    area_eps_ = 1e-13 * diam * diam;
    ear_clip();
    make_delaunay();
  }

  PlanarMesh run() {
    const double theta = opt_.min_angle_deg * std::numbers::pi / 180.0;
    while (pts_.size() < opt_.max_points) {
      int worst = -1;
      double worst_angle = theta;
      for (std::size_t t = 0; t < tris_.size(); ++t) {
        const Tri& tr = tris_[t];
        const double a = tri_min_angle(pts_[tr[0]], pts_[tr[1]], pts_[tr[2]]);
        if (a < worst_angle && !hopeless_.count(sorted(tr))) {
          worst_angle = a;
          worst = static_cast<int>(t);
        }
      }
      if (worst < 0) break;
      const Tri tr = tris_[static_cast<std::size_t>(worst)];
      const Vec2 c = steiner_point(tr, theta);

      std::vector<std::size_t> enc;
      for (std::size_t s = 0; s < segs_.size(); ++s)
        if (segs_[s].splittable && encroaches(c, segs_[s])) enc.push_back(s);
      if (!enc.empty()) {
        split_segments(enc, c);
        continue;
      }
      if (hugs_fixed_segment(c)) {
        hopeless_.insert(sorted(tr));
        continue;
      }
      const int crossed = segment_crossed(tr, c);
      if (crossed >= 0) {
        if (segs_[static_cast<std::size_t>(crossed)].splittable) {
          split_segments({static_cast<std::size_t>(crossed)}, c);
        } else {
          hopeless_.insert(sorted(tr));
        }
        continue;
      }
      if (!too_close(c, tr) && insert(c, -1)) continue;
      hopeless_.insert(sorted(tr));
    }
    PlanarMesh out;
    out.points = pts_;
    out.triangles = tris_;
    out.split_parents = parents_;
    out.split_t = split_t_;
    return out;
  }

 private:
  struct Segment {
    int a, b;
    bool splittable;
  };

  static Tri sorted(Tri t) {
    std::sort(t.begin(), t.end());
    return t;
  }

  // Clips the best-shaped strictly convex ear until a triangle remains.
  void ear_clip() {
    std::vector<int> poly(pts_.size());
    for (std::size_t i = 0; i < poly.size(); ++i) poly[i] = static_cast<int>(i);
    LD area = 0;
    for (std::size_t i = 0; i < poly.size(); ++i)
      area += orient(Vec2{0, 0}, pts_[poly[i]], pts_[poly[(i + 1) % poly.size()]]);
    if (area <= area_eps_) throw GeometryError("polygon is not counterclockwise");
    while (poly.size() > 3) {
      const std::size_t n = poly.size();
      int best = -1;
      double best_q = -1;
      for (std::size_t i = 0; i < n; ++i) {
        const Vec2 a = pts_[poly[(i + n - 1) % n]], b = pts_[poly[i]], c = pts_[poly[(i + 1) % n]];
        const LD ear = orient(a, b, c);
        if (ear <= area_eps_ || area - ear <= area_eps_) continue;
        const double q = tri_min_angle(a, b, c);
        if (q > best_q) {
          best_q = q;
          best = static_cast<int>(i);
        }
      }
      if (best < 0) throw GeometryError("polygon could not be ear-clipped");
      const std::size_t i = static_cast<std::size_t>(best);
      const Tri t = {poly[(i + n - 1) % n], poly[i], poly[(i + 1) % n]};
      area -= orient(pts_[t[0]], pts_[t[1]], pts_[t[2]]);
      tris_.push_back(t);
      poly.erase(poly.begin() + best);
    }
    if (orient(pts_[poly[0]], pts_[poly[1]], pts_[poly[2]]) <= area_eps_)
      throw GeometryError("polygon degenerates during ear clipping");
    tris_.push_back({poly[0], poly[1], poly[2]});
  }

  // Lawson flips until every interior edge is locally Delaunay.
  void make_delaunay() {
    for (int pass = 0; pass < 10000; ++pass) {
      std::map<EdgeKey, std::vector<std::pair<std::size_t, int>>> edges;
      for (std::size_t t = 0; t < tris_.size(); ++t)
        for (int i = 0; i < 3; ++i)
          edges[edge_key(tris_[t][(i + 1) % 3], tris_[t][(i + 2) % 3])].push_back({t, i});
      std::vector<char> touched(tris_.size(), 0);
      bool flipped = false;
      for (const auto& [key, inc] : edges) {
        if (inc.size() != 2) continue;
        const auto [t1, i1] = inc[0];
        const auto [t2, i2] = inc[1];
        if (touched[t1] || touched[t2]) continue;
        const int c = tris_[t1][i1], a = tris_[t1][(i1 + 1) % 3], b = tris_[t1][(i1 + 2) % 3];
        const int d = tris_[t2][i2];
        const double L = longest_edge(pts_[a], pts_[b], pts_[c]);
        if (incircle(pts_[a], pts_[b], pts_[c], pts_[d]) <= 1e-12L * L * L * L * L) continue;
        if (orient(pts_[a], pts_[d], pts_[c]) <= area_eps_ ||
            orient(pts_[d], pts_[b], pts_[c]) <= area_eps_)
          continue;
        tris_[t1] = {a, d, c};
        tris_[t2] = {d, b, c};
        touched[t1] = touched[t2] = 1;
        flipped = true;
      }
      if (!flipped) return;
    }
    throw GeometryError("Delaunay flipping did not terminate");
  }

  // Circumcenter, or the off-center on the shortest edge's bisector when
  // that is closer (fewer points, no needless jumps toward the boundary).
  Vec2 steiner_point(const Tri& t, double theta) const {
    const Vec2 cc = circumcenter(pts_[t[0]], pts_[t[1]], pts_[t[2]]);
    int e = 0;
    double shortest = std::numeric_limits<double>::max();
    for (int i = 0; i < 3; ++i) {
      const double len = norm(pts_[t[(i + 2) % 3]] - pts_[t[(i + 1) % 3]]);
      if (len < shortest) {
        shortest = len;
        e = i;
      }
    }
    const Vec2 p = pts_[t[(e + 1) % 3]], q = pts_[t[(e + 2) % 3]];
    const Vec2 mid = 0.5 * (p + q);
    const double k = 0.475 * std::sqrt((1 + std::cos(theta)) / (1 - std::cos(theta)));
    // Left normal of p->q points into the (counterclockwise) triangle.
    const Vec2 off = mid + k * Vec2{-(q - p).y, (q - p).x};
    return norm(off - mid) < norm(cc - mid) ? off : cc;
  }

  // A point this close to a segment that may not be split would only make a
  // sliver against it.
  bool hugs_fixed_segment(Vec2 p) const {
    for (const Segment& s : segs_) {
      if (s.splittable || !encroaches(p, s)) continue;
      const Vec2 a = pts_[s.a], b = pts_[s.b];
      const double len = norm(b - a);
      if (std::abs(static_cast<double>(orient(a, b, p))) / len < kHugFraction * len) return true;
    }
    return false;
  }

  bool encroaches(Vec2 p, const Segment& s) const {
    const Vec2 a = pts_[s.a], b = pts_[s.b];
    const double len2 = dot(b - a, b - a);
    return dot(a - p, b - p) < -1e-12 * len2;
  }

  // Splittable segments encroached by an existing vertex are halved.
  void split_encroached_segments() {
    for (int guard = 0; guard < 100000; ++guard) {
      std::vector<std::size_t> enc;
      for (std::size_t s = 0; s < segs_.size(); ++s) {
        if (!segs_[s].splittable) continue;
        for (std::size_t v = 0; v < pts_.size(); ++v) {
          if (static_cast<int>(v) == segs_[s].a || static_cast<int>(v) == segs_[s].b) continue;
          if (encroaches(pts_[v], segs_[s])) {
            enc.push_back(s);
            break;
          }
        }
      }
      if (enc.empty() || pts_.size() >= opt_.max_points) return;
      split_segments(enc);
    }
  }

  // Splits at the foot of `toward` (kept away from the ends), or at the
  // midpoint when no target is given.
  void split_segments(std::vector<std::size_t> which, std::optional<Vec2> toward = {}) {
    std::sort(which.rbegin(), which.rend());
    for (std::size_t s : which) {
      const Segment seg = segs_[s];
      const Vec2 a = pts_[seg.a], b = pts_[seg.b];
      double t = 0.5;
      if (toward) t = std::clamp(dot(*toward - a, b - a) / dot(b - a, b - a), 0.3, 0.7);
      const Vec2 at = a + t * (b - a);
      const int before = static_cast<int>(pts_.size());
      if (!insert(at, static_cast<int>(s))) continue;
      parents_.back() = {seg.a, seg.b};
      split_t_.back() = t;
      segs_[s] = {seg.a, before, true};
      segs_.insert(segs_.begin() + static_cast<long>(s) + 1, Segment{before, seg.b, true});
    }
  }

  // First boundary segment crossed walking from the triangle's centroid to p,
  // or -1 when p is inside the domain.
  int segment_crossed(const Tri& t, Vec2 p) const {
    const Vec2 g = (1.0 / 3.0) * (pts_[t[0]] + pts_[t[1]] + pts_[t[2]]);
    int best = -1;
    double best_s = std::numeric_limits<double>::max();
    for (std::size_t s = 0; s < segs_.size(); ++s) {
      const Vec2 a = pts_[segs_[s].a], b = pts_[segs_[s].b];
      if (orient(a, b, p) >= -area_eps_) continue;  // p on the inner side
      const Vec2 d = p - g, e = b - a;
      const double den = cross(d, e);
      if (std::abs(den) < 1e-300) continue;
      const double sp = cross(a - g, e) / den;  // along g->p
      const double se = cross(a - g, d) / den;  // along a->b
      if (se < -1e-12 || se > 1 + 1e-12) continue;
      if (sp < best_s) {
        best_s = sp;
        best = static_cast<int>(s);
      }
    }
    if (best < 0) {
      // Outside but no crossing found: fall back to any violated segment.
      for (std::size_t s = 0; s < segs_.size(); ++s)
        if (orient(pts_[segs_[s].a], pts_[segs_[s].b], p) < -area_eps_) return static_cast<int>(s);
    }
    return best;
  }

  bool too_close(Vec2 p, const Tri& t) const {
    double shortest = std::numeric_limits<double>::max();
    for (int i = 0; i < 3; ++i) shortest = std::min(shortest, norm(pts_[t[i]] - pts_[t[(i + 1) % 3]]));
    for (const Vec2& q : pts_)
      if (norm(q - p) < 1e-6 * shortest) return true;
    return false;
  }

  // Bowyer-Watson insertion; on_segment >= 0 marks a boundary split.
  bool insert(Vec2 p, int on_segment) {
    int seed = -1;
    if (on_segment >= 0) {
      const Segment& s = segs_[static_cast<std::size_t>(on_segment)];
      for (std::size_t t = 0; t < tris_.size() && seed < 0; ++t)
        for (int i = 0; i < 3; ++i)
          if (tris_[t][i] == s.a && tris_[t][(i + 1) % 3] == s.b) seed = static_cast<int>(t);
    } else {
      for (std::size_t t = 0; t < tris_.size(); ++t) {
        const Tri& tr = tris_[t];
        if (orient(pts_[tr[0]], pts_[tr[1]], p) >= -area_eps_ &&
            orient(pts_[tr[1]], pts_[tr[2]], p) >= -area_eps_ &&
            orient(pts_[tr[2]], pts_[tr[0]], p) >= -area_eps_) {
          seed = static_cast<int>(t);
          break;
        }
      }
    }
    if (seed < 0) return false;

    std::vector<char> bad(tris_.size(), 0);
    for (std::size_t t = 0; t < tris_.size(); ++t) {
      const Tri& tr = tris_[t];
      const double L = longest_edge(pts_[tr[0]], pts_[tr[1]], pts_[tr[2]]);
      bad[t] = incircle(pts_[tr[0]], pts_[tr[1]], pts_[tr[2]], p) > 1e-12L * L * L * L * L;
    }
    bad[static_cast<std::size_t>(seed)] = 1;
    // Keep the component of the seed.
    std::map<EdgeKey, std::vector<std::size_t>> edges;
    for (std::size_t t = 0; t < tris_.size(); ++t)
      if (bad[t])
        for (int i = 0; i < 3; ++i) edges[edge_key(tris_[t][i], tris_[t][(i + 1) % 3])].push_back(t);
    std::vector<char> cavity(tris_.size(), 0);
    std::vector<std::size_t> stack{static_cast<std::size_t>(seed)};
    cavity[static_cast<std::size_t>(seed)] = 1;
    while (!stack.empty()) {
      const std::size_t t = stack.back();
      stack.pop_back();
      for (int i = 0; i < 3; ++i)
        for (std::size_t u : edges[edge_key(tris_[t][i], tris_[t][(i + 1) % 3])])
          if (!cavity[u]) {
            cavity[u] = 1;
            stack.push_back(u);
          }
    }
    std::map<EdgeKey, int> count;
    for (std::size_t t = 0; t < tris_.size(); ++t)
      if (cavity[t])
        for (int i = 0; i < 3; ++i) ++count[edge_key(tris_[t][i], tris_[t][(i + 1) % 3])];

    const int id = static_cast<int>(pts_.size());
    pts_.push_back(p);
    std::vector<Tri> fresh;
    for (std::size_t t = 0; t < tris_.size(); ++t) {
      if (!cavity[t]) continue;
      for (int i = 0; i < 3; ++i) {
        const int a = tris_[t][i], b = tris_[t][(i + 1) % 3];
        if (count[edge_key(a, b)] != 1) continue;
        const LD o = orient(pts_[a], pts_[b], p);
        const double len = norm(pts_[b] - pts_[a]);
        if (std::abs(o) <= 1e-12L * len * len) {
          // p on this cavity-boundary edge: legal only for the split segment.
          if (on_segment >= 0) continue;
          pts_.pop_back();
          return false;
        }
        if (o <= 0) {
          pts_.pop_back();
          return false;
        }
        fresh.push_back({a, b, id});
      }
    }
    std::vector<Tri> next;
    next.reserve(tris_.size() + 2);
    for (std::size_t t = 0; t < tris_.size(); ++t)
      if (!cavity[t]) next.push_back(tris_[t]);
    next.insert(next.end(), fresh.begin(), fresh.end());
    tris_ = std::move(next);
    parents_.push_back({-1, -1});
    split_t_.push_back(0.0);
    return true;
  }

  QualityOptions opt_;
  std::vector<Vec2> pts_;
  std::vector<Tri> tris_;
  std::vector<Segment> segs_;
  std::vector<std::array<int, 2>> parents_;
  std::vector<double> split_t_;
  std::set<Tri> hopeless_;
  LD area_eps_ = 0;
};

// ---- equilateral polygons --------------------------------------------------

const std::array<Vec2, 3> kRef = {Vec2{0, 0}, Vec2{1, 0}, Vec2{0.5, std::sqrt(3.0) / 2}};

std::array<int, 2> side_ends(int j) {
  return j == 0 ? std::array<int, 2>{1, 2}
                : (j == 1 ? std::array<int, 2>{0, 2} : std::array<int, 2>{0, 1});
}

struct Label {
  int kind = 0;  // 0 corner, 1 side point, 2 Steiner
  int a = 0, b = 0;
  Bary beta{};
};

Bary label_beta(const Label& l, const std::array<std::vector<double>, 3>& params) {
  Bary b{0, 0, 0};
  if (l.kind == 0) {
    b[l.a] = 1;
  } else if (l.kind == 1) {
    const auto [k, m] = side_ends(l.a);
    const double t = params[l.a][static_cast<std::size_t>(l.b)];
    b[k] = 1 - t;
    b[m] = t;
  } else {
    b = l.beta;
  }
  return b;
}

Label image(const Label& l, const Perm3& p, const std::array<std::size_t, 3>& counts) {
  Label r = l;
  if (l.kind == 0) {
    r.a = p[l.a];
  } else if (l.kind == 1) {
    const auto [k, m] = side_ends(l.a);
    r.a = p[l.a];
    if (p[k] > p[m]) r.b = static_cast<int>(counts[l.a]) - 1 - l.b;
  } else {
    for (int i = 0; i < 3; ++i) r.beta[p[i]] = l.beta[i];
  }
  return r;
}

class Encoder {
 public:
  explicit Encoder(std::array<std::size_t, 3> counts) : counts_(counts) {}

  std::uint32_t id(const Label& l) {
    if (l.kind == 0) return static_cast<std::uint32_t>(l.a);
    if (l.kind == 1) {
      std::size_t off = 3;
      for (int j = 0; j < l.a; ++j) off += counts_[j];
      return static_cast<std::uint32_t>(off + static_cast<std::size_t>(l.b));
    }
    auto it = steiner_.find(l.beta);
    if (it != steiner_.end()) return it->second;
    const std::uint32_t id =
        static_cast<std::uint32_t>(3 + counts_[0] + counts_[1] + counts_[2] + order_.size());
    steiner_.emplace(l.beta, id);
    order_.push_back(l.beta);
    return id;
  }
  const std::vector<Bary>& order() const { return order_; }

 private:
  std::array<std::size_t, 3> counts_;
  std::map<Bary, std::uint32_t> steiner_;
  std::vector<Bary> order_;
};

Label decode(const EquilateralTriangulation& t, std::uint32_t id) {
  if (id < 3) return {0, static_cast<int>(id), 0, {}};
  std::size_t off = 3;
  for (int j = 0; j < 3; ++j) {
    if (id < off + t.side_points[j]) return {1, j, static_cast<int>(id - off), {}};
    off += t.side_points[j];
  }
  return {2, 0, 0, t.steiner[id - off]};
}

double polygon_area(const EquilateralTriangulation& t, const std::vector<Vec2>& pos,
                    std::size_t i) {
  const auto& tr = t.triangles[i];
  return 0.5 * static_cast<double>(orient(pos[tr[0]], pos[tr[1]], pos[tr[2]]));
}

void validate(const EquilateralTriangulation& t, const std::vector<Vec2>& pos) {
  double area = 0;
  for (std::size_t i = 0; i < t.triangles.size(); ++i) {
    const double a = polygon_area(t, pos, i);
    if (!(a > 0)) throw GeometryError("polygon triangulation has an inverted triangle");
    area += a;
  }
  const double full = 0.5 * static_cast<double>(orient(pos[0], pos[1], pos[2]));
  if (std::abs(area - full) > 1e-9 * full)
    throw GeometryError("polygon triangulation does not tile the polygon");
  std::map<EdgeKey, int> count;
  for (const auto& tr : t.triangles)
    for (int i = 0; i < 3; ++i)
      ++count[edge_key(static_cast<int>(tr[i]), static_cast<int>(tr[(i + 1) % 3]))];
  std::size_t boundary = 0;
  for (const auto& [e, c] : count) {
    if (c > 2) throw GeometryError("polygon triangulation is not manifold");
    if (c == 1) ++boundary;
  }
  const std::size_t expected = 3 + t.side_points[0] + t.side_points[1] + t.side_points[2];
  if (boundary != expected) throw GeometryError("polygon triangulation boundary mismatch");
}

void orient_ccw(EquilateralTriangulation& t, const std::vector<Vec2>& pos) {
  for (auto& tr : t.triangles)
    if (orient(pos[tr[0]], pos[tr[1]], pos[tr[2]]) < 0) std::swap(tr[1], tr[2]);
}

// Makes each side's parameters symmetric under the side's own reversal and,
// for full symmetry, equal across sides.
std::array<std::vector<double>, 3> symmetrized(std::array<std::vector<double>, 3> p,
                                               PolygonSymmetry sym) {
  auto mirror = [](std::vector<double>& v) {
    const std::size_t n = v.size();
    std::vector<double> r(n);
    for (std::size_t i = 0; i < n; ++i) r[i] = 0.5 * (v[i] + 1 - v[n - 1 - i]);
    if (n % 2 == 1) r[n / 2] = 0.5;
    v = r;
  };
  auto check = [](const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw GeometryError("side parameters break the symmetry");
    for (std::size_t i = 0; i < a.size(); ++i)
      if (std::abs(a[i] - b[i]) > 1e-8) throw GeometryError("side parameters break the symmetry");
  };
  if (sym == PolygonSymmetry::full) {
    check(p[0], p[1]);
    check(p[0], p[2]);
    mirror(p[2]);
    p[0] = p[1] = p[2];
  } else if (sym == PolygonSymmetry::mirror0) {
    check(p[1], p[2]);
    mirror(p[0]);
    p[1] = p[2];
  }
  return p;
}

}  // namespace

PlanarMesh refine_convex_polygon(std::span<const Vec2> boundary, std::span<const char> splittable,
                                 const QualityOptions& opt) {
  Refiner r(boundary, splittable, opt);
  return r.run();
}

double min_angle_deg(const PlanarMesh& mesh) {
  double a = 180;
  for (const auto& t : mesh.triangles)
    a = std::min(a, tri_min_angle(mesh.points[t[0]], mesh.points[t[1]], mesh.points[t[2]]) *
                        180 / std::numbers::pi);
  return a;
}

EquilateralTriangulation triangulate_equilateral(
    const std::array<std::vector<double>, 3>& side_params_in, PolygonSymmetry sym,
    const QualityOptions& opt) {
  const auto params = symmetrized(side_params_in, sym);
  EquilateralTriangulation out;
  for (int j = 0; j < 3; ++j) out.side_points[j] = params[j].size();
  const auto& n = out.side_points;

  if (n[0] + n[1] + n[2] == 0) {
    out.triangles = {{0, 1, 2}};
    return out;
  }
  if (n[0] == 1 && n[1] == 1 && n[2] == 1) {
    out.triangles = {{0, 5, 4}, {5, 1, 3}, {4, 3, 2}, {5, 3, 4}};
    validate(out, equilateral_positions(out, kRef, params));
    return out;
  }

  // Fundamental domain, counterclockwise, with labels and splittable flags.
  std::vector<Label> labels;
  std::vector<char> split;
  // For splittable segment i: the pair of barycentric components its mirror
  // keeps equal.
  std::vector<std::array<int, 2>> mirror_of;
  auto push = [&](Label l, bool s, std::array<int, 2> m = {-1, -1}) {
    labels.push_back(l);
    split.push_back(s);
    mirror_of.push_back(m);
  };
  std::vector<Perm3> group;
  if (sym == PolygonSymmetry::none) {
    push({0, 0}, false);
    for (std::size_t i = 0; i < n[2]; ++i) push({1, 2, static_cast<int>(i)}, false);
    push({0, 1}, false);
    for (std::size_t i = 0; i < n[0]; ++i) push({1, 0, static_cast<int>(i)}, false);
    push({0, 2}, false);
    for (std::size_t i = n[1]; i-- > 0;) push({1, 1, static_cast<int>(i)}, false);
    group = {kIdentity3};
  } else if (sym == PolygonSymmetry::mirror0) {
    if (n[0] % 2 == 0) throw GeometryError("mirror-symmetric polygon needs a side midpoint");
    push({0, 0}, false);
    for (std::size_t i = 0; i < n[2]; ++i) push({1, 2, static_cast<int>(i)}, false);
    push({0, 1}, false);
    for (std::size_t i = 0; i < n[0] / 2; ++i) push({1, 0, static_cast<int>(i)}, false);
    push({1, 0, static_cast<int>(n[0] / 2)}, true, {1, 2});
    group = {kIdentity3, Perm3{0, 2, 1}};
  } else {
    if (n[2] % 2 == 0) throw GeometryError("symmetric polygon needs side midpoints");
    push({0, 0}, false);
    for (std::size_t i = 0; i < n[2] / 2; ++i) push({1, 2, static_cast<int>(i)}, false);
    push({1, 2, static_cast<int>(n[2] / 2)}, true, {0, 1});
    push({2, 0, 0, {1.0 / 3, 1.0 / 3, 1.0 / 3}}, true, {1, 2});
    group.assign(all_perm3().begin(), all_perm3().end());
  }

  // Barycentric coordinates used for exact splitting: side midpoints on a
  // mirror are exactly one half.
  std::vector<Bary> beta;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    Bary b = label_beta(labels[i], params);
    const std::size_t prev = (i + labels.size() - 1) % labels.size();
    if (labels[i].kind == 1 && (split[i] || split[prev])) {
      const auto [k, m] = side_ends(labels[i].a);
      b = {0, 0, 0};
      b[k] = b[m] = 0.5;
    }
    beta.push_back(b);
  }
  std::vector<Vec2> boundary;
  for (const Bary& b : beta) boundary.push_back(b[0] * kRef[0] + b[1] * kRef[1] + b[2] * kRef[2]);

  PlanarMesh pm = refine_convex_polygon(boundary, split, opt);

  // Labels of the refined points.
  std::vector<Label> all = labels;
  std::vector<Bary> all_beta = beta;
  // Which mirror a split point lies on, inherited from its segment ancestry.
  std::vector<std::array<int, 2>> on_mirror(pm.points.size(), {-1, -1});
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (split[i]) on_mirror[i] = mirror_of[i];
  for (std::size_t v = labels.size(); v < pm.points.size(); ++v) {
    Label l;
    l.kind = 2;
    const auto par = pm.split_parents[v];
    if (par[0] >= 0) {
      const Bary& a = all_beta[static_cast<std::size_t>(par[0])];
      const Bary& b = all_beta[static_cast<std::size_t>(par[1])];
      const double t = pm.split_t[v];
      for (int i = 0; i < 3; ++i) l.beta[i] = (1 - t) * a[i] + t * b[i];
      // Parent a starts the segment; its mirror tag names the segment.
      std::array<int, 2> mir = on_mirror[static_cast<std::size_t>(par[0])];
      if (static_cast<std::size_t>(par[0]) < labels.size()) mir = mirror_of[static_cast<std::size_t>(par[0])];
      if (mir[0] < 0) throw GeometryError("boundary split outside a mirror segment");
      const double avg = 0.5 * (l.beta[mir[0]] + l.beta[mir[1]]);
      l.beta[mir[0]] = l.beta[mir[1]] = avg;
      on_mirror[v] = mir;
    } else {
      const Vec2 p = pm.points[v];
      const double b2 = p.y / kRef[2].y;
      const double b1 = p.x - 0.5 * b2;
      l.beta = {1 - b1 - b2, b1, b2};
    }
    all.push_back(l);
    all_beta.push_back(l.beta);
  }

  Encoder enc(n);
  for (const Perm3& g : group)
    for (const auto& tr : pm.triangles) {
      std::array<std::uint32_t, 3> ids{};
      for (int i = 0; i < 3; ++i) ids[i] = enc.id(image(all[static_cast<std::size_t>(tr[i])], g, n));
      out.triangles.push_back(ids);
    }
  out.steiner = enc.order();
  const auto pos = equilateral_positions(out, kRef, params);
  orient_ccw(out, pos);
  validate(out, pos);
  return out;
}

EquilateralTriangulation permuted(const EquilateralTriangulation& t, const Perm3& p) {
  EquilateralTriangulation out;
  for (int j = 0; j < 3; ++j) out.side_points[p[j]] = t.side_points[j];
  Encoder enc(out.side_points);
  // Steiner points keep their order.
  for (const Bary& b : t.steiner) enc.id(image({2, 0, 0, b}, p, t.side_points));
  for (const auto& tr : t.triangles) {
    std::array<std::uint32_t, 3> ids{};
    for (int i = 0; i < 3; ++i) ids[i] = enc.id(image(decode(t, tr[i]), p, t.side_points));
    if (is_odd(p)) std::swap(ids[1], ids[2]);
    out.triangles.push_back(ids);
  }
  out.steiner = enc.order();
  return out;
}

std::vector<Vec2> equilateral_positions(const EquilateralTriangulation& t,
                                        const std::array<Vec2, 3>& c,
                                        const std::array<std::vector<double>, 3>& params) {
  std::vector<Vec2> pos(c.begin(), c.end());
  for (int j = 0; j < 3; ++j) {
    if (params[j].size() != t.side_points[j])
      throw std::invalid_argument("side parameters do not match the triangulation");
    const auto [k, l] = side_ends(j);
    for (double s : params[j]) pos.push_back(c[k] + s * (c[l] - c[k]));
  }
  for (const Bary& b : t.steiner) pos.push_back(b[0] * c[0] + b[1] * c[1] + b[2] * c[2]);
  return pos;
}

}  // namespace fractal_spectra
