#include "fractal_spectra/face_geometry.hpp"

#include <cmath>
#include <deque>
#include <numbers>
#include <stdexcept>

#include "fractal_spectra/error.hpp"
#include "fractal_spectra/svg.hpp"

namespace fractal_spectra {

namespace {

constexpr double kPi = std::numbers::pi;

std::array<int, 2> others(int j) {
  return j == 0 ? std::array<int, 2>{1, 2}
                : (j == 1 ? std::array<int, 2>{0, 2} : std::array<int, 2>{0, 1});
}

// Side of cluster T_u opposite corner j, from corner k to corner l (k < l):
// the upward triangles T_{uv}, v over {k, l}, in binary order.
Chain cluster_chain(const std::vector<TriangleGeom>& up, const Word& u, int j, int m) {
  const auto [k, l] = others(j);
  const int bits = m - u.length();
  const std::size_t count = std::size_t{1} << bits;
  Chain c;
  c.ends = {k, l};
  c.segments.reserve(count);
  c.points.reserve(count + 1);
  for (std::size_t i = 0; i < count; ++i) {
    Word w = u;
    for (int b = bits - 1; b >= 0; --b) w = w.appended((i >> b) & 1u ? l : k);
    const std::size_t idx = w.index();
    c.segments.push_back({idx, j, up[idx].sides[j]});
    if (i == 0) c.points.push_back(corner_lattice(w, k, m));
    c.points.push_back(corner_lattice(w, l, m));
  }
  return c;
}

Chain reversed(Chain c) {
  std::reverse(c.segments.begin(), c.segments.end());
  std::reverse(c.points.begin(), c.points.end());
  return c;
}

std::size_t downward_offset(int generation) { return (ipow3(generation - 1) - 1) / 2; }

void check_close(double a, double b, double rel, const std::string& what) {
  if (std::abs(a - b) > rel * std::max(std::abs(a), std::abs(b)))
    throw GeometryError(what + ": " + std::to_string(a) + " vs " + std::to_string(b));
}

// Positions of a downward triangle's boundary points, counterclockwise from
// corner 0, with their lattice keys.
LayoutPiece downward_piece(const DownwardTriangle& d, std::size_t index) {
  const double L = d.side;
  const std::array<Vec2, 3> c = {Vec2{0, 0}, Vec2{L, 0}, Vec2{L / 2, L * std::sqrt(3.0) / 2}};
  LayoutPiece p;
  p.downward = true;
  p.index = index;
  // Counterclockwise sides: c0->c1 (chain 2), c1->c2 (chain 0), c2->c0 (chain 1 reversed).
  const std::array<std::array<int, 3>, 3> sides = {{{2, 0, 1}, {0, 1, 2}, {1, 2, 0}}};
  for (const auto& [chain, from, to] : sides) {
    const Chain& ch = d.chains[chain];
    const bool forward = ch.ends[0] == from;
    const std::vector<double> t = ch.interior_params();
    p.keys.push_back(d.corners[from]);
    p.points.push_back(c[from]);
    for (std::size_t i = 0; i < t.size(); ++i) {
      const std::size_t q = forward ? i : t.size() - 1 - i;
      const double s = forward ? t[q] : 1.0 - t[q];
      p.keys.push_back(ch.points[q + 1]);
      p.points.push_back(c[from] + s * (c[to] - c[from]));
    }
  }
  return p;
}

LayoutPiece upward_piece(const TriangleGeom& t, std::size_t index, int m) {
  LayoutPiece p;
  p.index = index;
  for (int j = 0; j < 3; ++j) p.keys.push_back(corner_lattice(t.word, j, m));
  p.points = {Vec2{0, 0}, Vec2{t.sides[2], 0},
              t.sides[1] * Vec2{std::cos(t.angles[0]), std::sin(t.angles[0])}};
  return p;
}

std::size_t key_slot(const LayoutPiece& p, const Lattice& key) {
  for (std::size_t i = 0; i < p.keys.size(); ++i)
    if (p.keys[i] == key) return i;
  throw GeometryError("layout piece lacks a shared vertex");
}

// Rigidly moves `p` so that its copies of keys a, b land on pa, pb.
void place(LayoutPiece& p, const Lattice& a, const Lattice& b, Vec2 pa, Vec2 pb) {
  const Vec2 la = p.points[key_slot(p, a)], lb = p.points[key_slot(p, b)];
  check_close(norm(lb - la), norm(pb - pa), 1e-9, "inconsistent placement");
  const double rot = std::atan2((pb - pa).y, (pb - pa).x) - std::atan2((lb - la).y, (lb - la).x);
  const double cs = std::cos(rot), sn = std::sin(rot);
  for (Vec2& q : p.points) {
    const Vec2 d = q - la;
    q = pa + Vec2{cs * d.x - sn * d.y, sn * d.x + cs * d.y};
  }
}

}  // namespace

std::string to_string(Normalization n) {
  return n == Normalization::chain ? "chain" : "straight";
}

Normalization parse_normalization(std::string_view s) {
  if (s == "chain") return Normalization::chain;
  if (s == "straight") return Normalization::straight;
  throw std::invalid_argument("unknown normalization '" + std::string(s) + "'");
}

double Chain::length() const {
  double s = 0;
  for (const auto& seg : segments) s += seg.length;
  return s;
}

std::vector<double> Chain::interior_params() const {
  std::vector<double> t;
  const double total = length();
  double acc = 0;
  for (std::size_t i = 0; i + 1 < segments.size(); ++i) {
    acc += segments[i].length;
    t.push_back(acc / total);
  }
  return t;
}

double DownwardTriangle::area() const { return std::sqrt(3.0) / 4 * side * side; }

std::size_t FaceNet::downward_index(const Word& address) const {
  if (address.length() >= level) throw std::out_of_range("no such downward triangle");
  return downward_offset(address.length() + 1) + address.index();
}

FaceNet solve_sidelengths(const AngleTable& angles, NormalizationSpec norm) {
  if (!(norm.target > 0)) throw std::invalid_argument("normalization target must be positive");
  const int m = angles.level();
  FaceNet net;
  net.level = m;
  net.normalization = norm;

  // Cluster quantities per depth r, in units where the cluster's circumscribed
  // leaf triangles have unit circumdiameter (leaf sides = sin of the angle).
  // chain[r][u][j] is the side of T_u opposite j; mu[r][u][i] rescales child
  // u i so that the downward triangle D_u has unit side.
  std::vector<std::vector<std::array<double, 3>>> chain(m + 1), mu(m);
  chain[m].resize(ipow3(m));
  for (std::size_t w = 0; w < ipow3(m); ++w)
    for (int j = 0; j < 3; ++j) chain[m][w][j] = std::sin(angles.at(w, j));
  for (int r = m - 1; r >= 0; --r) {
    chain[r].resize(ipow3(r));
    mu[r].resize(ipow3(r));
    for (std::size_t u = 0; u < ipow3(r); ++u) {
      for (int i = 0; i < 3; ++i) mu[r][u][i] = 1.0 / chain[r + 1][3 * u + i][i];
      for (int j = 0; j < 3; ++j) {
        const auto [k, l] = others(j);
        chain[r][u][j] = mu[r][u][k] * chain[r + 1][3 * u + k][j] +
                         mu[r][u][l] * chain[r + 1][3 * u + l][j];
      }
    }
  }
  // Absolute scale of each cluster's unit.
  std::vector<std::vector<double>> scale(m + 1);
  scale[0] = {1.0};
  for (int r = 0; r < m; ++r) {
    scale[r + 1].resize(ipow3(r + 1));
    for (std::size_t u = 0; u < ipow3(r); ++u)
      for (int i = 0; i < 3; ++i) scale[r + 1][3 * u + i] = scale[r][u] * mu[r][u][i];
  }

  auto fill = [&](double factor) {
    net.upward.assign(ipow3(m), {});
    for (std::size_t w = 0; w < ipow3(m); ++w) {
      TriangleGeom& t = net.upward[w];
      t.word = Word::from_index(w, m);
      for (int j = 0; j < 3; ++j) {
        t.angles[j] = angles.at(w, j);
        t.sides[j] = factor * scale[m][w] * chain[m][w][j];
      }
      t.area = area_sas(t.sides[0], t.sides[1], t.angles[2]);
    }
    net.downward.clear();
    for (int r = 0; r < m; ++r)
      for (std::size_t u = 0; u < ipow3(r); ++u) {
        DownwardTriangle d;
        d.address = Word::from_index(u, r);
        d.side = factor * scale[r][u];
        for (int j = 0; j < 3; ++j) {
          d.corners[j] = downward_corner_lattice(d.address, j, m);
          d.chains[j] = reversed(cluster_chain(net.upward, d.address.appended(j), j, m));
        }
        net.downward.push_back(std::move(d));
      }
    for (int j = 0; j < 3; ++j) net.boundary[j] = cluster_chain(net.upward, Word(), j, m);
  };

  fill(1.0);
  double factor = norm.target / net.boundary[2].length();
  if (norm.mode == Normalization::straight) factor = norm.target / boundary_chord(net, 2);
  fill(factor);

  // Consistency: every downward triangle is equilateral with chains that end
  // at its own corners, and the face is equilateral in chain length.
  for (const DownwardTriangle& d : net.downward)
    for (int j = 0; j < 3; ++j) {
      const Chain& c = d.chains[j];
      check_close(c.length(), d.side, 1e-10, "downward chain " + d.address.to_string());
      if (c.points.front() != d.corners[c.ends[0]] || c.points.back() != d.corners[c.ends[1]])
        throw GeometryError("downward chain endpoints do not match corners");
    }
  for (int j = 0; j < 3; ++j)
    check_close(net.boundary[j].length(), net.boundary[2].length(), 1e-10, "face boundary");

  for (std::size_t d = 0; d < net.downward.size(); ++d)
    for (int j = 0; j < 3; ++j)
      for (std::size_t p = 0; p < net.downward[d].chains[j].segments.size(); ++p) {
        const auto& s = net.downward[d].chains[j].segments[p];
        net.adjacency.push_back({s.upward, s.edge, static_cast<long>(d), j, p});
      }
  for (int j = 0; j < 3; ++j)
    for (std::size_t p = 0; p < net.boundary[j].segments.size(); ++p) {
      const auto& s = net.boundary[j].segments[p];
      net.adjacency.push_back({s.upward, s.edge, -1, j, p});
    }
  std::sort(net.adjacency.begin(), net.adjacency.end(),
            [](const SharedEdge& a, const SharedEdge& b) {
              return std::pair(a.upward, a.edge) < std::pair(b.upward, b.edge);
            });
  if (net.adjacency.size() != 3 * net.upward.size())
    throw GeometryError("upward edges are not all accounted for");
  return net;
}

FaceNet build_face(int level, NormalizationSpec norm) {
  return solve_sidelengths(angles_for_level(level), norm);
}

double face_area(const FaceNet& net) {
  double a = 0;
  for (const auto& t : net.upward) a += t.area;
  for (const auto& d : net.downward) a += d.area();
  return a;
}

double boundary_chord(const FaceNet& net, int side) {
  const Chain& c = net.boundary[side];
  const auto [k, l] = c.ends;
  Vec2 p{0, 0};
  double heading = 0;
  for (std::size_t i = 0; i < c.segments.size(); ++i) {
    if (i > 0) {
      const double inside = net.upward[c.segments[i - 1].upward].angles[l] +
                            net.upward[c.segments[i].upward].angles[k] + kPi / 3;
      heading += kPi - inside;
    }
    p = p + c.segments[i].length * Vec2{std::cos(heading), std::sin(heading)};
  }
  return norm(p);
}

std::map<Lattice, double> vertex_angle_totals(const FaceNet& net) {
  std::map<Lattice, double> total;
  for (const auto& t : net.upward)
    for (int j = 0; j < 3; ++j) total[corner_lattice(t.word, j, net.level)] += t.angles[j];
  for (const auto& d : net.downward)
    for (int j = 0; j < 3; ++j) {
      total[d.corners[j]] += kPi / 3;
      const auto& pts = d.chains[j].points;
      for (std::size_t i = 1; i + 1 < pts.size(); ++i) total[pts[i]] += kPi;
    }
  return total;
}

FaceLayout layout_face(const FaceNet& net) {
  const std::size_t nu = net.upward.size();
  FaceLayout out;
  for (std::size_t w = 0; w < nu; ++w) out.pieces.push_back(upward_piece(net.upward[w], w, net.level));
  for (std::size_t d = 0; d < net.downward.size(); ++d)
    out.pieces.push_back(downward_piece(net.downward[d], d));

  // Piece graph: upward w <-> downward nu + d.
  std::vector<std::vector<std::size_t>> incident(out.pieces.size());
  for (std::size_t e = 0; e < net.adjacency.size(); ++e) {
    const SharedEdge& s = net.adjacency[e];
    if (s.downward < 0) continue;
    incident[s.upward].push_back(e);
    incident[nu + static_cast<std::size_t>(s.downward)].push_back(e);
  }

  std::vector<char> placed(out.pieces.size(), 0), tree(net.adjacency.size(), 0);
  const std::size_t root = net.downward.empty() ? 0 : nu;
  std::deque<std::size_t> queue{root};
  placed[root] = 1;
  while (!queue.empty()) {
    const std::size_t cur = queue.front();
    queue.pop_front();
    for (std::size_t e : incident[cur]) {
      const SharedEdge& s = net.adjacency[e];
      const std::size_t other =
          cur == s.upward ? nu + static_cast<std::size_t>(s.downward) : s.upward;
      if (placed[other]) continue;
      const auto [k, l] = others(s.edge);
      const Word& w = net.upward[s.upward].word;
      const Lattice a = corner_lattice(w, k, net.level), b = corner_lattice(w, l, net.level);
      const LayoutPiece& here = out.pieces[cur];
      place(out.pieces[other], a, b, here.points[key_slot(here, a)],
            here.points[key_slot(here, b)]);
      placed[other] = 1;
      tree[e] = 1;
      queue.push_back(other);
    }
  }
  for (char p : placed)
    if (!p) throw GeometryError("face adjacency graph is disconnected");

  for (std::size_t e = 0; e < net.adjacency.size(); ++e) {
    const SharedEdge& s = net.adjacency[e];
    if (s.downward < 0 || tree[e]) continue;
    const auto [k, l] = others(s.edge);
    const Word& w = net.upward[s.upward].word;
    const Lattice a = corner_lattice(w, k, net.level), b = corner_lattice(w, l, net.level);
    const LayoutPiece& up = out.pieces[s.upward];
    const LayoutPiece& dn = out.pieces[nu + static_cast<std::size_t>(s.downward)];
    SlitPair sp;
    sp.upward = s.upward;
    sp.edge = s.edge;
    sp.downward = s.downward;
    sp.upward_copy = {up.points[key_slot(up, a)], up.points[key_slot(up, b)]};
    sp.downward_copy = {dn.points[key_slot(dn, a)], dn.points[key_slot(dn, b)]};
    out.slits.push_back(sp);
  }
  return out;
}

std::map<Lattice, double> layout_angle_totals(const FaceLayout& layout) {
  std::map<Lattice, double> total;
  for (const auto& p : layout.pieces) {
    const std::size_t n = p.points.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Vec2 prev = p.points[(i + n - 1) % n] - p.points[i];
      const Vec2 next = p.points[(i + 1) % n] - p.points[i];
      double a = std::atan2(cross(next, prev), dot(next, prev));
      if (a < 0) a += 2 * kPi;
      total[p.keys[i]] += a;
    }
  }
  return total;
}

nlohmann::json to_json(const FaceNet& net) {
  using nlohmann::json;
  json up = json::array(), down = json::array(), adj = json::array();
  for (const auto& t : net.upward)
    up.push_back({{"word", t.word.to_string()}, {"angles", t.angles},
                  {"sides", t.sides}, {"area", t.area}});
  for (const auto& d : net.downward) {
    json chains = json::array();
    for (const auto& c : d.chains) {
      json seg = json::array();
      for (const auto& s : c.segments) seg.push_back(s.length);
      chains.push_back({{"ends", c.ends}, {"segments", seg}});
    }
    down.push_back({{"address", d.address.to_string()}, {"generation", d.generation()},
                    {"side", d.side}, {"chains", chains}});
  }
  for (const auto& s : net.adjacency)
    adj.push_back({{"upward", net.upward[s.upward].word.to_string()},
                   {"edge", s.edge},
                   {"downward", s.downward < 0 ? json(nullptr)
                                               : json(net.downward[s.downward].address.to_string())},
                   {"side", s.side},
                   {"position", s.position}});
  return {{"level", net.level},
          {"normalization", {{"mode", to_string(net.normalization.mode)},
                             {"target", net.normalization.target}}},
          {"side_length", net.side_length()},
          {"area", face_area(net)},
          {"upward", up},
          {"downward", down},
          {"adjacency", adj}};
}

void write_layout_svg(const FaceLayout& layout, std::ostream& os) {
  std::vector<Vec2> all;
  for (const auto& p : layout.pieces) all.insert(all.end(), p.points.begin(), p.points.end());
  auto [lo, hi] = bounding_box(all);
  SvgCanvas c(lo, hi);
  for (const auto& p : layout.pieces)
    c.polygon(p.points, p.downward ? "#ffffff" : "#9fb8d9", "#223", 0.6);
  for (const auto& s : layout.slits) {
    c.line(s.upward_copy[0], s.upward_copy[1], "#c0392b", 1.2);
    c.line(s.downward_copy[0], s.downward_copy[1], "#c0392b", 1.2, "3,2");
  }
  c.write(os);
}

void write_layout_csv(const FaceLayout& layout, const FaceNet& net, std::ostream& os) {
  os << "piece,kind,label,vertex,lattice0,lattice1,lattice2,x,y\n";
  char buf[64];
  for (std::size_t i = 0; i < layout.pieces.size(); ++i) {
    const auto& p = layout.pieces[i];
    const std::string label = p.downward ? net.downward[p.index].address.to_string()
                                         : net.upward[p.index].word.to_string();
    for (std::size_t v = 0; v < p.points.size(); ++v) {
      os << i << ',' << (p.downward ? "downward" : "upward") << ",\"" << label << "\"," << v
         << ',' << p.keys[v][0] << ',' << p.keys[v][1] << ',' << p.keys[v][2];
      std::snprintf(buf, sizeof buf, ",%.17g,%.17g\n", p.points[v].x, p.points[v].y);
      os << buf;
    }
  }
}

}  // namespace fractal_spectra
