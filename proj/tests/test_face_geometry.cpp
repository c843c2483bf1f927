#include <doctest.h>

#include <cmath>
#include <numbers>

#include "fractal_spectra/face_geometry.hpp"

using namespace fractal_spectra;

namespace {

constexpr double pi = std::numbers::pi;

double pow3(int k) { return std::pow(3.0, k); }

bool on_boundary(const Lattice& p) { return p[0] == 0 || p[1] == 0 || p[2] == 0; }
bool is_corner(const Lattice& p, int m) {
  const int n = 1 << m;
  return p[0] == n || p[1] == n || p[2] == n;
}

}  // namespace

TEST_SUITE("face_geometry") {

TEST_CASE("level 0 is a unit equilateral triangle") {
  const FaceNet net = build_face(0);
  REQUIRE(net.upward.size() == 1);
  for (double s : net.upward[0].sides) CHECK(s == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(face_area(net) == doctest::Approx(std::sqrt(3.0) / 4).epsilon(1e-14));
  CHECK(net.downward.empty());
}

TEST_CASE("level 1 chain normalization") {
  const FaceNet net = build_face(1);
  REQUIRE(net.upward.size() == 3);
  REQUIRE(net.downward.size() == 1);
  for (const auto& seg : net.boundary[2].segments) CHECK(seg.length == doctest::Approx(0.5).epsilon(1e-13));

  // Law of sines with base 0.5 between the 2pi/9 angle and the 5pi/9 apex.
  const double d = 0.5 * std::sin(5 * pi / 9) / std::sin(2 * pi / 9);
  CHECK(net.downward[0].side == doctest::Approx(d).epsilon(1e-13));
  CHECK(d == doctest::Approx(0.766044).epsilon(1e-6));

  const double upward = 0.5 * 0.5 * 0.5 * std::sin(5 * pi / 9);
  const double expected = 3 * upward + std::sqrt(3.0) / 4 * d * d;
  CHECK(face_area(net) == doctest::Approx(expected).epsilon(1e-13));
}

TEST_CASE("triangles satisfy the law of sines and Heron") {
  for (int m = 1; m <= 5; ++m) {
    const FaceNet net = build_face(m);
    for (const auto& t : net.upward) {
      CHECK(t.angles[0] + t.angles[1] + t.angles[2] == doctest::Approx(pi).epsilon(1e-13));
      const double r = t.sides[0] / std::sin(t.angles[0]);
      for (int j = 1; j < 3; ++j) CHECK(t.sides[j] / std::sin(t.angles[j]) == doctest::Approx(r).epsilon(1e-12));
      CHECK(area_from_lengths(t.sides[0], t.sides[1], t.sides[2]) == doctest::Approx(t.area).epsilon(1e-11));
    }
  }
}

TEST_CASE("every flat triangle is equilateral in its lining edges") {
  for (int m = 1; m <= 5; ++m) {
    const FaceNet net = build_face(m);
    for (const auto& d : net.downward)
      for (const auto& c : d.chains) {
        double sum = 0;
        for (const auto& s : c.segments) sum += net.upward[s.upward].sides[static_cast<std::size_t>(s.edge)];
        CHECK(std::abs(sum - d.side) <= 1e-10 * d.side);
      }
    // Each adjacency entry points at the segment it claims to be.
    for (const auto& e : net.adjacency) {
      const Chain& c = e.downward < 0 ? net.boundary[static_cast<std::size_t>(e.side)]
                                      : net.downward[static_cast<std::size_t>(e.downward)].chains[static_cast<std::size_t>(e.side)];
      REQUIRE(e.position < c.segments.size());
      CHECK(c.segments[e.position].upward == e.upward);
      CHECK(c.segments[e.position].edge == e.edge);
    }
  }
}

TEST_CASE("boundary sides have equal length") {
  for (int m = 0; m <= 6; ++m) {
    const FaceNet net = build_face(m);
    for (int j = 0; j < 3; ++j)
      CHECK(net.boundary[j].length() == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("vertex angle totals") {
  for (int m = 1; m <= 5; ++m) {
    CAPTURE(m);
    const FaceNet net = build_face(m);
    const double defect = 2 * pi / pow3(m + 1);
    const auto totals = vertex_angle_totals(net);
    const auto measured = layout_angle_totals(layout_face(net));
    REQUIRE(totals.size() == measured.size());
    for (const auto& [p, a] : totals) {
      double expected;
      if (is_corner(p, m)) expected = 2 * pi / 3 - pi / pow3(m + 1);
      else if (on_boundary(p)) expected = pi - defect;
      else expected = 2 * pi - defect;
      CHECK(a == doctest::Approx(expected).epsilon(1e-12));
      CHECK(measured.at(p) == doctest::Approx(expected).epsilon(1e-10));
    }
  }
}

TEST_CASE("layout slits pair edges of equal length") {
  const FaceNet net = build_face(3);
  const FaceLayout layout = layout_face(net);
  CHECK(layout.pieces.size() == net.upward.size() + net.downward.size());
  // Piece graph is connected: a spanning tree leaves E - (P - 1) slits.
  std::size_t shared = 0;
  for (const auto& e : net.adjacency) shared += e.downward >= 0;
  CHECK(layout.slits.size() == shared - (layout.pieces.size() - 1));
  for (const auto& s : layout.slits) {
    const double a = norm(s.upward_copy[1] - s.upward_copy[0]);
    const double b = norm(s.downward_copy[1] - s.downward_copy[0]);
    CHECK(a == doctest::Approx(b).epsilon(1e-12));
    CHECK(a == doctest::Approx(net.upward[s.upward].sides[static_cast<std::size_t>(s.edge)]).epsilon(1e-12));
  }
}

TEST_CASE("the pushed-out level 1 face has more area") {
  CHECK(face_area(build_face(1)) > face_area(build_face(0)));
  CHECK(face_area(build_face(2)) > face_area(build_face(1)));
}

TEST_CASE("scaling the target scales lengths and areas") {
  const FaceNet a = build_face(3, {Normalization::chain, 1.0});
  const FaceNet b = build_face(3, {Normalization::chain, 3.0});
  CHECK(face_area(b) == doctest::Approx(9 * face_area(a)).epsilon(1e-12));
  for (std::size_t w = 0; w < a.upward.size(); ++w)
    for (int j = 0; j < 3; ++j)
      CHECK(b.upward[w].sides[j] == doctest::Approx(3 * a.upward[w].sides[j]).epsilon(1e-12));
}

TEST_CASE("straight normalization pins the chord") {
  for (int m = 1; m <= 4; ++m) {
    const FaceNet net = build_face(m, {Normalization::straight, 2.0});
    for (int j = 0; j < 3; ++j) CHECK(boundary_chord(net, j) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(net.side_length() > 2.0);
  }
}

TEST_CASE("normalization names") {
  CHECK(parse_normalization("chain") == Normalization::chain);
  CHECK(parse_normalization(to_string(Normalization::straight)) == Normalization::straight);
  CHECK_THROWS(parse_normalization("diagonal"));
}

TEST_CASE("json export") {
  const FaceNet net = build_face(2);
  const auto j = to_json(net);
  CHECK(j["level"] == 2);
  CHECK(j["upward"].size() == 9);
  CHECK(j["downward"].size() == 4);
  CHECK(j["area"].get<double>() == doctest::Approx(face_area(net)));
  CHECK(j["normalization"]["mode"] == "chain");
}

}  // TEST_SUITE
