#include <doctest.h>

#include <algorithm>
#include <numbers>
#include <set>

#include "sdp/error.hpp"
#include "support.hpp"

using namespace sdp;
using geometry::Barycentric;
using geometry::StatePoint;
using std::numbers::pi;

namespace {

geometry::Simplex unit_simplex() { return geometry::Simplex({0, 1, 2}, {StatePoint(0, 0), StatePoint(1, 0), StatePoint(0, 1)}); }

std::set<std::array<int, 3>> sorted_simplices(const geometry::Triangulation& t) {
  std::set<std::array<int, 3>> out;
  for (const auto& s : t.simplices()) {
    auto ids = s.vertex_ids();
    std::sort(ids.begin(), ids.end());
    out.insert(ids);
  }
  return out;
}

}  // namespace

TEST_SUITE("geometry") {

TEST_CASE("barycentric coordinates of vertices, centroid and an interior point") {
  const auto s = unit_simplex();
  CHECK((s.to_barycentric(StatePoint(0, 0)) - Barycentric(1, 0, 0)).norm() < 1e-14);
  CHECK((s.to_barycentric(s.centroid()) - Barycentric(1.0 / 3, 1.0 / 3, 1.0 / 3)).norm() < 1e-14);
  const Barycentric b = geometry::cartesian_to_barycentric(s, StatePoint(0.25, 0.5));
  CHECK(b[0] == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(b[1] == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(b[2] == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("vertices round-trip to unit coordinates") {
  const geometry::Simplex s({3, 8, 4}, {StatePoint(-pi, 0), StatePoint(pi / 2, -2 * pi), StatePoint(0, 2 * pi)}, 4 * pi);
  for (int i = 0; i < 3; ++i) {
    const Barycentric b = s.to_barycentric(s.vertex(i));
    CHECK((b - Barycentric::Unit(i)).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("degenerate simplex is rejected at construction") {
  CHECK_THROWS_AS(geometry::Simplex({0, 1, 2}, {StatePoint(0, 0), StatePoint(1, 1), StatePoint(2, 2)}),
                  InvalidTriangulation);
}

TEST_CASE("round trip holds for random in-simplex points") {
  test::Gen g(11);
  const auto mesh = test::pendulum_mesh();
  for (int k = 0; k < 1000; ++k) {
    const auto& s = mesh->simplex(g.integer(0, 31));
    const Barycentric b = g.barycentric();
    const StatePoint x = geometry::barycentric_to_cartesian(s, b);
    const Barycentric b2 = geometry::cartesian_to_barycentric(s, x);
    CHECK(std::abs(b2.sum() - 1) < 1e-10);
    const StatePoint x2 = geometry::barycentric_to_cartesian(s, b2);
    CHECK((x2 - x).norm() <= 1e-9 * std::max(1.0, x.norm()));
  }
}

TEST_CASE("pendulum grid has 25 vertices and 32 triangles") {
  const auto t = geometry::pendulum_triangulation();
  CHECK(t.vertices().size() == 25);
  CHECK(t.size() == 32);
  CHECK(t.covers_bounds());
}

TEST_CASE("pendulum grid reproduces the published triangle set") {
  // Vertex id = 5 * (thetadot index) + (theta index).
  const std::set<std::array<int, 3>> expected = {
      {0, 1, 6},    {0, 5, 6},    {1, 2, 6},    {2, 3, 8},    {2, 6, 7},    {2, 7, 8},    {3, 4, 8},
      {4, 8, 9},    {5, 6, 10},   {6, 7, 12},   {6, 10, 11},  {6, 11, 12},  {7, 8, 12},   {8, 9, 14},
      {8, 12, 13},  {8, 13, 14},  {10, 11, 16}, {10, 15, 16}, {11, 12, 16}, {12, 13, 18}, {12, 16, 17},
      {12, 17, 18}, {13, 14, 18}, {14, 18, 19}, {15, 16, 20}, {16, 17, 22}, {16, 20, 21}, {16, 21, 22},
      {17, 18, 22}, {18, 19, 24}, {18, 22, 23}, {18, 23, 24}};
  const auto t = geometry::pendulum_triangulation();
  CHECK(sorted_simplices(t) == expected);
  for (int i = 0; i < 25; ++i) {
    CHECK(t.vertices()[i].x() == doctest::Approx(-pi + (i % 5) * pi / 2));
    CHECK(t.vertices()[i].y() == doctest::Approx(-2 * pi + (i / 5) * pi));
  }
}

TEST_CASE("one cell gives two simplices") {
  const auto t = test::grid_mesh(2, 2);
  CHECK(t->size() == 2);
}

TEST_CASE("3 x 2 grid mirrors its diagonals across the center column") {
  const auto t = test::grid_mesh(3, 2);
  REQUIRE(t->size() == 4);
  // Both cells meet the middle top vertex (id 4) on their diagonal.
  const std::set<std::array<int, 3>> expected = {{0, 1, 4}, {0, 3, 4}, {1, 2, 4}, {2, 4, 5}};
  CHECK(sorted_simplices(*t) == expected);
  const auto center = t->bounds().center();
  for (const auto& s : t->simplices()) {
    std::array<StatePoint, 3> mirrored;
    for (int i = 0; i < 3; ++i) mirrored[i] = {2 * center.x() - s.vertex(i).x(), s.vertex(i).y()};
    bool found = false;
    for (const auto& o : t->simplices()) {
      int hits = 0;
      for (const auto& p : mirrored)
        for (int i = 0; i < 3; ++i) hits += (o.vertex(i) - p).norm() < 1e-12;
      found = found || hits == 3;
    }
    CHECK(found);
  }
}

TEST_CASE("grids with an even number of cells per axis are point symmetric") {
  for (auto [nx, ny] : {std::pair{5, 5}, std::pair{3, 3}, std::pair{5, 3}, std::pair{7, 5}}) {
    const auto t = test::grid_mesh(nx, ny, pi, 2 * pi);
    const auto center = t->bounds().center();
    for (const auto& s : t->simplices()) {
      bool found = false;
      for (const auto& o : t->simplices()) {
        int hits = 0;
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < 3; ++j) hits += (o.vertex(j) - (2 * center - s.vertex(i))).norm() < 1e-12;
        found = found || hits == 3;
      }
      CHECK(found);
    }
  }
}

TEST_CASE("invalid breaks are rejected") {
  const std::vector<double> good{0, 1, 2}, dup{0, 1, 1}, unsorted{0, 2, 1}, single{0};
  CHECK_THROWS_AS(geometry::build_grid_triangulation(dup, good), InvalidGrid);
  CHECK_THROWS_AS(geometry::build_grid_triangulation(good, unsorted), InvalidGrid);
  CHECK_THROWS_AS(geometry::build_grid_triangulation(single, good), InvalidGrid);
}

TEST_CASE("locate finds an interior point") {
  const auto t = geometry::pendulum_triangulation();
  const auto loc = t.locate(t.simplex(5).centroid());
  CHECK(loc.simplex == 5);
  CHECK(loc.b.minCoeff() > 0);
}

TEST_CASE("locate breaks facet ties toward the smaller index") {
  const auto t = geometry::pendulum_triangulation();
  for (const auto& f : t.facets()) {
    const StatePoint mid = 0.5 * (t.vertices()[f.shared[0]] + t.vertices()[f.shared[1]]);
    const auto loc = t.locate(mid);
    CHECK(loc.simplex == f.first);
    CHECK(loc.b.cwiseAbs().minCoeff() < 1e-12);
  }
}

TEST_CASE("locate rejects points outside the bounds") {
  const auto t = geometry::pendulum_triangulation();
  CHECK_THROWS_AS(t.locate(StatePoint(4, 0)), OutOfDomain);
  CHECK_THROWS_AS(t.locate(StatePoint(0, -7)), OutOfDomain);
}

TEST_CASE("random points are located and areas add up to the box") {
  test::Gen g(3);
  const auto t = geometry::pendulum_triangulation();
  double area = 0;
  for (const auto& s : t.simplices()) area += s.area();
  CHECK(std::abs(area - t.bounds().area()) <= 1e-8 * t.bounds().area());
  for (int k = 0; k < 1000; ++k) {
    const auto loc = t.locate(g.in_bounds(t.bounds()));
    CHECK(loc.b.minCoeff() >= -1e-9);
  }
}

TEST_CASE("overlapping or malformed meshes are rejected") {
  using V = std::vector<StatePoint>;
  using S = std::vector<std::array<int, 3>>;
  CHECK_THROWS_AS(geometry::Triangulation(V{{0, 0}, {1, 0}, {0, 1}, {1, 1}}, S{{0, 1, 2}, {0, 1, 3}}),
                  InvalidTriangulation);
  CHECK_THROWS_AS(geometry::Triangulation(V{{0, 0}, {1, 0}, {0, 1}}, S{{0, 1, 3}}), InvalidTriangulation);
  CHECK_THROWS_AS(geometry::Triangulation(V{{0, 0}, {1, 0}, {0, 1}}, S{{0, 1, 1}}), InvalidTriangulation);
}

TEST_CASE("triangulation JSON round trip") {
  const auto t = geometry::pendulum_triangulation();
  const auto t2 = geometry::parse_triangulation_json(geometry::triangulation_to_json(t));
  CHECK(t2.fingerprint() == t.fingerprint());
  CHECK(t2.facets().size() == t.facets().size());
  CHECK_THROWS_AS(geometry::parse_triangulation_json(R"({"vertices": [[0,0]]})"), InvalidTriangulation);
}

}  // TEST_SUITE
