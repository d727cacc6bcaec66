#pragma once

#include <cmath>
#include <memory>
#include <random>

#include <Eigen/Dense>

#include "sdp/continuity.hpp"
#include "sdp/geometry.hpp"
#include "sdp/spline.hpp"

namespace sdp::test {

/// Small seeded generator for property tests.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

  /// Uniform point of the unit 2-simplex.
  geometry::Barycentric barycentric() {
    double a = uniform(0, 1), b = uniform(0, 1);
    if (a + b > 1) a = 1 - a, b = 1 - b;
    return {1 - a - b, a, b};
  }

  geometry::StatePoint in_bounds(const geometry::Bounds& box) {
    return {uniform(box.lower.x(), box.upper.x()), uniform(box.lower.y(), box.upper.y())};
  }

  Eigen::VectorXd vector(int n) {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = normal();
    return v;
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

inline double rel_err(double a, double b, double floor = 1.0) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

inline std::shared_ptr<const geometry::Triangulation> pendulum_mesh() {
  return std::make_shared<const geometry::Triangulation>(geometry::pendulum_triangulation());
}

inline std::shared_ptr<const geometry::Triangulation> grid_mesh(int nx, int ny, double lx = 1, double ly = 1) {
  const auto tx = geometry::uniform_breaks(-lx, lx, nx);
  const auto ty = geometry::uniform_breaks(-ly, ly, ny);
  return std::make_shared<const geometry::Triangulation>(geometry::build_grid_triangulation(tx, ty));
}

/// Two triangles sharing the edge (1,0)-(0,1) of the unit square.
inline std::shared_ptr<const geometry::Triangulation> two_triangles() {
  return std::make_shared<const geometry::Triangulation>(
      std::vector<geometry::StatePoint>{{0, 0}, {1, 0}, {0, 1}, {1, 1}},
      std::vector<std::array<int, 3>>{{0, 1, 2}, {1, 3, 2}});
}

inline std::shared_ptr<const geometry::Triangulation> unit_triangle() {
  return std::make_shared<const geometry::Triangulation>(
      std::vector<geometry::StatePoint>{{0, 0}, {1, 0}, {0, 1}}, std::vector<std::array<int, 3>>{{0, 1, 2}});
}

}  // namespace sdp::test
