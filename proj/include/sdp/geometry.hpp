#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sdp/error.hpp"

namespace sdp::geometry {

/// Dimension of the state domain handled by the mesh code (theta, thetadot).
inline constexpr int kDim = 2;

using StatePoint = Eigen::Vector2d;
using Barycentric = Eigen::Vector3d;

/// Absolute tolerance used for barycentric membership tests.
inline constexpr double kMembershipTol = 1e-9;

struct Bounds {
  StatePoint lower;
  StatePoint upper;

  bool contains(const StatePoint& x, double tol = kMembershipTol) const;
  StatePoint center() const { return 0.5 * (lower + upper); }
  double area() const { return (upper - lower).prod(); }
  /// Largest side length; used to scale degeneracy tolerances.
  double scale() const { return (upper - lower).maxCoeff(); }
};

/// A non-degenerate triangle with a cached Cartesian-to-barycentric map.
class Simplex {
 public:
  /// Throws InvalidTriangulation when the vertices are (numerically) collinear
  /// relative to `domain_scale`.
  Simplex(std::array<int, 3> vertex_ids, std::array<StatePoint, 3> vertices,
          double domain_scale = 1.0);

  const std::array<int, 3>& vertex_ids() const { return vertex_ids_; }
  const std::array<StatePoint, 3>& vertices() const { return vertices_; }
  const StatePoint& vertex(int i) const { return vertices_[i]; }

  Barycentric to_barycentric(const StatePoint& x) const;
  StatePoint to_cartesian(const Barycentric& b) const;

  /// Directional barycentric coordinates of a Cartesian direction `u`:
  /// u = sum a_i v_i with sum a_i = 0.
  Barycentric direction_to_barycentric(const StatePoint& u) const;

  /// Signed area (positive for counter-clockwise vertex order).
  double signed_area() const;
  double area() const;
  StatePoint centroid() const;

  /// Local position (0..2) of a global vertex id, or -1.
  int local_index(int vertex_id) const;

 private:
  std::array<int, 3> vertex_ids_;
  std::array<StatePoint, 3> vertices_;
  Eigen::Matrix3d to_bary_;
};

Barycentric cartesian_to_barycentric(const Simplex& s, const StatePoint& x);
StatePoint barycentric_to_cartesian(const Simplex& s, const Barycentric& b);

/// An interior edge shared by two simplices, with `first < second`.
struct Facet {
  int first = -1;
  int second = -1;
  /// Shared vertex ids, ascending.
  std::array<int, 2> shared{};
  /// Vertex of `first` (resp. `second`) that is not on the shared edge.
  int first_opposite = -1;
  int second_opposite = -1;
};

struct Location {
  int simplex = -1;
  Barycentric b = Barycentric::Zero();
};

/// Immutable conforming triangulation of an axis-aligned box.
class Triangulation {
 public:
  /// Validates non-degeneracy, conformity (an edge belongs to at most two
  /// simplices), orientation consistency across shared edges and pairwise
  /// disjoint interiors. Throws InvalidTriangulation.
  Triangulation(std::vector<StatePoint> vertices, std::vector<std::array<int, 3>> simplices);

  const std::vector<StatePoint>& vertices() const { return vertices_; }
  const std::vector<Simplex>& simplices() const { return simplices_; }
  const Simplex& simplex(std::size_t j) const { return simplices_[j]; }
  std::size_t size() const { return simplices_.size(); }
  const std::vector<Facet>& facets() const { return facets_; }
  const Bounds& bounds() const { return bounds_; }
  /// True when the simplices tile the whole bounding box (grid meshes).
  bool covers_bounds() const { return covers_bounds_; }

  /// Finds the containing simplex; facet ties go to the smallest index.
  /// Throws OutOfDomain when no simplex contains `x` within tolerance.
  Location locate(const StatePoint& x) const;

  /// Stable 64-bit fingerprint of vertex coordinates and connectivity.
  std::uint64_t fingerprint() const;

 private:
  std::vector<StatePoint> vertices_;
  std::vector<Simplex> simplices_;
  std::vector<Facet> facets_;
  Bounds bounds_;
  bool covers_bounds_ = false;
};

inline Location locate(const Triangulation& t, const StatePoint& x) { return t.locate(x); }

/// Grid mesh with every cell split by the diagonal passing through the
/// cell corner whose row and column indices are both odd. On grids with an
/// even number of cells per axis this gives a point-symmetric union-jack
/// pattern (the 32-triangle pendulum mesh uses 5 x 5 breaks).
Triangulation build_grid_triangulation(std::span<const double> theta_breaks,
                                       std::span<const double> thetadot_breaks);

/// `count` evenly spaced breaks covering [lo, hi].
std::vector<double> uniform_breaks(double lo, double hi, int count);

/// 5 x 5 grid over [-pi, pi] x [-2 pi, 2 pi]: 25 vertices, 32 triangles.
Triangulation pendulum_triangulation();

/// JSON `{"vertices": [[x1,x2],...], "simplices": [[i,j,k],...]}`.
Triangulation load_triangulation(const std::string& path);
Triangulation parse_triangulation_json(const std::string& text);
std::string triangulation_to_json(const Triangulation& t);

}  // namespace sdp::geometry
