#include "sdp/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <tuple>

#include <json.hpp>

namespace sdp::geometry {

namespace {

double cross2(const StatePoint& a, const StatePoint& b) { return a.x() * b.y() - a.y() * b.x(); }

// Which side of the directed line p->q the point x is on.
double orientation(const StatePoint& p, const StatePoint& q, const StatePoint& x) {
  return cross2(q - p, x - p);
}

void fnv_mix(std::uint64_t& h, const void* data, std::size_t n) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= bytes[i];
    h *= 1099511628211ULL;
  }
}

// Separating-axis test on the six edge normals; touching counts as disjoint.
bool interiors_overlap(const Simplex& a, const Simplex& b, double tol) {
  for (const Simplex* s : {&a, &b}) {
    for (int e = 0; e < 3; ++e) {
      const StatePoint edge = s->vertex((e + 1) % 3) - s->vertex(e);
      const StatePoint normal(-edge.y(), edge.x());
      const double len = normal.norm();
      double amin = 1e300, amax = -1e300, bmin = 1e300, bmax = -1e300;
      for (int i = 0; i < 3; ++i) {
        const double pa = normal.dot(a.vertex(i)) / len;
        const double pb = normal.dot(b.vertex(i)) / len;
        amin = std::min(amin, pa);
        amax = std::max(amax, pa);
        bmin = std::min(bmin, pb);
        bmax = std::max(bmax, pb);
      }
      if (std::min(amax, bmax) - std::max(amin, bmin) <= tol) return false;
    }
  }
  return true;
}

}  // namespace

bool Bounds::contains(const StatePoint& x, double tol) const {
  return (x.array() >= lower.array() - tol).all() && (x.array() <= upper.array() + tol).all();
}

Simplex::Simplex(std::array<int, 3> vertex_ids, std::array<StatePoint, 3> vertices,
                 double domain_scale)
    : vertex_ids_(vertex_ids), vertices_(vertices) {
  for (const auto& v : vertices_) {
    if (!v.allFinite()) throw InvalidTriangulation("simplex vertex is not finite");
  }
  const double det = cross2(vertices_[1] - vertices_[0], vertices_[2] - vertices_[0]);
  if (std::abs(det) <= 1e-12 * domain_scale * domain_scale) {
    throw InvalidTriangulation("degenerate simplex (|det| = " + std::to_string(std::abs(det)) + ")");
  }
  Eigen::Matrix3d a;
  for (int i = 0; i < 3; ++i) {
    a(0, i) = vertices_[i].x();
    a(1, i) = vertices_[i].y();
    a(2, i) = 1.0;
  }
  to_bary_ = a.inverse();
}

Barycentric Simplex::to_barycentric(const StatePoint& x) const {
  return to_bary_.leftCols<2>() * x + to_bary_.col(2);
}

StatePoint Simplex::to_cartesian(const Barycentric& b) const {
  return b[0] * vertices_[0] + b[1] * vertices_[1] + b[2] * vertices_[2];
}

Barycentric Simplex::direction_to_barycentric(const StatePoint& u) const {
  return to_bary_.leftCols<2>() * u;
}

double Simplex::signed_area() const {
  return 0.5 * cross2(vertices_[1] - vertices_[0], vertices_[2] - vertices_[0]);
}

double Simplex::area() const { return std::abs(signed_area()); }

StatePoint Simplex::centroid() const {
  return (vertices_[0] + vertices_[1] + vertices_[2]) / 3.0;
}

int Simplex::local_index(int vertex_id) const {
  for (int i = 0; i < 3; ++i) {
    if (vertex_ids_[i] == vertex_id) return i;
  }
  return -1;
}

Barycentric cartesian_to_barycentric(const Simplex& s, const StatePoint& x) {
  return s.to_barycentric(x);
}

StatePoint barycentric_to_cartesian(const Simplex& s, const Barycentric& b) {
  return s.to_cartesian(b);
}

Triangulation::Triangulation(std::vector<StatePoint> vertices,
                             std::vector<std::array<int, 3>> simplices)
    : vertices_(std::move(vertices)) {
  if (vertices_.size() < 3) throw InvalidTriangulation("need at least 3 vertices");
  if (simplices.empty()) throw InvalidTriangulation("no simplices");

  bounds_.lower = vertices_.front();
  bounds_.upper = vertices_.front();
  for (const auto& v : vertices_) {
    if (!v.allFinite()) throw InvalidTriangulation("vertex is not finite");
    bounds_.lower = bounds_.lower.cwiseMin(v);
    bounds_.upper = bounds_.upper.cwiseMax(v);
  }
  const double scale = bounds_.scale();
  if (!(scale > 0)) throw InvalidTriangulation("vertices span an empty box");

  simplices_.reserve(simplices.size());
  std::map<std::pair<int, int>, std::vector<int>> edges;
  const int nv = static_cast<int>(vertices_.size());
  for (std::size_t j = 0; j < simplices.size(); ++j) {
    const auto& ids = simplices[j];
    for (int id : ids) {
      if (id < 0 || id >= nv) {
        throw InvalidTriangulation("simplex " + std::to_string(j) + " references vertex " +
                                   std::to_string(id) + " out of range");
      }
    }
    if (ids[0] == ids[1] || ids[1] == ids[2] || ids[0] == ids[2]) {
      throw InvalidTriangulation("simplex " + std::to_string(j) + " repeats a vertex");
    }
    simplices_.emplace_back(ids, std::array<StatePoint, 3>{vertices_[ids[0]], vertices_[ids[1]], vertices_[ids[2]]},
                            scale);
    for (int a = 0; a < 3; ++a) {
      int p = ids[a], q = ids[(a + 1) % 3];
      edges[{std::min(p, q), std::max(p, q)}].push_back(static_cast<int>(j));
    }
  }

  const double tol = kMembershipTol * std::max(1.0, scale);
  for (const auto& [edge, owners] : edges) {
    const StatePoint& p = vertices_[edge.first];
    const StatePoint& q = vertices_[edge.second];
    if (owners.size() > 2) {
      throw InvalidTriangulation("edge (" + std::to_string(edge.first) + "," +
                                 std::to_string(edge.second) + ") shared by more than two simplices");
    }
    if (owners.size() == 1) continue;
    Facet f;
    f.first = std::min(owners[0], owners[1]);
    f.second = std::max(owners[0], owners[1]);
    f.shared = {edge.first, edge.second};
    auto opposite = [&](int s) {
      for (int id : simplices_[s].vertex_ids()) {
        if (id != edge.first && id != edge.second) return id;
      }
      return -1;
    };
    f.first_opposite = opposite(f.first);
    f.second_opposite = opposite(f.second);
    const double s1 = orientation(p, q, vertices_[f.first_opposite]);
    const double s2 = orientation(p, q, vertices_[f.second_opposite]);
    if (s1 * s2 >= 0) {
      throw InvalidTriangulation("simplices " + std::to_string(f.first) + " and " +
                                 std::to_string(f.second) + " overlap across a shared edge");
    }
    facets_.push_back(f);
  }
  std::sort(facets_.begin(), facets_.end(), [](const Facet& a, const Facet& b) {
    return std::tie(a.first, a.second) < std::tie(b.first, b.second);
  });

  for (std::size_t a = 0; a < simplices_.size(); ++a) {
    for (std::size_t b = a + 1; b < simplices_.size(); ++b) {
      if (interiors_overlap(simplices_[a], simplices_[b], tol)) {
        throw InvalidTriangulation("simplices " + std::to_string(a) + " and " + std::to_string(b) +
                                   " overlap");
      }
    }
  }

  double total = 0;
  for (const auto& s : simplices_) total += s.area();
  covers_bounds_ = std::abs(total - bounds_.area()) <= 1e-8 * bounds_.area();
}

Location Triangulation::locate(const StatePoint& x) const {
  if (!x.allFinite() || !bounds_.contains(x)) {
    std::ostringstream os;
    os << "point (" << x.x() << ", " << x.y() << ") is outside the domain";
    throw OutOfDomain(os.str());
  }
  for (std::size_t j = 0; j < simplices_.size(); ++j) {
    Barycentric b = simplices_[j].to_barycentric(x);
    if (b.minCoeff() >= -kMembershipTol) return {static_cast<int>(j), b};
  }
  std::ostringstream os;
  os << "point (" << x.x() << ", " << x.y() << ") is not covered by any simplex";
  throw OutOfDomain(os.str());
}

std::uint64_t Triangulation::fingerprint() const {
  std::uint64_t h = 14695981039346656037ULL;
  for (const auto& v : vertices_) fnv_mix(h, v.data(), sizeof(double) * kDim);
  for (const auto& s : simplices_) fnv_mix(h, s.vertex_ids().data(), sizeof(int) * 3);
  return h;
}

std::vector<double> uniform_breaks(double lo, double hi, int count) {
  if (count < 2 || !(hi > lo)) throw InvalidGrid("uniform_breaks needs count >= 2 and hi > lo");
  std::vector<double> out(count);
  for (int i = 0; i < count; ++i) out[i] = lo + (hi - lo) * i / (count - 1);
  out.back() = hi;
  return out;
}

Triangulation build_grid_triangulation(std::span<const double> theta_breaks,
                                       std::span<const double> thetadot_breaks) {
  auto check = [](std::span<const double> br, const char* axis) {
    if (br.size() < 2) throw InvalidGrid(std::string(axis) + ": need at least 2 breaks");
    for (std::size_t i = 0; i < br.size(); ++i) {
      if (!std::isfinite(br[i])) throw InvalidGrid(std::string(axis) + ": non-finite break");
      if (i > 0 && !(br[i] > br[i - 1])) {
        throw InvalidGrid(std::string(axis) + ": breaks must be strictly increasing");
      }
    }
  };
  check(theta_breaks, "theta");
  check(thetadot_breaks, "thetadot");

  const int nx = static_cast<int>(theta_breaks.size());
  const int ny = static_cast<int>(thetadot_breaks.size());
  std::vector<StatePoint> vertices;
  vertices.reserve(nx * ny);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) vertices.emplace_back(theta_breaks[i], thetadot_breaks[j]);
  }

  std::vector<std::array<int, 3>> simplices;
  simplices.reserve(2 * (nx - 1) * (ny - 1));
  for (int j = 0; j + 1 < ny; ++j) {
    for (int i = 0; i + 1 < nx; ++i) {
      // Corners counter-clockwise from the lower-left.
      const std::array<std::array<int, 2>, 4> corners{{{i, j}, {i + 1, j}, {i + 1, j + 1}, {i, j + 1}}};
      int k = 0;
      while (!(corners[k][0] % 2 == 1 && corners[k][1] % 2 == 1)) ++k;
      auto id = [&](int c) { return corners[c % 4][1] * nx + corners[c % 4][0]; };
      simplices.push_back({id(k), id(k + 1), id(k + 2)});
      simplices.push_back({id(k), id(k + 2), id(k + 3)});
    }
  }
  return Triangulation(std::move(vertices), std::move(simplices));
}

Triangulation pendulum_triangulation() {
  const double pi = std::numbers::pi;
  const auto theta = uniform_breaks(-pi, pi, 5);
  const auto thetadot = uniform_breaks(-2 * pi, 2 * pi, 5);
  return build_grid_triangulation(theta, thetadot);
}

Triangulation parse_triangulation_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidTriangulation(std::string("triangulation JSON: ") + e.what());
  }
  if (!j.contains("vertices") || !j.contains("simplices")) {
    throw InvalidTriangulation("triangulation JSON needs 'vertices' and 'simplices'");
  }
  std::vector<StatePoint> vertices;
  std::vector<std::array<int, 3>> simplices;
  try {
    for (const auto& v : j.at("vertices")) {
      if (v.size() != kDim) throw InvalidTriangulation("vertex must have 2 coordinates");
      vertices.emplace_back(v.at(0).get<double>(), v.at(1).get<double>());
    }
    for (const auto& s : j.at("simplices")) {
      if (s.size() != 3) throw InvalidTriangulation("simplex must have 3 vertex indices");
      simplices.push_back({s.at(0).get<int>(), s.at(1).get<int>(), s.at(2).get<int>()});
    }
  } catch (const nlohmann::json::exception& e) {
    throw InvalidTriangulation(std::string("triangulation JSON: ") + e.what());
  }
  return Triangulation(std::move(vertices), std::move(simplices));
}

Triangulation load_triangulation(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidTriangulation("cannot open triangulation file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_triangulation_json(ss.str());
}

std::string triangulation_to_json(const Triangulation& t) {
  nlohmann::json j;
  j["vertices"] = nlohmann::json::array();
  for (const auto& v : t.vertices()) j["vertices"].push_back({v.x(), v.y()});
  j["simplices"] = nlohmann::json::array();
  for (const auto& s : t.simplices()) {
    const auto& ids = s.vertex_ids();
    j["simplices"].push_back({ids[0], ids[1], ids[2]});
  }
  return j.dump();
}

}  // namespace sdp::geometry
