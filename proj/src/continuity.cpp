#include "sdp/continuity.hpp"

#include <limits>
#include <ostream>

#include "sdp/format.hpp"

namespace sdp::continuity {

namespace {

// Global coefficient index of the exponent `local_exp`, given in the order of
// `local_ids`, for a simplex whose stored vertex order is `stored_ids`.
int coefficient_index(const spline::SplineSpace& space, int simplex, const std::array<int, 3>& local_ids,
                      const std::array<int, 3>& local_exp) {
  const auto& stored = space.triangulation().simplex(simplex);
  spline::MultiIndex k{{0, 0, 0}};
  for (int p = 0; p < 3; ++p) {
    const int pos = stored.local_index(local_ids[p]);
    if (pos < 0) throw InvalidTriangulation("facet vertex not found in its simplex");
    k.kappa[pos] = local_exp[p];
  }
  return space.global_index(simplex, space.local_index(k));
}

}  // namespace

SmoothnessMatrix build_smoothness_matrix(const spline::SplineSpace& space) {
  const auto& tri = space.triangulation();
  const int d = space.degree();
  const int r = space.continuity();

  struct Entry {
    int row, col;
    double value;
  };
  std::vector<Entry> entries;
  SmoothnessMatrix out;

  for (const auto& f : tri.facets()) {
    if (f.first < 0 || f.second < 0 || f.first_opposite < 0 || f.second_opposite < 0) {
      throw InvalidTriangulation("inconsistent facet adjacency");
    }
    const std::array<int, 3> ids_i{f.shared[0], f.shared[1], f.first_opposite};
    const std::array<int, 3> ids_j{f.shared[0], f.shared[1], f.second_opposite};
    const geometry::Simplex reordered_j(ids_j, {tri.vertices()[ids_j[0]], tri.vertices()[ids_j[1]],
                                                tri.vertices()[ids_j[2]]},
                                        tri.bounds().scale());
    const geometry::Barycentric w = reordered_j.to_barycentric(tri.vertices()[f.first_opposite]);

    for (int m = 0; m <= r; ++m) {
      const auto gammas = spline::enumerate_multi_indices(m, geometry::kDim);
      for (const auto& facet_k : spline::enumerate_multi_indices(d - m, 1)) {
        const int row = static_cast<int>(out.rows.size());
        out.rows.push_back({f.first, f.second, m, {facet_k[0], facet_k[1]}});
        entries.push_back({row, coefficient_index(space, f.first, ids_i, {facet_k[0], facet_k[1], m}), 1.0});
        for (const auto& g : gammas) {
          const int col = coefficient_index(space, f.second, ids_j,
                                            {facet_k[0] + g[0], facet_k[1] + g[1], g[2]});
          entries.push_back({row, col, -spline::bernstein(g, w)});
        }
      }
    }
  }

  out.H = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(out.rows.size()), space.ahat());
  for (const auto& e : entries) out.H(e.row, e.col) += e.value;
  return out;
}

NullSpaceProjector null_space_projector(const Eigen::MatrixXd& H, int ahat) {
  const Eigen::Index n = H.rows() > 0 ? H.cols() : (ahat >= 0 ? ahat : H.cols());
  NullSpaceProjector p;
  if (!H.allFinite()) throw NumericalFailure("smoothness matrix has non-finite entries");
  if (H.rows() == 0 || H.cols() == 0) {
    p.Z = Eigen::MatrixXd::Identity(n, n);
    return p;
  }
  // BDCSVD in Eigen 3.4.0 returns inaccurate factors for some of these
  // matrices (S_2^1 and S_3^0 on the pendulum grid); Jacobi is exact enough.
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(H, Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) throw NumericalFailure("SVD of the smoothness matrix did not converge");
  const auto& sigma = svd.singularValues();
  const double sigma_max = sigma.size() > 0 ? sigma[0] : 0.0;
  p.svd_tolerance = static_cast<double>(std::max(H.rows(), H.cols())) *
                    std::numeric_limits<double>::epsilon() * sigma_max;
  int rank = 0;
  while (rank < sigma.size() && sigma[rank] > p.svd_tolerance) ++rank;
  p.rank_H = rank;
  const Eigen::MatrixXd V = svd.matrixV().leftCols(rank);
  p.Z = Eigen::MatrixXd::Identity(n, n);
  p.Z.noalias() -= V * V.transpose();
  p.Z = (0.5 * (p.Z + p.Z.transpose())).eval();
  return p;
}

void write_matrix_csv(std::ostream& out, const Eigen::MatrixXd& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << fmt17(m(i, j));
    }
    out << '\n';
  }
}

}  // namespace sdp::continuity
