#pragma once

#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

#include "sdp/spline.hpp"

namespace sdp::continuity {

/// Provenance of one smoothness-matrix row.
struct ConstraintInfo {
  int first_simplex = -1;   ///< simplex whose coefficient carries the +1
  int second_simplex = -1;  ///< simplex whose coefficients are blended
  int order = 0;            ///< derivative order m, 0 <= m <= r
  std::array<int, 2> facet_kappa{};
};

/// H c = 0 encodes C^r continuity across every interior facet.
struct SmoothnessMatrix {
  Eigen::MatrixXd H;
  std::vector<ConstraintInfo> rows;
};

/// Rows for every interior facet (i < j) and order m = 0..r. Both simplices
/// are re-indexed with the shared vertices first (ascending id) and the
/// opposite vertex last; then for |(k0,k1)| = d - m
///   c^i_(k0,k1,m) - sum_{|g|=m} c^j_((k0,k1,0)+g) B^m_g(w) = 0
/// where w is the barycentric coordinate of simplex i's opposite vertex
/// relative to simplex j.
SmoothnessMatrix build_smoothness_matrix(const spline::SplineSpace& space);

/// Orthogonal projector Z = I - H^+ H onto null(H).
struct NullSpaceProjector {
  Eigen::MatrixXd Z;
  int rank_H = 0;
  double svd_tolerance = 0;

  int free_parameters() const { return static_cast<int>(Z.rows()) - rank_H; }
};

/// SVD-based projector; singular values at or below max(rows, cols) * eps *
/// sigma_max count as zero. `ahat` is only needed when H has no rows.
NullSpaceProjector null_space_projector(const Eigen::MatrixXd& H, int ahat = -1);

void write_matrix_csv(std::ostream& out, const Eigen::MatrixXd& m);

}  // namespace sdp::continuity
