#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "sdp/geometry.hpp"

namespace sdp::spline {

using geometry::Barycentric;
using geometry::StatePoint;

/// Exponent tuple kappa of a Bernstein polynomial / B-coefficient.
struct MultiIndex {
  std::vector<int> kappa;

  int order() const;
  std::size_t size() const { return kappa.size(); }
  int operator[](std::size_t i) const { return kappa[i]; }
  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;
};

/// All multi-indices with |kappa| = d and n+1 entries, ordered so that an
/// index precedes another when its first differing entry is larger:
/// d=2, n=2 gives 200, 110, 101, 020, 011, 002.
std::vector<MultiIndex> enumerate_multi_indices(int d, int n);

/// (d+n)! / (n! d!)
int coefficients_per_simplex(int d, int n);

/// (d!/kappa!) b^kappa for |kappa| = d.
double bernstein(const MultiIndex& kappa, std::span<const double> b);
double bernstein(const MultiIndex& kappa, const Barycentric& b);

/// Dense block of one basis row: only the located simplex contributes.
struct BasisRow {
  int simplex = -1;
  int offset = 0;          ///< global index of the first entry of the block
  Eigen::VectorXd values;  ///< dhat Bernstein values in lexicographic order

  Eigen::VectorXd to_dense(int ahat) const;
};

/// Spline space S_d^r over a triangulation; coefficients are stored
/// simplex-major with the lexicographic multi-index order inside each block.
class SplineSpace {
 public:
  SplineSpace(std::shared_ptr<const geometry::Triangulation> triangulation, int degree,
              int continuity);

  const geometry::Triangulation& triangulation() const { return *tri_; }
  std::shared_ptr<const geometry::Triangulation> triangulation_ptr() const { return tri_; }
  int degree() const { return degree_; }
  int continuity() const { return continuity_; }
  int dhat() const { return dhat_; }
  int ahat() const { return ahat_; }
  int num_simplices() const { return static_cast<int>(tri_->size()); }

  const std::vector<MultiIndex>& multi_indices() const { return indices_; }
  /// Position of `kappa` (|kappa| = degree) inside a simplex block.
  int local_index(const MultiIndex& kappa) const;
  int global_index(int simplex, int local) const { return simplex * dhat_ + local; }

  BasisRow basis_row(const StatePoint& x) const;
  BasisRow basis_row(const geometry::Location& loc) const;

  /// Bernstein values of degree `degree()` (or `degree() - 1` when
  /// `lowered`) at b, in lexicographic order.
  void bernstein_values(const Barycentric& b, bool lowered, std::span<double> out) const;

  /// For each multi-index of degree d-1 and each i, the local index of kappa + e_i.
  const std::vector<std::array<int, 3>>& raise_table() const { return raise_; }
  int lowered_count() const { return static_cast<int>(raise_.size()); }

  std::uint64_t fingerprint() const;

 private:
  struct Table {
    std::vector<std::array<int, 3>> exps;
    std::vector<double> coef;
  };
  static Table make_table(int degree);
  void eval_table(const Table& t, int degree, const Barycentric& b, std::span<double> out) const;

  std::shared_ptr<const geometry::Triangulation> tri_;
  int degree_;
  int continuity_;
  int dhat_;
  int ahat_;
  std::vector<MultiIndex> indices_;
  Table full_;
  Table lowered_;
  std::vector<std::array<int, 3>> raise_;
};

BasisRow basis_row(const SplineSpace& space, const StatePoint& x);

/// Spline value object: space plus global B-coefficient vector.
class SplineFunction {
 public:
  explicit SplineFunction(std::shared_ptr<const SplineSpace> space);
  SplineFunction(std::shared_ptr<const SplineSpace> space, Eigen::VectorXd coefficients);

  const SplineSpace& space() const { return *space_; }
  std::shared_ptr<const SplineSpace> space_ptr() const { return space_; }
  const Eigen::VectorXd& coefficients() const { return c_; }
  void set_coefficients(Eigen::VectorXd c);

  double evaluate(const StatePoint& x) const;
  double directional_derivative(const StatePoint& x, const StatePoint& u) const;
  StatePoint gradient(const StatePoint& x) const;

  /// Evaluation restricted to one simplex's polynomial piece, valid for any b
  /// (used for cross-facet checks).
  double evaluate_piece(int simplex, const StatePoint& x) const;
  double directional_derivative_piece(int simplex, const StatePoint& x, const StatePoint& u) const;

 private:
  double derivative_at(const geometry::Location& loc, const StatePoint& u) const;

  std::shared_ptr<const SplineSpace> space_;
  Eigen::VectorXd c_;
};

double evaluate(const SplineFunction& f, const StatePoint& x);
double directional_derivative(const SplineFunction& f, const StatePoint& x, const StatePoint& u);
StatePoint gradient(const SplineFunction& f, const StatePoint& x);

/// B-net point sum_i (kappa_i / d) v_i for every kappa of degree d.
std::vector<std::pair<MultiIndex, StatePoint>> bnet_points(const geometry::Simplex& s, int d);

/// Coefficients whose B-net ordinates sample `fn`; exact for affine `fn`.
template <class Fn>
Eigen::VectorXd bnet_ordinates(const SplineSpace& space, Fn&& fn) {
  Eigen::VectorXd c(space.ahat());
  for (int j = 0; j < space.num_simplices(); ++j) {
    const auto pts = bnet_points(space.triangulation().simplex(j), space.degree());
    for (int k = 0; k < space.dhat(); ++k) c[space.global_index(j, k)] = fn(pts[k].second);
  }
  return c;
}

/// CSV `simplex,kappa0,kappa1,kappa2,x1,x2,coefficient`.
void write_bnet_csv(std::ostream& out, const SplineFunction& f);

}  // namespace sdp::spline
