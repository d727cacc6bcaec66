#include "sdp/spline.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "sdp/format.hpp"

namespace sdp::spline {

namespace {

double factorial(int k) {
  double f = 1;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

void enumerate_into(int remaining, int slots, std::vector<int>& prefix, std::vector<MultiIndex>& out) {
  if (slots == 1) {
    prefix.push_back(remaining);
    out.push_back({prefix});
    prefix.pop_back();
    return;
  }
  for (int k = remaining; k >= 0; --k) {
    prefix.push_back(k);
    enumerate_into(remaining - k, slots - 1, prefix, out);
    prefix.pop_back();
  }
}

}  // namespace

int MultiIndex::order() const { return std::accumulate(kappa.begin(), kappa.end(), 0); }

std::vector<MultiIndex> enumerate_multi_indices(int d, int n) {
  if (d < 0 || n < 1) throw std::invalid_argument("enumerate_multi_indices: need d >= 0, n >= 1");
  std::vector<MultiIndex> out;
  std::vector<int> prefix;
  enumerate_into(d, n + 1, prefix, out);
  return out;
}

int coefficients_per_simplex(int d, int n) {
  return static_cast<int>(std::lround(factorial(d + n) / (factorial(n) * factorial(d))));
}

double bernstein(const MultiIndex& kappa, std::span<const double> b) {
  if (b.size() != kappa.size()) throw std::invalid_argument("bernstein: size mismatch");
  double v = factorial(kappa.order());
  for (std::size_t i = 0; i < b.size(); ++i) {
    v *= std::pow(b[i], kappa[i]) / factorial(kappa[i]);
  }
  return v;
}

double bernstein(const MultiIndex& kappa, const Barycentric& b) {
  return bernstein(kappa, std::span<const double>(b.data(), 3));
}

Eigen::VectorXd BasisRow::to_dense(int ahat) const {
  Eigen::VectorXd x = Eigen::VectorXd::Zero(ahat);
  x.segment(offset, values.size()) = values;
  return x;
}

SplineSpace::SplineSpace(std::shared_ptr<const geometry::Triangulation> triangulation, int degree,
                         int continuity)
    : tri_(std::move(triangulation)), degree_(degree), continuity_(continuity) {
  if (!tri_) throw InvalidParam("spline space needs a triangulation");
  if (degree_ < 1) throw InvalidParam("spline degree must be >= 1");
  if (continuity_ < 0 || continuity_ >= degree_) {
    throw InvalidParam("continuity order r must satisfy 0 <= r < d");
  }
  indices_ = enumerate_multi_indices(degree_, geometry::kDim);
  dhat_ = coefficients_per_simplex(degree_, geometry::kDim);
  ahat_ = dhat_ * num_simplices();
  full_ = make_table(degree_);
  lowered_ = make_table(degree_ - 1);
  for (const auto& e : lowered_.exps) {
    std::array<int, 3> up{};
    for (int i = 0; i < 3; ++i) {
      MultiIndex k{{e[0], e[1], e[2]}};
      k.kappa[i] += 1;
      up[i] = local_index(k);
    }
    raise_.push_back(up);
  }
}

SplineSpace::Table SplineSpace::make_table(int degree) {
  Table t;
  for (const auto& k : enumerate_multi_indices(degree, geometry::kDim)) {
    t.exps.push_back({k[0], k[1], k[2]});
    t.coef.push_back(factorial(degree) / (factorial(k[0]) * factorial(k[1]) * factorial(k[2])));
  }
  return t;
}

void SplineSpace::eval_table(const Table& t, int degree, const Barycentric& b,
                             std::span<double> out) const {
  // powers[i][k] = b_i^k
  double powers[3][16];
  for (int i = 0; i < 3; ++i) {
    powers[i][0] = 1.0;
    for (int k = 1; k <= degree; ++k) powers[i][k] = powers[i][k - 1] * b[i];
  }
  for (std::size_t k = 0; k < t.exps.size(); ++k) {
    const auto& e = t.exps[k];
    out[k] = t.coef[k] * powers[0][e[0]] * powers[1][e[1]] * powers[2][e[2]];
  }
}

void SplineSpace::bernstein_values(const Barycentric& b, bool lowered, std::span<double> out) const {
  if (degree_ > 15) throw InvalidParam("spline degree above 15 is not supported");
  if (lowered) {
    eval_table(lowered_, degree_ - 1, b, out);
  } else {
    eval_table(full_, degree_, b, out);
  }
}

int SplineSpace::local_index(const MultiIndex& kappa) const {
  auto it = std::find(indices_.begin(), indices_.end(), kappa);
  if (it == indices_.end()) throw std::invalid_argument("multi-index not of the space degree");
  return static_cast<int>(it - indices_.begin());
}

BasisRow SplineSpace::basis_row(const geometry::Location& loc) const {
  BasisRow row;
  row.simplex = loc.simplex;
  row.offset = loc.simplex * dhat_;
  row.values.resize(dhat_);
  bernstein_values(loc.b, false, std::span<double>(row.values.data(), dhat_));
  return row;
}

BasisRow SplineSpace::basis_row(const StatePoint& x) const { return basis_row(tri_->locate(x)); }

std::uint64_t SplineSpace::fingerprint() const {
  std::uint64_t h = tri_->fingerprint();
  for (int v : {degree_, continuity_}) {
    h ^= static_cast<std::uint64_t>(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  return h;
}

BasisRow basis_row(const SplineSpace& space, const StatePoint& x) { return space.basis_row(x); }

SplineFunction::SplineFunction(std::shared_ptr<const SplineSpace> space)
    : space_(std::move(space)), c_(Eigen::VectorXd::Zero(space_->ahat())) {}

SplineFunction::SplineFunction(std::shared_ptr<const SplineSpace> space, Eigen::VectorXd coefficients)
    : space_(std::move(space)) {
  set_coefficients(std::move(coefficients));
}

void SplineFunction::set_coefficients(Eigen::VectorXd c) {
  if (c.size() != space_->ahat()) {
    throw std::invalid_argument("coefficient vector length " + std::to_string(c.size()) +
                                " does not match ahat " + std::to_string(space_->ahat()));
  }
  c_ = std::move(c);
}

double SplineFunction::evaluate(const StatePoint& x) const {
  const BasisRow row = space_->basis_row(x);
  return row.values.dot(c_.segment(row.offset, row.values.size()));
}

double SplineFunction::evaluate_piece(int simplex, const StatePoint& x) const {
  geometry::Location loc{simplex, space_->triangulation().simplex(simplex).to_barycentric(x)};
  const BasisRow row = space_->basis_row(loc);
  return row.values.dot(c_.segment(row.offset, row.values.size()));
}

double SplineFunction::derivative_at(const geometry::Location& loc, const StatePoint& u) const {
  const auto& s = space_->triangulation().simplex(loc.simplex);
  const Barycentric a = s.direction_to_barycentric(u);
  const int n_low = space_->lowered_count();
  double low[136];
  space_->bernstein_values(loc.b, true, std::span<double>(low, n_low));
  const int offset = loc.simplex * space_->dhat();
  const auto& up = space_->raise_table();
  double sum = 0;
  for (int k = 0; k < n_low; ++k) {
    const double inner = a[0] * c_[offset + up[k][0]] + a[1] * c_[offset + up[k][1]] +
                         a[2] * c_[offset + up[k][2]];
    sum += low[k] * inner;
  }
  return space_->degree() * sum;
}

double SplineFunction::directional_derivative(const StatePoint& x, const StatePoint& u) const {
  return derivative_at(space_->triangulation().locate(x), u);
}

double SplineFunction::directional_derivative_piece(int simplex, const StatePoint& x,
                                                    const StatePoint& u) const {
  geometry::Location loc{simplex, space_->triangulation().simplex(simplex).to_barycentric(x)};
  return derivative_at(loc, u);
}

StatePoint SplineFunction::gradient(const StatePoint& x) const {
  const auto loc = space_->triangulation().locate(x);
  return {derivative_at(loc, StatePoint::UnitX()), derivative_at(loc, StatePoint::UnitY())};
}

double evaluate(const SplineFunction& f, const StatePoint& x) { return f.evaluate(x); }

double directional_derivative(const SplineFunction& f, const StatePoint& x, const StatePoint& u) {
  return f.directional_derivative(x, u);
}

StatePoint gradient(const SplineFunction& f, const StatePoint& x) { return f.gradient(x); }

std::vector<std::pair<MultiIndex, StatePoint>> bnet_points(const geometry::Simplex& s, int d) {
  std::vector<std::pair<MultiIndex, StatePoint>> out;
  for (auto& k : enumerate_multi_indices(d, geometry::kDim)) {
    StatePoint p = (k[0] * s.vertex(0) + k[1] * s.vertex(1) + k[2] * s.vertex(2)) / d;
    out.emplace_back(std::move(k), p);
  }
  return out;
}

void write_bnet_csv(std::ostream& out, const SplineFunction& f) {
  const auto& space = f.space();
  out << "simplex,kappa0,kappa1,kappa2,x1,x2,coefficient\n";
  for (int j = 0; j < space.num_simplices(); ++j) {
    const auto pts = bnet_points(space.triangulation().simplex(j), space.degree());
    for (int k = 0; k < space.dhat(); ++k) {
      const auto& [kappa, p] = pts[k];
      out << j << ',' << kappa[0] << ',' << kappa[1] << ',' << kappa[2] << ',' << fmt17(p.x()) << ','
          << fmt17(p.y()) << ',' << fmt17(f.coefficients()[space.global_index(j, k)]) << '\n';
    }
  }
}

}  // namespace sdp::spline
