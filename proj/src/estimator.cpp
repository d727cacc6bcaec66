#include "sdp/estimator.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

namespace sdp::estimator {

SparseVector SparseVector::from_row(const spline::BasisRow& row) {
  SparseVector s;
  s.index.reserve(row.values.size());
  s.value.reserve(row.values.size());
  for (Eigen::Index k = 0; k < row.values.size(); ++k) {
    s.index.push_back(row.offset + static_cast<int>(k));
    s.value.push_back(row.values[k]);
  }
  return s;
}

SparseVector SparseVector::from_dense(const Eigen::VectorXd& x) {
  SparseVector s;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (x[i] != 0.0 || !std::isfinite(x[i])) {
      s.index.push_back(static_cast<int>(i));
      s.value.push_back(x[i]);
    }
  }
  return s;
}

SparseVector SparseVector::difference(const SparseVector& a, double scale, const SparseVector& b) {
  std::map<int, double> acc;
  for (std::size_t k = 0; k < a.index.size(); ++k) acc[a.index[k]] += a.value[k];
  for (std::size_t k = 0; k < b.index.size(); ++k) acc[b.index[k]] -= scale * b.value[k];
  SparseVector s;
  s.index.reserve(acc.size());
  s.value.reserve(acc.size());
  for (const auto& [i, v] : acc) {
    s.index.push_back(i);
    s.value.push_back(v);
  }
  return s;
}

double SparseVector::dot(const Eigen::VectorXd& v) const {
  double sum = 0;
  for (std::size_t k = 0; k < index.size(); ++k) sum += value[k] * v[index[k]];
  return sum;
}

bool SparseVector::all_finite() const {
  for (double v : value) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

void LearningParams::validate() const {
  if (!(gamma >= 0.0 && gamma < 1.0)) throw InvalidParam("gamma must lie in [0, 1)");
  if (!(beta1 > 0.0) || !std::isfinite(beta1)) throw InvalidParam("beta1 must be > 0");
  if (!(beta2 >= 0.0) || !std::isfinite(beta2)) throw InvalidParam("beta2 must be >= 0");
}

const char* to_string(Variant v) { return v == Variant::rlstd ? "rlstd" : "rlstd_forget"; }

Variant parse_variant(const std::string& s) {
  if (s == "rlstd") return Variant::rlstd;
  if (s == "rlstd_forget") return Variant::rlstd_forget;
  throw InvalidParam("unknown estimator variant '" + s + "' (expected rlstd or rlstd_forget)");
}

Estimator Estimator::init(std::shared_ptr<const continuity::NullSpaceProjector> projector,
                          const LearningParams& params) {
  if (!projector) throw InvalidParam("estimator needs a null-space projector");
  params.validate();
  Estimator e;
  e.projector_ = std::move(projector);
  e.params_ = params;
  const auto n = e.projector_->Z.rows();
  e.c_ = Eigen::VectorXd::Zero(n);
  e.P_ = params.beta1 * e.projector_->Z;
  return e;
}

void Estimator::set_beta2(double beta2) {
  LearningParams p = params_;
  p.beta2 = beta2;
  p.validate();
  params_ = p;
}

void Estimator::check_inputs(const SparseVector& a, const SparseVector& b, double target,
                             const char* what) const {
  if (!a.all_finite() || !b.all_finite() || !std::isfinite(target)) {
    throw NumericalFailure(std::string(what) + ": non-finite input at step " + std::to_string(step_count_));
  }
  for (const auto* v : {&a, &b}) {
    for (int i : v->index) {
      if (i < 0 || i >= size()) throw std::out_of_range(std::string(what) + ": regressor index out of range");
    }
  }
}

Eigen::VectorXd Estimator::times_sparse(const SparseVector& x) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(size());
  for (std::size_t k = 0; k < x.index.size(); ++k) out.noalias() += x.value[k] * P_.col(x.index[k]);
  return out;
}

Eigen::VectorXd Estimator::transpose_times_sparse(const SparseVector& x) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(size());
  for (std::size_t k = 0; k < x.index.size(); ++k) out.noalias() += x.value[k] * P_.row(x.index[k]).transpose();
  return out;
}

void Estimator::rls_update(const SparseVector& x, double y) {
  check_inputs(x, x, y, "rls_update");
  const double e = y - x.dot(c_);
  const Eigen::VectorXd Px = times_sparse(x);
  const Eigen::VectorXd xP = transpose_times_sparse(x);
  const double q = 1.0 + x.dot(Px);
  if (!std::isfinite(q) || std::abs(q) < 1e-12) {
    throw NumericalFailure("rls_update: vanishing denominator at step " + std::to_string(step_count_));
  }
  P_.noalias() -= (Px / q) * xP.transpose();
  P_ = (0.5 * (P_ + P_.transpose())).eval();
  c_.noalias() += times_sparse(x) * e;
  ++step_count_;
}

void Estimator::rls_update(const Eigen::VectorXd& x, double y) { rls_update(SparseVector::from_dense(x), y); }

void Estimator::td_step(const SparseVector& x_t, const SparseVector& x_next, double reward, bool forget) {
  check_inputs(x_t, x_next, reward, forget ? "rlstd_forget_update" : "rlstd_update");
  const SparseVector delta = SparseVector::difference(x_t, params_.gamma, x_next);
  const double e = reward - delta.dot(c_);
  const Eigen::VectorXd Px = times_sparse(x_t);
  const Eigen::VectorXd dP = transpose_times_sparse(delta);  // (d' P)'
  const double q = 1.0 + delta.dot(Px);
  if (!std::isfinite(q) || std::abs(q) < 1e-12) {
    throw NumericalFailure("rlstd: |1 + d'P x| below 1e-12 at step " + std::to_string(step_count_));
  }
  const Eigen::VectorXd u = Px / q;

  if (!forget) {
    c_.noalias() += u * e;
    for (Eigen::Index j = 0; j < P_.cols(); ++j) P_.col(j).noalias() -= dP[j] * u;
  } else {
    const auto& Z = projector_->Z;
    Eigen::VectorXd z = Eigen::VectorXd::Zero(size());
    for (std::size_t k = 0; k < x_t.index.size(); ++k) z.noalias() += x_t.value[k] * Z.col(x_t.index[k]);
    const double b2 = params_.beta2;
    for (Eigen::Index j = 0; j < P_.cols(); ++j) {
      P_.col(j).noalias() += (b2 * z[j]) * z - dP[j] * u;
    }
    c_.noalias() += times_sparse(x_t) * e;
  }
  ++step_count_;
}

void Estimator::rlstd_update(const SparseVector& x_t, const SparseVector& x_next, double reward) {
  td_step(x_t, x_next, reward, false);
}

void Estimator::rlstd_update(const Eigen::VectorXd& x_t, const Eigen::VectorXd& x_next, double reward) {
  td_step(SparseVector::from_dense(x_t), SparseVector::from_dense(x_next), reward, false);
}

void Estimator::rlstd_forget_update(const SparseVector& x_t, const SparseVector& x_next, double reward) {
  td_step(x_t, x_next, reward, true);
}

void Estimator::rlstd_forget_update(const Eigen::VectorXd& x_t, const Eigen::VectorXd& x_next,
                                    double reward) {
  td_step(SparseVector::from_dense(x_t), SparseVector::from_dense(x_next), reward, true);
}

void Estimator::td_update(Variant v, const SparseVector& x_t, const SparseVector& x_next, double reward) {
  td_step(x_t, x_next, reward, v == Variant::rlstd_forget);
}

bool Estimator::diverged(double limit) const {
  return !c_.allFinite() || c_.lpNorm<Eigen::Infinity>() > limit;
}

namespace {

std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << v;
  return os.str();
}

}  // namespace

void Estimator::save_checkpoint(const std::string& path, std::uint64_t space_fingerprint) const {
  nlohmann::json j;
  j["format"] = "sdp-estimator-v1";
  j["space_fingerprint"] = hex64(space_fingerprint);
  j["gamma"] = params_.gamma;
  j["beta1"] = params_.beta1;
  j["beta2"] = params_.beta2;
  j["step_count"] = step_count_;
  j["ahat"] = size();
  j["c"] = std::vector<double>(c_.data(), c_.data() + c_.size());
  std::vector<double> p(static_cast<std::size_t>(P_.size()));
  Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(p.data(), P_.rows(),
                                                                                     P_.cols()) = P_;
  j["P"] = std::move(p);
  std::ofstream out(path);
  if (!out) throw Error("cannot write checkpoint " + path);
  out << j.dump() << '\n';
  if (!out) throw Error("failed writing checkpoint " + path);
}

Estimator Estimator::load_checkpoint(const std::string& path,
                                     std::shared_ptr<const continuity::NullSpaceProjector> projector,
                                     std::uint64_t expected_fingerprint) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open checkpoint " + path);
  nlohmann::json j;
  try {
    in >> j;
    if (j.at("format") != "sdp-estimator-v1") throw Error("unknown checkpoint format in " + path);
    if (j.at("space_fingerprint").get<std::string>() != hex64(expected_fingerprint)) {
      throw Error("checkpoint " + path + " was written for a different spline space");
    }
    LearningParams params{j.at("gamma").get<double>(), j.at("beta1").get<double>(), j.at("beta2").get<double>()};
    Estimator e = init(std::move(projector), params);
    const int n = j.at("ahat").get<int>();
    if (n != e.size()) throw Error("checkpoint coefficient count does not match the projector");
    const auto c = j.at("c").get<std::vector<double>>();
    const auto p = j.at("P").get<std::vector<double>>();
    if (static_cast<int>(c.size()) != n || p.size() != static_cast<std::size_t>(n) * n) {
      throw Error("checkpoint arrays have the wrong size");
    }
    e.c_ = Eigen::Map<const Eigen::VectorXd>(c.data(), n);
    e.P_ = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(p.data(), n, n);
    e.step_count_ = j.at("step_count").get<std::int64_t>();
    return e;
  } catch (const nlohmann::json::exception& ex) {
    throw Error("malformed checkpoint " + path + ": " + ex.what());
  }
}

}  // namespace sdp::estimator
