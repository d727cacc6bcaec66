#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sdp/continuity.hpp"
#include "sdp/spline.hpp"

namespace sdp::estimator {

/// Regressor with few non-zeros (one or two simplex blocks).
struct SparseVector {
  std::vector<int> index;
  std::vector<double> value;

  static SparseVector from_row(const spline::BasisRow& row);
  static SparseVector from_dense(const Eigen::VectorXd& x);
  /// a - scale * b, merging coincident indices.
  static SparseVector difference(const SparseVector& a, double scale, const SparseVector& b);

  double dot(const Eigen::VectorXd& v) const;
  bool all_finite() const;
  std::size_t nonzeros() const { return index.size(); }
};

struct LearningParams {
  double gamma = 0.98;  ///< discount factor, [0, 1)
  double beta1 = 10.0;  ///< initial covariance scale, > 0
  double beta2 = 0.0;   ///< continuity-preserving forget gain, >= 0

  void validate() const;
};

enum class Variant { rlstd, rlstd_forget };

const char* to_string(Variant v);
Variant parse_variant(const std::string& s);

/// Recursive least-squares estimator state: coefficients c, covariance P and
/// the null-space projector Z that keeps H c = 0.
class Estimator {
 public:
  /// c = 0, P = beta1 * Z.
  static Estimator init(std::shared_ptr<const continuity::NullSpaceProjector> projector,
                        const LearningParams& params);

  /// Plain RLS: e = y - x'c; P -= P x x' P / (1 + x' P x); c += P x e.
  void rls_update(const SparseVector& x, double y);
  void rls_update(const Eigen::VectorXd& x, double y);

  /// RLSTD with d = x_t - gamma x_next, q = 1 + d' P x_t:
  /// P -= P x_t d' P / q; c += (P_old / q) x_t e.
  void rlstd_update(const SparseVector& x_t, const SparseVector& x_next, double reward);
  void rlstd_update(const Eigen::VectorXd& x_t, const Eigen::VectorXd& x_next, double reward);

  /// RLSTD whose covariance step adds beta2 Z x_t x_t' Z and whose coefficient
  /// step uses the updated covariance: c += P_new x_t e.
  void rlstd_forget_update(const SparseVector& x_t, const SparseVector& x_next, double reward);
  void rlstd_forget_update(const Eigen::VectorXd& x_t, const Eigen::VectorXd& x_next, double reward);

  void td_update(Variant v, const SparseVector& x_t, const SparseVector& x_next, double reward);

  const Eigen::VectorXd& c() const { return c_; }
  const Eigen::MatrixXd& P() const { return P_; }
  const continuity::NullSpaceProjector& projector() const { return *projector_; }
  std::shared_ptr<const continuity::NullSpaceProjector> projector_ptr() const { return projector_; }
  const LearningParams& params() const { return params_; }
  void set_beta2(double beta2);
  std::int64_t step_count() const { return step_count_; }
  int size() const { return static_cast<int>(c_.size()); }

  /// True once ||c||_inf exceeds `limit`.
  bool diverged(double limit = 1e9) const;

  /// JSON checkpoint {c, P, gamma, beta1, beta2, step_count} tagged with the
  /// spline-space fingerprint.
  void save_checkpoint(const std::string& path, std::uint64_t space_fingerprint) const;
  static Estimator load_checkpoint(const std::string& path,
                                   std::shared_ptr<const continuity::NullSpaceProjector> projector,
                                   std::uint64_t expected_fingerprint);

 private:
  Estimator() = default;
  void check_inputs(const SparseVector& a, const SparseVector& b, double target, const char* what) const;
  Eigen::VectorXd times_sparse(const SparseVector& x) const;
  Eigen::VectorXd transpose_times_sparse(const SparseVector& x) const;
  void td_step(const SparseVector& x_t, const SparseVector& x_next, double reward, bool forget);

  Eigen::VectorXd c_;
  Eigen::MatrixXd P_;
  std::shared_ptr<const continuity::NullSpaceProjector> projector_;
  LearningParams params_;
  std::int64_t step_count_ = 0;
};

}  // namespace sdp::estimator
