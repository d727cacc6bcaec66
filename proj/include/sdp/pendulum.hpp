#pragma once

#include <numbers>

#include "sdp/geometry.hpp"

namespace sdp::pendulum {

struct PendulumParams {
  double m = 1.0;      ///< point mass [kg]
  double l = 1.0;      ///< rod length [m]
  double g = 9.8;      ///< gravity [m/s^2]
  double mu = 0.01;    ///< viscous friction
  double u_max = 5.0;  ///< torque bound [N m]
  double sigma_w = 0;  ///< process noise std, same units as u/(m l^2)
  double dt = 0.02;    ///< Euler step [s]

  void validate() const;
  /// df/du = (0, 1/(m l^2)).
  geometry::StatePoint input_gain() const;
};

/// theta is measured from upright and wrapped to [-pi, pi); thetadot is
/// clamped to [-max_rate, max_rate].
struct PendulumState {
  double theta = 0;
  double thetadot = 0;

  geometry::StatePoint point() const { return {theta, thetadot}; }
};

inline constexpr double kMaxRate = 2 * std::numbers::pi;

struct StepResult {
  PendulumState state;
  bool clamped = false;
};

double wrap_angle(double theta);

/// One explicit Euler step:
///   thetadd = (g/l) sin theta - mu/(m l^2) thetadot + u/(m l^2) + sigma_w w
/// with w ~ N(0,1) supplied by the caller.
StepResult advance(const PendulumState& s, double u, double w_sample, const PendulumParams& p);
PendulumState step(const PendulumState& s, double u, double w_sample, const PendulumParams& p);

/// Copy of `p` with a new mass; throws InvalidParam for m <= 0.
PendulumParams set_mass(const PendulumParams& p, double m_new);

/// Kinetic plus potential energy with the pivot as reference.
double energy(const PendulumState& s, const PendulumParams& p);

}  // namespace sdp::pendulum
