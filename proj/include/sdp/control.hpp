#pragma once

#include "sdp/spline.hpp"

namespace sdp::control {

struct PolicyParams {
  double u_max = 5.0;    ///< torque bound [N m]
  double c_cost = 0.1;   ///< control cost constant
  double tau = 1.0;      ///< step-size / temperature
  double sigma_n = 0.01; ///< exploration noise std inside the tanh

  void validate() const;
};

struct RewardParams {
  double c_x = 1.0;
  double c_u = 0.1;
  /// Add the control integral instead of subtracting it (literal form).
  bool sign_as_printed = false;

  void validate() const;
};

/// Largest admissible |u| relative to u_max; outputs are clamped strictly inside.
inline constexpr double kSaturation = 1.0 - 1e-9;

/// u = u_max tanh((pi/2) (tau/c) <grad V(x), input_gain> + noise_sample),
/// clamped so that |u| < u_max.
double greedy_action(const spline::SplineFunction& V, const spline::StatePoint& x, const PolicyParams& p,
                     const spline::StatePoint& input_gain, double noise_sample);

/// Same law from a precomputed value gradient.
double greedy_action_from_gradient(const spline::StatePoint& value_gradient, const PolicyParams& p,
                                   const spline::StatePoint& input_gain, double noise_sample);

/// int_0^a tan((pi/2) s) ds = -(2/pi) ln cos((pi/2) a), for a = |u|/u_max
/// clamped to kSaturation.
double control_cost_integral(double u, double u_max);

/// c_x (cos theta - 1) - c_u * control_cost_integral(u, u_max).
double reward(const spline::StatePoint& x_next, double u, const RewardParams& rp, double u_max);

}  // namespace sdp::control
