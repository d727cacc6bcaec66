#include "sdp/control.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace sdp::control {

void PolicyParams::validate() const {
  if (!(u_max > 0)) throw InvalidParam("policy u_max must be > 0");
  if (!(c_cost > 0)) throw InvalidParam("policy c_cost must be > 0");
  if (!std::isfinite(tau)) throw InvalidParam("policy tau must be finite");
  if (!(sigma_n >= 0)) throw InvalidParam("policy sigma_n must be >= 0");
}

void RewardParams::validate() const {
  if (!(c_x >= 0) || !(c_u >= 0)) throw InvalidParam("reward weights must be >= 0");
}

double greedy_action_from_gradient(const spline::StatePoint& value_gradient, const PolicyParams& p,
                                   const spline::StatePoint& input_gain, double noise_sample) {
  const double arg = std::numbers::pi / 2 * (p.tau / p.c_cost) * value_gradient.dot(input_gain) + noise_sample;
  const double bound = kSaturation * p.u_max;
  return std::clamp(p.u_max * std::tanh(arg), -bound, bound);
}

double greedy_action(const spline::SplineFunction& V, const spline::StatePoint& x, const PolicyParams& p,
                     const spline::StatePoint& input_gain, double noise_sample) {
  return greedy_action_from_gradient(V.gradient(x), p, input_gain, noise_sample);
}

double control_cost_integral(double u, double u_max) {
  const double a = std::min(std::abs(u) / u_max, kSaturation);
  return -(2.0 / std::numbers::pi) * std::log(std::cos(std::numbers::pi / 2 * a));
}

double reward(const spline::StatePoint& x_next, double u, const RewardParams& rp, double u_max) {
  const double state_term = rp.c_x * (std::cos(x_next[0]) - 1.0);
  const double control_term = rp.c_u * control_cost_integral(u, u_max);
  return rp.sign_as_printed ? state_term + control_term : state_term - control_term;
}

}  // namespace sdp::control
