#include "sdp/pendulum.hpp"

#include <algorithm>
#include <cmath>

namespace sdp::pendulum {

void PendulumParams::validate() const {
  if (!(m > 0) || !(l > 0) || !(dt > 0)) throw InvalidParam("pendulum m, l and dt must be > 0");
  if (!(mu >= 0) || !(sigma_w >= 0)) throw InvalidParam("pendulum mu and sigma_w must be >= 0");
  if (!(u_max > 0)) throw InvalidParam("pendulum u_max must be > 0");
  if (!std::isfinite(g)) throw InvalidParam("pendulum g must be finite");
}

geometry::StatePoint PendulumParams::input_gain() const { return {0.0, 1.0 / (m * l * l)}; }

double wrap_angle(double theta) {
  constexpr double pi = std::numbers::pi;
  double w = std::fmod(theta + pi, 2 * pi);
  if (w < 0) w += 2 * pi;
  w -= pi;
  return w >= pi ? -pi : w;
}

StepResult advance(const PendulumState& s, double u, double w_sample, const PendulumParams& p) {
  const double inertia = p.m * p.l * p.l;
  const double acc = (p.g / p.l) * std::sin(s.theta) - (p.mu / inertia) * s.thetadot + u / inertia +
                     p.sigma_w * w_sample;
  StepResult r;
  const double rate = s.thetadot + p.dt * acc;
  r.state.thetadot = std::clamp(rate, -kMaxRate, kMaxRate);
  r.clamped = r.state.thetadot != rate;
  r.state.theta = wrap_angle(s.theta + p.dt * s.thetadot);
  return r;
}

PendulumState step(const PendulumState& s, double u, double w_sample, const PendulumParams& p) {
  return advance(s, u, w_sample, p).state;
}

PendulumParams set_mass(const PendulumParams& p, double m_new) {
  if (!(m_new > 0) || !std::isfinite(m_new)) throw InvalidParam("pendulum mass must be > 0");
  PendulumParams out = p;
  out.m = m_new;
  return out;
}

double energy(const PendulumState& s, const PendulumParams& p) {
  return 0.5 * p.m * p.l * p.l * s.thetadot * s.thetadot + p.m * p.g * p.l * std::cos(s.theta);
}

}  // namespace sdp::pendulum
