#include <doctest.h>

#include <numbers>
#include <sstream>

#include "sdp/error.hpp"
#include "sdp/harness.hpp"
#include "support.hpp"

using namespace sdp;
using harness::ExperimentConfig;
using std::numbers::pi;

namespace {

/// Quadratic C1 splines on the 8-triangle 3 x 3 grid.
ExperimentConfig desk_config() {
  ExperimentConfig cfg;
  cfg.space.degree = 2;
  cfg.space.continuity = 1;
  cfg.space.theta_nodes = 3;
  cfg.space.thetadot_nodes = 3;
  cfg.learning.beta2 = 0;
  return cfg;
}

double mean_of(const std::vector<harness::TrialRecord>& r, int from, int to) {
  double s = 0;
  for (int i = from; i < to; ++i) s += r[i].t_up;
  return s / (to - from);
}

}  // namespace

TEST_SUITE("harness") {

TEST_CASE("t_up counts the longest upright run") {
  const double dt = 0.02;
  CHECK(harness::compute_t_up(std::vector<double>(1000, 0.1), dt) == doctest::Approx(19.98));
  CHECK(harness::compute_t_up(std::vector<double>(1000, 3.0), dt) == 0.0);
  std::vector<double> th(40, 2.0);
  for (int i = 5; i < 8; ++i) th[i] = 0.1;
  for (int i = 20; i < 25; ++i) th[i] = -0.5;
  CHECK(harness::compute_t_up(th, dt) == doctest::Approx(0.10));
  CHECK(harness::compute_t_up(std::vector<double>{}, dt) == 0.0);
  // The boundary itself is not upright.
  CHECK(harness::compute_t_up(std::vector<double>(10, pi / 4), dt) == 0.0);
}

TEST_CASE("held upright from a late entry") {
  std::vector<double> th(1000, 2.5);
  for (int i = 300; i < 1000; ++i) th[i] = 0.05;
  CHECK(harness::compute_t_up(th, 0.02) == doctest::Approx(14.0));
}

TEST_CASE("moving average") {
  const std::vector<double> c(7, 2.5);
  for (double v : harness::moving_average(c)) CHECK(v == doctest::Approx(2.5));
  const std::vector<double> impulse{0, 0, 5, 0, 0};
  const auto m = harness::moving_average(impulse);
  CHECK(m[2] == doctest::Approx(1.0));
  CHECK(m[0] == doctest::Approx(5.0 / 3));
  CHECK(harness::moving_average(std::vector<double>{}).empty());
}

TEST_CASE("seed streams share initial angles across variants only") {
  const harness::SeedStreams s{42};
  const auto rl = estimator::Variant::rlstd, fg = estimator::Variant::rlstd_forget;
  const auto rec = harness::Phase::recorded, pre = harness::Phase::pretrain;
  CHECK(s.process_seed(rl, rec, 3) != s.process_seed(fg, rec, 3));
  CHECK(s.exploration_seed(rl, rec, 3) != s.process_seed(rl, rec, 3));
  CHECK(s.initial_angle(rec, 3) != s.initial_angle(pre, 3));
  CHECK(s.initial_angle(rec, 3) != s.initial_angle(rec, 4));
  CHECK(s.initial_angle(rec, 3) == harness::SeedStreams{42}.initial_angle(rec, 3));
  CHECK(s.initial_angle(rec, 3) != harness::SeedStreams{43}.initial_angle(rec, 3));
  for (int i = 0; i < 1000; ++i) {
    const double a = s.initial_angle(rec, i);
    CHECK(a >= -pi);
    CHECK(a < pi);
  }
}

TEST_CASE("config validation") {
  ExperimentConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  CHECK(cfg.steps_per_trial() == 1000);
  cfg.trial_length = 20.01;
  CHECK_THROWS_AS(cfg.validate(), InvalidParam);
  cfg = {};
  cfg.trials = -1;
  CHECK_THROWS_AS(cfg.validate(), InvalidParam);
  cfg = {};
  cfg.variant = estimator::Variant::rlstd;
  CHECK(cfg.effective_beta2() == 0.0);
  cfg.variant = estimator::Variant::rlstd_forget;
  CHECK(cfg.effective_beta2() == 0.4);
}

TEST_CASE("zero reward keeps the agent frozen: no torque") {
  auto cfg = desk_config();
  cfg.reward.c_x = 0;
  cfg.reward.c_u = 0;
  cfg.policy.sigma_n = 0;
  cfg.record_trajectories = true;
  const auto bundle = harness::build_space(cfg.space);
  auto agent = harness::Agent::create(bundle, cfg.variant, cfg.learning);
  int checked = 0;
  for (int trial = 0; checked < 3; ++trial) {
    const double th0 = harness::SeedStreams{cfg.master_seed}.initial_angle(harness::Phase::recorded, trial);
    if (std::abs(th0) < 2.5) continue;  // starts low: a free swing never gets near the top
    const auto rec = harness::run_trial(agent, cfg, cfg.pendulum, harness::Phase::recorded, trial);
    for (const auto& s : rec.trajectory) CHECK(s.u == 0.0);
    CHECK(rec.t_up < 0.5);
    CHECK(agent.estimator.c().isZero(0));
    ++checked;
  }
}

TEST_CASE("trial records are deterministic and bounded") {
  auto cfg = desk_config();
  cfg.pendulum.sigma_w = 3;
  const auto bundle = harness::build_space(cfg.space);
  auto a = harness::Agent::create(bundle, cfg.variant, cfg.learning);
  auto b = harness::Agent::create(bundle, cfg.variant, cfg.learning);
  for (int t = 0; t < 5; ++t) {
    const auto ra = harness::run_trial(a, cfg, cfg.pendulum, harness::Phase::recorded, t);
    const auto rb = harness::run_trial(b, cfg, cfg.pendulum, harness::Phase::recorded, t);
    CHECK(ra.t_up == rb.t_up);
    CHECK(ra.total_reward == rb.total_reward);
    CHECK(ra.clamp_count == rb.clamp_count);
    CHECK(ra.t_up >= 0);
    CHECK(ra.t_up <= cfg.trial_length);
    const double steps = ra.t_up / cfg.pendulum.dt;
    CHECK(std::abs(steps - std::round(steps)) < 1e-9);
  }
  CHECK(a.estimator.c() == b.estimator.c());
}

TEST_CASE("experiment I shows a learning signal") {
  ExperimentConfig cfg;
  cfg.variant = estimator::Variant::rlstd;
  const auto bundle = harness::build_space(cfg.space);
  const auto res = harness::run_experiment_I(cfg, bundle);
  REQUIRE(res.records.size() == 100);
  CHECK(mean_of(res.records, 20, 100) > mean_of(res.records, 0, 5));
  CHECK(res.summary.count == 100);
  CHECK(res.summary.diverged == 0);
}

TEST_CASE("variants see the same initial angles") {
  auto cfg = desk_config();
  cfg.trials = 10;
  const auto bundle = harness::build_space(cfg.space);
  cfg.variant = estimator::Variant::rlstd;
  const auto a = harness::run_experiment_I(cfg, bundle);
  cfg.variant = estimator::Variant::rlstd_forget;
  const auto b = harness::run_experiment_I(cfg, bundle);
  for (int i = 0; i < 10; ++i) CHECK(a.records[i].theta0 == b.records[i].theta0);
}

TEST_CASE("experiment II without a mass change keeps its performance") {
  auto cfg = desk_config();
  cfg.pretrain_trials = 200;
  cfg.mass_after = 1.0;
  const auto bundle = harness::build_space(cfg.space);
  const auto res = harness::run_experiment_II(cfg, bundle);
  REQUIRE(res.pretrain_records.size() == 200);
  REQUIRE(res.records.size() == 100);
  const double before = mean_of(res.pretrain_records, 100, 200);
  CHECK(std::abs(res.summary.mean - before) < 3.0);
}

TEST_CASE("experiment II reuses a pretrained estimator") {
  auto cfg = desk_config();
  cfg.pretrain_trials = 20;
  cfg.trials = 5;
  const auto bundle = harness::build_space(cfg.space);
  auto snapshot = estimator::Estimator::init(bundle.projector, cfg.learning);
  const auto first = harness::run_experiment_II(cfg, bundle, std::nullopt, {}, &snapshot);
  CHECK(snapshot.step_count() == 20 * 1000);
  const auto second = harness::run_experiment_II(cfg, bundle, snapshot);
  CHECK(second.pretrain_records.empty());
  for (int i = 0; i < 5; ++i) CHECK(first.records[i].t_up == second.records[i].t_up);
}

TEST_CASE("trial CSV round trip reproduces the summary") {
  std::vector<harness::TrialRecord> recs;
  test::Gen g(60);
  for (int i = 0; i < 50; ++i) {
    harness::TrialRecord r;
    r.trial_index = i;
    r.theta0 = g.uniform(-pi, pi);
    r.t_up = 0.02 * g.integer(0, 999);
    r.total_reward = -g.uniform(0, 1000);
    r.clamp_count = g.integer(0, 5);
    r.diverged = g.integer(0, 10) == 0;
    recs.push_back(r);
  }
  std::stringstream ss;
  harness::write_trials_csv(ss, recs);
  const auto back = harness::read_trials_csv(ss);
  REQUIRE(back.size() == recs.size());
  const auto a = harness::summarize(recs), b = harness::summarize(back);
  CHECK(a.mean == b.mean);
  CHECK(a.std == b.std);
  CHECK(a.diverged == b.diverged);
  for (std::size_t i = 0; i < recs.size(); ++i) {
    CHECK(back[i].theta0 == recs[i].theta0);
    CHECK(back[i].total_reward == recs[i].total_reward);
  }
}

TEST_CASE("summary statistics") {
  std::vector<harness::TrialRecord> recs(4);
  const double t[] = {10, 12, 14, 16};
  for (int i = 0; i < 4; ++i) recs[i].t_up = t[i];
  const auto s = harness::summarize(recs);
  CHECK(s.mean == doctest::Approx(13));
  CHECK(s.std == doctest::Approx(std::sqrt(20.0 / 3)));
}

TEST_CASE("run_parallel keeps job order") {
  std::vector<std::function<harness::ExperimentResult()>> jobs;
  for (int i = 0; i < 6; ++i) {
    jobs.push_back([i] {
      harness::ExperimentResult r;
      r.summary.count = i;
      return r;
    });
  }
  const auto out = harness::run_parallel(std::move(jobs), 3);
  REQUIRE(out.size() == 6);
  for (int i = 0; i < 6; ++i) CHECK(out[i].summary.count == i);
}

}  // TEST_SUITE
