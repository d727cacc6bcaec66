#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sdp/continuity.hpp"
#include "sdp/control.hpp"
#include "sdp/estimator.hpp"
#include "sdp/pendulum.hpp"
#include "sdp/spline.hpp"

namespace sdp::harness {

using estimator::Variant;

/// Spline space construction: a grid mesh over the pendulum box, or a mesh file.
struct SpaceSpec {
  int degree = 4;
  int continuity = 1;
  int theta_nodes = 5;
  int thetadot_nodes = 5;
  std::string triangulation_file;  ///< overrides the grid when non-empty
};

struct ExperimentConfig {
  Variant variant = Variant::rlstd;
  estimator::LearningParams learning{0.98, 10.0, 0.4};
  SpaceSpec space;
  pendulum::PendulumParams pendulum;
  control::PolicyParams policy;
  control::RewardParams reward;
  int trials = 100;
  double trial_length = 20.0;
  int pretrain_trials = 1000;
  double mass_after = 1.5;
  std::uint64_t master_seed = 1;
  bool record_trajectories = false;

  void validate() const;
  int steps_per_trial() const;
  /// beta2 actually used by the estimator (0 for plain RLSTD).
  double effective_beta2() const;
};

/// Spline space with its smoothness matrix and null-space projector; built
/// once and shared read-only.
struct SpaceBundle {
  std::shared_ptr<const spline::SplineSpace> space;
  continuity::SmoothnessMatrix smoothness;
  std::shared_ptr<const continuity::NullSpaceProjector> projector;
};

SpaceBundle build_space(const SpaceSpec& spec);

struct TrajectorySample {
  double t = 0, theta = 0, thetadot = 0, u = 0, reward = 0;
};

struct TrialRecord {
  int trial_index = 0;
  double theta0 = 0;
  double t_up = 0;
  double total_reward = 0;
  int clamp_count = 0;
  bool diverged = false;
  std::string diagnostic;
  std::vector<TrajectorySample> trajectory;  ///< only when recording is enabled
};

/// Learning agent: value function estimator threaded through trials.
struct Agent {
  std::shared_ptr<const spline::SplineSpace> space;
  estimator::Estimator estimator;
  Variant variant = Variant::rlstd;

  static Agent create(const SpaceBundle& bundle, Variant variant, const estimator::LearningParams& params);
  spline::SplineFunction value_function() const;
};

/// Trials before and after the mass change draw from separate seed families.
enum class Phase : std::uint32_t { recorded = 0, pretrain = 1 };

/// Deterministic sub-streams derived from the master seed.
struct SeedStreams {
  std::uint64_t master_seed = 1;

  /// theta0 ~ U(-pi, pi); independent of variant.
  double initial_angle(Phase phase, int trial_index) const;
  std::uint64_t process_seed(Variant v, Phase phase, int trial_index) const;
  std::uint64_t exploration_seed(Variant v, Phase phase, int trial_index) const;
};

/// Longest run of samples with |theta| < pi/4, times dt. A run can span at
/// most (samples - 1) steps, so 1000 upright post-step samples give 19.98 s.
double compute_t_up(std::span<const double> theta, double dt);

/// Centered moving average truncated at the edges.
std::vector<double> moving_average(std::span<const double> series, int window = 5);

/// One trial: random theta0 with zero rate, then for each step action,
/// environment step, reward and estimator update.
TrialRecord run_trial(Agent& agent, const ExperimentConfig& cfg, const pendulum::PendulumParams& plant,
                      Phase phase, int trial_index);

struct Summary {
  int count = 0;
  double mean = 0;
  double std = 0;  ///< sample standard deviation (n - 1)
  int diverged = 0;
  long clamp_total = 0;
};

Summary summarize(std::span<const TrialRecord> records);

struct ExperimentResult {
  std::vector<TrialRecord> records;
  Summary summary;
  std::vector<TrialRecord> pretrain_records;  ///< experiment II only
  double runtime_s = 0;
};

using TrialCallback = std::function<void(Phase, const TrialRecord&)>;

/// cfg.trials learning trials at the configured plant.
ExperimentResult run_experiment_I(const ExperimentConfig& cfg, const SpaceBundle& bundle,
                                  const TrialCallback& on_trial = {});

/// Pretrain cfg.pretrain_trials (skipped when `pretrained` is given), switch
/// the mass to cfg.mass_after and record cfg.trials further trials.
ExperimentResult run_experiment_II(const ExperimentConfig& cfg, const SpaceBundle& bundle,
                                   std::optional<estimator::Estimator> pretrained = std::nullopt,
                                   const TrialCallback& on_trial = {},
                                   estimator::Estimator* pretrained_out = nullptr);

/// Runs independent jobs on up to `workers` threads; results keep job order.
std::vector<ExperimentResult> run_parallel(std::vector<std::function<ExperimentResult()>> jobs, int workers);

void write_trials_csv(std::ostream& out, std::span<const TrialRecord> records);
std::vector<TrialRecord> read_trials_csv(std::istream& in);
void write_trajectory_csv(std::ostream& out, const TrialRecord& record);

}  // namespace sdp::harness
