#include "sdp/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <istream>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>

#include "sdp/format.hpp"

namespace sdp::harness {

namespace {

enum class Stream : std::uint32_t { initial_angle = 1, process = 2, exploration = 3 };

std::uint64_t derive_seed(std::uint64_t master, Stream stream, std::uint32_t variant, Phase phase, int trial) {
  std::seed_seq seq{static_cast<std::uint32_t>(master), static_cast<std::uint32_t>(master >> 32),
                    static_cast<std::uint32_t>(stream), variant, static_cast<std::uint32_t>(phase),
                    static_cast<std::uint32_t>(trial)};
  std::uint32_t words[2];
  seq.generate(words, words + 2);
  return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

}  // namespace

void ExperimentConfig::validate() const {
  learning.validate();
  pendulum.validate();
  policy.validate();
  reward.validate();
  if (space.degree < 1 || space.continuity < 0 || space.continuity >= space.degree) {
    throw InvalidParam("spline space needs degree >= 1 and 0 <= continuity < degree");
  }
  if (space.triangulation_file.empty() && (space.theta_nodes < 2 || space.thetadot_nodes < 2)) {
    throw InvalidParam("grid needs at least 2 nodes per axis");
  }
  if (trials < 0 || pretrain_trials < 0) throw InvalidParam("trial counts must be >= 0");
  if (!(trial_length > 0)) throw InvalidParam("trial_length must be > 0");
  const double steps = trial_length / pendulum.dt;
  if (std::abs(steps - std::round(steps)) > 1e-9 * steps) {
    throw InvalidParam("trial_length must be an integral multiple of dt");
  }
  if (!(mass_after > 0)) throw InvalidParam("mass_after must be > 0");
}

int ExperimentConfig::steps_per_trial() const {
  return static_cast<int>(std::lround(trial_length / pendulum.dt));
}

double ExperimentConfig::effective_beta2() const {
  return variant == Variant::rlstd_forget ? learning.beta2 : 0.0;
}

SpaceBundle build_space(const SpaceSpec& spec) {
  std::shared_ptr<const geometry::Triangulation> tri;
  if (!spec.triangulation_file.empty()) {
    tri = std::make_shared<const geometry::Triangulation>(geometry::load_triangulation(spec.triangulation_file));
  } else {
    constexpr double pi = std::numbers::pi;
    const auto th = geometry::uniform_breaks(-pi, pi, spec.theta_nodes);
    const auto thd = geometry::uniform_breaks(-pendulum::kMaxRate, pendulum::kMaxRate, spec.thetadot_nodes);
    tri = std::make_shared<const geometry::Triangulation>(geometry::build_grid_triangulation(th, thd));
  }
  SpaceBundle b;
  b.space = std::make_shared<const spline::SplineSpace>(tri, spec.degree, spec.continuity);
  b.smoothness = continuity::build_smoothness_matrix(*b.space);
  b.projector = std::make_shared<const continuity::NullSpaceProjector>(
      continuity::null_space_projector(b.smoothness.H, b.space->ahat()));
  return b;
}

Agent Agent::create(const SpaceBundle& bundle, Variant variant, const estimator::LearningParams& params) {
  estimator::LearningParams p = params;
  if (variant == Variant::rlstd) p.beta2 = 0.0;
  return Agent{bundle.space, estimator::Estimator::init(bundle.projector, p), variant};
}

spline::SplineFunction Agent::value_function() const { return spline::SplineFunction(space, estimator.c()); }

double SeedStreams::initial_angle(Phase phase, int trial_index) const {
  std::mt19937_64 eng(derive_seed(master_seed, Stream::initial_angle, 0, phase, trial_index));
  std::uniform_real_distribution<double> dist(-std::numbers::pi, std::numbers::pi);
  return dist(eng);
}

std::uint64_t SeedStreams::process_seed(Variant v, Phase phase, int trial_index) const {
  return derive_seed(master_seed, Stream::process, static_cast<std::uint32_t>(v) + 1, phase, trial_index);
}

std::uint64_t SeedStreams::exploration_seed(Variant v, Phase phase, int trial_index) const {
  return derive_seed(master_seed, Stream::exploration, static_cast<std::uint32_t>(v) + 1, phase, trial_index);
}

double compute_t_up(std::span<const double> theta, double dt) {
  constexpr double upright = std::numbers::pi / 4;
  std::size_t best = 0, run = 0;
  for (double th : theta) {
    run = std::abs(th) < upright ? run + 1 : 0;
    best = std::max(best, run);
  }
  if (theta.empty()) return 0.0;
  return dt * static_cast<double>(std::min(best, theta.size() - 1));
}

std::vector<double> moving_average(std::span<const double> series, int window) {
  if (window < 1) throw InvalidParam("moving_average window must be >= 1");
  const int half = window / 2;
  const int n = static_cast<int>(series.size());
  std::vector<double> out(series.size());
  for (int i = 0; i < n; ++i) {
    const int lo = std::max(0, i - half);
    const int hi = std::min(n - 1, i + half);
    double sum = 0;
    for (int k = lo; k <= hi; ++k) sum += series[k];
    out[i] = sum / (hi - lo + 1);
  }
  return out;
}

TrialRecord run_trial(Agent& agent, const ExperimentConfig& cfg, const pendulum::PendulumParams& plant,
                      Phase phase, int trial_index) {
  const SeedStreams seeds{cfg.master_seed};
  std::mt19937_64 process_rng(seeds.process_seed(agent.variant, phase, trial_index));
  std::mt19937_64 explore_rng(seeds.exploration_seed(agent.variant, phase, trial_index));
  std::normal_distribution<double> process_noise(0.0, 1.0);
  std::normal_distribution<double> explore_noise(0.0, 1.0);

  control::PolicyParams policy = cfg.policy;
  policy.u_max = plant.u_max;
  const geometry::StatePoint gain = plant.input_gain();
  const int steps = cfg.steps_per_trial();
  const auto& space = *agent.space;

  TrialRecord rec;
  rec.trial_index = trial_index;
  rec.theta0 = seeds.initial_angle(phase, trial_index);
  std::vector<double> thetas;
  thetas.reserve(steps);
  if (cfg.record_trajectories) rec.trajectory.reserve(steps);

  pendulum::PendulumState state{rec.theta0, 0.0};
  spline::SplineFunction value(agent.space, agent.estimator.c());
  try {
    auto loc = space.triangulation().locate(state.point());
    auto row = estimator::SparseVector::from_row(space.basis_row(loc));
    for (int k = 0; k < steps; ++k) {
      const geometry::StatePoint grad = value.gradient(state.point());
      const double u = control::greedy_action_from_gradient(grad, policy, gain, policy.sigma_n * explore_noise(explore_rng));
      const auto next = pendulum::advance(state, u, process_noise(process_rng), plant);
      rec.clamp_count += next.clamped ? 1 : 0;
      const double r = control::reward(next.state.point(), u, cfg.reward, plant.u_max);
      rec.total_reward += r;

      const auto next_loc = space.triangulation().locate(next.state.point());
      auto next_row = estimator::SparseVector::from_row(space.basis_row(next_loc));
      agent.estimator.td_update(agent.variant, row, next_row, r);
      value.set_coefficients(agent.estimator.c());

      state = next.state;
      row = std::move(next_row);
      thetas.push_back(state.theta);
      if (cfg.record_trajectories) {
        rec.trajectory.push_back({(k + 1) * plant.dt, state.theta, state.thetadot, u, r});
      }
      if (agent.estimator.diverged()) {
        rec.diverged = true;
        rec.diagnostic = "coefficient magnitude exceeded 1e9 at step " + std::to_string(k);
        break;
      }
    }
  } catch (const NumericalFailure& e) {
    rec.diverged = true;
    rec.diagnostic = e.what();
  }
  rec.t_up = compute_t_up(thetas, plant.dt);
  return rec;
}

Summary summarize(std::span<const TrialRecord> records) {
  Summary s;
  s.count = static_cast<int>(records.size());
  if (records.empty()) return s;
  for (const auto& r : records) {
    s.mean += r.t_up;
    s.diverged += r.diverged ? 1 : 0;
    s.clamp_total += r.clamp_count;
  }
  s.mean /= s.count;
  if (s.count > 1) {
    double ss = 0;
    for (const auto& r : records) ss += (r.t_up - s.mean) * (r.t_up - s.mean);
    s.std = std::sqrt(ss / (s.count - 1));
  }
  return s;
}

namespace {

std::vector<TrialRecord> run_block(Agent& agent, const ExperimentConfig& cfg,
                                   const pendulum::PendulumParams& plant, Phase phase, int count,
                                   const TrialCallback& on_trial) {
  std::vector<TrialRecord> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    out.push_back(run_trial(agent, cfg, plant, phase, i));
    if (on_trial) on_trial(phase, out.back());
  }
  return out;
}

}  // namespace

ExperimentResult run_experiment_I(const ExperimentConfig& cfg, const SpaceBundle& bundle,
                                  const TrialCallback& on_trial) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  Agent agent = Agent::create(bundle, cfg.variant, cfg.learning);
  ExperimentResult res;
  res.records = run_block(agent, cfg, cfg.pendulum, Phase::recorded, cfg.trials, on_trial);
  res.summary = summarize(res.records);
  res.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return res;
}

ExperimentResult run_experiment_II(const ExperimentConfig& cfg, const SpaceBundle& bundle,
                                   std::optional<estimator::Estimator> pretrained,
                                   const TrialCallback& on_trial, estimator::Estimator* pretrained_out) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  ExperimentResult res;
  Agent agent = Agent::create(bundle, cfg.variant, cfg.learning);
  if (pretrained) {
    if (pretrained->size() != bundle.space->ahat()) {
      throw InvalidParam("pretrained estimator does not match the spline space");
    }
    agent.estimator = std::move(*pretrained);
    agent.estimator.set_beta2(cfg.effective_beta2());
  } else {
    res.pretrain_records = run_block(agent, cfg, cfg.pendulum, Phase::pretrain, cfg.pretrain_trials, on_trial);
  }
  if (pretrained_out) *pretrained_out = agent.estimator;
  const auto changed = pendulum::set_mass(cfg.pendulum, cfg.mass_after);
  res.records = run_block(agent, cfg, changed, Phase::recorded, cfg.trials, on_trial);
  res.summary = summarize(res.records);
  res.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return res;
}

std::vector<ExperimentResult> run_parallel(std::vector<std::function<ExperimentResult()>> jobs, int workers) {
  std::vector<ExperimentResult> results(jobs.size());
  std::vector<std::exception_ptr> errors(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      try {
        results[i] = jobs[i]();
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int n = std::max(1, std::min<int>(workers, static_cast<int>(jobs.size())));
  std::vector<std::thread> pool;
  for (int i = 1; i < n; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

void write_trials_csv(std::ostream& out, std::span<const TrialRecord> records) {
  out << "trial,theta0_rad,t_up_s,total_reward,clamp_count,diverged\n";
  for (const auto& r : records) {
    out << r.trial_index << ',' << fmt17(r.theta0) << ',' << fmt17(r.t_up) << ',' << fmt17(r.total_reward) << ','
        << r.clamp_count << ',' << (r.diverged ? 1 : 0) << '\n';
  }
}

std::vector<TrialRecord> read_trials_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("trial,theta0_rad,t_up_s", 0) != 0) {
    throw ConfigError("trial CSV: missing or unexpected header");
  }
  std::vector<TrialRecord> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string field;
    std::vector<std::string> f;
    while (std::getline(ls, field, ',')) f.push_back(field);
    if (f.size() != 6) throw ConfigError("trial CSV: expected 6 fields in '" + line + "'");
    TrialRecord r;
    try {
      r.trial_index = std::stoi(f[0]);
      r.theta0 = std::stod(f[1]);
      r.t_up = std::stod(f[2]);
      r.total_reward = std::stod(f[3]);
      r.clamp_count = std::stoi(f[4]);
      r.diverged = std::stoi(f[5]) != 0;
    } catch (const std::exception&) {
      throw ConfigError("trial CSV: malformed number in '" + line + "'");
    }
    out.push_back(r);
  }
  return out;
}

void write_trajectory_csv(std::ostream& out, const TrialRecord& record) {
  out << "t,theta,thetadot,u,reward\n";
  for (const auto& s : record.trajectory) {
    out << fmt17(s.t) << ',' << fmt17(s.theta) << ',' << fmt17(s.thetadot) << ',' << fmt17(s.u) << ','
        << fmt17(s.reward) << '\n';
  }
}

}  // namespace sdp::harness
