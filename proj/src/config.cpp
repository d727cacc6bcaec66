#include "sdp/config.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "sdp/format.hpp"

namespace sdp::config {

namespace {

namespace pt = boost::property_tree;
using harness::ExperimentConfig;

using Setter = std::function<void(ExperimentConfig&, const std::string&)>;

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': expected a number, got '" + v + "'");
  }
}

long long to_int(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const long long i = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return i;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': expected an integer, got '" + v + "'");
  }
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("config key '" + key + "': expected true/false, got '" + v + "'");
}

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = [] {
    std::map<std::string, Setter> t;
    auto real = [&](const std::string& k, std::function<double&(ExperimentConfig&)> ref) {
      t[k] = [k, ref](ExperimentConfig& c, const std::string& v) { ref(c) = to_double(k, v); };
    };
    auto integer = [&](const std::string& k, std::function<int&(ExperimentConfig&)> ref) {
      t[k] = [k, ref](ExperimentConfig& c, const std::string& v) { ref(c) = static_cast<int>(to_int(k, v)); };
    };
    t["experiment.variant"] = [](ExperimentConfig& c, const std::string& v) {
      try {
        c.variant = estimator::parse_variant(v);
      } catch (const InvalidParam& e) {
        throw ConfigError(e.what());
      }
    };
    integer("experiment.trials", [](ExperimentConfig& c) -> int& { return c.trials; });
    real("experiment.trial_length", [](ExperimentConfig& c) -> double& { return c.trial_length; });
    integer("experiment.pretrain_trials", [](ExperimentConfig& c) -> int& { return c.pretrain_trials; });
    real("experiment.mass_after", [](ExperimentConfig& c) -> double& { return c.mass_after; });
    t["experiment.seed"] = [](ExperimentConfig& c, const std::string& v) {
      const long long s = to_int("experiment.seed", v);
      if (s < 0) throw ConfigError("config key 'experiment.seed' must be >= 0");
      c.master_seed = static_cast<std::uint64_t>(s);
    };
    t["experiment.record_trajectories"] = [](ExperimentConfig& c, const std::string& v) {
      c.record_trajectories = to_bool("experiment.record_trajectories", v);
    };
    real("learning.gamma", [](ExperimentConfig& c) -> double& { return c.learning.gamma; });
    real("learning.beta1", [](ExperimentConfig& c) -> double& { return c.learning.beta1; });
    real("learning.beta2", [](ExperimentConfig& c) -> double& { return c.learning.beta2; });
    integer("spline.degree", [](ExperimentConfig& c) -> int& { return c.space.degree; });
    integer("spline.continuity", [](ExperimentConfig& c) -> int& { return c.space.continuity; });
    integer("spline.theta_nodes", [](ExperimentConfig& c) -> int& { return c.space.theta_nodes; });
    integer("spline.thetadot_nodes", [](ExperimentConfig& c) -> int& { return c.space.thetadot_nodes; });
    t["spline.triangulation_file"] = [](ExperimentConfig& c, const std::string& v) {
      c.space.triangulation_file = v;
    };
    real("pendulum.m", [](ExperimentConfig& c) -> double& { return c.pendulum.m; });
    real("pendulum.l", [](ExperimentConfig& c) -> double& { return c.pendulum.l; });
    real("pendulum.g", [](ExperimentConfig& c) -> double& { return c.pendulum.g; });
    real("pendulum.mu", [](ExperimentConfig& c) -> double& { return c.pendulum.mu; });
    real("pendulum.u_max", [](ExperimentConfig& c) -> double& { return c.pendulum.u_max; });
    real("pendulum.sigma_w", [](ExperimentConfig& c) -> double& { return c.pendulum.sigma_w; });
    real("pendulum.dt", [](ExperimentConfig& c) -> double& { return c.pendulum.dt; });
    real("policy.tau", [](ExperimentConfig& c) -> double& { return c.policy.tau; });
    real("policy.c_cost", [](ExperimentConfig& c) -> double& { return c.policy.c_cost; });
    real("policy.sigma_n", [](ExperimentConfig& c) -> double& { return c.policy.sigma_n; });
    real("reward.c_x", [](ExperimentConfig& c) -> double& { return c.reward.c_x; });
    real("reward.c_u", [](ExperimentConfig& c) -> double& { return c.reward.c_u; });
    t["reward.sign_as_printed"] = [](ExperimentConfig& c, const std::string& v) {
      c.reward.sign_as_printed = to_bool("reward.sign_as_printed", v);
    };
    return t;
  }();
  return table;
}

}  // namespace

ExperimentConfig parse(const std::string& text) {
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  ExperimentConfig cfg;
  for (const auto& [section, body] : tree) {
    if (!body.data().empty()) {
      throw ConfigError("config: key '" + section + "' must be inside a [section]");
    }
    for (const auto& [key, value] : body) {
      const std::string full = section + "." + key;
      const auto it = setters().find(full);
      if (it == setters().end()) throw ConfigError("config: unknown key '" + full + "'");
      it->second(cfg, value.get_value<std::string>());
    }
  }
  try {
    cfg.validate();
  } catch (const InvalidParam& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return cfg;
}

ExperimentConfig load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

std::string to_ini(const ExperimentConfig& c) {
  std::ostringstream os;
  auto b = [](bool v) { return v ? "true" : "false"; };
  os << "[experiment]\n"
     << "variant = " << estimator::to_string(c.variant) << '\n'
     << "trials = " << c.trials << '\n'
     << "trial_length = " << fmt17(c.trial_length) << '\n'
     << "pretrain_trials = " << c.pretrain_trials << '\n'
     << "mass_after = " << fmt17(c.mass_after) << '\n'
     << "seed = " << c.master_seed << '\n'
     << "record_trajectories = " << b(c.record_trajectories) << '\n'
     << "\n[learning]\n"
     << "gamma = " << fmt17(c.learning.gamma) << '\n'
     << "beta1 = " << fmt17(c.learning.beta1) << '\n'
     << "beta2 = " << fmt17(c.learning.beta2) << '\n'
     << "\n[spline]\n"
     << "degree = " << c.space.degree << '\n'
     << "continuity = " << c.space.continuity << '\n'
     << "theta_nodes = " << c.space.theta_nodes << '\n'
     << "thetadot_nodes = " << c.space.thetadot_nodes << '\n'
     << "triangulation_file = " << c.space.triangulation_file << '\n'
     << "\n[pendulum]\n"
     << "m = " << fmt17(c.pendulum.m) << '\n'
     << "l = " << fmt17(c.pendulum.l) << '\n'
     << "g = " << fmt17(c.pendulum.g) << '\n'
     << "mu = " << fmt17(c.pendulum.mu) << '\n'
     << "u_max = " << fmt17(c.pendulum.u_max) << '\n'
     << "sigma_w = " << fmt17(c.pendulum.sigma_w) << '\n'
     << "dt = " << fmt17(c.pendulum.dt) << '\n'
     << "\n[policy]\n"
     << "tau = " << fmt17(c.policy.tau) << '\n'
     << "c_cost = " << fmt17(c.policy.c_cost) << '\n'
     << "sigma_n = " << fmt17(c.policy.sigma_n) << '\n'
     << "\n[reward]\n"
     << "c_x = " << fmt17(c.reward.c_x) << '\n'
     << "c_u = " << fmt17(c.reward.c_u) << '\n'
     << "sign_as_printed = " << b(c.reward.sign_as_printed) << '\n';
  return os.str();
}

std::uint64_t hash(const ExperimentConfig& cfg) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char ch : to_ini(cfg)) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace sdp::config
