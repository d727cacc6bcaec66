#include "sdp/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "sdp/config.hpp"
#include "sdp/format.hpp"
#include "sdp/harness.hpp"

namespace sdp::cli {

namespace fs = std::filesystem;
using harness::ExperimentConfig;

namespace {

ExperimentConfig load_config(const std::string& path) {
  return path.empty() ? ExperimentConfig{} : config::load(path);
}

std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << v;
  return os.str();
}

std::string utc_now() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

// Maps library exceptions onto the documented exit codes.
template <class Fn>
int guarded(std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const InvalidParam& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const InvalidTriangulation& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const InvalidGrid& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const NumericalFailure& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kNumericalFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
}

nlohmann::json summary_json(const harness::Summary& s, double runtime_s) {
  return {{"count", s.count},         {"mean_t_up_s", s.mean},           {"std_t_up_s", s.std},
          {"diverged", s.diverged},   {"clamp_total", s.clamp_total}, {"runtime_s", runtime_s}};
}

}  // namespace

int cmd_space(const SpaceOptions& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto cfg = load_config(opt.config_path);
    const auto bundle = harness::build_space(cfg.space);
    const auto& space = *bundle.space;
    out << "J=" << space.num_simplices() << " dhat=" << space.dhat() << " ahat=" << space.ahat()
        << " rank_H=" << bundle.projector->rank_H << " free=" << bundle.projector->free_parameters() << '\n';
    if (!opt.bnet_csv.empty()) {
      spline::SplineFunction f(bundle.space);
      if (!opt.checkpoint.empty()) {
        const auto est = estimator::Estimator::load_checkpoint(opt.checkpoint, bundle.projector, space.fingerprint());
        f.set_coefficients(est.c());
      }
      std::ofstream csv(opt.bnet_csv);
      if (!csv) throw Error("cannot write " + opt.bnet_csv);
      spline::write_bnet_csv(csv, f);
    }
    if (!opt.dump_matrices.empty()) {
      fs::create_directories(opt.dump_matrices);
      std::ofstream h(fs::path(opt.dump_matrices) / "H.csv");
      continuity::write_matrix_csv(h, bundle.smoothness.H);
      std::ofstream z(fs::path(opt.dump_matrices) / "Z.csv");
      continuity::write_matrix_csv(z, bundle.projector->Z);
    }
    return kOk;
  });
}

int cmd_run(const RunOptions& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    ExperimentConfig cfg = load_config(opt.config_path);
    if (opt.seed) cfg.master_seed = *opt.seed;
    if (opt.sigma_w) cfg.pendulum.sigma_w = *opt.sigma_w;
    if (opt.trials) cfg.trials = *opt.trials;
    if (opt.pretrain_trials) cfg.pretrain_trials = *opt.pretrain_trials;
    if (opt.trajectories) cfg.record_trajectories = true;
    if (opt.experiment != "I" && opt.experiment != "II") {
      throw ConfigError("--experiment must be I or II");
    }
    std::vector<estimator::Variant> variants;
    if (opt.variant == "all") {
      variants = {estimator::Variant::rlstd, estimator::Variant::rlstd_forget};
    } else if (opt.variant.empty()) {
      variants = {cfg.variant};
    } else {
      try {
        variants = {estimator::parse_variant(opt.variant)};
      } catch (const InvalidParam& e) {
        throw ConfigError(e.what());
      }
    }
    cfg.validate();

    fs::path out_dir = opt.out_dir;
    if (out_dir.empty()) {
      const char* env = std::getenv(kOutDirEnv);
      out_dir = env && *env ? fs::path(env) : fs::path("runs") / ("experiment_" + opt.experiment);
    }
    fs::create_directories(out_dir);
    const std::string started = utc_now();
    const auto bundle = harness::build_space(cfg.space);
    const auto fingerprint = bundle.space->fingerprint();

    std::vector<std::function<harness::ExperimentResult()>> jobs;
    std::vector<ExperimentConfig> job_cfgs;
    for (auto v : variants) {
      ExperimentConfig c = cfg;
      c.variant = v;
      job_cfgs.push_back(c);
    }
    std::mutex log_mutex;
    for (const auto& c : job_cfgs) {
      jobs.push_back([&, c] {
        const std::string name = estimator::to_string(c.variant);
        auto progress = [&](harness::Phase phase, const harness::TrialRecord& r) {
          if (c.record_trajectories) {
            const fs::path dir = out_dir / "trajectories";
            fs::create_directories(dir);
            std::ofstream tf(dir / (name + (phase == harness::Phase::pretrain ? "_pretrain_" : "_trial_") +
                                    std::to_string(r.trial_index) + ".csv"));
            harness::write_trajectory_csv(tf, r);
          }
          if (opt.quiet) return;
          std::lock_guard lock(log_mutex);
          if (r.diverged) err << "[" << name << "] trial " << r.trial_index << " diverged: " << r.diagnostic << '\n';
          if ((r.trial_index + 1) % 10 == 0) {
            err << "[" << name << "] " << (phase == harness::Phase::pretrain ? "pretrain " : "trial ")
                << r.trial_index + 1 << " t_up=" << r.t_up << '\n';
          }
        };
        if (opt.experiment == "I") return harness::run_experiment_I(c, bundle, progress);

        std::optional<estimator::Estimator> pretrained;
        if (!opt.checkpoint.empty()) {
          fs::path ck = opt.checkpoint;
          if (fs::is_directory(ck)) ck /= "pretrained_" + name + ".json";
          pretrained = estimator::Estimator::load_checkpoint(ck.string(), bundle.projector, fingerprint);
        }
        const bool save_pretrained = !pretrained;
        estimator::Estimator snapshot = estimator::Estimator::init(bundle.projector, c.learning);
        auto res = harness::run_experiment_II(c, bundle, std::move(pretrained), progress, &snapshot);
        if (save_pretrained) snapshot.save_checkpoint((out_dir / ("pretrained_" + name + ".json")).string(), fingerprint);
        return res;
      });
    }
    const auto results = harness::run_parallel(std::move(jobs), opt.parallel);

    nlohmann::ordered_json summary;
    summary["experiment"] = opt.experiment;
    summary["config"] = config::to_ini(cfg);
    summary["config_hash"] = hex64(config::hash(cfg));
    summary["variants"] = nlohmann::ordered_json::object();
    double total_runtime = 0;
    for (std::size_t i = 0; i < results.size(); ++i) {
      const std::string name = estimator::to_string(job_cfgs[i].variant);
      std::ofstream csv(out_dir / ("trials_" + name + ".csv"), std::ios::binary);
      harness::write_trials_csv(csv, results[i].records);
      if (!results[i].pretrain_records.empty()) {
        std::ofstream pre(out_dir / ("pretrain_" + name + ".csv"), std::ios::binary);
        harness::write_trials_csv(pre, results[i].pretrain_records);
      }
      auto entry = summary_json(results[i].summary, results[i].runtime_s);
      entry["beta2"] = job_cfgs[i].effective_beta2();
      summary["variants"][name] = entry;
      total_runtime += results[i].runtime_s;
      out << name << ": trials=" << results[i].summary.count << " mean_t_up=" << fmt17(results[i].summary.mean)
          << " std=" << fmt17(results[i].summary.std) << " diverged=" << results[i].summary.diverged << '\n';
    }
    summary["runtime_s"] = total_runtime;
    write_text(out_dir / "summary.json", summary.dump(2) + "\n");

    nlohmann::ordered_json manifest;
    manifest["tool"] = "sdp";
    manifest["tool_version"] = kToolVersion;
    manifest["config_path"] = opt.config_path;
    manifest["config_hash"] = hex64(config::hash(cfg));
    manifest["output_dir"] = out_dir.string();
    manifest["experiment"] = opt.experiment;
    manifest["seed"] = cfg.master_seed;
    manifest["started_at"] = started;
    manifest["finished_at"] = utc_now();
    write_text(out_dir / "manifest.json", manifest.dump(2) + "\n");
    return kOk;
  });
}

int cmd_export_value(const ExportOptions& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto cfg = load_config(opt.config_path);
    const auto bundle = harness::build_space(cfg.space);
    const auto est = estimator::Estimator::load_checkpoint(opt.checkpoint, bundle.projector,
                                                           bundle.space->fingerprint());
    const spline::SplineFunction V(bundle.space, est.c());
    if (opt.theta_n < 2 || opt.thetadot_n < 2) throw ConfigError("export grid needs at least 2 points per axis");
    const auto& box = bundle.space->triangulation().bounds();
    const auto th = geometry::uniform_breaks(opt.theta_min.value_or(box.lower.x()),
                                             opt.theta_max.value_or(box.upper.x()), opt.theta_n);
    const auto thd = geometry::uniform_breaks(opt.thetadot_min.value_or(box.lower.y()),
                                              opt.thetadot_max.value_or(box.upper.y()), opt.thetadot_n);
    std::ofstream file;
    if (!opt.out_path.empty()) {
      file.open(opt.out_path, std::ios::binary);
      if (!file) throw Error("cannot write " + opt.out_path);
    }
    std::ostream& csv = opt.out_path.empty() ? out : file;
    csv << "theta,thetadot,V,dV_dtheta,dV_dthetadot\n";
    int skipped = 0;
    for (double a : th) {
      for (double b : thd) {
        const geometry::StatePoint x(a, b);
        try {
          const double v = V.evaluate(x);
          const auto g = V.gradient(x);
          csv << fmt17(a) << ',' << fmt17(b) << ',' << fmt17(v) << ',' << fmt17(g.x()) << ',' << fmt17(g.y())
              << '\n';
        } catch (const OutOfDomain&) {
          ++skipped;
        }
      }
    }
    if (skipped > 0) err << "warning: " << skipped << " grid points outside the domain were omitted\n";
    return kOk;
  });
}

int cmd_summarize(const std::string& csv_path, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    std::ifstream in(csv_path);
    if (!in) throw Error("cannot open " + csv_path);
    const auto records = harness::read_trials_csv(in);
    const auto s = harness::summarize(records);
    out << "count=" << s.count << " mean=" << fmt17(s.mean) << " std=" << fmt17(s.std)
        << " diverged=" << s.diverged << '\n';
    return kOk;
  });
}

int run_main(int argc, char** argv) {
  CLI::App app{"Spline dynamic programming: simplex B-spline value functions learned with RLSTD"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  SpaceOptions space_opt;
  auto* space = app.add_subcommand("space", "Report spline-space dimensions; optionally export B-net and matrices");
  space->add_option("-c,--config", space_opt.config_path, "INI configuration file");
  space->add_option("--bnet-csv", space_opt.bnet_csv, "Write B-net points and coefficients as CSV");
  space->add_option("--checkpoint", space_opt.checkpoint, "Estimator checkpoint supplying coefficients");
  space->add_option("--dump-matrices", space_opt.dump_matrices, "Directory for H.csv and Z.csv");

  RunOptions run_opt;
  std::uint64_t seed = 0;
  double sigma_w = 0;
  int trials = 0, pretrain = 0;
  auto* run = app.add_subcommand("run", "Run experiment I (learning) or II (mass change)");
  run->add_option("-c,--config", run_opt.config_path, "INI configuration file");
  run->add_option("--experiment", run_opt.experiment, "I or II")->check(CLI::IsMember({"I", "II"}));
  run->add_option("--variant", run_opt.variant, "rlstd, rlstd_forget or all")
      ->check(CLI::IsMember({"rlstd", "rlstd_forget", "all"}));
  auto* seed_opt = run->add_option("--seed", seed, "Master seed");
  auto* sigma_opt = run->add_option("--sigma-w", sigma_w, "Process noise std override");
  auto* trials_opt = run->add_option("--trials", trials, "Recorded trial count override");
  auto* pre_opt = run->add_option("--pretrain-trials", pretrain, "Experiment II pretraining trial count override");
  run->add_option("-o,--out", run_opt.out_dir, std::string("Output directory (default $") + kOutDirEnv + " or runs/)");
  run->add_option("--checkpoint", run_opt.checkpoint, "Experiment II: pretrained checkpoint file or directory");
  run->add_flag("--trajectories", run_opt.trajectories, "Write per-trial trajectory CSVs");
  run->add_option("--parallel", run_opt.parallel, "Worker threads across variants")->check(CLI::PositiveNumber);
  run->add_flag("-q,--quiet", run_opt.quiet, "No progress output");

  ExportOptions exp_opt;
  double tmin = 0, tmax = 0, dmin = 0, dmax = 0;
  auto* exp = app.add_subcommand("export-value", "Sample V and its gradient on a theta x thetadot grid");
  exp->add_option("--checkpoint", exp_opt.checkpoint, "Estimator checkpoint")->required();
  exp->add_option("-c,--config", exp_opt.config_path, "INI configuration file (spline space)");
  exp->add_option("--theta-n", exp_opt.theta_n, "Grid points along theta");
  exp->add_option("--thetadot-n", exp_opt.thetadot_n, "Grid points along thetadot");
  auto* tmin_o = exp->add_option("--theta-min", tmin);
  auto* tmax_o = exp->add_option("--theta-max", tmax);
  auto* dmin_o = exp->add_option("--thetadot-min", dmin);
  auto* dmax_o = exp->add_option("--thetadot-max", dmax);
  exp->add_option("-o,--out", exp_opt.out_path, "Output CSV (stdout when omitted)");

  std::string csv_path;
  auto* sum = app.add_subcommand("summarize", "Recompute summary statistics from a trial CSV");
  sum->add_option("csv", csv_path, "Trial CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  if (*space) return cmd_space(space_opt, std::cout, std::cerr);
  if (*run) {
    if (*seed_opt) run_opt.seed = seed;
    if (*sigma_opt) run_opt.sigma_w = sigma_w;
    if (*trials_opt) run_opt.trials = trials;
    if (*pre_opt) run_opt.pretrain_trials = pretrain;
    return cmd_run(run_opt, std::cout, std::cerr);
  }
  if (*exp) {
    if (*tmin_o) exp_opt.theta_min = tmin;
    if (*tmax_o) exp_opt.theta_max = tmax;
    if (*dmin_o) exp_opt.thetadot_min = dmin;
    if (*dmax_o) exp_opt.thetadot_max = dmax;
    return cmd_export_value(exp_opt, std::cout, std::cerr);
  }
  return cmd_summarize(csv_path, std::cout, std::cerr);
}

}  // namespace sdp::cli
