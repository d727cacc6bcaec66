#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace sdp::cli {

inline constexpr const char* kToolVersion = "0.1.0";

/// Exit codes shared by every subcommand.
enum ExitCode : int { kOk = 0, kFailure = 1, kConfigError = 2, kNumericalFailure = 3 };

/// Overrides the default output directory (`--out` still wins).
inline constexpr const char* kOutDirEnv = "SDP_OUT_DIR";

struct SpaceOptions {
  std::string config_path;
  std::string bnet_csv;       ///< write the B-net (with checkpoint coefficients if given)
  std::string checkpoint;
  std::string dump_matrices;  ///< directory receiving H.csv and Z.csv
};

struct RunOptions {
  std::string config_path;
  std::string experiment = "I";
  std::string variant;  ///< rlstd, rlstd_forget or all; empty uses the config
  std::optional<std::uint64_t> seed;
  std::optional<double> sigma_w;
  std::optional<int> trials;
  std::optional<int> pretrain_trials;
  std::string out_dir;
  std::string checkpoint;  ///< experiment II: pretrained estimator file or directory
  bool trajectories = false;
  int parallel = 1;
  bool quiet = false;
};

struct ExportOptions {
  std::string checkpoint;
  std::string config_path;
  int theta_n = 61;
  int thetadot_n = 61;
  std::optional<double> theta_min, theta_max, thetadot_min, thetadot_max;
  std::string out_path;  ///< stdout when empty
};

int cmd_space(const SpaceOptions& opt, std::ostream& out, std::ostream& err);
int cmd_run(const RunOptions& opt, std::ostream& out, std::ostream& err);
int cmd_export_value(const ExportOptions& opt, std::ostream& out, std::ostream& err);
/// Re-reads trial CSVs and prints their summary statistics.
int cmd_summarize(const std::string& csv_path, std::ostream& out, std::ostream& err);

/// Full command-line entry point (argument parsing included).
int run_main(int argc, char** argv);

}  // namespace sdp::cli
