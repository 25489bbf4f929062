#ifndef MFDMG_EXPERIMENTS_HPP
#define MFDMG_EXPERIMENTS_HPP

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace mfdmg
{

inline constexpr const char *kOutputDirEnv = "MFDMG_OUTPUT_DIR";

const std::vector<std::string> &experiment_names();

struct ExperimentConfig
{
  std::string name = "table1";

  // Discretization.
  double alpha = 60.0;
  double beta = 60.0;
  double kappa = 1.0;
  int levels = 8;      // finest refinement level for measured runs
  int min_level = -1;  // hconv / manufactured start level; -1: per-experiment default

  // Cycle.
  int nu1 = 2;
  int nu2 = 1;
  int gamma = 1;
  double omega = 1.0;
  double tol = 1e-10;
  int max_iters = 100;
  std::string ordering = "yx";
  int power_iterations = 60;

  // Fourier analysis.
  int lfa_n = 32;
  int nu = 3;  // total smoothing steps for table2 / anglesweep
  std::vector<int> nus{1, 2, 3, 4};
  std::vector<double> kappas{1.0, 1e-2, 1e-4, 1e-6, 1e-8};
  double angle_min = 30.0;
  double angle_max = 85.0;
  double angle_step = 5.0;

  std::string output_dir = "results";
  std::uint64_t seed = 12345;
};

struct Validation
{
  std::vector<std::string> errors;    // "field: message"
  std::vector<std::string> warnings;
  bool ok() const { return errors.empty(); }
};

// Range checks and normalization (name lowercased, per-experiment defaults filled in).
Validation validate(ExperimentConfig &config);

// Set one field from its textual value. Throws std::invalid_argument on an unknown key or
// a malformed value.
void apply_setting(ExperimentConfig &config, const std::string &key, const std::string &value);

// key = value lines; '#' starts a comment.
void load_config_file(ExperimentConfig &config, const std::filesystem::path &path);

// Applies the output-directory environment override, if set.
void apply_environment(ExperimentConfig &config);

struct RunResult
{
  int status = 0;
  std::vector<std::filesystem::path> files;
  std::string diagnostic;
};

// Runs the experiment, writing <output_dir>/<name>.csv and <output_dir>/<name>_summary.jsonl
// (one record per emitted row). Progress goes to `log`.
RunResult run(const ExperimentConfig &config, std::ostream &log);

}  // namespace mfdmg

#endif  // MFDMG_EXPERIMENTS_HPP
