#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "embamp/config.hpp"
#include "embamp/errors.hpp"

namespace embamp::cli {

enum ExitCode : int { kOk = 0, kError = 1, kConstraint = 2, kInfeasible = 3, kUsage = 64 };

class UsageError : public Error {
public:
  using Error::Error;
};

struct AxisSpec {
  double lo = 0.0;
  double hi = 0.0;
  int steps = 1;
  bool log = false;
};

// lo:hi:steps[:log|:lin]
AxisSpec parse_axis(const std::string& spec);
std::vector<double> axis_values(const AxisSpec& a);

struct SweepFlags {
  AxisSpec ntot{0.5, 50.0, 20, true};
  AxisSpec time_us{0.02, 5.0, 20, true};
  int jobs = 1;
};

struct OptimizeFlags {
  int budget = 200;
  double lambda1 = -1.0;  // < 0: from the config
  double lambda2 = -1.0;
};

struct FreqplanFlags {
  int n = 3;
  double band_lo = 4.0;
  double band_hi = 8.0;
  double guard_mhz = 50.0;
  std::uint64_t seed = 0;
  std::vector<double> check;  // non-empty: validate this set instead of searching
};

int cmd_run(const RunConfig& cfg, const std::filesystem::path& out);
int cmd_sweep(const RunConfig& cfg, const SweepFlags& flags, const std::filesystem::path& out);
int cmd_optimize(const RunConfig& cfg, const OptimizeFlags& flags, const std::filesystem::path& out);
int cmd_freqplan(const FreqplanFlags& flags, const std::filesystem::path& out);

// full command line entry point; maps exceptions to exit codes
int run(int argc, char** argv);

}  // namespace embamp::cli
