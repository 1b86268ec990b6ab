#pragma once

#include <cstdint>
#include <string>

#include "embamp/device.hpp"
#include "embamp/optimizer.hpp"

namespace embamp {

constexpr int kSchemaVersion = 1;

enum class OutputFormat { Csv, Json };

struct EaConfig {
  double squeeze_db = 0.0;
  double gain = 1.0;
  double drive_phase = 0.0;
  double eta_mhz = -1.0;  // < 0: derived from the photon budget
};

struct CdrConfig {
  double eta_mhz = -1.0;  // < 0: derived from the photon budget
};

struct SimulationConfig {
  double dt_ns = 0.0;  // 0: resolved from the fastest rate and edge
  int grid_points = 2000;
};

struct HomodyneConfig {
  double eta = -1.0;             // < 0: 1.0 for ea, 0.75 for cdr
  double n_add = 0.0;
  double gamma_meas_mhz = -1.0;  // < 0: decay rate of the measured mode

  double eta_for(Protocol p) const { return eta >= 0.0 ? eta : (p == Protocol::Ea ? 1.0 : 0.75); }
};

struct BudgetConfig {
  double n_tot = 5.0;
  double total_time_us = 1.0;
  double t1_us = 50.0;
  double t_dead_us = 0.3;
};

struct OutputConfig {
  std::string directory = "out";
  OutputFormat format = OutputFormat::Csv;
};

struct RunConfig {
  DeviceParams device;
  EffectiveRates rates;
  Protocol protocol = Protocol::Ea;
  EaConfig ea;
  CdrConfig cdr;
  SimulationConfig simulation;
  HomodyneConfig homodyne;
  BudgetConfig budgets;
  double lambda1 = 1.0;
  double lambda2 = 0.0;
  double gain_target = 0.0;
  OutputConfig output;
  std::uint64_t seed = 0;

  void validate() const;

  // readout models with the config's homodyne and budget settings
  SweepSettings sweep_settings() const;
  ObjectiveConfig objective() const;
};

// JSON text with schema_version; unknown keys are errors
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

}  // namespace embamp
