#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "embamp/device.hpp"
#include "embamp/snr_models.hpp"

namespace embamp {

struct ObjectiveConfig {
  double lambda1 = 1.0;
  double lambda2 = 0.0;
  double n_crit = 100.0;
  std::map<Interaction, double> g_crit_mhz{{Interaction::SqueezeReadout, 100.0},
                                           {Interaction::ConvertReadoutSnail, 100.0},
                                           {Interaction::AmplifySnail, 100.0},
                                           {Interaction::ConvertSnailOutput, 100.0}};
  double gain_target = 0.0;  // 0 disables the gain constraint

  void validate() const;
};

struct Parameter {
  std::string name;
  double value = 0.0;
  double lo = 0.0;
  double hi = 1.0;
};

struct ParameterVector {
  std::vector<Parameter> params;

  void validate() const;
  std::size_t size() const { return params.size(); }
  bool has(const std::string& name) const;
  double get(const std::string& name) const;
  void set(const std::string& name, double value);
  std::vector<double> normalized() const;
  ParameterVector with_normalized(const std::vector<double>& u) const;
};

struct Evaluation {
  double d2 = 0.0;
  double gain = 0.0;           // sqrt(max n_snail / max n_readout)
  double max_n_readout = 0.0;
  std::map<Interaction, double> max_rate_mhz;
};

using Evaluator = std::function<Evaluation(const ParameterVector&)>;

// constraint prefactor clamped to [0, 1]
double constraint_prefactor(const Evaluation& ev, const ObjectiveConfig& cfg);

double objective(const ParameterVector& theta, const ObjectiveConfig& cfg, const Evaluator& evaluator);

struct HistoryRow {
  int eval = 0;
  double value = 0.0;
  double best = 0.0;
  std::vector<double> x;
};

struct OptimizeOptions {
  int budget = 200;
  double step = 0.1;     // initial simplex edge in normalized coordinates
  double tol = 1e-6;     // simplex diameter in normalized coordinates
  int restarts = 0;
  std::uint64_t seed = 0;
};

struct OptimizeResult {
  ParameterVector theta;
  double value = 0.0;
  std::vector<HistoryRow> history;
};

// bounded Nelder-Mead maximization of f
OptimizeResult maximize(const std::function<double(const ParameterVector&)>& f, const ParameterVector& theta0,
                        const OptimizeOptions& opt);

OptimizeResult optimize(const ParameterVector& theta0, const ObjectiveConfig& cfg, const Evaluator& evaluator,
                        const OptimizeOptions& opt);

// EA pulse parameters recognized by ea_simulation_evaluator, at the calibrated defaults
ParameterVector default_ea_parameters();

// builds the EA sequence for theta, simulates it and reports the peak
// six-mode Fisher discriminant along with photon and rate maxima
Evaluator ea_simulation_evaluator(const DeviceParams& device, const EffectiveRates& rates);

struct SqueezeOptimum {
  double db = 0.0;
  double snr = 0.0;
};

// snr for squeezing db, displacement photons n_disp and amplifier gain G
using SqueezeEvaluator = std::function<double(double db, double n_disp, double G)>;

// evaluator from the EA readout model at fixed accumulate and release times
SqueezeEvaluator ea_squeeze_evaluator(EaReadout model, double t_a, double t_r);

SqueezeOptimum optimal_squeezing(double photon_budget, double G, const SqueezeEvaluator& evaluator);

// largest squeezing the budget can host, sinh^2 s = budget
double budget_squeeze_db(double photon_budget);

enum class Protocol { Ea, Cdr };

const char* protocol_name(Protocol p);

struct SweepCell {
  double n_tot = 0.0;
  double T = 0.0;
  double d2 = 0.0;
  double fidelity = 0.0;
  double nines = 0.0;
};

struct SweepGrid {
  std::vector<double> n_tot;
  std::vector<double> times;  // seconds
  std::vector<SweepCell> cells;  // n_tot major

  void validate() const;
  const SweepCell& at(std::size_t i_n, std::size_t i_t) const { return cells[i_n * times.size() + i_t]; }
};

struct SweepSettings {
  CdrReadout cdr;
  EaReadout ea;
  double t1 = 50e-6;
  int jobs = 1;
};

SweepSettings sweep_settings_for(const DeviceParams& device);

SweepGrid sweep_fidelity(SweepGrid grid, Protocol protocol, const SweepSettings& settings);

}  // namespace embamp
