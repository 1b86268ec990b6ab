#pragma once

#include <array>
#include <complex>
#include <map>
#include <string>

namespace embamp {

enum ModeIndex : int { kReadout = 0, kSnail = 1, kOutput = 2 };

struct Mode {
  std::string name;
  double omega_ghz = 0.0;
  double gamma_mhz = 0.0;
};

enum class Interaction { SqueezeReadout, ConvertReadoutSnail, AmplifySnail, ConvertSnailOutput };

const char* interaction_name(Interaction i);

struct DeviceParams {
  std::array<Mode, 3> modes{Mode{"readout", 6.0, 0.1}, Mode{"snail", 4.0, 1.0}, Mode{"output", 7.5, 20.0}};
  double chi_mhz = 3.0;
  double g3_mhz = 30.0;
  // hybridization of each linear mode with the SNAIL, keyed "readout-snail" / "output-snail"
  std::map<std::string, double> hybridizations{{"readout-snail", 0.1}, {"output-snail", 0.1}};
  double n_crit = 100.0;
  std::map<std::string, double> g_crit_mhz{{"squeeze_readout", 100.0},
                                           {"convert_readout_snail", 100.0},
                                           {"amplify_snail", 100.0},
                                           {"convert_snail_output", 100.0}};
  double t1_us = 50.0;
  int multiplicity_degenerate = 3;
  int multiplicity_nondegenerate = 6;

  void validate() const;

  // angular rates, rad/s
  double gamma(int mode) const;
  double chi() const;
  double g_crit(Interaction i) const;
};

struct EffectiveRates {
  double squeeze_readout = 6.0;
  double convert_readout_snail = 10.0;
  double amplify_snail = 4.0;
  double convert_snail_output = 10.0;

  void validate() const;
  double mhz(Interaction i) const;
};

enum class PulseKind { SqueezeReadout, DisplaceReadout, ConvertReadoutSnail, AmplifySnail, ConvertSnailOutput, Idle };

const char* pulse_kind_name(PulseKind k);

struct PulseSegment {
  PulseKind kind = PulseKind::Idle;
  double amplitude_mhz = 0.0;
  double phase = 0.0;
  double t_start = 0.0;
  double t_end = 0.0;
  double rise_rate = 2e9;
  double fall_rate = 2e9;

  void validate() const;
  double duration() const { return t_end - t_start; }
};

double hybridization(double g_mhz, double delta_mhz);

double effective_coupling(int multiplicity, double lam_i, double lam_j, double g3_mhz, double pump_amp);

double required_drive(double g_target_mhz, double g3_mhz, double delta_sp_mhz, double lam_i, double lam_j);

// real envelope factor in [0, 1]: erfc(-nu1 (t - t1)) erfc(nu2 (t - t2)) / 4
double envelope_factor(const PulseSegment& seg, double t);

// complex amplitude a e^{-i phi} times the envelope factor, MHz
std::complex<double> pulse_envelope(const PulseSegment& seg, double t);

}  // namespace embamp
