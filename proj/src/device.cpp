#include "embamp/device.hpp"

#include <cmath>
#include <set>

#include "embamp/errors.hpp"
#include "embamp/units.hpp"

namespace embamp {

const char* interaction_name(Interaction i) {
  switch (i) {
    case Interaction::SqueezeReadout: return "squeeze_readout";
    case Interaction::ConvertReadoutSnail: return "convert_readout_snail";
    case Interaction::AmplifySnail: return "amplify_snail";
    case Interaction::ConvertSnailOutput: return "convert_snail_output";
  }
  return "?";
}

const char* pulse_kind_name(PulseKind k) {
  switch (k) {
    case PulseKind::SqueezeReadout: return "SqueezeReadout";
    case PulseKind::DisplaceReadout: return "DisplaceReadout";
    case PulseKind::ConvertReadoutSnail: return "ConvertReadoutSnail";
    case PulseKind::AmplifySnail: return "AmplifySnail";
    case PulseKind::ConvertSnailOutput: return "ConvertSnailOutput";
    case PulseKind::Idle: return "Idle";
  }
  return "?";
}

void DeviceParams::validate() const {
  std::set<double> omegas;
  for (const auto& m : modes) {
    const std::string base = "device." + m.name;
    if (!(m.gamma_mhz > 0.0)) throw ValidationError(base + ".gamma_mhz", "must be > 0");
    if (!(m.omega_ghz > 0.0)) throw ValidationError(base + ".omega_ghz", "must be > 0");
    if (!omegas.insert(m.omega_ghz).second) throw ValidationError(base + ".omega_ghz", "mode frequencies must be distinct");
  }
  if (!(chi_mhz > 0.0)) throw ValidationError("device.chi", "must be > 0");
  if (!(g3_mhz >= 0.0)) throw ValidationError("device.g3_mhz", "must be >= 0");
  for (const auto& [k, lam] : hybridizations) {
    if (!(lam > 0.0 && lam < 0.5))
      throw ValidationError("device.hybridizations." + k, "must lie in (0, 0.5) for the dispersive regime");
  }
  if (!(n_crit > 0.0)) throw ValidationError("device.n_crit", "must be > 0");
  for (const auto& [k, g] : g_crit_mhz) {
    if (!(g > 0.0)) throw ValidationError("device.g_crit_mhz." + k, "must be > 0");
  }
  if (!(t1_us > 0.0)) throw ValidationError("device.t1_us", "must be > 0");
  if (multiplicity_degenerate < 1) throw ValidationError("device.multiplicity_degenerate", "must be >= 1");
  if (multiplicity_nondegenerate < 1) throw ValidationError("device.multiplicity_nondegenerate", "must be >= 1");
}

double DeviceParams::gamma(int mode) const { return units::mhz(modes.at(mode).gamma_mhz); }

double DeviceParams::chi() const { return units::mhz(chi_mhz); }

double DeviceParams::g_crit(Interaction i) const {
  auto it = g_crit_mhz.find(interaction_name(i));
  if (it == g_crit_mhz.end()) throw ValidationError(std::string("device.g_crit_mhz.") + interaction_name(i), "missing");
  return units::mhz(it->second);
}

void EffectiveRates::validate() const {
  const std::pair<const char*, double> all[] = {{"rates.squeeze_readout", squeeze_readout},
                                                {"rates.convert_readout_snail", convert_readout_snail},
                                                {"rates.amplify_snail", amplify_snail},
                                                {"rates.convert_snail_output", convert_snail_output}};
  for (const auto& [name, v] : all)
    if (!(v >= 0.0)) throw ValidationError(name, "must be >= 0");
}

double EffectiveRates::mhz(Interaction i) const {
  switch (i) {
    case Interaction::SqueezeReadout: return squeeze_readout;
    case Interaction::ConvertReadoutSnail: return convert_readout_snail;
    case Interaction::AmplifySnail: return amplify_snail;
    case Interaction::ConvertSnailOutput: return convert_snail_output;
  }
  return 0.0;
}

void PulseSegment::validate() const {
  const std::string base = std::string("segment ") + pulse_kind_name(kind);
  if (!(t_end > t_start)) throw ValidationError(base + ".t_end", "must exceed t_start");
  if (!(rise_rate > 0.0) || !(fall_rate > 0.0)) throw ValidationError(base + ".rise_rate", "rise/fall rates must be > 0");
  if (!(amplitude_mhz >= 0.0)) throw ValidationError(base + ".amplitude", "must be >= 0");
}

double hybridization(double g_mhz, double delta_mhz) {
  if (delta_mhz == 0.0) throw DegenerateError("hybridization: degenerate modes (zero detuning)");
  return g_mhz / std::abs(delta_mhz);
}

double effective_coupling(int multiplicity, double lam_i, double lam_j, double g3_mhz, double pump_amp) {
  return multiplicity * lam_i * lam_j * g3_mhz * std::abs(pump_amp);
}

double required_drive(double g_target_mhz, double g3_mhz, double delta_sp_mhz, double lam_i, double lam_j) {
  if (lam_i * lam_j == 0.0) throw DegenerateError("required_drive: no coupling path (zero hybridization)");
  return (g_target_mhz / g3_mhz) * std::abs(delta_sp_mhz) / (lam_i * lam_j);
}

double envelope_factor(const PulseSegment& seg, double t) {
  return 0.25 * std::erfc(-seg.rise_rate * (t - seg.t_start)) * std::erfc(seg.fall_rate * (t - seg.t_end));
}

std::complex<double> pulse_envelope(const PulseSegment& seg, double t) {
  return seg.amplitude_mhz * envelope_factor(seg, t) * std::polar(1.0, -seg.phase);
}

}  // namespace embamp
