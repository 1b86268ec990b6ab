#pragma once

#include "embamp/device.hpp"

namespace embamp {

// conventional readout: drive on for the whole window, output leaks at kappa
struct CdrReadout {
  double kappa = 0.0;
  double chi = 0.0;
  double eta = 0.75;
  double gamma_meas = -1.0;  // < 0: kappa
  double n_add = 0.0;
  int points = 400;

  void validate() const;
};

// catch, amplify and release readout with a fixed dead time
struct EaReadout {
  double chi = 0.0;
  double gamma_a = 0.0;
  double gamma_b = 0.0;
  double eta = 1.0;
  double n_add = 0.0;
  double gain = 1.0;
  double squeeze_db = 0.0;
  double t_dead = 0.3e-6;
  int points = 1000;

  void validate() const;
};

struct ReadoutPoint {
  double d2 = 0.0;
  double t_a = 0.0;
  double t_r = 0.0;
  double nbar = 0.0;
};

CdrReadout cdr_readout_for(const DeviceParams& device);
EaReadout ea_readout_for(const DeviceParams& device);

// max over [0, t] of |1 - e^{-(rate/2 - i chi) u}|^2
double accumulate_peak(double rate, double chi, double t);

// sinh^2 of the squeeze parameter for db of squeezing
double squeeze_photons(double db);

// matched-filter d2 with the drive scaled so the peak readout occupation is n_tot
ReadoutPoint cdr_readout(const CdrReadout& m, double n_tot, double T);

// closed-form d2 for accumulate time t_a and release time t_r
double ea_d2_closed(const EaReadout& m, double n_disp, double t_a, double t_r);

// the same quantity through the matched filter and the excess noise kernel
double ea_d2_filtered(const EaReadout& m, double n_disp, double t_a, double t_r);

// best split of T - t_dead into accumulate and release, t_a <= pi/(2 chi)
ReadoutPoint ea_readout(const EaReadout& m, double n_tot, double T);

}  // namespace embamp
