#pragma once

#include <utility>
#include <vector>

#include "embamp/device.hpp"
#include "embamp/gaussian.hpp"

namespace embamp {

constexpr int kModes = 3;

struct SqueezeCalibration {
  double phi_chi = 0.0;
  double delay = 0.0;
  double n_a = 0.0;
};

// r, chi in rad/s; requires r > chi > 0
SqueezeCalibration calibrate_squeeze(double r, double chi, double t);

// duration of a squeeze pulse (phase pi/2, branch +chi, decay gamma) that
// reaches db of squeezing from vacuum; found by bisection on exact evolution
double squeeze_time_for_db(double r, double chi, double gamma, double db);

double displacement_separation(double eta, double chi, double gamma_a, double t);
double optimal_separation(double eta, double chi, double gamma_a);

struct ConversionTransfer {
  double p_a = 0.0;
  double p_s = 1.0;
  double theta_chi = 0.0;
  double t_pi = 0.0;
};

// g is the conversion rate (amplitude coupling g/2), rad/s
ConversionTransfer conversion_transfer(double g, double chi);

double amplification_phase(double theta_d);

struct EaCalibration {
  double squeeze_angle_chi = 0.0;
  double delay = 0.0;
  double displace_duration = 0.0;
  double conversion_pi_time = 0.0;
  double conversion_phase = 0.0;
  double amp_phase = 0.0;
  double transfer_prob = 1.0;

  double squeeze_duration = 0.0;
  double squeeze_photons = 0.0;
  double separation_angle = 0.0;
  double amp_segment_phase = 0.0;
  double amp_duration = 0.0;
  double release_duration = 0.0;
};

struct PulseSchedule {
  std::vector<PulseSegment> segments;
  double total_duration = 0.0;
  double dead_time = 0.0;

  void validate() const;
};

struct EaOptions {
  double gain = 1.0;               // amplitude gain of the SNAIL amplifier, >= 1
  double drive_phase = 0.0;        // theta_d
  double release_duration = -1.0;  // < 0: resonant pi time of the output conversion
  double edge_rate = 2e9;          // rise/fall rate of every segment, 1/s
  bool enforce_constraints = true;
};

std::pair<PulseSchedule, EaCalibration> build_ea_sequence(const DeviceParams& device, const EffectiveRates& rates,
                                                           double squeeze_db, double eta, const EaOptions& opt = {});

// continuous drive of the readout mode for duration T (conventional readout)
PulseSchedule build_cdr_sequence(double eta, double duration, double drive_phase = 0.0, double edge_rate = 2e9);

// quadratic generator of the 3-mode system at time t for branch sign +-1
GeneratorSpec generator_at(const PulseSchedule& schedule, const DeviceParams& device, double sign, double t);

double max_rate(const PulseSchedule& schedule, const DeviceParams& device);

// step that resolves both the fastest rate and the sharpest pulse edge
double default_dt(const PulseSchedule& schedule, const DeviceParams& device);

struct Trajectory {
  std::vector<double> times;
  std::vector<GaussianState> states_e;  // +chi
  std::vector<GaussianState> states_g;  // -chi
  Mat photons_e;                        // rows: grid points, cols: readout, snail, output
  Mat photons_g;

  std::size_t size() const { return times.size(); }
};

// Integrates both branches on a uniform grid from the earliest pulse edge to
// the last one (plus t_extra); every record_every-th step is stored.
Trajectory simulate_protocol(const PulseSchedule& schedule, const DeviceParams& device, double dt,
                             int record_every = 1, double t_extra = 0.0);

// same, from given initial states; the device is only required to have
// non-negative rates so lossless or chi = 0 test systems are allowed
Trajectory simulate_protocol(const PulseSchedule& schedule, const DeviceParams& device, double dt,
                             const GaussianState& init_e, const GaussianState& init_g, int record_every = 1,
                             double t_extra = 0.0);

// Homodyne record of one mode, matched filter along the dominant separation
// axis, noise from the two-time correlations of the simulated state.
struct RecordOptions {
  int mode = kOutput;
  double eta = 1.0;
  double n_add = 0.0;
  double t_extra = 0.0;
  Mat init_cov;  // empty: vacuum
};

struct SnrTrace {
  std::vector<double> times;
  std::vector<double> d2;        // integrated-record D^2 up to t
  std::vector<double> contrast;  // X'_e - X'_g along the filter axis
  double axis_angle = 0.0;
};

SnrTrace homodyne_snr_trace(const PulseSchedule& schedule, const DeviceParams& device, double dt,
                            const RecordOptions& opt);

struct Quadratures {
  double x = 0.0;
  double y = 0.0;
};

// Closed-form conventional readout field; chi carries the branch sign.
Quadratures cdr_means(double nbar, double kappa, double chi, double t, double pulse_T);

// Closed-form released burst; chi carries the branch sign.
Quadratures ea_means(double G, double nbar, double chi, double gamma_a, double gamma_b, double t_a, double t_proc,
                     double t);

}  // namespace embamp
