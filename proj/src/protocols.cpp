#include "embamp/protocols.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>

#include "embamp/errors.hpp"
#include "embamp/units.hpp"

namespace embamp {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kEdgeSpan = 6.0;  // erfc(6) ~ 2e-17

void add_segment_block(GeneratorSpec& g, PulseKind kind, double rate, double phase) {
  switch (kind) {
    case PulseKind::SqueezeReadout: add_squeeze(g.hmat, kReadout, rate, phase); break;
    case PulseKind::DisplaceReadout: add_drive(g.drive, kReadout, rate, phase); break;
    case PulseKind::ConvertReadoutSnail: add_conversion(g.hmat, kReadout, kSnail, 0.5 * rate, phase); break;
    case PulseKind::AmplifySnail: add_squeeze(g.hmat, kSnail, rate, phase); break;
    case PulseKind::ConvertSnailOutput: add_conversion(g.hmat, kSnail, kOutput, 0.5 * rate, phase); break;
    case PulseKind::Idle: break;
  }
}

GeneratorSpec base_generator(const DeviceParams& device, double sign) {
  GeneratorSpec g = GeneratorSpec::zero(kModes);
  for (int m = 0; m < kModes; ++m) g.set_decay(m, device.gamma(m));
  add_rotation(g.hmat, kReadout, sign * device.chi());
  return g;
}

PulseSegment make_segment(PulseKind kind, double amp_mhz, double phase, double t0, double dur, double edge) {
  PulseSegment s;
  s.kind = kind;
  s.amplitude_mhz = amp_mhz;
  s.phase = phase;
  s.t_start = t0;
  s.t_end = t0 + dur;
  s.rise_rate = edge;
  s.fall_rate = edge;
  return s;
}

void check_ceiling(const DeviceParams& device, Interaction i, double rate_mhz) {
  const double ceiling = device.g_crit(i) / units::mhz(1.0);
  if (rate_mhz > ceiling)
    throw ConstraintViolation(std::string("rate ") + interaction_name(i) + " = " + std::to_string(rate_mhz) +
                              " MHz exceeds g_crit = " + std::to_string(ceiling) + " MHz");
}

std::complex<double> accumulate(double nbar, double rate, double chi, double t) {
  using C = std::complex<double>;
  const double phi = std::atan2(2.0 * chi, rate);
  return std::sqrt(nbar) * std::polar(1.0, phi) * (1.0 - std::exp(-C(0.5 * rate, -chi) * t));
}

}  // namespace

SqueezeCalibration calibrate_squeeze(double r, double chi, double t) {
  if (!(chi > 0.0) || !(r > chi))
    throw DegenerateError("calibrate_squeeze: sub-threshold squeezing, need r > chi > 0");
  if (t < 0.0) throw ValidationError("squeeze.t", "must be >= 0");
  const double rc = std::sqrt(r * r - chi * chi);
  const double ch = std::cosh(rc * t), sh = std::sinh(rc * t);
  SqueezeCalibration c;
  c.phi_chi = std::atan2(rc * ch + std::sqrt(r * r * ch * ch - chi * chi), chi * sh);
  c.delay = c.phi_chi / chi;
  c.n_a = 0.5 * ((r / rc) * (r / rc) * std::cosh(2.0 * rc * t) - (chi / rc) * (chi / rc) - 1.0);
  return c;
}

double squeeze_time_for_db(double r, double chi, double gamma, double db) {
  if (db < 0.0) throw ValidationError("squeeze_db", "must be >= 0");
  if (db == 0.0) return 0.0;
  if (!(r > 0.0)) throw ValidationError("rates.squeeze_readout", "must be > 0 for squeeze_db > 0");
  GeneratorSpec g = GeneratorSpec::zero(1);
  add_rotation(g.hmat, 0, chi);
  add_squeeze(g.hmat, 0, r, 0.5 * kPi);
  g.set_decay(0, gamma);
  const GaussianState vac = GaussianState::vacuum(1);
  auto level = [&](double t) { return squeezing_db(evolve_exact(vac, g, t).cov, 0); };

  double lo = 0.0, hi = 1.0 / r;
  int grow = 0;
  while (level(hi) < db) {
    lo = hi;
    hi *= 2.0;
    if (++grow > 40) throw InfeasibleError("squeeze level of " + std::to_string(db) + " dB is unreachable");
  }
  for (int k = 0; k < 200 && hi - lo > 1e-15 * hi; ++k) {
    const double mid = 0.5 * (lo + hi);
    (level(mid) < db ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double displacement_separation(double eta, double chi, double gamma_a, double t) {
  if (t < 0.0) throw ValidationError("t", "must be >= 0");
  const double pref = 4.0 * eta / (gamma_a * gamma_a + 4.0 * chi * chi);
  return std::abs(
      pref * (std::exp(-0.5 * gamma_a * t) * (gamma_a * std::sin(chi * t) + 2.0 * chi * std::cos(chi * t)) - 2.0 * chi));
}

double optimal_separation(double eta, double chi, double gamma_a) {
  return 8.0 * chi * eta / (gamma_a * gamma_a + 4.0 * chi * chi) * (std::exp(-kPi * gamma_a / (2.0 * chi)) + 1.0);
}

ConversionTransfer conversion_transfer(double g, double chi) {
  if (!(g > 0.0)) throw ValidationError("conversion rate", "must be > 0");
  ConversionTransfer c;
  const double w2 = g * g + chi * chi;
  c.p_s = g * g / w2;
  c.p_a = chi * chi / w2;
  c.theta_chi = std::atan(chi / std::sqrt(w2));
  c.t_pi = kPi / std::sqrt(w2);
  return c;
}

double amplification_phase(double theta_d) { return theta_d + 0.5 * kPi; }

void PulseSchedule::validate() const {
  double last = 0.0;
  for (const auto& s : segments) {
    s.validate();
    last = std::max(last, s.t_end);
  }
  if (total_duration < last - 1e-15) throw StructuralError("schedule: total_duration precedes the last segment end");
}

std::pair<PulseSchedule, EaCalibration> build_ea_sequence(const DeviceParams& device, const EffectiveRates& rates,
                                                           double squeeze_db, double eta, const EaOptions& opt) {
  device.validate();
  rates.validate();
  if (!(squeeze_db >= 0.0)) throw ValidationError("squeeze_db", "must be >= 0");
  if (!(eta >= 0.0)) throw ValidationError("eta", "must be >= 0");
  if (!(opt.gain >= 1.0)) throw ValidationError("gain", "must be >= 1");
  if (!(opt.edge_rate > 0.0)) throw ValidationError("edge_rate", "must be > 0");
  if (!(rates.convert_readout_snail > 0.0)) throw ValidationError("rates.convert_readout_snail", "must be > 0");
  if (!(rates.convert_snail_output > 0.0)) throw ValidationError("rates.convert_snail_output", "must be > 0");
  if (opt.gain > 1.0 && !(rates.amplify_snail > 0.0))
    throw ValidationError("rates.amplify_snail", "must be > 0 for gain > 1");

  if (opt.enforce_constraints) {
    if (squeeze_db > 0.0) check_ceiling(device, Interaction::SqueezeReadout, rates.squeeze_readout);
    check_ceiling(device, Interaction::ConvertReadoutSnail, rates.convert_readout_snail);
    if (opt.gain > 1.0) check_ceiling(device, Interaction::AmplifySnail, rates.amplify_snail);
    check_ceiling(device, Interaction::ConvertSnailOutput, rates.convert_snail_output);
  }

  const double chi = device.chi();
  const double gamma_a = device.gamma(kReadout);
  const double r = units::mhz(rates.squeeze_readout);
  const double g_rs = units::mhz(rates.convert_readout_snail);
  const double r_s = units::mhz(rates.amplify_snail);
  const double g_so = units::mhz(rates.convert_snail_output);
  const double edge = opt.edge_rate;
  const double td = opt.drive_phase;

  PulseSchedule sched;
  EaCalibration cal;
  double t = kEdgeSpan / edge;

  if (squeeze_db > 0.0) {
    const double ts = squeeze_time_for_db(r, chi, gamma_a, squeeze_db);
    const SqueezeCalibration sc = calibrate_squeeze(r, chi, ts);
    if (opt.enforce_constraints && sc.n_a > device.n_crit)
      throw ConstraintViolation("squeeze photons n_a = " + std::to_string(sc.n_a) +
                                " exceed n_crit = " + std::to_string(device.n_crit));
    cal.squeeze_duration = ts;
    cal.squeeze_photons = sc.n_a;
    cal.squeeze_angle_chi = sc.phi_chi;
    cal.delay = sc.delay;
    sched.segments.push_back(make_segment(PulseKind::SqueezeReadout, rates.squeeze_readout, 0.5 * kPi + 2.0 * td, t, ts, edge));
    t += ts;
    sched.segments.push_back(make_segment(PulseKind::Idle, 0.0, 0.0, t, sc.delay, edge));
    t += sc.delay;
  }

  cal.displace_duration = kPi / chi;
  sched.segments.push_back(make_segment(PulseKind::DisplaceReadout, eta / units::mhz(1.0), td, t, cal.displace_duration, edge));
  t += cal.displace_duration;

  const ConversionTransfer ct = conversion_transfer(g_rs, chi);
  cal.conversion_pi_time = ct.t_pi;
  cal.conversion_phase = ct.theta_chi;
  cal.transfer_prob = ct.p_s;
  const double conv_phase = -0.5 * kPi;
  sched.segments.push_back(make_segment(PulseKind::ConvertReadoutSnail, rates.convert_readout_snail, conv_phase, t, ct.t_pi, edge));
  t += ct.t_pi;

  // direction of the SNAIL separation after the catch, from the means alone
  {
    Vec mu[2];
    const double signs[2] = {1.0, -1.0};
    for (int b = 0; b < 2; ++b) {
      GeneratorSpec gd = base_generator(device, signs[b]);
      add_segment_block(gd, PulseKind::DisplaceReadout, chi, td);
      GeneratorSpec gc = base_generator(device, signs[b]);
      add_segment_block(gc, PulseKind::ConvertReadoutSnail, g_rs, conv_phase);
      GaussianState s = GaussianState::vacuum(kModes);
      s = evolve_exact(s, gd, cal.displace_duration);
      s = evolve_exact(s, gc, ct.t_pi);
      mu[b] = s.means;
    }
    const Vec d = mu[0] - mu[1];
    cal.separation_angle = std::atan2(d(2 * kSnail + 1), d(2 * kSnail));
  }
  cal.amp_phase = amplification_phase(td);
  cal.amp_segment_phase = 0.5 * kPi + 2.0 * cal.separation_angle;

  if (opt.gain > 1.0) {
    cal.amp_duration = std::log(opt.gain) / r_s;
    sched.segments.push_back(make_segment(PulseKind::AmplifySnail, rates.amplify_snail, cal.amp_segment_phase, t, cal.amp_duration, edge));
    t += cal.amp_duration;
  }

  cal.release_duration = opt.release_duration < 0.0 ? kPi / g_so : opt.release_duration;
  if (!(cal.release_duration > 0.0)) throw ValidationError("release_duration", "must be > 0");
  sched.segments.push_back(make_segment(PulseKind::ConvertSnailOutput, rates.convert_snail_output, conv_phase, t, cal.release_duration, edge));
  t += cal.release_duration;

  sched.total_duration = t;
  sched.dead_time = t - cal.displace_duration;
  return {sched, cal};
}

PulseSchedule build_cdr_sequence(double eta, double duration, double drive_phase, double edge_rate) {
  if (!(eta >= 0.0)) throw ValidationError("eta", "must be >= 0");
  if (!(duration > 0.0)) throw ValidationError("duration", "must be > 0");
  PulseSchedule s;
  s.segments.push_back(make_segment(PulseKind::DisplaceReadout, eta / units::mhz(1.0), drive_phase,
                                    kEdgeSpan / edge_rate, duration, edge_rate));
  s.total_duration = s.segments.back().t_end;
  s.dead_time = 0.0;
  return s;
}

GeneratorSpec generator_at(const PulseSchedule& schedule, const DeviceParams& device, double sign, double t) {
  GeneratorSpec g = base_generator(device, sign);
  for (const auto& seg : schedule.segments) {
    if (seg.kind == PulseKind::Idle) continue;
    const double f = envelope_factor(seg, t);
    if (f == 0.0) continue;
    add_segment_block(g, seg.kind, f * units::mhz(seg.amplitude_mhz), seg.phase);
  }
  return g;
}

double max_rate(const PulseSchedule& schedule, const DeviceParams& device) {
  double m = device.chi();
  for (int k = 0; k < kModes; ++k) m = std::max(m, device.gamma(k));
  for (const auto& s : schedule.segments) m = std::max(m, units::mhz(s.amplitude_mhz));
  return m;
}

double default_dt(const PulseSchedule& schedule, const DeviceParams& device) {
  double dt = 1.0 / (50.0 * max_rate(schedule, device));
  for (const auto& s : schedule.segments) dt = std::min(dt, 1.0 / (20.0 * std::max(s.rise_rate, s.fall_rate)));
  return dt;
}

namespace {

void check_rates(const DeviceParams& d) {
  if (!(d.chi_mhz >= 0.0)) throw ValidationError("device.chi", "must be >= 0");
  for (const auto& m : d.modes)
    if (!(m.gamma_mhz >= 0.0)) throw ValidationError("device." + m.name + ".gamma_mhz", "must be >= 0");
}

struct Window {
  double t0 = 0.0;
  double t1 = 0.0;
  int steps = 0;
  double dt = 0.0;
};

Window time_window(const PulseSchedule& schedule, const DeviceParams& device, double dt, double t_extra) {
  schedule.validate();
  if (!(dt > 0.0)) throw ValidationError("simulation.dt", "must be > 0");
  if (t_extra < 0.0) throw ValidationError("t_extra", "must be >= 0");
  const double fastest = max_rate(schedule, device);
  if (dt * fastest >= 0.02)
    throw ValidationError("simulation.dt", "dt * max_rate = " + std::to_string(dt * fastest) + " must stay below 0.02");
  Window w;
  w.t1 = schedule.total_duration;
  for (const auto& s : schedule.segments) {
    w.t0 = std::min(w.t0, s.t_start - kEdgeSpan / s.rise_rate);
    w.t1 = std::max(w.t1, s.t_end + kEdgeSpan / s.fall_rate);
  }
  w.t1 += t_extra;
  w.steps = static_cast<int>(std::ceil((w.t1 - w.t0) / dt - 1e-9));
  w.dt = w.steps > 0 ? (w.t1 - w.t0) / w.steps : dt;
  return w;
}

}  // namespace

Trajectory simulate_protocol(const PulseSchedule& schedule, const DeviceParams& device, double dt, int record_every,
                             double t_extra) {
  device.validate();
  const GaussianState vac = GaussianState::vacuum(kModes);
  return simulate_protocol(schedule, device, dt, vac, vac, record_every, t_extra);
}

Trajectory simulate_protocol(const PulseSchedule& schedule, const DeviceParams& device, double dt,
                             const GaussianState& init_e, const GaussianState& init_g, int record_every,
                             double t_extra) {
  check_rates(device);
  if (record_every < 1) throw ValidationError("record_every", "must be >= 1");
  if (init_e.means.size() != 2 * kModes || init_g.means.size() != 2 * kModes)
    throw StructuralError("simulate_protocol: initial states must have 3 modes");
  const Window w = time_window(schedule, device, dt, t_extra);

  Trajectory tr;
  const int n_rec = w.steps / record_every + 1 + (w.steps % record_every != 0);
  tr.photons_e.resize(n_rec, kModes);
  tr.photons_g.resize(n_rec, kModes);
  GaussianState se = init_e, sg = init_g;
  se.time = sg.time = w.t0;

  auto record = [&](const GaussianState& e, const GaussianState& g) {
    const auto row = static_cast<Eigen::Index>(tr.times.size());
    tr.times.push_back(e.time);
    tr.states_e.push_back(e);
    tr.states_g.push_back(g);
    for (int m = 0; m < kModes; ++m) {
      tr.photons_e(row, m) = photon_number(e, m);
      tr.photons_g(row, m) = photon_number(g, m);
    }
  };
  record(se, sg);
  for (int k = 1; k <= w.steps; ++k) {
    se = step_tv(se, [&](double t) { return generator_at(schedule, device, 1.0, t); }, w.dt);
    sg = step_tv(sg, [&](double t) { return generator_at(schedule, device, -1.0, t); }, w.dt);
    // pin the clock to the grid so rounding does not accumulate
    se.time = sg.time = w.t0 + k * w.dt;
    if (k % record_every == 0 || k == w.steps) record(se, sg);
  }
  return tr;
}

SnrTrace homodyne_snr_trace(const PulseSchedule& schedule, const DeviceParams& device, double dt,
                            const RecordOptions& opt) {
  if (opt.mode < 0 || opt.mode >= kModes) throw ValidationError("record.mode", "out of range");
  if (!(opt.eta > 0.0 && opt.eta <= 1.0)) throw ValidationError("homodyne.eta", "must lie in (0, 1]");
  if (!(opt.n_add >= 0.0)) throw ValidationError("homodyne.n_add", "must be >= 0");

  const int q = 2 * opt.mode;
  const int n = 2 * kModes;
  GaussianState init = GaussianState::vacuum(kModes);
  if (opt.init_cov.size() != 0) {
    if (opt.init_cov.rows() != n || opt.init_cov.cols() != n)
      throw StructuralError("homodyne_snr_trace: init_cov must be 6x6");
    init.cov = opt.init_cov;
  }
  const Trajectory first = simulate_protocol(schedule, device, dt, init, init, 1, opt.t_extra);
  double best = -1.0;
  Eigen::Vector2d u(1.0, 0.0);
  for (std::size_t k = 0; k < first.size(); ++k) {
    const Eigen::Vector2d d = (first.states_e[k].means - first.states_g[k].means).segment<2>(q);
    if (d.norm() > best) {
      best = d.norm();
      if (best > 0.0) u = d / best;
    }
  }

  SnrTrace out;
  out.axis_angle = std::atan2(u(1), u(0));
  const Window w = time_window(schedule, device, dt, opt.t_extra);
  Vec U = Vec::Zero(n);
  U.segment<2>(q) = u / std::sqrt(2.0);
  const double gm = device.gamma(opt.mode);

  // packed layout per branch: mean (n), covariance (n*n), excess regression vector (n); then P, Q
  const int blk = n + n * n + n;
  const int size = 2 * blk + 2;
  Vec y = Vec::Zero(size);
  for (int b = 0; b < 2; ++b) {
    Eigen::Map<Mat>(y.data() + b * blk + n, n, n) = init.cov;
  }

  const Mat half = 0.5 * Mat::Identity(n, n);
  auto rhs = [&](double t, const Vec& s) {
    Vec ds(size);
    const Vec dmu = s.segment(0, n) - s.segment(blk, n);
    const double c = U.dot(dmu);
    double zsum = 0.0;
    for (int b = 0; b < 2; ++b) {
      const GeneratorSpec g = generator_at(schedule, device, b == 0 ? 1.0 : -1.0, t);
      const Mat a = build_drift(g);
      const int o = b * blk;
      const Vec mu = s.segment(o, n);
      const Eigen::Map<const Mat> v(s.data() + o + n, n, n);
      const Vec z = s.segment(o + n + n * n, n);
      ds.segment(o, n) = a * mu + g.drive;
      Mat av = a * v;
      Mat dv = av + av.transpose();
      dv.diagonal() += 0.5 * g.decay;
      Eigen::Map<Mat>(ds.data() + o + n, n, n) = dv;
      ds.segment(o + n + n * n, n) = a * z + (v - half) * U * c;
      zsum += U.dot(z);
    }
    ds(2 * blk) = c * c;
    ds(2 * blk + 1) = c * zsum;
    return ds;
  };

  auto d2_of = [&](const Vec& s) {
    const double p = s(2 * blk), qv = s(2 * blk + 1);
    if (!(p > 0.0)) return 0.0;
    const double k = 2.0 * opt.eta * gm;
    return k * p / ((0.5 + opt.n_add) + k * qv / p);
  };

  double t = w.t0;
  auto push = [&](double time, const Vec& s) {
    out.times.push_back(time);
    out.d2.push_back(d2_of(s));
    out.contrast.push_back(U.dot(s.segment(0, n) - s.segment(blk, n)));
  };
  push(t, y);
  const double h = w.dt;
  for (int k = 1; k <= w.steps; ++k) {
    const Vec k1 = rhs(t, y);
    const Vec k2 = rhs(t + 0.5 * h, y + 0.5 * h * k1);
    const Vec k3 = rhs(t + 0.5 * h, y + 0.5 * h * k2);
    const Vec k4 = rhs(t + h, y + h * k3);
    y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!y.allFinite()) throw NumericOverflow("homodyne_snr_trace: non-finite state at t=" + std::to_string(t + h));
    t = w.t0 + k * h;
    push(t, y);
  }
  return out;
}

Quadratures cdr_means(double nbar, double kappa, double chi, double t, double pulse_T) {
  if (t < 0.0) throw ValidationError("t", "must be >= 0");
  using C = std::complex<double>;
  std::complex<double> a;
  if (t <= pulse_T) {
    a = accumulate(nbar, kappa, chi, t);
  } else {
    a = accumulate(nbar, kappa, chi, pulse_T) * std::exp(-C(0.5 * kappa, -chi) * (t - pulse_T));
  }
  return {a.real(), a.imag()};
}

Quadratures ea_means(double G, double nbar, double chi, double gamma_a, double gamma_b, double t_a, double t_proc,
                     double t) {
  if (!(G >= 1.0)) throw ValidationError("gain", "must be >= 1");
  if (t < t_proc) return {};
  const std::complex<double> a = accumulate(nbar, gamma_a, chi, t_a);
  const double s = std::exp(-0.5 * gamma_b * (t - t_proc));
  return {G * s * a.real(), s * a.imag() / G};
}

}  // namespace embamp
