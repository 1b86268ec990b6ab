#include "embamp/snr_models.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "embamp/errors.hpp"
#include "embamp/metrics.hpp"
#include "embamp/protocols.hpp"

namespace embamp {

namespace {

constexpr double kGolden = 0.6180339887498949;

template <class F>
double golden_max(F f, double lo, double hi, int iters = 80) {
  double a = lo, b = hi;
  double x1 = b - kGolden * (b - a), x2 = a + kGolden * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int k = 0; k < iters && b - a > 1e-15 * (1.0 + std::abs(b)); ++k) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kGolden * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kGolden * (b - a);
      f1 = f(x1);
    }
  }
  return f1 > f2 ? x1 : x2;
}

// grid scan followed by golden refinement around the best sample
template <class F>
double scan_max(F f, double lo, double hi, int samples) {
  double best = lo, fbest = f(lo);
  const double h = (hi - lo) / samples;
  for (int k = 1; k <= samples; ++k) {
    const double x = lo + k * h;
    const double v = f(x);
    if (v > fbest) {
      fbest = v;
      best = x;
    }
  }
  const double x = golden_max(f, std::max(lo, best - h), std::min(hi, best + h));
  return f(x) > fbest ? x : best;
}

double accumulate_shape(double rate, double chi, double u) {
  const double e = std::exp(-0.5 * rate * u);
  return 1.0 - 2.0 * e * std::cos(chi * u) + e * e;
}

double separation(double n_disp, double rate, double chi, double t_a) {
  if (t_a <= 0.0 || n_disp <= 0.0) return 0.0;
  const double nbar = n_disp / accumulate_peak(rate, chi, t_a);
  return 2.0 * std::abs(cdr_means(nbar, rate, chi, t_a, t_a).y);
}

double squeezed_variance(const EaReadout& m, double t_a) {
  const double s = m.squeeze_db * std::numbers::ln10 / 20.0;
  return 0.25 + std::exp(-m.gamma_a * t_a) * (0.25 * std::exp(-2.0 * s) - 0.25);
}

}  // namespace

void CdrReadout::validate() const {
  if (!(kappa > 0.0)) throw ValidationError("cdr.kappa", "must be > 0");
  if (!(chi > 0.0)) throw ValidationError("cdr.chi", "must be > 0");
  if (!(eta > 0.0 && eta <= 1.0)) throw ValidationError("homodyne.eta", "must lie in (0, 1]");
  if (!(n_add >= 0.0)) throw ValidationError("homodyne.n_add", "must be >= 0");
  if (points < 2) throw ValidationError("cdr.points", "must be >= 2");
}

void EaReadout::validate() const {
  if (!(chi > 0.0)) throw ValidationError("ea.chi", "must be > 0");
  if (!(gamma_a > 0.0)) throw ValidationError("ea.gamma_a", "must be > 0");
  if (!(gamma_b > 0.0)) throw ValidationError("ea.gamma_b", "must be > 0");
  if (!(eta > 0.0 && eta <= 1.0)) throw ValidationError("homodyne.eta", "must lie in (0, 1]");
  if (!(n_add >= 0.0)) throw ValidationError("homodyne.n_add", "must be >= 0");
  if (!(gain >= 1.0)) throw ValidationError("ea.gain", "must be >= 1");
  if (!(squeeze_db >= 0.0)) throw ValidationError("ea.squeeze_db", "must be >= 0");
  if (!(t_dead >= 0.0)) throw ValidationError("budgets.t_dead", "must be >= 0");
  if (points < 2) throw ValidationError("ea.points", "must be >= 2");
}

CdrReadout cdr_readout_for(const DeviceParams& device) {
  CdrReadout m;
  m.kappa = device.gamma(kReadout);
  m.chi = device.chi();
  return m;
}

EaReadout ea_readout_for(const DeviceParams& device) {
  EaReadout m;
  m.chi = device.chi();
  m.gamma_a = device.gamma(kReadout);
  m.gamma_b = device.gamma(kOutput);
  return m;
}

double accumulate_peak(double rate, double chi, double t) {
  if (!(t > 0.0)) return 0.0;
  auto f = [&](double u) { return accumulate_shape(rate, chi, u); };
  const double u = scan_max(f, 0.0, t, 512);
  return std::max(f(u), f(t));
}

double squeeze_photons(double db) {
  const double s = db * std::numbers::ln10 / 20.0;
  return std::sinh(s) * std::sinh(s);
}

ReadoutPoint cdr_readout(const CdrReadout& m, double n_tot, double T) {
  m.validate();
  if (!(n_tot >= 0.0)) throw ValidationError("budgets.n_tot", "must be >= 0");
  ReadoutPoint out;
  if (!(T > 0.0) || n_tot == 0.0) return out;
  out.nbar = n_tot / accumulate_peak(m.kappa, m.chi, T);
  out.t_a = T;
  const double gm = m.gamma_meas < 0.0 ? m.kappa : m.gamma_meas;
  HomodyneModel hm;
  hm.eta = m.eta;
  hm.gamma_meas = gm;
  hm.n_add = m.n_add;
  hm.times.resize(m.points + 1);
  hm.contrast.resize(m.points + 1);
  for (int k = 0; k <= m.points; ++k) {
    const double t = T * k / m.points;
    hm.times[k] = t;
    hm.contrast[k] = std::sqrt(2.0 * m.eta * gm) * 2.0 * cdr_means(out.nbar, m.kappa, m.chi, t, T).y;
  }
  hm.filter = matched_filter(hm.times, hm.contrast);
  out.d2 = integrated_snr(hm, Kernel{}, T);
  return out;
}

double ea_d2_closed(const EaReadout& m, double n_disp, double t_a, double t_r) {
  m.validate();
  const double dy = separation(n_disp, m.gamma_a, m.chi, t_a);
  if (dy == 0.0 || !(t_r > 0.0)) return 0.0;
  const double f = -std::expm1(-m.gamma_b * t_r);
  const double g2 = m.gain * m.gain;
  const double v = squeezed_variance(m, t_a);
  return 2.0 * m.eta * f * g2 * dy * dy / (0.5 + m.n_add + 2.0 * m.eta * f * (g2 * v - 0.25));
}

double ea_d2_filtered(const EaReadout& m, double n_disp, double t_a, double t_r) {
  m.validate();
  const double dy = separation(n_disp, m.gamma_a, m.chi, t_a);
  if (dy == 0.0 || !(t_r > 0.0)) return 0.0;
  const double window = std::min(t_r, 40.0 / m.gamma_b);
  const double excess = m.gain * m.gain * squeezed_variance(m, t_a) - 0.25;
  HomodyneModel hm;
  hm.eta = m.eta;
  hm.gamma_meas = m.gamma_b;
  hm.n_add = m.n_add;
  hm.times.resize(m.points + 1);
  hm.contrast.resize(m.points + 1);
  const double amp = std::sqrt(2.0 * m.eta * m.gamma_b) * m.gain * dy;
  for (int k = 0; k <= m.points; ++k) {
    const double t = window * k / m.points;
    hm.times[k] = t;
    hm.contrast[k] = amp * std::exp(-0.5 * m.gamma_b * t);
  }
  hm.filter = matched_filter(hm.times, hm.contrast);
  const double gb = m.gamma_b;
  const Kernel kernel = [gb, excess](double t1, double t2) { return excess * std::exp(-0.5 * gb * (t1 + t2)); };
  return integrated_snr(hm, kernel, window);
}

ReadoutPoint ea_readout(const EaReadout& m, double n_tot, double T) {
  m.validate();
  if (!(n_tot >= 0.0)) throw ValidationError("budgets.n_tot", "must be >= 0");
  ReadoutPoint out;
  const double n_disp = n_tot - squeeze_photons(m.squeeze_db);
  const double avail = T - m.t_dead;
  if (!(avail > 0.0) || !(n_disp > 0.0)) return out;
  const double ta_max = std::min(avail, std::numbers::pi / (2.0 * m.chi));
  auto f = [&](double ta) { return ea_d2_closed(m, n_disp, ta, avail - ta); };
  out.t_a = scan_max(f, 0.0, ta_max, 64);
  out.t_r = avail - out.t_a;
  if (out.t_a > 0.0) out.nbar = n_disp / accumulate_peak(m.gamma_a, m.chi, out.t_a);
  out.d2 = ea_d2_filtered(m, n_disp, out.t_a, out.t_r);
  return out;
}

}  // namespace embamp
