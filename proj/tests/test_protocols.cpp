#include <cmath>
#include <complex>

#include <Eigen/Eigenvalues>

#include "doctest.h"
#include "embamp/errors.hpp"
#include "embamp/protocols.hpp"
#include "embamp/units.hpp"

using namespace embamp;

namespace {

constexpr double pi = 3.14159265358979323846;

// angle of the squeezed axis of one mode, folded into (-pi/2, pi/2]
double squeezed_axis(const Mat& cov, int mode) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(cov.block<2, 2>(2 * mode, 2 * mode).eval());
  const Eigen::Vector2d v = es.eigenvectors().col(0);
  double a = std::atan2(v(1), v(0));
  while (a > pi / 2) a -= pi;
  while (a <= -pi / 2) a += pi;
  return a;
}

double fold(double a) {
  a = std::fmod(a, pi);
  if (a > pi / 2) a -= pi;
  if (a <= -pi / 2) a += pi;
  return a;
}

DeviceParams test_device(double chi_mhz, double gamma_mhz) {
  DeviceParams d;
  d.chi_mhz = chi_mhz;
  for (auto& m : d.modes) m.gamma_mhz = gamma_mhz;
  return d;
}

PulseSegment seg(PulseKind k, double amp_mhz, double phase, double t0, double t1) {
  PulseSegment s;
  s.kind = k;
  s.amplitude_mhz = amp_mhz;
  s.phase = phase;
  s.t_start = t0;
  s.t_end = t1;
  return s;
}

Mat mirror() {
  Mat m = Mat::Identity(6, 6);
  for (int k = 0; k < 3; ++k) m(2 * k, 2 * k) = -1.0;
  return m;
}

const DeviceParams kDefault{};
const double kChi = units::mhz(3.0);
const double kR = units::mhz(6.0);

}  // namespace

TEST_SUITE("protocols") {

TEST_CASE("squeeze calibration: boundary values and errors") {
  const auto c0 = calibrate_squeeze(kR, kChi, 0.0);
  CHECK(std::abs(c0.n_a) < 1e-15);
  CHECK(c0.phi_chi == doctest::Approx(pi / 2).epsilon(1e-15));
  CHECK(c0.delay == doctest::Approx(c0.phi_chi / kChi).epsilon(1e-15));
  CHECK_THROWS_AS(calibrate_squeeze(kChi, kChi, 1e-8), DegenerateError);
  CHECK_THROWS_AS(calibrate_squeeze(0.5 * kChi, kChi, 1e-8), DegenerateError);
}

TEST_CASE("squeeze calibration matches exact single-mode evolution") {
  for (double t : {5e-9, 20e-9, 40e-9, 80e-9}) {
    const auto c = calibrate_squeeze(kR, kChi, t);
    GeneratorSpec g = GeneratorSpec::zero(1);
    add_rotation(g.hmat, 0, kChi);
    add_squeeze(g.hmat, 0, kR, pi / 2);
    const GaussianState s = evolve_exact(GaussianState::vacuum(1), g, t);
    CHECK(c.n_a == doctest::Approx(photon_number(s, 0)).epsilon(1e-9));
    // the calibrated angle is the squeezed axis of the +chi branch
    CHECK(std::abs(fold(squeezed_axis(s.cov, 0) - c.phi_chi)) < 1e-9);

    GeneratorSpec gm = GeneratorSpec::zero(1);
    add_rotation(gm.hmat, 0, -kChi);
    add_squeeze(gm.hmat, 0, kR, pi / 2);
    const GaussianState sm = evolve_exact(GaussianState::vacuum(1), gm, t);
    CHECK(std::abs(fold(squeezed_axis(sm.cov, 0) + c.phi_chi)) < 1e-9);

    // after the free delay both branches are squeezed along q
    GeneratorSpec fp = GeneratorSpec::zero(1), fm = GeneratorSpec::zero(1);
    add_rotation(fp.hmat, 0, kChi);
    add_rotation(fm.hmat, 0, -kChi);
    CHECK(std::abs(squeezed_axis(evolve_exact(s, fp, c.delay).cov, 0)) < 1e-8);
    CHECK(std::abs(squeezed_axis(evolve_exact(sm, fm, c.delay).cov, 0)) < 1e-8);
  }
}

TEST_CASE("moderate squeezing stays below the photon ceiling") {
  const double ga = kDefault.gamma(kReadout);
  for (double db : {4.0, 5.0, 6.0}) {
    const double t = squeeze_time_for_db(kR, kChi, ga, db);
    GeneratorSpec g = GeneratorSpec::zero(1);
    add_rotation(g.hmat, 0, kChi);
    add_squeeze(g.hmat, 0, kR, pi / 2);
    g.set_decay(0, ga);
    CHECK(squeezing_db(evolve_exact(GaussianState::vacuum(1), g, t).cov, 0) == doctest::Approx(db).epsilon(1e-9));
    const double na = calibrate_squeeze(kR, kChi, t).n_a;
    CHECK(na > 0.0);
    CHECK(na <= 100.0);
  }
  CHECK(squeeze_time_for_db(kR, kChi, 0.0, 0.0) == 0.0);
  CHECK_THROWS_AS(squeeze_time_for_db(kR, kChi, 0.0, -1.0), ValidationError);
}

TEST_CASE("displacement separation") {
  const double eta = units::mhz(1.3), ga = units::mhz(1.0);
  CHECK(displacement_separation(eta, kChi, ga, 0.0) == doctest::Approx(0.0));
  CHECK(std::abs(displacement_separation(eta, kChi, ga, pi / kChi) - optimal_separation(eta, kChi, ga)) <
        1e-12 * optimal_separation(eta, kChi, ga));
  CHECK(optimal_separation(eta, kChi, 0.0) == doctest::Approx(4.0 * eta / kChi).epsilon(1e-14));

  // two branches of a driven, detuned, decaying cavity
  for (double t : {10e-9, 60e-9, pi / kChi, 300e-9}) {
    Vec mu[2];
    for (int b = 0; b < 2; ++b) {
      GeneratorSpec g = GeneratorSpec::zero(1);
      add_rotation(g.hmat, 0, b == 0 ? kChi : -kChi);
      add_drive(g.drive, 0, eta, 0.0);
      g.set_decay(0, ga);
      mu[b] = evolve_exact(GaussianState::vacuum(1), g, t).means;
    }
    CHECK((mu[0] - mu[1]).norm() == doctest::Approx(displacement_separation(eta, kChi, ga, t)).epsilon(1e-9));
  }
}

TEST_CASE("conversion transfer") {
  const double g = units::mhz(10.0);
  auto res = conversion_transfer(g, 0.0);
  CHECK(res.p_s == 1.0);
  CHECK(res.p_a == 0.0);
  CHECK(res.theta_chi == 0.0);
  CHECK(conversion_transfer(kChi, kChi).p_s == doctest::Approx(0.5));
  res = conversion_transfer(g, kChi);
  CHECK(res.p_s == doctest::Approx(100.0 / 109.0).epsilon(1e-14));
  CHECK(res.p_a + res.p_s == doctest::Approx(1.0));
  CHECK_THROWS_AS(conversion_transfer(0.0, kChi), ValidationError);

  // peak population transfer of the detuned two-mode exchange
  for (double chi : {0.0, kChi}) {
    const auto ct = conversion_transfer(g, chi);
    GeneratorSpec gen = GeneratorSpec::zero(2);
    add_rotation(gen.hmat, 0, chi);
    add_conversion(gen.hmat, 0, 1, 0.5 * g, -pi / 2);
    const GaussianState s0 = GaussianState::coherent(2, 0, 2.0, 1.0);
    const double n0 = photon_number(s0, 0);
    double best = 0.0;
    for (int k = 0; k <= 400; ++k) {
      const double t = 2.0 * ct.t_pi * k / 400.0;
      best = std::max(best, photon_number(evolve_exact(s0, gen, t), 1) / n0);
    }
    const double at_pi = photon_number(evolve_exact(s0, gen, ct.t_pi), 1) / n0;
    CHECK(at_pi == doctest::Approx(ct.p_s).epsilon(1e-10));
    CHECK(best <= ct.p_s + 1e-10);
  }
  CHECK(amplification_phase(0.0) == doctest::Approx(pi / 2));
}

TEST_CASE("EA schedule layout") {
  const EffectiveRates rates;
  const double eta = kChi * std::sqrt(5.0 / 2.0);
  EaOptions opt;
  opt.gain = 10.0;
  const auto [s, cal] = build_ea_sequence(kDefault, rates, 5.0, eta, opt);
  REQUIRE(s.segments.size() == 6);
  const PulseKind order[] = {PulseKind::SqueezeReadout, PulseKind::Idle, PulseKind::DisplaceReadout,
                             PulseKind::ConvertReadoutSnail, PulseKind::AmplifySnail, PulseKind::ConvertSnailOutput};
  for (int k = 0; k < 6; ++k) CHECK(s.segments[k].kind == order[k]);
  for (int k = 1; k < 6; ++k) CHECK(s.segments[k].t_start == doctest::Approx(s.segments[k - 1].t_end).epsilon(1e-14));
  CHECK(s.total_duration == s.segments.back().t_end);

  const double g_rs = units::mhz(10.0);
  CHECK(s.segments[2].duration() == doctest::Approx(pi / kChi).epsilon(1e-12));
  CHECK(cal.displace_duration == doctest::Approx(1.0 / 6e6).epsilon(1e-12));
  CHECK(s.segments[3].duration() == doctest::Approx(pi / std::sqrt(g_rs * g_rs + kChi * kChi)).epsilon(1e-12));
  CHECK(s.segments[4].duration() == doctest::Approx(std::log(10.0) / units::mhz(4.0)).epsilon(1e-12));
  CHECK(s.segments[5].duration() == doctest::Approx(pi / units::mhz(10.0)).epsilon(1e-12));
  CHECK(s.segments[1].duration() == doctest::Approx(cal.delay).epsilon(1e-12));
  CHECK(s.dead_time == doctest::Approx(s.total_duration - cal.displace_duration).epsilon(1e-14));
  CHECK(cal.amp_phase == doctest::Approx(pi / 2));
  CHECK(cal.transfer_prob == doctest::Approx(100.0 / 109.0));
  CHECK(std::abs(std::sin(cal.separation_angle)) < 1e-9);

  const auto [s0, cal0] = build_ea_sequence(kDefault, rates, 0.0, eta);
  REQUIRE(s0.segments.size() == 3);
  CHECK(s0.segments[0].kind == PulseKind::DisplaceReadout);
  CHECK(s0.segments[2].kind == PulseKind::ConvertSnailOutput);
}

TEST_CASE("EA schedule constraint errors") {
  const EffectiveRates rates;
  DeviceParams d;
  d.g_crit_mhz["convert_readout_snail"] = 5.0;
  CHECK_THROWS_AS(build_ea_sequence(d, rates, 5.0, kChi), ConstraintViolation);
  d = DeviceParams{};
  d.n_crit = 0.5;
  CHECK_THROWS_AS(build_ea_sequence(d, rates, 6.0, kChi), ConstraintViolation);
  EaOptions loose;
  loose.enforce_constraints = false;
  CHECK_NOTHROW(build_ea_sequence(d, rates, 6.0, kChi, loose));
  CHECK_THROWS_AS(build_ea_sequence(kDefault, rates, -1.0, kChi), ValidationError);
  EaOptions bad;
  bad.gain = 0.5;
  CHECK_THROWS_AS(build_ea_sequence(kDefault, rates, 0.0, kChi, bad), ValidationError);
}

TEST_CASE("identity protocol leaves every mode in vacuum") {
  const auto [s, cal] = build_ea_sequence(kDefault, EffectiveRates{}, 0.0, 0.0);
  const Trajectory tr = simulate_protocol(s, kDefault, 1e-10, 10);
  REQUIRE(tr.size() > 10);
  const Mat vac = 0.5 * Mat::Identity(6, 6);
  for (std::size_t k = 0; k < tr.size(); ++k) {
    CHECK(tr.states_e[k].means.norm() < 1e-14);
    CHECK((tr.states_e[k].cov - vac).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((tr.states_g[k].cov - vac).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("empty schedule and dt guard") {
  PulseSchedule empty;
  const Trajectory tr = simulate_protocol(empty, kDefault, 1e-10, 1, 50e-9);
  CHECK(tr.size() == 501);
  CHECK(tr.photons_e.cwiseAbs().maxCoeff() < 1e-15);
  CHECK(tr.photons_g.cwiseAbs().maxCoeff() < 1e-15);
  const auto [s, cal] = build_ea_sequence(kDefault, EffectiveRates{}, 0.0, kChi);
  CHECK_THROWS_AS(simulate_protocol(s, kDefault, 2e-9), ValidationError);
}

TEST_CASE("resonant swap, completeness and return after two pi times") {
  const DeviceParams d = test_device(0.0, 0.0);
  const double g = units::mhz(10.0);
  const double tpi = conversion_transfer(g, 0.0).t_pi;
  const GaussianState s0 = GaussianState::coherent(3, kReadout, std::sqrt(8.0), 0.0);
  const double n0 = photon_number(s0, kReadout);
  CHECK(n0 == doctest::Approx(4.0));

  PulseSchedule one;
  one.segments.push_back(seg(PulseKind::ConvertReadoutSnail, 10.0, -pi / 2, 0.0, tpi));
  one.total_duration = tpi;
  const Trajectory tr = simulate_protocol(one, d, 2e-11, s0, s0, 10);
  const auto last = static_cast<Eigen::Index>(tr.size() - 1);
  CHECK(std::abs(tr.photons_e(last, kSnail) - n0) < 1e-6);
  CHECK(tr.photons_e(last, kReadout) < 1e-6 * n0);
  // phase preserving: the SNAIL inherits the readout amplitude
  CHECK(std::abs(tr.states_e.back().means(2 * kSnail) - std::sqrt(8.0)) < 1e-6);

  PulseSchedule two;
  two.segments.push_back(seg(PulseKind::ConvertReadoutSnail, 10.0, -pi / 2, 0.0, 2 * tpi));
  two.total_duration = 2 * tpi;
  const Trajectory back = simulate_protocol(two, d, 2e-11, s0, s0, 10);
  const auto lb = static_cast<Eigen::Index>(back.size() - 1);
  CHECK(std::abs(back.photons_e(lb, kReadout) - n0) < 1e-6);
  CHECK(back.photons_e(lb, kSnail) < 1e-6);
}

TEST_CASE("phase-sensitive amplification is symplectic") {
  const DeviceParams d = test_device(0.0, 0.0);
  const double rs = units::mhz(4.0);
  const double T = std::log(10.0) / rs;
  PulseSchedule s;
  s.segments.push_back(seg(PulseKind::AmplifySnail, 4.0, pi / 2, 0.0, T));
  s.total_duration = T;
  const GaussianState vac = GaussianState::vacuum(3);
  const Trajectory tr = simulate_protocol(s, d, 2e-11, vac, vac, 100);
  const Mat& v = tr.states_e.back().cov;
  CHECK(v(2, 2) == doctest::Approx(0.5 * std::exp(2 * rs * T)).epsilon(1e-8));
  CHECK(v(3, 3) == doctest::Approx(0.5 * std::exp(-2 * rs * T)).epsilon(1e-8));
  CHECK(std::abs(v(2, 2) * v(3, 3) - 0.25) < 1e-8);
  CHECK(std::abs(v(2, 3)) < 1e-8);
}

TEST_CASE("full EA protocol: mirror symmetry, uncertainty, catch and release") {
  const EffectiveRates rates;
  EaOptions opt;
  opt.gain = 5.0;
  const auto [s, cal] = build_ea_sequence(kDefault, rates, 5.0, kChi * std::sqrt(2.5), opt);
  const Trajectory tr = simulate_protocol(s, kDefault, default_dt(s, kDefault), 1);
  const Mat m = mirror();
  double worst_mean = 0.0, worst_cov = 0.0, min_eig = 1.0, min_n = 1.0;
  for (std::size_t k = 0; k < tr.size(); ++k) {
    const auto& e = tr.states_e[k];
    const auto& g = tr.states_g[k];
    worst_mean = std::max(worst_mean, (m * e.means - g.means).cwiseAbs().maxCoeff() / (1.0 + e.means.norm()));
    worst_cov = std::max(worst_cov, (m * e.cov * m - g.cov).cwiseAbs().maxCoeff() / e.cov.norm());
    min_eig = std::min({min_eig, uncertainty_min_eigenvalue(e.cov), uncertainty_min_eigenvalue(g.cov)});
    min_n = std::min({min_n, tr.photons_e.row(k).minCoeff(), tr.photons_g.row(k).minCoeff()});
  }
  CHECK(worst_mean < 1e-10);
  CHECK(worst_cov < 1e-10);
  CHECK(min_eig >= -1e-10);
  CHECK(min_n >= -1e-10);

  auto index_at = [&](double t) {
    std::size_t k = 0;
    while (k + 1 < tr.size() && tr.times[k + 1] <= t) ++k;
    return static_cast<Eigen::Index>(k);
  };
  const auto& conv = s.segments[3];
  const auto pre = index_at(conv.t_start);
  const auto post = index_at(conv.t_end);
  const double n_peak = tr.photons_e.col(kReadout).head(pre + 1).maxCoeff();
  const double p_a = conversion_transfer(units::mhz(10.0), kChi).p_a;
  CHECK(tr.photons_e(post, kReadout) <= p_a * n_peak);
  CHECK(tr.photons_g(post, kReadout) <= p_a * n_peak);

  Eigen::Index peak;
  tr.photons_e.col(kOutput).maxCoeff(&peak);
  const auto& rel = s.segments.back();
  CHECK(tr.times[peak] >= rel.t_start);
  CHECK(tr.times[peak] <= rel.t_end);
}

TEST_CASE("closed-form conventional readout") {
  const double kappa = kDefault.gamma(kReadout);
  const double nbar = 3.0;
  const auto z = cdr_means(nbar, kappa, kChi, 0.0, 1e-6);
  CHECK(z.x == 0.0);
  CHECK(z.y == 0.0);
  const double phi = std::atan(2 * kChi / kappa);
  const auto ss = cdr_means(nbar, kappa, kChi, 2e-3, 1.0);
  CHECK(ss.x == doctest::Approx(std::sqrt(nbar) * std::cos(phi)).epsilon(1e-12));
  CHECK(ss.y == doctest::Approx(std::sqrt(nbar) * std::sin(phi)).epsilon(1e-12));
  const auto mirror_branch = cdr_means(nbar, kappa, -kChi, 137e-9, 1e-6);
  const auto branch = cdr_means(nbar, kappa, kChi, 137e-9, 1e-6);
  CHECK(mirror_branch.x == doctest::Approx(branch.x));
  CHECK(mirror_branch.y == doctest::Approx(-branch.y));
}

TEST_CASE("closed-form conventional readout agrees with simulation") {
  const double kappa = kDefault.gamma(kReadout);
  const double eta = units::mhz(0.7);
  const double T = 1.5e-6;
  const PulseSchedule s = build_cdr_sequence(eta, T);
  const double t0 = s.segments[0].t_start;
  const Trajectory tr = simulate_protocol(s, kDefault, 1e-10, 20, 0.5e-6);
  const double nbar = 0.5 * eta * eta / (0.25 * kappa * kappa + kChi * kChi);
  double worst = 0.0;
  for (std::size_t k = 0; k < tr.size(); ++k) {
    const double t = tr.times[k] - t0;
    if (t < 0.0) continue;
    for (int b = 0; b < 2; ++b) {
      const Vec& mu = b == 0 ? tr.states_e[k].means : tr.states_g[k].means;
      // simulated branch sign s maps to the closed form with chi -> -s chi, drive along -p
      const auto cf = cdr_means(nbar, kappa, b == 0 ? -kChi : kChi, t, T);
      worst = std::max(worst, std::abs(mu(0) / std::sqrt(2.0) - cf.y));
      worst = std::max(worst, std::abs(mu(1) / std::sqrt(2.0) + cf.x));
    }
  }
  CHECK(worst < 0.02 * std::sqrt(nbar));
}

TEST_CASE("closed-form released burst") {
  const double ga = kDefault.gamma(kReadout), gb = kDefault.gamma(kOutput);
  const auto z = ea_means(1.0, 4.0, kChi, ga, gb, 0.0, 100e-9, 150e-9);
  CHECK(std::abs(z.x) < 1e-15);
  CHECK(std::abs(z.y) < 1e-15);
  const auto a1 = ea_means(1.0, 4.0, kChi, ga, gb, 80e-9, 100e-9, 110e-9);
  const auto a2 = ea_means(2.0, 4.0, kChi, ga, gb, 80e-9, 100e-9, 110e-9);
  CHECK(a2.x == 2.0 * a1.x);
  CHECK(a2.y == 0.5 * a1.y);
  const auto before = ea_means(1.0, 4.0, kChi, ga, gb, 80e-9, 100e-9, 90e-9);
  CHECK(before.x == 0.0);
  CHECK(before.y == 0.0);

  const double nbar = 4.0;
  const auto burst = ea_means(1.0, nbar, kChi, ga, gb, pi / (2 * kChi), 0.0, 0.0);
  const double ratio = std::hypot(burst.x, burst.y) / std::sqrt(nbar);
  CHECK(ratio > 1.0);
  CHECK(ratio == doctest::Approx(std::abs(1.0 - std::exp(std::complex<double>(-ga * pi / (4 * kChi), pi / 2)))));
}

TEST_CASE("closed-form accumulation and gain agree with simulation") {
  const EffectiveRates rates;
  const double eta = kChi * std::sqrt(2.5);
  EaOptions opt;
  opt.gain = 4.0;
  const auto [s, cal] = build_ea_sequence(kDefault, rates, 0.0, eta, opt);
  const Trajectory tr = simulate_protocol(s, kDefault, 1e-10, 1);
  const double ga = kDefault.gamma(kReadout), gb = kDefault.gamma(kOutput), gs = kDefault.gamma(kSnail);
  const double nbar = 0.5 * eta * eta / (0.25 * ga * ga + kChi * kChi);

  auto index_at = [&](double t) {
    std::size_t k = 0;
    while (k + 1 < tr.size() && tr.times[k + 1] <= t) ++k;
    return k;
  };
  const auto& disp = s.segments[0];
  const std::size_t k_acc = index_at(disp.t_end);
  const double t_a = tr.times[k_acc] - disp.t_start;
  for (int b = 0; b < 2; ++b) {
    const Vec& mu = b == 0 ? tr.states_e[k_acc].means : tr.states_g[k_acc].means;
    const auto cf = ea_means(1.0, nbar, b == 0 ? -kChi : kChi, ga, gb, t_a, 0.0, 0.0);
    CHECK(std::abs(mu(0) / std::sqrt(2.0) - cf.y) < 0.02 * std::sqrt(nbar));
    CHECK(std::abs(mu(1) / std::sqrt(2.0) + cf.x) < 0.02 * std::sqrt(nbar));
  }

  // same timing with the amplifier switched off: the released separation scales by G
  PulseSchedule off = s;
  off.segments[2].amplitude_mhz = 0.0;
  const Trajectory tr0 = simulate_protocol(off, kDefault, 1e-10, 1);
  auto peak_sep = [](const Trajectory& t) {
    double best = 0.0;
    for (std::size_t k = 0; k < t.size(); ++k)
      best = std::max(best, (t.states_e[k].means - t.states_g[k].means).segment<2>(2 * kOutput).norm());
    return best;
  };
  CHECK(peak_sep(tr) / peak_sep(tr0) == doctest::Approx(4.0).epsilon(0.02));
  (void)gs;
}

TEST_CASE("homodyne record of a coherent drive is shot-noise limited") {
  const double kappa = kDefault.gamma(kReadout);
  const double eta_drive = units::mhz(0.7);
  const double T = 1.0e-6;
  const PulseSchedule s = build_cdr_sequence(eta_drive, T);
  RecordOptions ro;
  ro.mode = kReadout;
  ro.eta = 0.75;
  ro.n_add = 0.2;
  const SnrTrace tr = homodyne_snr_trace(s, kDefault, 1e-10, ro);
  REQUIRE(tr.times.size() > 100);

  double integral = 0.0;
  for (std::size_t k = 1; k < tr.times.size(); ++k)
    integral += 0.5 * (tr.times[k] - tr.times[k - 1]) *
                (tr.contrast[k] * tr.contrast[k] + tr.contrast[k - 1] * tr.contrast[k - 1]);
  const double white = 2 * ro.eta * kappa * integral / (0.5 + ro.n_add);
  CHECK(tr.d2.back() == doctest::Approx(white).epsilon(1e-6));

  // closed-form contrast 2 Im(alpha)
  const double nbar = 0.5 * eta_drive * eta_drive / (0.25 * kappa * kappa + kChi * kChi);
  double cf = 0.0;
  const int M = 20000;
  const double t_end = tr.times.back() - s.segments[0].t_start;
  for (int k = 0; k <= M; ++k) {
    const double t = t_end * k / M;
    const double d = 2.0 * cdr_means(nbar, kappa, kChi, t, T).y;
    cf += (k == 0 || k == M ? 0.5 : 1.0) * d * d * t_end / M;
  }
  CHECK(tr.d2.back() == doctest::Approx(2 * ro.eta * kappa * cf / (0.5 + ro.n_add)).epsilon(0.02));
  CHECK(std::abs(std::sin(tr.axis_angle)) < 1e-9);
  for (std::size_t k = 1; k < tr.d2.size(); ++k) CHECK(tr.d2[k] >= tr.d2[k - 1] - 1e-12);
}

}  // TEST_SUITE
