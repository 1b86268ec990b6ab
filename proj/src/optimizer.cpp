#include "embamp/optimizer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>

#include "embamp/errors.hpp"
#include "embamp/metrics.hpp"
#include "embamp/protocols.hpp"
#include "embamp/units.hpp"

namespace embamp {

namespace {

std::string describe(const ParameterVector& theta) {
  std::ostringstream os;
  os << "at {";
  for (std::size_t i = 0; i < theta.params.size(); ++i)
    os << (i ? ", " : "") << theta.params[i].name << "=" << theta.params[i].value;
  os << "}";
  return os.str();
}

// rethrow the active exception with the parameter point attached, keeping its category
[[noreturn]] void rethrow_at(const ParameterVector& theta) {
  const std::string where = describe(theta);
  try {
    throw;
  } catch (const ConstraintViolation& e) {
    throw ConstraintViolation(std::string(e.what()) + " " + where);
  } catch (const InfeasibleError& e) {
    throw InfeasibleError(std::string(e.what()) + " " + where);
  } catch (const ValidationError& e) {
    throw ValidationError(e.field(), std::string(e.what()) + " " + where);
  } catch (const std::exception& e) {
    throw Error(std::string(e.what()) + " " + where);
  }
}

Interaction interaction_of(PulseKind k) {
  switch (k) {
    case PulseKind::SqueezeReadout: return Interaction::SqueezeReadout;
    case PulseKind::ConvertReadoutSnail: return Interaction::ConvertReadoutSnail;
    case PulseKind::AmplifySnail: return Interaction::AmplifySnail;
    case PulseKind::ConvertSnailOutput: return Interaction::ConvertSnailOutput;
    default: break;
  }
  throw StructuralError("pulse kind has no parametric interaction");
}

constexpr double kGolden = 0.6180339887498949;

double golden_max(const std::function<double(double)>& f, double a, double b) {
  double x1 = b - kGolden * (b - a), x2 = a + kGolden * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int k = 0; k < 100 && b - a > 1e-12 * (1.0 + std::abs(b)); ++k) {
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

}  // namespace

void ObjectiveConfig::validate() const {
  if (!(lambda1 >= 0.0) || !(lambda2 >= 0.0)) throw ValidationError("objective.lambda", "weights must be >= 0");
  if (lambda1 == 0.0 && lambda2 == 0.0) throw ValidationError("objective.lambda", "weights must not both be zero");
  if (!(n_crit > 0.0)) throw ValidationError("objective.n_crit", "must be > 0");
  for (const auto& [k, v] : g_crit_mhz)
    if (!(v > 0.0)) throw ValidationError(std::string("objective.g_crit.") + interaction_name(k), "must be > 0");
  if (!(gain_target >= 0.0)) throw ValidationError("objective.gain_target", "must be >= 0");
}

void ParameterVector::validate() const {
  for (const auto& p : params) {
    if (!std::isfinite(p.lo) || !std::isfinite(p.hi) || !(p.lo < p.hi))
      throw ValidationError("theta." + p.name, "bounds must be finite with lo < hi");
    if (!(p.value >= p.lo && p.value <= p.hi)) throw ValidationError("theta." + p.name, "value outside its bounds");
  }
  for (std::size_t i = 0; i < params.size(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (params[i].name == params[j].name) throw ValidationError("theta." + params[i].name, "duplicate parameter");
}

bool ParameterVector::has(const std::string& name) const {
  return std::any_of(params.begin(), params.end(), [&](const Parameter& p) { return p.name == name; });
}

double ParameterVector::get(const std::string& name) const {
  for (const auto& p : params)
    if (p.name == name) return p.value;
  throw ConfigError("unknown parameter '" + name + "'");
}

void ParameterVector::set(const std::string& name, double value) {
  for (auto& p : params)
    if (p.name == name) {
      p.value = value;
      return;
    }
  throw ConfigError("unknown parameter '" + name + "'");
}

std::vector<double> ParameterVector::normalized() const {
  std::vector<double> u(params.size());
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = (params[i].value - params[i].lo) / (params[i].hi - params[i].lo);
  return u;
}

ParameterVector ParameterVector::with_normalized(const std::vector<double>& u) const {
  ParameterVector out = *this;
  for (std::size_t i = 0; i < u.size(); ++i) {
    auto& p = out.params[i];
    p.value = std::clamp(p.lo + std::clamp(u[i], 0.0, 1.0) * (p.hi - p.lo), p.lo, p.hi);
  }
  return out;
}

double constraint_prefactor(const Evaluation& ev, const ObjectiveConfig& cfg) {
  double pre = 1.0 - ev.max_n_readout / cfg.n_crit;
  for (const auto& [k, g] : ev.max_rate_mhz) {
    const auto it = cfg.g_crit_mhz.find(k);
    if (it != cfg.g_crit_mhz.end()) pre -= g / it->second;
  }
  if (cfg.gain_target > 0.0) pre -= std::max(0.0, 1.0 - ev.gain / cfg.gain_target);
  return std::clamp(pre, 0.0, 1.0);
}

double objective(const ParameterVector& theta, const ObjectiveConfig& cfg, const Evaluator& evaluator) {
  cfg.validate();
  Evaluation ev;
  try {
    ev = evaluator(theta);
  } catch (...) {
    rethrow_at(theta);
  }
  return constraint_prefactor(ev, cfg) * (cfg.lambda1 * ev.d2 + cfg.lambda2 * ev.gain);
}

OptimizeResult maximize(const std::function<double(const ParameterVector&)>& f, const ParameterVector& theta0,
                        const OptimizeOptions& opt) {
  theta0.validate();
  const std::size_t d = theta0.size();
  if (d == 0) throw ConfigError("optimize: no parameters");
  if (opt.budget < static_cast<int>(d) + 1) throw ConfigError("optimize: budget must be at least dim + 1");
  if (!(opt.step > 0.0 && opt.step <= 0.5)) throw ConfigError("optimize: step must lie in (0, 0.5]");

  OptimizeResult res;
  res.theta = theta0;
  res.value = -std::numeric_limits<double>::infinity();
  int evals = 0;

  using Point = std::vector<double>;
  auto clip = [](Point u) {
    for (auto& x : u) x = std::clamp(x, 0.0, 1.0);
    return u;
  };
  // minimized internally
  auto h = [&](const Point& u) {
    const ParameterVector th = theta0.with_normalized(u);
    double v = f(th);
    if (std::isnan(v)) v = -std::numeric_limits<double>::infinity();
    ++evals;
    if (v > res.value) {
      res.value = v;
      res.theta = th;
    }
    HistoryRow row;
    row.eval = evals;
    row.value = v;
    row.best = res.value;
    for (const auto& p : th.params) row.x.push_back(p.value);
    res.history.push_back(std::move(row));
    return -v;
  };
  auto budget_left = [&] { return evals < opt.budget; };

  std::mt19937_64 rng(opt.seed);
  std::vector<Point> simplex;
  std::vector<double> fs;
  auto build = [&](const Point& base, double step, bool random_signs) {
    simplex.assign(1, base);
    fs.assign(1, h(base));
    std::bernoulli_distribution coin(0.5);
    for (std::size_t i = 0; i < d && budget_left(); ++i) {
      Point p = base;
      double s = (random_signs && coin(rng)) ? -step : step;
      if (p[i] + s > 1.0 || p[i] + s < 0.0) s = -s;
      p[i] = std::clamp(p[i] + s, 0.0, 1.0);
      simplex.push_back(p);
      fs.push_back(h(p));
    }
  };

  build(theta0.normalized(), opt.step, false);
  int restarts = opt.restarts;
  while (budget_left()) {
    if (simplex.size() < d + 1) break;
    std::vector<std::size_t> order(simplex.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fs[a] < fs[b]; });
    std::vector<Point> s2;
    std::vector<double> f2;
    for (auto i : order) {
      s2.push_back(simplex[i]);
      f2.push_back(fs[i]);
    }
    simplex.swap(s2);
    fs.swap(f2);

    double diam = 0.0;
    for (std::size_t i = 1; i <= d; ++i)
      for (std::size_t k = 0; k < d; ++k) diam = std::max(diam, std::abs(simplex[i][k] - simplex[0][k]));
    if (diam < opt.tol) {
      if (restarts-- <= 0) break;
      build(simplex[0], opt.step, true);
      continue;
    }

    Point c(d, 0.0);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t k = 0; k < d; ++k) c[k] += simplex[i][k] / d;
    auto along = [&](double t) {
      Point p(d);
      for (std::size_t k = 0; k < d; ++k) p[k] = c[k] + t * (simplex[d][k] - c[k]);
      return clip(p);
    };

    const Point xr = along(-1.0);
    const double fr = h(xr);
    if (fr < fs[0]) {
      if (!budget_left()) break;
      const Point xe = along(-2.0);
      const double fe = h(xe);
      if (fe < fr) {
        simplex[d] = xe;
        fs[d] = fe;
      } else {
        simplex[d] = xr;
        fs[d] = fr;
      }
    } else if (fr < fs[d - 1]) {
      simplex[d] = xr;
      fs[d] = fr;
    } else {
      if (!budget_left()) break;
      const bool outside = fr < fs[d];
      const Point xc = along(outside ? -0.5 : 0.5);
      const double fc = h(xc);
      if (fc < (outside ? fr : fs[d])) {
        simplex[d] = xc;
        fs[d] = fc;
      } else {
        for (std::size_t i = 1; i <= d && budget_left(); ++i) {
          for (std::size_t k = 0; k < d; ++k) simplex[i][k] = simplex[0][k] + 0.5 * (simplex[i][k] - simplex[0][k]);
          fs[i] = h(simplex[i]);
        }
      }
    }
  }
  return res;
}

OptimizeResult optimize(const ParameterVector& theta0, const ObjectiveConfig& cfg, const Evaluator& evaluator,
                        const OptimizeOptions& opt) {
  cfg.validate();
  return maximize([&](const ParameterVector& th) { return objective(th, cfg, evaluator); }, theta0, opt);
}

ParameterVector default_ea_parameters() {
  ParameterVector p;
  p.params = {{"squeeze_db", 3.0, 0.0, 8.0},
              {"eta_mhz", 1.0, 0.05, 3.0},
              {"gain", 5.0, 1.0, 20.0},
              {"drive_phase", 0.0, -0.5 * std::numbers::pi, 0.5 * std::numbers::pi},
              {"squeeze_rate_mhz", 6.0, 3.5, 12.0},
              {"convert_rate_mhz", 10.0, 2.0, 30.0},
              {"amp_rate_mhz", 4.0, 1.0, 12.0},
              {"release_rate_mhz", 10.0, 2.0, 30.0}};
  return p;
}

Evaluator ea_simulation_evaluator(const DeviceParams& device, const EffectiveRates& rates) {
  device.validate();
  rates.validate();
  return [device, rates](const ParameterVector& theta) {
    static const char* known[] = {"squeeze_db", "eta_mhz", "gain", "drive_phase", "squeeze_rate_mhz",
                                  "convert_rate_mhz", "amp_rate_mhz", "release_rate_mhz"};
    for (const auto& p : theta.params)
      if (std::find_if(std::begin(known), std::end(known), [&](const char* k) { return p.name == k; }) ==
          std::end(known))
        throw ConfigError("unknown parameter '" + p.name + "'");
    auto value = [&](const char* name, double fallback) { return theta.has(name) ? theta.get(name) : fallback; };

    EffectiveRates r = rates;
    r.squeeze_readout = value("squeeze_rate_mhz", rates.squeeze_readout);
    r.convert_readout_snail = value("convert_rate_mhz", rates.convert_readout_snail);
    r.amplify_snail = value("amp_rate_mhz", rates.amplify_snail);
    r.convert_snail_output = value("release_rate_mhz", rates.convert_snail_output);
    EaOptions eo;
    eo.gain = value("gain", 1.0);
    eo.drive_phase = value("drive_phase", 0.0);
    eo.enforce_constraints = false;
    const auto [sched, cal] =
        build_ea_sequence(device, r, value("squeeze_db", 0.0), units::mhz(value("eta_mhz", 1.0)), eo);

    const Trajectory tr = simulate_protocol(sched, device, default_dt(sched, device), 4);
    Evaluation ev;
    double max_s = 0.0;
    for (std::size_t k = 0; k < tr.size(); ++k) {
      DiscriminationInput in{tr.states_e[k].means, tr.states_g[k].means, tr.states_e[k].cov, tr.states_g[k].cov};
      ev.d2 = std::max(ev.d2, fisher_discriminant(in));
      ev.max_n_readout = std::max({ev.max_n_readout, tr.photons_e(k, kReadout), tr.photons_g(k, kReadout)});
      max_s = std::max({max_s, tr.photons_e(k, kSnail), tr.photons_g(k, kSnail)});
    }
    ev.gain = ev.max_n_readout > 0.0 ? std::sqrt(max_s / ev.max_n_readout) : 0.0;
    for (const auto& seg : sched.segments) {
      if (seg.kind == PulseKind::Idle || seg.kind == PulseKind::DisplaceReadout) continue;
      double& m = ev.max_rate_mhz[interaction_of(seg.kind)];
      m = std::max(m, std::abs(seg.amplitude_mhz));
    }
    return ev;
  };
}

SqueezeEvaluator ea_squeeze_evaluator(EaReadout model, double t_a, double t_r) {
  model.validate();
  return [model, t_a, t_r](double db, double n_disp, double G) {
    EaReadout m = model;
    m.squeeze_db = db;
    m.gain = G;
    return ea_d2_closed(m, n_disp, t_a, t_r);
  };
}

double budget_squeeze_db(double photon_budget) {
  if (!(photon_budget > 0.0)) return 0.0;
  return 20.0 * std::asinh(std::sqrt(photon_budget)) / std::numbers::ln10;
}

SqueezeOptimum optimal_squeezing(double photon_budget, double G, const SqueezeEvaluator& evaluator) {
  if (!(photon_budget > 0.0)) throw InfeasibleError("optimal_squeezing: photon budget cannot host any displacement");
  if (!(G >= 1.0)) throw ValidationError("gain", "must be >= 1");
  const double db_max = budget_squeeze_db(photon_budget);
  const std::function<double(double)> f = [&](double db) {
    return evaluator(db, photon_budget - squeeze_photons(db), G);
  };
  const int n = 200;
  double best = 0.0, fbest = f(0.0);
  for (int k = 1; k <= n; ++k) {
    const double x = db_max * k / n;
    const double v = f(x);
    if (v > fbest) {
      fbest = v;
      best = x;
    }
  }
  const double h = db_max / n;
  const double x = golden_max(f, std::max(0.0, best - h), std::min(db_max, best + h));
  const double fx = f(x);
  return fx > fbest ? SqueezeOptimum{x, fx} : SqueezeOptimum{best, fbest};
}

const char* protocol_name(Protocol p) { return p == Protocol::Ea ? "ea" : "cdr"; }

void SweepGrid::validate() const {
  auto increasing = [](const std::vector<double>& v, const char* name) {
    if (v.empty()) throw ValidationError(name, "axis must not be empty");
    for (std::size_t k = 0; k < v.size(); ++k) {
      if (!std::isfinite(v[k]) || v[k] < 0.0) throw ValidationError(name, "values must be finite and >= 0");
      if (k > 0 && !(v[k] > v[k - 1])) throw ValidationError(name, "axis must be strictly increasing");
    }
  };
  increasing(n_tot, "sweep.n_tot");
  increasing(times, "sweep.time");
}

SweepSettings sweep_settings_for(const DeviceParams& device) {
  device.validate();
  SweepSettings s;
  s.cdr = cdr_readout_for(device);
  s.ea = ea_readout_for(device);
  s.t1 = units::us(device.t1_us);
  return s;
}

SweepGrid sweep_fidelity(SweepGrid grid, Protocol protocol, const SweepSettings& settings) {
  grid.validate();
  if (protocol == Protocol::Ea) settings.ea.validate();
  else settings.cdr.validate();
  if (!(settings.t1 > 0.0)) throw ValidationError("budgets.t1", "must be > 0");
  const std::size_t nt = grid.times.size();
  const std::size_t total = grid.n_tot.size() * nt;
  grid.cells.assign(total, SweepCell{});

  auto run_cell = [&](std::size_t idx) {
    SweepCell& c = grid.cells[idx];
    c.n_tot = grid.n_tot[idx / nt];
    c.T = grid.times[idx % nt];
    try {
      c.d2 = protocol == Protocol::Ea ? ea_readout(settings.ea, c.n_tot, c.T).d2
                                      : cdr_readout(settings.cdr, c.n_tot, c.T).d2;
      c.fidelity = assignment_fidelity(c.d2, c.T, settings.t1);
      c.nines = nines(c.fidelity);
    } catch (const std::exception&) {
      const double nan = std::numeric_limits<double>::quiet_NaN();
      c.d2 = c.fidelity = c.nines = nan;
    }
  };

  const int jobs = std::max(1, settings.jobs);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < total; i = next++) run_cell(i);
  };
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return grid;
}

}  // namespace embamp
