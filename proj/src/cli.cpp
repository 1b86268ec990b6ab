#include "embamp/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "embamp/freqplan.hpp"
#include "embamp/metrics.hpp"
#include "embamp/optimizer.hpp"
#include "embamp/protocols.hpp"
#include "embamp/snr_models.hpp"
#include "embamp/units.hpp"

namespace embamp::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12e", v);
  return buf;
}

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<json>> rows;
};

void write_text(const fs::path& p, const std::string& s) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw Error("cannot write '" + p.string() + "'");
  f << s;
}

// writes stem.csv or stem.json
void write_table(const fs::path& dir, const std::string& stem, const Table& t, OutputFormat fmt) {
  if (fmt == OutputFormat::Json) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["columns"] = t.columns;
    j["rows"] = json::array();
    for (const auto& r : t.rows) j["rows"].push_back(r);
    write_text(dir / (stem + ".json"), j.dump(1) + "\n");
    return;
  }
  std::ostringstream os;
  os << "# schema_version " << kSchemaVersion << "\n";
  for (std::size_t k = 0; k < t.columns.size(); ++k) os << (k ? "," : "") << t.columns[k];
  os << "\n";
  for (const auto& r : t.rows) {
    for (std::size_t k = 0; k < r.size(); ++k) {
      if (k) os << ",";
      if (r[k].is_string()) os << r[k].get<std::string>();
      else if (r[k].is_number_integer()) os << r[k].get<long long>();
      else if (r[k].is_null()) os << "nan";
      else os << num(r[k].get<double>());
    }
    os << "\n";
  }
  write_text(dir / (stem + ".csv"), os.str());
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

void write_json(const fs::path& p, json j) {
  j["schema_version"] = kSchemaVersion;
  write_text(p, j.dump(2) + "\n");
}

// drive amplitude (rad/s) whose coherent response peaks at n photons within t
double drive_for(double n, double rate, double chi, double t) {
  const double nbar = n / accumulate_peak(rate, chi, t);
  return std::sqrt(2.0 * nbar * (0.25 * rate * rate + chi * chi));
}

const char* mode_names[] = {"readout", "snail", "output"};

}  // namespace

AxisSpec parse_axis(const std::string& spec) {
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
  if (parts.size() < 3 || parts.size() > 4) throw UsageError("axis '" + spec + "': expected lo:hi:steps[:log|:lin]");
  AxisSpec a;
  try {
    std::size_t used = 0;
    a.lo = std::stod(parts[0], &used);
    if (used != parts[0].size()) throw std::invalid_argument("lo");
    a.hi = std::stod(parts[1], &used);
    if (used != parts[1].size()) throw std::invalid_argument("hi");
    a.steps = std::stoi(parts[2], &used);
    if (used != parts[2].size()) throw std::invalid_argument("steps");
  } catch (const std::exception&) {
    throw UsageError("axis '" + spec + "': malformed number");
  }
  if (parts.size() == 4) {
    if (parts[3] == "log") a.log = true;
    else if (parts[3] == "lin") a.log = false;
    else throw UsageError("axis '" + spec + "': scale must be log or lin");
  }
  if (!std::isfinite(a.lo) || !std::isfinite(a.hi) || a.lo < 0.0) throw UsageError("axis '" + spec + "': bad range");
  if (a.steps < 1) throw UsageError("axis '" + spec + "': steps must be >= 1");
  if (a.steps > 1 && !(a.hi > a.lo)) throw UsageError("axis '" + spec + "': need hi > lo");
  if (a.log && !(a.lo > 0.0)) throw UsageError("axis '" + spec + "': log axis needs lo > 0");
  return a;
}

std::vector<double> axis_values(const AxisSpec& a) {
  std::vector<double> v(a.steps);
  for (int k = 0; k < a.steps; ++k) {
    const double u = a.steps == 1 ? 0.0 : static_cast<double>(k) / (a.steps - 1);
    v[k] = a.log ? a.lo * std::pow(a.hi / a.lo, u) : a.lo + u * (a.hi - a.lo);
  }
  return v;
}

int cmd_run(const RunConfig& cfg, const fs::path& out) {
  cfg.validate();
  const DeviceParams& dev = cfg.device;
  if (cfg.budgets.n_tot > dev.n_crit)
    throw ConstraintViolation("budgets.n_tot = " + num(cfg.budgets.n_tot) + " exceeds n_crit = " + num(dev.n_crit));

  PulseSchedule sched;
  RecordOptions ro;
  ro.eta = cfg.homodyne.eta_for(cfg.protocol);
  ro.n_add = cfg.homodyne.n_add;
  double eta_drive = 0.0;
  json summary;
  summary["protocol"] = protocol_name(cfg.protocol);
  if (cfg.protocol == Protocol::Cdr) {
    const double T = units::us(cfg.budgets.total_time_us);
    eta_drive = cfg.cdr.eta_mhz >= 0.0 ? units::mhz(cfg.cdr.eta_mhz)
                                       : drive_for(cfg.budgets.n_tot, dev.gamma(kReadout), dev.chi(), T);
    sched = build_cdr_sequence(eta_drive, T);
    ro.mode = kReadout;
  } else {
    const double n_disp = cfg.budgets.n_tot - squeeze_photons(cfg.ea.squeeze_db);
    if (!(n_disp > 0.0))
      throw ConstraintViolation("budgets.n_tot: squeezing at " + num(cfg.ea.squeeze_db) +
                                " dB leaves no photons for the displacement");
    eta_drive = cfg.ea.eta_mhz >= 0.0
                    ? units::mhz(cfg.ea.eta_mhz)
                    : drive_for(n_disp, dev.gamma(kReadout), dev.chi(), std::numbers::pi / dev.chi());
    EaOptions eo;
    eo.gain = cfg.ea.gain;
    eo.drive_phase = cfg.ea.drive_phase;
    const auto [s, cal] = build_ea_sequence(dev, cfg.rates, cfg.ea.squeeze_db, eta_drive, eo);
    sched = s;
    ro.mode = kOutput;
    ro.t_extra = 10.0 / dev.gamma(kOutput);
    summary["calibration"] = {{"squeeze_angle_chi", cal.squeeze_angle_chi},
                              {"delay_s", cal.delay},
                              {"displace_duration_s", cal.displace_duration},
                              {"conversion_pi_time_s", cal.conversion_pi_time},
                              {"conversion_phase", cal.conversion_phase},
                              {"amp_phase", cal.amp_phase},
                              {"transfer_prob", cal.transfer_prob},
                              {"squeeze_duration_s", cal.squeeze_duration},
                              {"squeeze_photons", cal.squeeze_photons}};
  }

  const double dt = cfg.simulation.dt_ns > 0.0 ? units::ns(cfg.simulation.dt_ns) : default_dt(sched, dev);
  double edge = 0.0;
  for (const auto& seg : sched.segments) edge = std::max({edge, 1.0 / seg.rise_rate, 1.0 / seg.fall_rate});
  const double est_steps = (sched.total_duration + 12.0 * edge + ro.t_extra) / dt;
  const int record_every = std::max(1, static_cast<int>(std::ceil(est_steps / cfg.simulation.grid_points)));

  const Trajectory tr = simulate_protocol(sched, dev, dt, record_every, ro.t_extra);
  const SnrTrace st = homodyne_snr_trace(sched, dev, dt, ro);
  const double t1 = units::us(cfg.budgets.t1_us);

  Table traj;
  traj.columns = {"t_s", "branch", "n_readout", "n_snail", "n_output"};
  for (const char* m : mode_names) {
    traj.columns.push_back(std::string("mu_q_") + m);
    traj.columns.push_back(std::string("mu_p_") + m);
  }
  for (const char* m : mode_names) {
    traj.columns.push_back(std::string("V_qq_") + m);
    traj.columns.push_back(std::string("V_pp_") + m);
    traj.columns.push_back(std::string("V_qp_") + m);
  }
  Table report;
  report.columns = {"t_s", "d2_t", "snr_integrated_t", "fidelity"};
  double max_n = 0.0, d2_peak = 0.0;
  for (std::size_t k = 0; k < tr.size(); ++k) {
    for (int b = 0; b < 2; ++b) {
      const GaussianState& s = b == 0 ? tr.states_e[k] : tr.states_g[k];
      const Mat& ph = b == 0 ? tr.photons_e : tr.photons_g;
      std::vector<json> row{tr.times[k], b == 0 ? "e" : "g"};
      for (int m = 0; m < kModes; ++m) row.push_back(ph(k, m));
      for (int i = 0; i < 2 * kModes; ++i) row.push_back(s.means(i));
      for (int m = 0; m < kModes; ++m) {
        row.push_back(s.cov(2 * m, 2 * m));
        row.push_back(s.cov(2 * m + 1, 2 * m + 1));
        row.push_back(s.cov(2 * m, 2 * m + 1));
      }
      traj.rows.push_back(std::move(row));
      max_n = std::max(max_n, ph(k, kReadout));
    }
    const DiscriminationInput in{tr.states_e[k].means, tr.states_g[k].means, tr.states_e[k].cov, tr.states_g[k].cov};
    const double d2 = fisher_discriminant(in);
    d2_peak = std::max(d2_peak, d2);
    const auto it = std::lower_bound(st.times.begin(), st.times.end(), tr.times[k] - 0.5 * dt);
    const double snr = it == st.times.end() ? st.d2.back() : st.d2[it - st.times.begin()];
    report.rows.push_back({tr.times[k], d2, snr, assignment_fidelity(snr, tr.times[k] - tr.times.front(), t1)});
  }

  fs::create_directories(out);
  write_table(out, "trajectory", traj, cfg.output.format);
  write_table(out, "report", report, cfg.output.format);

  const double wall = tr.times.back() - tr.times.front();
  const double d2_final = st.d2.back();
  const double fid = assignment_fidelity(d2_final, wall, t1);
  summary["d2_final"] = d2_final;
  summary["d2_state_peak"] = d2_peak;
  summary["fidelity"] = fid;
  summary["nines"] = finite_or_null(nines(fid));
  summary["total_duration_s"] = sched.total_duration;
  summary["record_duration_s"] = wall;
  summary["dead_time"] = sched.dead_time;
  summary["max_n_readout"] = max_n;
  summary["drive_eta_mhz"] = units::to_mhz(eta_drive);
  summary["dt_s"] = dt;
  summary["seed"] = cfg.seed;
  json margins;
  margins["n_readout"] = dev.n_crit - max_n;
  for (const auto& seg : sched.segments) {
    if (seg.kind == PulseKind::Idle || seg.kind == PulseKind::DisplaceReadout) continue;
    const Interaction i = seg.kind == PulseKind::SqueezeReadout        ? Interaction::SqueezeReadout
                          : seg.kind == PulseKind::ConvertReadoutSnail ? Interaction::ConvertReadoutSnail
                          : seg.kind == PulseKind::AmplifySnail        ? Interaction::AmplifySnail
                                                                       : Interaction::ConvertSnailOutput;
    margins[interaction_name(i)] = dev.g_crit_mhz.at(interaction_name(i)) - seg.amplitude_mhz;
  }
  summary["constraint_margins"] = margins;
  write_json(out / "summary.json", summary);
  return kOk;
}

int cmd_sweep(const RunConfig& cfg, const SweepFlags& flags, const fs::path& out) {
  cfg.validate();
  SweepSettings st = cfg.sweep_settings();
  st.jobs = flags.jobs;
  SweepGrid grid;
  grid.n_tot = axis_values(flags.ntot);
  for (double t : axis_values(flags.time_us)) grid.times.push_back(units::us(t));
  const SweepGrid ea = sweep_fidelity(grid, Protocol::Ea, st);
  const SweepGrid cdr = sweep_fidelity(grid, Protocol::Cdr, st);

  Table contours;
  contours.columns = {"protocol", "n_tot", "T_us", "d2", "fidelity", "nines"};
  for (const SweepGrid* g : {&ea, &cdr})
    for (const auto& c : g->cells)
      contours.rows.push_back({protocol_name(g == &ea ? Protocol::Ea : Protocol::Cdr), c.n_tot, units::to_us(c.T),
                               finite_or_null(c.d2), finite_or_null(c.fidelity), finite_or_null(c.nines)});
  Table breakeven;
  breakeven.columns = {"n_tot", "T_us", "nines_cdr", "nines_ea"};
  for (std::size_t k = 0; k < ea.cells.size(); ++k) {
    const auto &e = ea.cells[k], &c = cdr.cells[k];
    if (c.nines >= e.nines) breakeven.rows.push_back({c.n_tot, units::to_us(c.T), c.nines, e.nines});
  }
  fs::create_directories(out);
  write_table(out, "contours", contours, cfg.output.format);
  write_table(out, "breakeven", breakeven, cfg.output.format);
  return kOk;
}

int cmd_optimize(const RunConfig& cfg, const OptimizeFlags& flags, const fs::path& out) {
  cfg.validate();
  ObjectiveConfig oc = cfg.objective();
  if (flags.lambda1 >= 0.0) oc.lambda1 = flags.lambda1;
  if (flags.lambda2 >= 0.0) oc.lambda2 = flags.lambda2;
  oc.validate();

  const DeviceParams& dev = cfg.device;
  ParameterVector theta0 = default_ea_parameters();
  auto seed_value = [&](const std::string& name, double v) {
    for (auto& p : theta0.params)
      if (p.name == name) p.value = std::clamp(v, p.lo, p.hi);
  };
  seed_value("squeeze_db", cfg.ea.squeeze_db);
  seed_value("gain", cfg.ea.gain);
  seed_value("drive_phase", cfg.ea.drive_phase);
  const double n_disp = std::max(1e-3, cfg.budgets.n_tot - squeeze_photons(cfg.ea.squeeze_db));
  seed_value("eta_mhz", cfg.ea.eta_mhz >= 0.0 ? cfg.ea.eta_mhz
                                              : units::to_mhz(drive_for(n_disp, dev.gamma(kReadout), dev.chi(),
                                                                        std::numbers::pi / dev.chi())));
  seed_value("squeeze_rate_mhz", cfg.rates.squeeze_readout);
  seed_value("convert_rate_mhz", cfg.rates.convert_readout_snail);
  seed_value("amp_rate_mhz", cfg.rates.amplify_snail);
  seed_value("release_rate_mhz", cfg.rates.convert_snail_output);

  const Evaluator ev = ea_simulation_evaluator(dev, cfg.rates);
  OptimizeOptions opt;
  opt.budget = flags.budget;
  opt.seed = cfg.seed;
  const OptimizeResult res = optimize(theta0, oc, ev, opt);
  const Evaluation best = ev(res.theta);

  Table hist;
  hist.columns = {"eval", "objective", "best"};
  for (const auto& p : theta0.params) hist.columns.push_back(p.name);
  for (const auto& r : res.history) {
    std::vector<json> row{r.eval, finite_or_null(r.value), finite_or_null(r.best)};
    for (double x : r.x) row.push_back(x);
    hist.rows.push_back(std::move(row));
  }
  fs::create_directories(out);
  write_table(out, "history", hist, cfg.output.format);

  json j;
  json params;
  for (const auto& p : res.theta.params) params[p.name] = {{"value", p.value}, {"lo", p.lo}, {"hi", p.hi}};
  j["params"] = params;
  j["objective"] = res.value;
  j["baseline_objective"] = res.history.front().value;
  j["d2"] = best.d2;
  j["gain"] = best.gain;
  j["prefactor"] = constraint_prefactor(best, oc);
  j["max_n_readout"] = best.max_n_readout;
  j["evaluations"] = res.history.size();
  j["lambda1"] = oc.lambda1;
  j["lambda2"] = oc.lambda2;
  j["seed"] = cfg.seed;
  write_json(out / "theta_star.json", j);
  return kOk;
}

int cmd_freqplan(const FreqplanFlags& flags, const fs::path& out) {
  if (flags.n < 1) throw UsageError("--n must be >= 1");
  if (!(flags.guard_mhz > 0.0)) throw UsageError("--guard must be > 0");
  if (!(flags.band_hi > flags.band_lo && flags.band_lo > 0.0)) throw UsageError("--band must be lo:hi with 0 < lo < hi");

  FrequencyPlan plan;
  plan.band_lo = flags.band_lo;
  plan.band_hi = flags.band_hi;
  plan.guard_mhz = flags.guard_mhz;
  std::string status = "valid";
  std::string message;
  const int n = flags.check.empty() ? flags.n : static_cast<int>(flags.check.size());
  const double bound = bandwidth_bound(n, flags.guard_mhz);
  const bool bound_ok = bound <= flags.band_hi - flags.band_lo + 1e-12;

  if (!flags.check.empty()) {
    plan.freqs = flags.check;
    std::sort(plan.freqs.begin(), plan.freqs.end());
    try {
      plan.validate();
    } catch (const ValidationError& e) {
      throw UsageError(std::string("--check: ") + e.what());
    }
  } else {
    // the bound is reported as infeasible, but the search still runs
    if (!bound_ok) {
      status = "infeasible";
      message = "bandwidth bound " + num(bound) + " GHz exceeds the band width " +
                num(flags.band_hi - flags.band_lo) + " GHz";
      std::cerr << "freqplan: warning: " << message << "\n";
    }
    try {
      plan = search_plan(flags.n, flags.band_lo, flags.band_hi, flags.guard_mhz, flags.seed);
    } catch (const PlanInfeasible& e) {
      plan = e.partial();
      status = "infeasible";
      message += (message.empty() ? "" : "; ") + std::string(e.what());
    }
  }
  const CollisionReport rep = validate_plan(plan);
  if (!rep.empty()) {
    status = "collisions";
    message = std::to_string(rep.collisions.size()) + " collisions";
  }

  json j;
  j["status"] = status;
  j["n"] = n;
  j["seed"] = flags.seed;
  j["band_ghz"] = {flags.band_lo, flags.band_hi};
  j["guard_mhz"] = flags.guard_mhz;
  j["bandwidth_bound_ghz"] = bound;
  j["bound_satisfied"] = bound_ok;
  j["freqs_ghz"] = plan.freqs;
  j["mixing_products"] = json::array();
  double mode_gap = std::numeric_limits<double>::infinity(), prod_gap = mode_gap, tone_gap = mode_gap;
  if (plan.freqs.size() >= 2) {
    const auto prods = mixing_products(plan.freqs);
    for (const auto& p : prods) {
      j["mixing_products"].push_back({{"label", p.label()}, {"ghz", p.ghz}});
      for (double f : plan.freqs) mode_gap = std::min(mode_gap, 1e3 * std::abs(p.ghz - f));
    }
    for (std::size_t a = 0; a < prods.size(); ++a)
      for (std::size_t b = a + 1; b < prods.size(); ++b)
        prod_gap = std::min(prod_gap, 1e3 * std::abs(prods[a].ghz - prods[b].ghz));
    for (std::size_t k = 1; k < plan.freqs.size(); ++k)
      tone_gap = std::min(tone_gap, 1e3 * (plan.freqs[k] - plan.freqs[k - 1]));
  }
  j["margins"] = {{"min_product_mode_gap_mhz", finite_or_null(mode_gap)},
                  {"min_product_gap_mhz", finite_or_null(prod_gap)},
                  {"min_tone_gap_mhz", finite_or_null(tone_gap)}};
  j["collisions"] = json::array();
  for (const auto& c : rep.collisions)
    j["collisions"].push_back(
        {{"kind", collision_kind_name(c.kind)}, {"tones", c.tones}, {"freqs_ghz", c.freqs}, {"gap_mhz", c.gap_mhz}});
  if (!message.empty()) j["message"] = message;
  fs::create_directories(out);
  write_json(out / "plan.json", j);
  if (status != "valid") {
    std::cerr << "freqplan: " << status << ": " << message << "\n";
    return kInfeasible;
  }
  return kOk;
}

namespace {

std::vector<double> parse_list(const std::string& s, char sep) {
  std::vector<double> v;
  std::stringstream ss(s);
  for (std::string p; std::getline(ss, p, sep);) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(p, &used));
      if (used != p.size()) throw std::invalid_argument(p);
    } catch (const std::exception&) {
      throw UsageError("malformed number '" + p + "' in list '" + s + "'");
    }
  }
  return v;
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"Gaussian simulator for embedded-amplification qubit readout"};
  app.require_subcommand(1);

  struct Common {
    std::string config;
    std::string out;
    int jobs = 1;
    long long seed = -1;
  };
  Common run_o, sweep_o, opt_o;
  auto add_common = [](CLI::App* sub, Common& c) {
    sub->add_option("config_path", c.config, "Config file (JSON)");
    sub->add_option("--config", c.config, "Config file (JSON)");
    sub->add_option("--out", c.out, "Output directory");
    sub->add_option("--seed", c.seed, "Seed override")->check(CLI::NonNegativeNumber);
  };
  CLI::App* run_cmd = app.add_subcommand("run", "Simulate one readout protocol");
  add_common(run_cmd, run_o);
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "Fidelity contours over photon budget and time");
  add_common(sweep_cmd, sweep_o);
  sweep_cmd->add_option("--jobs", sweep_o.jobs, "Parallel jobs")->check(CLI::PositiveNumber);
  std::string ntot_spec = "0.5:50:20:log", time_spec = "0.02:5:20:log";
  sweep_cmd->add_option("--ntot", ntot_spec, "Photon budget axis lo:hi:steps[:log|:lin]");
  sweep_cmd->add_option("--time", time_spec, "Total time axis in us, lo:hi:steps[:log|:lin]");
  CLI::App* opt_cmd = app.add_subcommand("optimize", "Optimize the EA pulse parameters");
  add_common(opt_cmd, opt_o);
  OptimizeFlags of;
  opt_cmd->add_option("--budget", of.budget, "Maximum objective evaluations");
  opt_cmd->add_option("--lambda1", of.lambda1, "Weight of the discriminant");
  opt_cmd->add_option("--lambda2", of.lambda2, "Weight of the gain");
  CLI::App* fp_cmd = app.add_subcommand("freqplan", "Search or check a multiplexing frequency plan");
  FreqplanFlags ff;
  std::string band_spec = "4:8", check_spec, fp_out = "out";
  long long fp_seed = 0;
  fp_cmd->add_option("--n", ff.n, "Number of tones");
  fp_cmd->add_option("--band", band_spec, "Band lo:hi in GHz");
  fp_cmd->add_option("--guard", ff.guard_mhz, "Guard in MHz");
  fp_cmd->add_option("--seed", fp_seed, "Search seed")->check(CLI::NonNegativeNumber);
  fp_cmd->add_option("--check", check_spec, "Validate a comma-separated list of GHz tones");
  fp_cmd->add_option("--out", fp_out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  auto load = [](const Common& c) {
    RunConfig cfg = c.config.empty() ? parse_config("{\"schema_version\": 1}") : load_config(c.config);
    if (c.seed >= 0) cfg.seed = static_cast<std::uint64_t>(c.seed);
    return cfg;
  };
  auto out_dir = [](const Common& c, const RunConfig& cfg) { return fs::path(c.out.empty() ? cfg.output.directory : c.out); };

  try {
    if (*run_cmd) {
      const RunConfig cfg = load(run_o);
      return cmd_run(cfg, out_dir(run_o, cfg));
    }
    if (*sweep_cmd) {
      SweepFlags sf;
      sf.ntot = parse_axis(ntot_spec);
      sf.time_us = parse_axis(time_spec);
      sf.jobs = sweep_o.jobs;
      const RunConfig cfg = load(sweep_o);
      return cmd_sweep(cfg, sf, out_dir(sweep_o, cfg));
    }
    if (*opt_cmd) {
      const RunConfig cfg = load(opt_o);
      return cmd_optimize(cfg, of, out_dir(opt_o, cfg));
    }
    if (*fp_cmd) {
      const auto band = parse_list(band_spec, ':');
      if (band.size() != 2) throw UsageError("--band: expected lo:hi");
      ff.band_lo = band[0];
      ff.band_hi = band[1];
      ff.seed = static_cast<std::uint64_t>(fp_seed);
      if (!check_spec.empty()) ff.check = parse_list(check_spec, ',');
      return cmd_freqplan(ff, fs::path(fp_out));
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const ConstraintViolation& e) {
    std::cerr << "constraint violation: " << e.what() << "\n";
    return kConstraint;
  } catch (const InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return kInfeasible;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kError;
  }
  return kError;
}

}  // namespace embamp::cli
