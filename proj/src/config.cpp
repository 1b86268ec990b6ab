#include "embamp/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "embamp/errors.hpp"
#include "embamp/units.hpp"

namespace embamp {

namespace {

using nlohmann::json;

// reads one JSON object, tracking which keys were consumed
class Block {
public:
  Block(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(where("") + ": expected an object");
  }

  std::string where(const std::string& key) const {
    if (key.empty()) return path_.empty() ? "<root>" : path_;
    return path_.empty() ? key : path_ + "." + key;
  }

  const json* find(const std::string& key) {
    seen_.insert(key);
    const auto it = j_.find(key);
    return it == j_.end() || it->is_null() ? nullptr : &*it;
  }

  void number(const std::string& key, double& out) {
    if (const json* v = find(key)) {
      if (!v->is_number()) throw ConfigError(where(key) + ": expected a number");
      out = v->get<double>();
    }
  }

  void integer(const std::string& key, int& out) {
    if (const json* v = find(key)) {
      if (!v->is_number_integer()) throw ConfigError(where(key) + ": expected an integer");
      out = v->get<int>();
    }
  }

  void text(const std::string& key, std::string& out) {
    if (const json* v = find(key)) {
      if (!v->is_string()) throw ConfigError(where(key) + ": expected a string");
      out = v->get<std::string>();
    }
  }

  template <class F>
  void child(const std::string& key, F&& f) {
    if (const json* v = find(key)) {
      Block b(*v, where(key));
      f(b);
      b.finish();
    }
  }

  void finish() const {
    for (const auto& [k, v] : j_.items())
      if (!seen_.count(k)) throw ConfigError("unknown key '" + where(k) + "'");
  }

private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void read_mode(Block& b, Mode& m) {
  b.number("omega_ghz", m.omega_ghz);
  b.number("gamma_mhz", m.gamma_mhz);
}

void read_device(Block& b, DeviceParams& d) {
  b.child("readout", [&](Block& m) { read_mode(m, d.modes[kReadout]); });
  b.child("snail", [&](Block& m) { read_mode(m, d.modes[kSnail]); });
  b.child("output", [&](Block& m) { read_mode(m, d.modes[kOutput]); });
  b.number("chi", d.chi_mhz);
  b.number("g3_mhz", d.g3_mhz);
  b.child("hybridizations", [&](Block& h) {
    for (auto& [k, v] : d.hybridizations) h.number(k, v);
  });
  b.number("n_crit", d.n_crit);
  b.child("g_crit_mhz", [&](Block& g) {
    for (auto& [k, v] : d.g_crit_mhz) g.number(k, v);
  });
  b.integer("multiplicity_degenerate", d.multiplicity_degenerate);
  b.integer("multiplicity_nondegenerate", d.multiplicity_nondegenerate);
}

std::pair<int, int> line_col(const std::string& text, std::size_t byte) {
  int line = 1, col = 1;
  for (std::size_t k = 0; k + 1 < byte && k < text.size(); ++k) {
    if (text[k] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

}  // namespace

void RunConfig::validate() const {
  device.validate();
  rates.validate();
  if (!(ea.squeeze_db >= 0.0)) throw ValidationError("ea.squeeze_db", "must be >= 0");
  if (!(ea.gain >= 1.0)) throw ValidationError("ea.gain", "must be >= 1");
  if (!std::isfinite(ea.drive_phase)) throw ValidationError("ea.drive_phase", "must be finite");
  if (!(simulation.dt_ns >= 0.0)) throw ValidationError("simulation.dt", "must be >= 0");
  if (simulation.grid_points < 2) throw ValidationError("simulation.grid_points", "must be >= 2");
  if (homodyne.eta >= 0.0 && !(homodyne.eta > 0.0 && homodyne.eta <= 1.0))
    throw ValidationError("homodyne.eta", "must lie in (0, 1]");
  if (!(homodyne.n_add >= 0.0)) throw ValidationError("homodyne.n_add", "must be >= 0");
  if (!(budgets.n_tot > 0.0)) throw ValidationError("budgets.n_tot", "must be > 0");
  if (!(budgets.total_time_us > 0.0)) throw ValidationError("budgets.total_time_us", "must be > 0");
  if (!(budgets.t1_us > 0.0)) throw ValidationError("budgets.t1_us", "must be > 0");
  if (!(budgets.t_dead_us >= 0.0)) throw ValidationError("budgets.t_dead_us", "must be >= 0");
  objective().validate();
  if (output.directory.empty()) throw ValidationError("output.directory", "must not be empty");
}

SweepSettings RunConfig::sweep_settings() const {
  SweepSettings s = sweep_settings_for(device);
  s.cdr.eta = homodyne.eta_for(Protocol::Cdr);
  s.cdr.n_add = homodyne.n_add;
  if (homodyne.gamma_meas_mhz >= 0.0) s.cdr.gamma_meas = units::mhz(homodyne.gamma_meas_mhz);
  s.ea.eta = homodyne.eta_for(Protocol::Ea);
  s.ea.n_add = homodyne.n_add;
  s.ea.gain = ea.gain;
  s.ea.squeeze_db = ea.squeeze_db;
  s.ea.t_dead = units::us(budgets.t_dead_us);
  s.t1 = units::us(budgets.t1_us);
  return s;
}

ObjectiveConfig RunConfig::objective() const {
  ObjectiveConfig o;
  o.lambda1 = lambda1;
  o.lambda2 = lambda2;
  o.n_crit = device.n_crit;
  o.gain_target = gain_target;
  for (auto& [k, v] : o.g_crit_mhz) {
    const auto it = device.g_crit_mhz.find(interaction_name(k));
    if (it != device.g_crit_mhz.end()) v = it->second;
  }
  return o;
}

RunConfig parse_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    const auto [line, col] = line_col(text, e.byte);
    std::ostringstream os;
    os << "parse error at line " << line << ", column " << col;
    throw ConfigError(os.str());
  }
  RunConfig c;
  Block b(root, "");
  int version = 0;
  if (!b.find("schema_version")) throw ConfigError("schema_version: missing");
  b.integer("schema_version", version);
  if (version != kSchemaVersion)
    throw ConfigError("schema_version: unsupported version " + std::to_string(version));

  b.child("device", [&](Block& d) { read_device(d, c.device); });
  b.child("rates", [&](Block& r) {
    r.number("squeeze_readout", c.rates.squeeze_readout);
    r.number("convert_readout_snail", c.rates.convert_readout_snail);
    r.number("amplify_snail", c.rates.amplify_snail);
    r.number("convert_snail_output", c.rates.convert_snail_output);
  });
  std::string protocol = "ea";
  b.text("protocol", protocol);
  if (protocol == "ea") c.protocol = Protocol::Ea;
  else if (protocol == "cdr") c.protocol = Protocol::Cdr;
  else throw ValidationError("protocol", "must be 'ea' or 'cdr'");
  b.child("ea", [&](Block& e) {
    e.number("squeeze_db", c.ea.squeeze_db);
    e.number("gain", c.ea.gain);
    e.number("drive_phase", c.ea.drive_phase);
    e.number("eta_mhz", c.ea.eta_mhz);
  });
  b.child("cdr", [&](Block& e) { e.number("eta_mhz", c.cdr.eta_mhz); });
  b.child("simulation", [&](Block& s) {
    s.number("dt", c.simulation.dt_ns);
    s.integer("grid_points", c.simulation.grid_points);
  });
  b.child("homodyne", [&](Block& h) {
    h.number("eta", c.homodyne.eta);
    h.number("n_add", c.homodyne.n_add);
    h.number("gamma_meas_mhz", c.homodyne.gamma_meas_mhz);
  });
  b.child("budgets", [&](Block& s) {
    s.number("n_tot", c.budgets.n_tot);
    s.number("total_time_us", c.budgets.total_time_us);
    s.number("t1_us", c.budgets.t1_us);
    s.number("t_dead_us", c.budgets.t_dead_us);
  });
  b.child("objective", [&](Block& o) {
    o.number("lambda1", c.lambda1);
    o.number("lambda2", c.lambda2);
    o.number("gain_target", c.gain_target);
  });
  b.child("output", [&](Block& o) {
    o.text("directory", c.output.directory);
    std::string fmt = "csv";
    o.text("format", fmt);
    if (fmt == "csv") c.output.format = OutputFormat::Csv;
    else if (fmt == "json") c.output.format = OutputFormat::Json;
    else throw ValidationError("output.format", "must be 'csv' or 'json'");
  });
  if (const json* s = b.find("seed")) {
    if (!s->is_number_unsigned()) throw ConfigError("seed: expected a non-negative integer");
    c.seed = s->get<std::uint64_t>();
  }
  b.finish();
  c.device.t1_us = c.budgets.t1_us;
  c.validate();
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace embamp
