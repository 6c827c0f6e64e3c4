#include "srsim/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>

#include "srsim/errors.hpp"

namespace srsim {

using nlohmann::json;

namespace {

// Key-tracking view of one JSON object; finish() rejects anything not read.
class Block {
 public:
  Block(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_ + ": expected an object");
  }

  const json* find(const std::string& key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  void number(const std::string& key, double& out) {
    if (const json* v = find(key)) {
      if (!v->is_number()) throw ConfigError(where(key) + ": expected a number");
      out = v->get<double>();
      if (!std::isfinite(out)) throw ConfigError(where(key) + ": not finite");
    }
  }

  template <class Int>
  void integer(const std::string& key, Int& out) {
    if (const json* v = find(key)) {
      if (!v->is_number_integer()) throw ConfigError(where(key) + ": expected an integer");
      const auto x = v->get<long long>();
      if (x < std::numeric_limits<Int>::min() || x > std::numeric_limits<Int>::max()) {
        throw ConfigError(where(key) + ": out of range");
      }
      out = static_cast<Int>(x);
    }
  }

  void boolean(const std::string& key, bool& out) {
    if (const json* v = find(key)) {
      if (!v->is_boolean()) throw ConfigError(where(key) + ": expected true or false");
      out = v->get<bool>();
    }
  }

  void string(const std::string& key, std::string& out) {
    if (const json* v = find(key)) {
      if (!v->is_string()) throw ConfigError(where(key) + ": expected a string");
      out = v->get<std::string>();
    }
  }

  std::string where(const std::string& key) const { return path_ + "." + key; }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) throw ConfigError("unknown key '" + where(it.key()) + "'");
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

struct Symbol {
  enum Kind { PiHalf, Pi, Free, Readout } kind;
  double us = 0.0;
};

Symbol parse_symbol(const std::string& s) {
  if (s == "pi_half") return {Symbol::PiHalf};
  if (s == "pi") return {Symbol::Pi};
  const auto colon = s.find(':');
  if (colon != std::string::npos) {
    const std::string head = s.substr(0, colon);
    const char* first = s.data() + colon + 1;
    const char* last = s.data() + s.size();
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec == std::errc() && ptr == last && first != last && v > 0.0 && std::isfinite(v)) {
      if (head == "free") return {Symbol::Free, v};
      if (head == "readout") return {Symbol::Readout, v};
    }
  }
  throw ConfigError("protocol: bad segment '" + s +
                    "' (expected pi_half, pi, free:<T_us> or readout:<W_us> with a positive time)");
}

void read_ensemble(const json& j, const std::string& path, EnsembleConfig& e) {
  Block b(j, path);
  b.number("n_atoms", e.n_atoms);
  b.number("delta_hz", e.delta_hz);
  b.number("g_hz", e.g_hz);
  b.number("gamma_hz", e.gamma_hz);
  b.number("chi_hz", e.chi_hz);
  b.number("omega_hz", e.omega_hz);
  b.finish();
}

void read_system(const json& j, SystemConfig& s) {
  Block b(j, "system");
  b.number("delta_c_hz", s.delta_c_hz);
  b.number("kappa_hz", s.kappa_hz);
  if (const json* e = b.find("ensembles")) {
    if (!e->is_array() || e->size() != 2) throw ConfigError("system.ensembles: expected an array of two objects");
    for (std::size_t k = 0; k < 2; ++k) read_ensemble((*e)[k], "system.ensembles[" + std::to_string(k) + "]", s.ensembles[k]);
  }
  b.finish();
}

void read_integrator(const json& j, IntegratorSection& s) {
  Block b(j, "integrator");
  b.number("rtol", s.rtol);
  b.number("atol", s.atol);
  b.number("max_step_us", s.max_step_us);
  b.number("initial_step_us", s.initial_step_us);
  b.integer("max_steps", s.max_steps);
  b.number("sample_dt_ns", s.sample_dt_ns);
  b.number("hermiticity_tol", s.hermiticity_tol);
  b.finish();
}

void read_protocol(const json& j, ProtocolSection& s) {
  Block b(j, "protocol");
  if (const json* segs = b.find("segments")) {
    if (!segs->is_array()) throw ConfigError("protocol.segments: expected an array");
    s.segments.clear();
    for (std::size_t k = 0; k < segs->size(); ++k) {
      const json& e = (*segs)[k];
      SegmentSpec spec;
      if (e.is_string()) {
        spec.symbol = e.get<std::string>();
        parse_symbol(spec.symbol);
      } else {
        Block sb(e, "protocol.segments[" + std::to_string(k) + "]");
        sb.number("duration_us", spec.duration_us);
        sb.number("omega1_hz", spec.omega1_hz);
        sb.number("omega2_hz", spec.omega2_hz);
        sb.number("delta_hz", spec.delta_hz);
        sb.string("label", spec.label);
        sb.finish();
        if (!(spec.duration_us > 0.0)) throw ConfigError(sb.where("duration_us") + ": must be > 0");
      }
      s.segments.push_back(std::move(spec));
    }
  }
  if (const json* w = b.find("readout_window_us")) {
    if (w->is_null()) {
      s.readout_window_us.reset();
    } else {
      if (!w->is_array() || w->size() != 2 || !(*w)[0].is_number() || !(*w)[1].is_number()) {
        throw ConfigError("protocol.readout_window_us: expected [begin, end]");
      }
      s.readout_window_us = std::array<double, 2>{(*w)[0].get<double>(), (*w)[1].get<double>()};
    }
  }
  b.finish();
  if (s.segments.empty()) throw ConfigError("protocol.segments: at least one segment required");
}

void read_ramsey(const json& j, RamseySection& s) {
  Block b(j, "ramsey");
  b.number("t_free_us", s.t_free_us);
  b.number("delta_hz", s.delta_hz);
  b.number("readout_us", s.readout_us);
  b.finish();
}

void read_sweep(const json& j, SweepSection& s) {
  Block b(j, "sweep");
  b.number("t_free_us", s.t_free_us);
  b.number("delta_min_hz", s.delta_min_hz);
  b.number("delta_max_hz", s.delta_max_hz);
  b.integer("points", s.points);
  b.number("threshold_frac", s.threshold_frac);
  b.finish();
}

void read_lock(const json& j, LockSection& s) {
  Block b(j, "lock");
  b.number("t_free_us", s.t_free_us);
  b.number("delta_probe_hz", s.delta_probe_hz);
  b.number("atom_offset_hz", s.atom_offset_hz);
  b.integer("cycles", s.cycles);
  b.number("cycle_period_ms", s.cycle_period_ms);
  b.number("n0", s.n0);
  b.number("gamma_loss_per_ms", s.gamma_loss_per_ms);
  b.boolean("normalized_error", s.normalized_error);
  b.finish();
}

void read_oracle(const json& j, OracleSection& s) {
  Block b(j, "oracle");
  b.integer("n1", s.n1);
  b.integer("n2", s.n2);
  b.integer("fock_cutoff", s.fock_cutoff);
  b.number("tolerance", s.tolerance);
  b.number("floor", s.floor);
  b.boolean("check_cutoff", s.check_cutoff);
  b.finish();
}

void read_output(const json& j, OutputSection& s) {
  Block b(j, "output");
  b.string("directory", s.directory);
  if (const json* f = b.find("formats")) {
    if (!f->is_array()) throw ConfigError("output.formats: expected an array");
    s.formats.clear();
    for (const auto& x : *f) {
      if (!x.is_string()) throw ConfigError("output.formats: expected strings");
      const auto v = x.get<std::string>();
      if (v != "csv" && v != "json") throw ConfigError("output.formats: unknown format '" + v + "'");
      s.formats.push_back(v);
    }
  }
  b.finish();
}

void check(bool ok, const std::string& msg) {
  if (!ok) throw ConfigError(msg);
}

void validate(const RunConfig& c) {
  try {
    to_system_params(c.system).validate();
    to_run_settings(c.integrator).integrator.validate();
    to_lock_config(c.lock).validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  check(c.integrator.max_steps > 0, "integrator.max_steps must be > 0");
  check(c.integrator.sample_dt_ns > 0.0, "integrator.sample_dt_ns must be > 0");
  check(c.integrator.initial_step_us >= 0.0, "integrator.initial_step_us must be >= 0");
  check(c.integrator.max_step_us >= 0.0, "integrator.max_step_us must be >= 0 (0: unlimited)");
  check(c.integrator.hermiticity_tol > 0.0, "integrator.hermiticity_tol must be > 0");
  if (c.protocol.readout_window_us) {
    const auto& w = *c.protocol.readout_window_us;
    check(w[0] >= 0.0 && w[1] > w[0], "protocol.readout_window_us must satisfy 0 <= begin < end");
  }
  check(c.ramsey.t_free_us >= 0.0, "ramsey.t_free_us must be >= 0");
  check(c.ramsey.readout_us > 0.0, "ramsey.readout_us must be > 0");
  check(c.sweep.t_free_us >= 0.0, "sweep.t_free_us must be >= 0");
  check(c.sweep.points >= 1, "sweep.points must be >= 1");
  check(c.sweep.delta_max_hz >= c.sweep.delta_min_hz, "sweep.delta_max_hz must be >= delta_min_hz");
  check(c.sweep.threshold_frac >= 0.0, "sweep.threshold_frac must be >= 0");
  check(c.oracle.n1 >= 1 && c.oracle.n2 >= 1, "oracle.n1 and oracle.n2 must be >= 1");
  check(c.oracle.fock_cutoff >= 1, "oracle.fock_cutoff must be >= 1");
  check(c.oracle.tolerance > 0.0 && c.oracle.floor >= 0.0, "oracle.tolerance must be > 0 and floor >= 0");
}

}  // namespace

RunConfig parse_config(const json& j) {
  RunConfig c;
  Block top(j, "config");
  if (const json* v = top.find("system")) read_system(*v, c.system);
  if (const json* v = top.find("integrator")) read_integrator(*v, c.integrator);
  if (const json* v = top.find("protocol")) read_protocol(*v, c.protocol);
  if (const json* v = top.find("ramsey")) read_ramsey(*v, c.ramsey);
  if (const json* v = top.find("sweep")) read_sweep(*v, c.sweep);
  if (const json* v = top.find("lock")) read_lock(*v, c.lock);
  if (const json* v = top.find("oracle")) read_oracle(*v, c.oracle);
  if (const json* v = top.find("output")) read_output(*v, c.output);
  top.finish();
  validate(c);
  return c;
}

RunConfig parse_config_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(j);
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

json to_json(const RunConfig& c) {
  json ens = json::array();
  for (const auto& e : c.system.ensembles) {
    ens.push_back({{"n_atoms", e.n_atoms}, {"delta_hz", e.delta_hz}, {"g_hz", e.g_hz},
                   {"gamma_hz", e.gamma_hz}, {"chi_hz", e.chi_hz}, {"omega_hz", e.omega_hz}});
  }
  json segs = json::array();
  for (const auto& s : c.protocol.segments) {
    if (!s.symbol.empty()) {
      segs.push_back(s.symbol);
    } else {
      segs.push_back({{"duration_us", s.duration_us}, {"omega1_hz", s.omega1_hz}, {"omega2_hz", s.omega2_hz},
                      {"delta_hz", s.delta_hz}, {"label", s.label}});
    }
  }
  json protocol = {{"segments", segs}};
  if (c.protocol.readout_window_us) protocol["readout_window_us"] = *c.protocol.readout_window_us;

  const auto& i = c.integrator;
  const auto& l = c.lock;
  return {
      {"system", {{"delta_c_hz", c.system.delta_c_hz}, {"kappa_hz", c.system.kappa_hz}, {"ensembles", ens}}},
      {"integrator",
       {{"rtol", i.rtol}, {"atol", i.atol}, {"max_step_us", i.max_step_us}, {"initial_step_us", i.initial_step_us},
        {"max_steps", i.max_steps}, {"sample_dt_ns", i.sample_dt_ns}, {"hermiticity_tol", i.hermiticity_tol}}},
      {"protocol", protocol},
      {"ramsey",
       {{"t_free_us", c.ramsey.t_free_us}, {"delta_hz", c.ramsey.delta_hz}, {"readout_us", c.ramsey.readout_us}}},
      {"sweep",
       {{"t_free_us", c.sweep.t_free_us}, {"delta_min_hz", c.sweep.delta_min_hz},
        {"delta_max_hz", c.sweep.delta_max_hz}, {"points", c.sweep.points},
        {"threshold_frac", c.sweep.threshold_frac}}},
      {"lock",
       {{"t_free_us", l.t_free_us}, {"delta_probe_hz", l.delta_probe_hz}, {"atom_offset_hz", l.atom_offset_hz},
        {"cycles", l.cycles}, {"cycle_period_ms", l.cycle_period_ms}, {"n0", l.n0},
        {"gamma_loss_per_ms", l.gamma_loss_per_ms}, {"normalized_error", l.normalized_error}}},
      {"oracle",
       {{"n1", c.oracle.n1}, {"n2", c.oracle.n2}, {"fock_cutoff", c.oracle.fock_cutoff},
        {"tolerance", c.oracle.tolerance}, {"floor", c.oracle.floor}, {"check_cutoff", c.oracle.check_cutoff}}},
      {"output", {{"directory", c.output.directory}, {"formats", c.output.formats}}},
  };
}

SystemParams to_system_params(const SystemConfig& s) {
  SystemParams p;
  p.delta_c = hz_to_rad(s.delta_c_hz);
  p.kappa = hz_to_rad(s.kappa_hz);
  for (int k = 0; k < 2; ++k) {
    const auto& e = s.ensembles[k];
    p.ens[k] = {e.n_atoms, hz_to_rad(e.delta_hz), hz_to_rad(e.g_hz), hz_to_rad(e.gamma_hz), hz_to_rad(e.chi_hz),
                hz_to_rad(e.omega_hz)};
  }
  return p;
}

RunSettings to_run_settings(const IntegratorSection& i) {
  RunSettings r;
  r.integrator.rtol = i.rtol;
  r.integrator.atol = i.atol;
  if (i.max_step_us > 0.0) r.integrator.max_step = i.max_step_us * 1e-6;
  r.integrator.initial_step = i.initial_step_us * 1e-6;
  r.integrator.max_steps = static_cast<std::size_t>(std::max(1LL, i.max_steps));
  r.sample_dt = i.sample_dt_ns * 1e-9;
  r.tolerances.hermiticity = i.hermiticity_tol;
  return r;
}

Protocol to_protocol(const ProtocolSection& ps, const SystemParams& params) {
  Protocol p;
  const DriveSetting on = baseline_drive(params);
  const DriveSetting off = drive_off(params);
  for (std::size_t k = 0; k < ps.segments.size(); ++k) {
    const auto& s = ps.segments[k];
    if (!s.symbol.empty()) {
      const Symbol sym = parse_symbol(s.symbol);
      switch (sym.kind) {
        case Symbol::PiHalf: p.segments.push_back({pi_half_duration(params), on, "pi/2"}); break;
        case Symbol::Pi: p.segments.push_back({2.0 * pi_half_duration(params), on, "pi"}); break;
        case Symbol::Free: p.segments.push_back({sym.us * 1e-6, off, "free"}); break;
        case Symbol::Readout: p.segments.push_back({sym.us * 1e-6, off, "readout"}); break;
      }
      continue;
    }
    DriveSetting d = on;
    d.omega = {hz_to_rad(s.omega1_hz), hz_to_rad(s.omega2_hz)};
    const double dd = hz_to_rad(s.delta_hz);
    for (auto& x : d.delta) x += dd;
    d.delta_c += dd;
    p.segments.push_back({s.duration_us * 1e-6, d, s.label.empty() ? "segment " + std::to_string(k) : s.label});
  }
  if (ps.readout_window_us) {
    p.readout_window = Window{(*ps.readout_window_us)[0] * 1e-6, (*ps.readout_window_us)[1] * 1e-6};
  }
  return p;
}

LockConfig to_lock_config(const LockSection& l) {
  LockConfig c;
  c.t_free = l.t_free_us * 1e-6;
  c.delta_probe = hz_to_rad(l.delta_probe_hz);
  c.atom_offset = hz_to_rad(l.atom_offset_hz);
  c.cycles = l.cycles;
  c.cycle_period = l.cycle_period_ms * 1e-3;
  c.n0 = l.n0;
  c.gamma_loss = l.gamma_loss_per_ms * 1e3;
  c.normalized_error = l.normalized_error;
  return c;
}

OracleConfig to_oracle_config(const RunConfig& c) {
  OracleConfig o;
  o.n1 = c.oracle.n1;
  o.n2 = c.oracle.n2;
  o.fock_cutoff = c.oracle.fock_cutoff;
  o.params = to_system_params(c.system);
  o.params.ens[0].n_atoms = c.oracle.n1;
  o.params.ens[1].n_atoms = c.oracle.n2;
  o.protocol = to_protocol(c.protocol, o.params);
  o.sample_dt = c.integrator.sample_dt_ns * 1e-9;
  o.check_cutoff = c.oracle.check_cutoff;
  return o;
}

}  // namespace srsim
