#include "tunnel/config.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include <numbers>

namespace tunnel {

namespace {

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& s : items) out += (out.empty() ? "" : "; ") + s;
  return out;
}

using Json = nlohmann::json;

struct Entry {
  std::function<void(const Json&, RunConfig&)> read;
  std::function<Json(const RunConfig&)> write;
};

double as_number(const Json& v, const std::string& key) {
  if (!v.is_number()) throw std::invalid_argument(key + ": expected a number");
  return v.get<double>();
}

std::size_t as_count(const Json& v, const std::string& key) {
  if (!v.is_number_integer() && !v.is_number_unsigned()) throw std::invalid_argument(key + ": expected an integer");
  const auto i = v.get<long long>();
  if (i < 0) throw std::invalid_argument(key + ": must be non-negative");
  return static_cast<std::size_t>(i);
}

std::vector<double> as_list(const Json& v, const std::string& key) {
  if (!v.is_array() || v.empty()) throw std::invalid_argument(key + ": expected a non-empty array of numbers");
  std::vector<double> out;
  for (const auto& x : v) out.push_back(as_number(x, key));
  return out;
}

std::string as_text(const Json& v, const std::string& key) {
  if (!v.is_string()) throw std::invalid_argument(key + ": expected a string");
  return v.get<std::string>();
}

#define NUMBER(name) {#name, {[](const Json& v, RunConfig& c) { c.name = as_number(v, #name); }, [](const RunConfig& c) { return Json(c.name); }}}
#define COUNT(name) {#name, {[](const Json& v, RunConfig& c) { c.name = as_count(v, #name); }, [](const RunConfig& c) { return Json(c.name); }}}
#define LIST(name) {#name, {[](const Json& v, RunConfig& c) { c.name = as_list(v, #name); }, [](const RunConfig& c) { return Json(c.name); }}}
#define TEXT(name) {#name, {[](const Json& v, RunConfig& c) { c.name = as_text(v, #name); }, [](const RunConfig& c) { return Json(c.name); }}}

const std::map<std::string, Entry>& schema() {
  static const std::map<std::string, Entry> fields{
      NUMBER(depth_s),        NUMBER(theta0_deg),         NUMBER(beta),
      NUMBER(trap_hz),        NUMBER(lattice_spacing_nm), NUMBER(atom_mass_kg),
      NUMBER(tof_ms),         COUNT(n_points),            NUMBER(box_length),
      NUMBER(dt),             NUMBER(tol),                NUMBER(ramp_ms),
      NUMBER(period_window),  TEXT(preset),               LIST(depth_values_s),
      LIST(theta_values_deg), LIST(delay_theta_values_deg), LIST(beta_values),
      LIST(omega_ext_values), NUMBER(depth_sigma_s),      TEXT(snapshots),
      NUMBER(snapshot_interval_us), COUNT(threads),       TEXT(output_dir),
  };
  return fields;
}

#undef NUMBER
#undef COUNT
#undef LIST
#undef TEXT

void validate(const RunConfig& c, std::vector<std::string>& problems) {
  auto require = [&](bool ok, const std::string& msg) {
    if (!ok) problems.push_back(msg);
  };
  require(c.depth_s >= 0.0, "depth_s: must be non-negative");
  require(c.theta0_deg >= 0.0 && c.theta0_deg <= 180.0, "theta0_deg: must lie in [0, 180]");
  require(c.beta >= 0.0, "beta: must be non-negative");
  require(c.trap_hz >= 0.0, "trap_hz: must be non-negative");
  require(c.lattice_spacing_nm > 0.0, "lattice_spacing_nm: must be positive");
  require(c.atom_mass_kg > 0.0, "atom_mass_kg: must be positive");
  require(c.tof_ms >= 0.0, "tof_ms: must be non-negative");
  require(c.n_points >= 16 && (c.n_points & (c.n_points - 1)) == 0, "n_points: must be a power of two >= 16");
  require(c.box_length > 0.0 && std::fmod(c.box_length, 4.0) == 0.0, "box_length: must be a positive multiple of 4");
  require(c.dt > 0.0, "dt: must be positive");
  require(c.tol > 0.0, "tol: must be positive");
  require(c.ramp_ms >= 0.0, "ramp_ms: must be non-negative");
  require(c.period_window >= 1.25, "period_window: must be at least 1.25 periods");
  require(c.depth_sigma_s >= 0.0, "depth_sigma_s: must be non-negative");
  require(c.snapshot_interval_us > 0.0, "snapshot_interval_us: must be positive");
  for (double s : c.depth_values_s) require(s > 0.0, "depth_values_s: entries must be positive");
  for (double t : c.theta_values_deg) require(t > 0.0 && t < 90.0, "theta_values_deg: entries must lie in (0, 90)");
  for (double t : c.delay_theta_values_deg) require(t > 0.0 && t < 90.0, "delay_theta_values_deg: entries must lie in (0, 90)");
  for (double b : c.beta_values) require(b >= 0.0, "beta_values: entries must be non-negative");
  for (double w : c.omega_ext_values) require(w > 0.0, "omega_ext_values: entries must be positive");
  try {
    parse_schedule(c.snapshots, 1.0);
  } catch (const ConfigError& e) {
    problems.insert(problems.end(), e.problems().begin(), e.problems().end());
  }
}

}  // namespace

ConfigError::ConfigError(const std::vector<std::string>& problems)
    : std::invalid_argument("invalid configuration: " + join(problems)), problems_(problems) {}

PhysicalParams RunConfig::physical() const {
  PhysicalParams p;
  p.atom_mass = atom_mass_kg;
  p.lattice_spacing = lattice_spacing_nm * 1e-9;
  p.depth_s = depth_s;
  p.trap_omega = 2.0 * std::numbers::pi * trap_hz;
  p.beta = beta;
  p.tof_time = tof_ms * 1e-3;
  return p;
}

ScanSettings RunConfig::scan_settings() const {
  ScanSettings s;
  s.physical = physical();
  s.theta0 = deg_to_rad(theta0_deg);
  s.n_points = n_points;
  s.box_length = box_length;
  s.dt = dt;
  s.ground.tol = tol;
  s.period_fit.window_periods = period_window;
  s.snapshot_interval_s = snapshot_interval_us * 1e-6;
  s.threads = threads;
  return s;
}

nlohmann::json RunConfig::to_json() const {
  Json j = Json::object();
  for (const auto& [key, field] : schema()) j[key] = field.write(*this);
  return j;
}

RunConfig parse_config(const std::string& text) {
  std::vector<std::string> problems;
  std::vector<std::set<std::string>> seen;
  std::set<std::string> duplicates;
  const auto callback = [&](int, Json::parse_event_t event, Json& parsed) {
    switch (event) {
      case Json::parse_event_t::object_start:
        seen.emplace_back();
        break;
      case Json::parse_event_t::object_end:
        seen.pop_back();
        break;
      case Json::parse_event_t::key: {
        const auto key = parsed.get<std::string>();
        if (!seen.back().insert(key).second) duplicates.insert(key);
        break;
      }
      default: break;
    }
    return true;
  };
  Json doc;
  try {
    doc = Json::parse(text, callback);
  } catch (const Json::parse_error& e) {
    throw ConfigError({std::string("parse error: ") + e.what()});
  }
  if (!doc.is_object()) throw ConfigError({"configuration must be a JSON object"});
  for (const auto& key : duplicates) problems.push_back(key + ": duplicate key");

  RunConfig config;
  for (const auto& [key, value] : doc.items()) {
    const auto it = schema().find(key);
    if (it == schema().end()) {
      problems.push_back(key + ": unknown key");
      continue;
    }
    if (value.is_object()) {
      problems.push_back(key + ": nested objects are not allowed");
      continue;
    }
    try {
      it->second.read(value, config);
    } catch (const std::exception& e) {
      problems.push_back(e.what());
    }
  }
  validate(config, problems);
  if (!problems.empty()) throw ConfigError(problems);
  return config;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({"cannot read configuration file " + path.string()});
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::vector<double> parse_schedule(const std::string& spec, double time_unit) {
  std::string body = spec;
  double scale = 1.0;  // seconds per unit, or 1 for dimensionless
  bool physical = false;
  for (const auto& [suffix, factor] : {std::pair{"us", 1e-6}, std::pair{"ms", 1e-3}, std::pair{"s", 1.0}}) {
    const std::string sfx = suffix;
    if (body.size() > sfx.size() && body.compare(body.size() - sfx.size(), sfx.size(), sfx) == 0) {
      body.resize(body.size() - sfx.size());
      scale = factor;
      physical = true;
      break;
    }
  }
  std::vector<double> parts;
  std::stringstream ss(body);
  for (std::string item; std::getline(ss, item, ':');) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw ConfigError({"snapshots: malformed schedule '" + spec + "'"});
    }
    if (used != item.size()) throw ConfigError({"snapshots: malformed schedule '" + spec + "'"});
    parts.push_back(v);
  }
  if (parts.size() != 3) throw ConfigError({"snapshots: schedule must be start:stop:step, got '" + spec + "'"});
  const double start = parts[0], stop = parts[1], step = parts[2];
  if (!(step > 0.0) || !(start >= 0.0) || stop < start)
    throw ConfigError({"snapshots: schedule needs 0 <= start <= stop and step > 0, got '" + spec + "'"});
  if (physical && !(time_unit > 0.0)) throw ConfigError({"snapshots: physical schedule needs a positive time unit"});
  const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9));
  std::vector<double> out;
  for (std::size_t i = 0; i <= count; ++i) {
    const double t = start + step * static_cast<double>(i);
    out.push_back(physical ? t * scale / time_unit : t);
  }
  return out;
}

}  // namespace tunnel
