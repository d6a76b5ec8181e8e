#include "config.hpp"

#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "ionbath/errors.hpp"

namespace ionbath::cli {

namespace {

const std::map<std::string, std::string>& defaults() {
  static const std::map<std::string, std::string> d{
      {"chain.kind", "coulomb"},
      {"chain.n_ions", "50"},
      {"chain.light_mass", "1"},
      {"chain.heavy_mass", "2.87"},
      {"chain.defect_distance", "4"},
      {"chain.axial_strength", "1"},
      {"chain.transverse_scale", "833"},
      {"chain.charge", "1"},
      {"chain.spacing", "paul-trap"},
      {"chain.uniform_spacing", "1"},
      {"chain.reference_frequency", "0"},
      {"nn.n_bulk", "101"},
      {"nn.bulk_mass", "1"},
      {"nn.defect_mass", "2"},
      {"nn.bulk_frequency", "1"},
      {"nn.spring", "10"},
      {"nn.defect_frequency", "1"},
      {"nn.attach_index", "1"},
      {"coupling.gamma", "13.6"},
      {"initial.squeezing", "0.5"},
      {"initial.temperature", "8"},
      {"initial.defect_mode_frequency", "0"},
      {"initial.transverse_ground", "true"},
      {"tuning.enabled", "true"},
      {"tuning.parity", "odd"},
      {"tuning.ell", "2"},
      {"tuning.frequency", "0"},
      {"decoupling.threshold", "0.5"},
      {"decoupling.leakage_tolerance", "0.05"},
      {"decoupling.bandwidth_scale", "2"},
      {"decoupling.grid_per_mode", "8"},
      {"decoupling.scan_points", "121"},
      {"time.t_max", "100"},
      {"time.dt", "0.05"},
      {"timescales.dwell", "5"},
      {"timescales.settle_band", "0.1"},
      {"timescales.exit_band", "0.25"},
      {"scenario.twin", "true"},
      {"scan.axis", "squeezing"},
      {"scan.values", ""},
      {"spectral.points", "400"},
      {"spectral.omega_min", "0"},
      {"spectral.omega_max", "0"},
      {"modes.localized_weight", "0.5"},
      {"measure.time", "50"},
      {"measure.radius", "1.5"},
      {"measure.shots", "0"},
  };
  return d;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const char* what) {
  throw Error(ErrorKind::invalid_argument,
              "config key '" + key + "': '" + value + "' is not " + what);
}

}  // namespace

Config::Config() : values_(defaults()) {}

void Config::set(const std::string& key, const std::string& value) {
  auto it = values_.find(key);
  if (it == values_.end()) throw Error(ErrorKind::invalid_argument, "unknown config key '" + key + "'");
  it->second = value;
}

void Config::load_text(const std::string& text, const std::string& origin) {
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw Error(ErrorKind::invalid_argument,
                    origin + ":" + std::to_string(lineno) + ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorKind::invalid_argument,
                  origin + ":" + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    if (!section.empty() && key.find('.') == std::string::npos) key = section + "." + key;
    set(key, trim(line.substr(eq + 1)));
  }
}

void Config::load_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorKind::invalid_argument, "cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  load_text(ss.str(), path);
}

void Config::apply_override(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos)
    throw Error(ErrorKind::invalid_argument, "override '" + assignment + "' must be KEY=VALUE");
  set(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

const std::string& Config::get(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw Error(ErrorKind::invalid_argument, "unknown config key '" + key + "'");
  return it->second;
}

double Config::get_double(const std::string& key) const {
  const std::string& v = get(key);
  char* end = nullptr;
  errno = 0;
  const double x = std::strtod(v.c_str(), &end);
  if (v.empty() || *end != '\0' || errno == ERANGE) bad_value(key, v, "a number");
  return x;
}

long Config::get_long(const std::string& key) const {
  const std::string& v = get(key);
  char* end = nullptr;
  errno = 0;
  const long x = std::strtol(v.c_str(), &end, 10);
  if (v.empty() || *end != '\0' || errno == ERANGE) bad_value(key, v, "an integer");
  return x;
}

int Config::get_int(const std::string& key) const {
  const long x = get_long(key);
  if (x < -2147483647L || x > 2147483647L) bad_value(key, get(key), "a 32-bit integer");
  return static_cast<int>(x);
}

bool Config::get_bool(const std::string& key) const {
  const std::string& v = get(key);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  bad_value(key, v, "a boolean");
}

std::vector<double> Config::get_list(const std::string& key) const {
  std::vector<double> out;
  std::stringstream ss(get(key));
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    char* end = nullptr;
    const double x = std::strtod(item.c_str(), &end);
    if (*end != '\0') bad_value(key, item, "a number");
    out.push_back(x);
  }
  return out;
}

std::vector<std::string> Config::lines() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : values_) out.push_back(k + " = " + v);
  return out;
}

Parity parse_parity(const std::string& s) {
  if (s == "even" || s == "+") return Parity::even;
  if (s == "odd" || s == "-") return Parity::odd;
  throw Error(ErrorKind::invalid_argument, "parity must be even or odd, got '" + s + "'");
}

ChainKind chain_kind(const Config& c) {
  const std::string& k = c.get("chain.kind");
  if (k == "coulomb") return ChainKind::coulomb;
  if (k == "nn" || k == "nearest-neighbour") return ChainKind::nearest_neighbour;
  throw Error(ErrorKind::invalid_argument, "chain.kind must be coulomb or nn, got '" + k + "'");
}

ChainSpec chain_spec(const Config& c) {
  ChainSpec s;
  s.n_ions = c.get_int("chain.n_ions");
  s.light_mass = c.get_double("chain.light_mass");
  s.heavy_mass = c.get_double("chain.heavy_mass");
  s.defect_distance = c.get_int("chain.defect_distance");
  s.axial_strength = c.get_double("chain.axial_strength");
  s.transverse_scale = c.get_double("chain.transverse_scale");
  s.charge = c.get_double("chain.charge");
  const std::string& sp = c.get("chain.spacing");
  if (sp == "paul-trap")
    s.spacing_model = SpacingModel::paul_trap;
  else if (sp == "uniform")
    s.spacing_model = SpacingModel::uniform;
  else
    throw Error(ErrorKind::invalid_argument,
                "chain.spacing must be paul-trap or uniform, got '" + sp + "'");
  s.uniform_spacing = c.get_double("chain.uniform_spacing");
  s.reference_frequency = c.get_double("chain.reference_frequency");
  s.validate();
  return s;
}

NNSpec nn_spec(const Config& c) {
  NNSpec s;
  s.n_bulk = c.get_int("nn.n_bulk");
  s.bulk_mass = c.get_double("nn.bulk_mass");
  s.defect_mass = c.get_double("nn.defect_mass");
  s.bulk_frequency = c.get_double("nn.bulk_frequency");
  s.spring = c.get_double("nn.spring");
  s.defect_frequency = c.get_double("nn.defect_frequency");
  s.coupling = c.get_double("coupling.gamma");
  s.attach_index = c.get_int("nn.attach_index");
  s.validate();
  return s;
}

InitialStateSpec initial_spec(const Config& c) {
  InitialStateSpec s;
  s.squeezing = c.get_double("initial.squeezing");
  s.bath_temperature = c.get_double("initial.temperature");
  s.defect_mode_frequency = c.get_double("initial.defect_mode_frequency");
  s.transverse_ground = c.get_bool("initial.transverse_ground");
  s.validate();
  return s;
}

DecouplingOptions decoupling_options(const Config& c) {
  DecouplingOptions o;
  o.threshold = c.get_double("decoupling.threshold");
  o.leakage_tolerance = c.get_double("decoupling.leakage_tolerance");
  o.bandwidth_scale = c.get_double("decoupling.bandwidth_scale");
  o.grid_per_mode = c.get_int("decoupling.grid_per_mode");
  o.scan_points = c.get_int("decoupling.scan_points");
  if (!(o.threshold > 0.0) || !(o.leakage_tolerance > 0.0) || !(o.bandwidth_scale > 0.0) ||
      o.grid_per_mode < 1 || o.scan_points < 3)
    throw Error(ErrorKind::invalid_argument, "decoupling options out of range");
  return o;
}

Scenario scenario(const Config& c) {
  Scenario sc;
  sc.kind = chain_kind(c);
  if (sc.kind == ChainKind::coulomb)
    sc.chain = chain_spec(c);
  else
    sc.nn = nn_spec(c);
  sc.initial = initial_spec(c);
  sc.coupling = c.get_double("coupling.gamma");
  sc.tuning.enabled = c.get_bool("tuning.enabled");
  sc.tuning.parity = parse_parity(c.get("tuning.parity"));
  sc.tuning.ell = c.get_int("tuning.ell");
  sc.tuning.frequency = c.get_double("tuning.frequency");
  sc.time.t_max = c.get_double("time.t_max");
  sc.time.dt = c.get_double("time.dt");
  sc.twin = c.get_bool("scenario.twin");
  sc.timescales.dwell = c.get_double("timescales.dwell");
  sc.timescales.settle_band = c.get_double("timescales.settle_band");
  sc.timescales.exit_band = c.get_double("timescales.exit_band");
  sc.decoupling = decoupling_options(c);
  sc.validate();
  return sc;
}

}  // namespace ionbath::cli
