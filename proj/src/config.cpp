#include "mfguc/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include "mfguc/errors.hpp"
#include "mfguc/manufactured.hpp"

namespace mfguc::config {

namespace {

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

class Reader {
 public:
  explicit Reader(const std::map<std::string, std::string>& v) : v_(v) {}

  const std::string& str(const std::string& key) const { return v_.at(key); }

  double real(const std::string& key) const { return parse_real(key, str(key)); }

  std::optional<double> optional_real(const std::string& key) const {
    if (str(key).empty()) return std::nullopt;
    return real(key);
  }

  long long integer(const std::string& key) const {
    const auto& s = str(key);
    long long out = 0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    if (ec != std::errc{} || p != s.data() + s.size()) throw bad(key, "an integer");
    return out;
  }

  bool boolean(const std::string& key) const {
    const auto& s = str(key);
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    throw bad(key, "a boolean");
  }

  std::vector<std::string> list(const std::string& key) const {
    std::vector<std::string> out;
    std::stringstream ss(str(key));
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (!item.empty()) out.push_back(item);
    }
    return out;
  }

  static double parse_real(const std::string& key, const std::string& s) {
    double out = 0.0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    if (ec != std::errc{} || p != s.data() + s.size() || !std::isfinite(out)) throw bad(key, "a finite number");
    return out;
  }

 private:
  static ConfigError bad(const std::string& key, const char* what) {
    return ConfigError(fmt::format("{} must be {}", key, what));
  }

  const std::map<std::string, std::string>& v_;
};

// Numbers in shortest round-trip form and list items without padding, so that
// equivalent spellings hash alike. Integers are kept verbatim (seeds may exceed 2^53).
std::string canonical(const std::string& value) {
  std::string out;
  std::stringstream ss(value);
  std::string item;
  bool first = true;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    const bool integral = !item.empty() && item.find_first_not_of("+-0123456789") == std::string::npos;
    double x = 0.0;
    const auto [p, ec] = std::from_chars(item.data(), item.data() + item.size(), x);
    if (!integral && ec == std::errc{} && p == item.data() + item.size()) item = fmt::format("{}", x);
    out += (first ? "" : ",") + item;
    first = false;
  }
  return out;
}

void set_value(std::map<std::string, std::string>& values, const std::string& key, const std::string& value) {
  if (!defaults().contains(key)) throw ConfigError(fmt::format("unknown configuration key '{}'", key));
  values[key] = trim(value);
}

// epsilon_core and r_fraction may be given in [geometry] or [uc]; [uc] inherits.
double shared_real(const Reader& r, const std::string& key) {
  const double g = r.real("geometry." + key);
  const auto u = r.optional_real("uc." + key);
  if (u && *u != g && r.str("geometry." + key) != defaults().at("geometry." + key)) {
    throw ConfigError(fmt::format("geometry.{0} and uc.{0} disagree", key));
  }
  return u.value_or(g);
}

}  // namespace

const std::map<std::string, std::string>& defaults() {
  static const std::map<std::string, std::string> d{
      {"geometry.dimension", "1"},
      {"geometry.extents", "1"},
      {"geometry.gamma_faces", "x0"},
      {"geometry.epsilon_core", "0.25"},
      {"geometry.lambda", "1"},
      {"geometry.beta", ""},
      {"geometry.r_fraction", "0.5"},
      {"geometry.t0", "0.5"},
      {"geometry.delta", "0.25"},
      {"grid.n1", "33"},
      {"grid.n2", "1"},
      {"grid.nt", "33"},
      {"mfg.case_id", "1d-nonlinear"},
      {"mfg.max_inner", "50"},
      {"mfg.tol_inner", "1e-10"},
      {"mfg.mms_levels", "3"},
      {"carleman.s_min", "1"},
      {"carleman.s_max", ""},
      {"carleman.s_steps", "40"},
      {"carleman.C_B", "0"},
      {"carleman.estimate", "lemma1-k1"},
      {"carleman.input", "bump"},
      {"carleman.time_reversed", "false"},
      {"carleman.phi_weighted_B2", "false"},
      {"uc.epsilon_core", ""},
      {"uc.r_fraction", ""},
      {"uc.s_grid", "1:50:50"},
      {"uc.rho", ""},
      {"uc.tol_gamma", "1e-10"},
      {"uc.noise_levels", "0.1,0.01,0.001"},
      {"uc.T", "1"},
      {"uc.t0_count", "10"},
      {"uc.s_reconstruct", "2"},
      {"uc.slack_constant", "1"},
      {"uc.perturbation", "layer"},
      {"uc.layer", "0.2"},
      {"run.seed", "0"},
      {"run.output_dir", "mfguc-out"},
      {"run.workers", "1"},
  };
  return d;
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string ExperimentConfig::hash() const {
  std::string canon;
  for (const auto& [k, v] : values) {
    if (k == "run.output_dir" || k == "run.workers") continue;
    canon += k + "=" + canonical(v) + "\n";
  }
  return fmt::format("{:016x}", fnv1a(canon));
}

ExperimentConfig load(const std::optional<std::string>& path, const std::vector<std::string>& overrides) {
  auto values = defaults();
  if (path) {
    boost::property_tree::ptree tree;
    try {
      boost::property_tree::ini_parser::read_ini(*path, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
      throw ConfigError(fmt::format("cannot read config: {}", e.what()));
    }
    for (const auto& [section, body] : tree) {
      if (body.empty()) throw ConfigError(fmt::format("key '{}' is outside any section", section));
      for (const auto& [key, leaf] : body) set_value(values, section + "." + key, leaf.data());
    }
  }
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos) throw ConfigError(fmt::format("override '{}' is not section.key=value", o));
    set_value(values, trim(o.substr(0, eq)), o.substr(eq + 1));
  }
  return from_values(std::move(values));
}

ExperimentConfig from_values(std::map<std::string, std::string> values) {
  for (const auto& [k, v] : defaults()) values.try_emplace(k, v);
  for (const auto& [k, v] : values) {
    if (!defaults().contains(k)) throw ConfigError(fmt::format("unknown configuration key '{}'", k));
  }
  const Reader r(values);
  ExperimentConfig c;

  auto& dom = c.geometry.domain;
  dom.dimension = static_cast<int>(r.integer("geometry.dimension"));
  {
    const auto ext = r.list("geometry.extents");
    if (ext.empty() || ext.size() > 2) throw ConfigError("geometry.extents takes one or two lengths");
    for (std::size_t i = 0; i < ext.size(); ++i) dom.extents[i] = Reader::parse_real("geometry.extents", ext[i]);
    if (ext.size() == 1) dom.extents[1] = dom.extents[0];
  }
  for (const auto& name : r.list("geometry.gamma_faces")) dom.gamma_faces.push_back(geometry::parse_face(name));
  dom.epsilon_core = shared_real(r, "epsilon_core");
  auto& w = c.geometry.weight;
  w.lambda = r.real("geometry.lambda");
  w.beta = r.optional_real("geometry.beta");
  w.r_fraction = shared_real(r, "r_fraction");
  w.t0 = r.real("geometry.t0");
  w.delta = r.real("geometry.delta");

  c.grid = {static_cast<int>(r.integer("grid.n1")), static_cast<int>(r.integer("grid.n2")),
            static_cast<int>(r.integer("grid.nt"))};
  c.case_id = r.str("mfg.case_id");
  c.solver.max_inner = static_cast<int>(r.integer("mfg.max_inner"));
  c.solver.tol_inner = r.real("mfg.tol_inner");
  c.mms_levels = static_cast<int>(r.integer("mfg.mms_levels"));

  auto& cb = c.carleman;
  cb.s_min = r.real("carleman.s_min");
  cb.s_max = r.optional_real("carleman.s_max");
  cb.s_steps = static_cast<int>(r.integer("carleman.s_steps"));
  cb.boundary.C_B = r.real("carleman.C_B");
  cb.boundary.phi_weighted_complement = r.boolean("carleman.phi_weighted_B2");
  cb.estimate = carleman::parse_estimate(r.str("carleman.estimate"));
  cb.input = r.str("carleman.input");
  cb.time_reversed = r.boolean("carleman.time_reversed");

  auto& u = c.uc;
  {
    const auto& g = r.str("uc.s_grid");
    const auto a = g.find(':');
    const auto b = g.find(':', a == std::string::npos ? a : a + 1);
    if (a == std::string::npos || b == std::string::npos) throw ConfigError("uc.s_grid must be min:max:steps");
    u.s_min = Reader::parse_real("uc.s_grid", g.substr(0, a));
    u.s_max = Reader::parse_real("uc.s_grid", g.substr(a + 1, b - a - 1));
    u.s_steps = static_cast<int>(Reader::parse_real("uc.s_grid", g.substr(b + 1)));
  }
  u.rho = r.optional_real("uc.rho");
  u.tol_gamma = r.real("uc.tol_gamma");
  u.noise_levels.clear();
  for (const auto& s : r.list("uc.noise_levels")) u.noise_levels.push_back(Reader::parse_real("uc.noise_levels", s));
  u.T = r.real("uc.T");
  u.t0_count = static_cast<int>(r.integer("uc.t0_count"));
  u.s_reconstruct = r.real("uc.s_reconstruct");
  u.slack_constant = r.real("uc.slack_constant");
  u.perturbation = r.str("uc.perturbation");
  u.layer = r.real("uc.layer");

  const auto seed = r.integer("run.seed");
  const auto workers = r.integer("run.workers");
  if (seed < 0) throw ConfigError("run.seed must be non-negative");
  if (workers < 1 || workers > 256) throw ConfigError("run.workers must lie in [1, 256]");
  c.run = {static_cast<std::uint64_t>(seed), r.str("run.output_dir"), static_cast<unsigned>(workers)};
  c.values = std::move(values);
  return c;
}

void validate(const ExperimentConfig& c) {
  const auto& dom = c.geometry.domain;
  dom.validate();
  if (dom.dimension == 1 && c.grid.n2 != 1) throw ConfigError("grid.n2 must be 1 in one dimension");
  if (c.grid.n1 < 3 || (dom.dimension == 2 && c.grid.n2 < 3)) throw ConfigError("each axis needs at least 3 nodes");
  if (c.grid.nt < 3 || c.grid.nt % 2 == 0) throw ConfigError("grid.nt must be odd and at least 3");
  const auto ids = mfg::catalogue();
  if (std::find(ids.begin(), ids.end(), c.case_id) == ids.end()) {
    throw ConfigError(fmt::format("unknown mfg.case_id '{}'", c.case_id));
  }
  if (c.solver.max_inner < 1 || !(c.solver.tol_inner > 0.0)) throw ConfigError("invalid inner solver settings");
  if (c.mms_levels < 2) throw ConfigError("mfg.mms_levels must be at least 2");
  if (!(c.geometry.weight.delta > 0.0)) throw ConfigError("geometry.delta must be positive");
  const auto& cb = c.carleman;
  cb.boundary.validate();
  if (!(cb.s_min > 0.0) || cb.s_steps < 1) throw ConfigError("invalid carleman s grid");
  if (cb.s_max && *cb.s_max < cb.s_min) throw ConfigError("carleman.s_max is below carleman.s_min");
  if (cb.input != "bump" && cb.input != "case" && cb.input != "pair") {
    throw ConfigError("carleman.input must be bump, case or pair");
  }
  const auto& u = c.uc;
  if (!(u.s_min > 0.0) || !(u.s_max >= u.s_min) || u.s_steps < 1) throw ConfigError("invalid uc.s_grid");
  if (u.rho && !(*u.rho >= 0.0)) throw ConfigError("uc.rho must be non-negative");
  if (!(u.tol_gamma > 0.0) || !(u.slack_constant >= 0.0) || !(u.s_reconstruct > 0.0)) {
    throw ConfigError("invalid uc tolerances");
  }
  for (double eta : u.noise_levels) {
    if (!(eta >= 0.0)) throw ConfigError("noise levels must be non-negative");
  }
  if (u.perturbation != "layer" && u.perturbation != "zero") throw ConfigError("uc.perturbation must be layer or zero");
  if (!(u.layer > 0.0) || !(u.layer < dom.epsilon_core)) {
    throw ConfigError("uc.layer must lie in (0, epsilon_core)");
  }
  if (u.t0_count < 1) throw ConfigError("uc.t0_count must be positive");

  const int case_dim = mfg::analytic_case(c.case_id, 0.0).dimension;
  if (case_dim != 0 && case_dim != dom.dimension) {
    throw ConfigError(fmt::format("mfg.case_id '{}' is a {}D case but geometry.dimension = {}", c.case_id, case_dim,
                                  dom.dimension));
  }
  // weight constants and the overflow guard of the configured grid
  const disc::SpaceTimeGrid grid(dom, c.grid, c.geometry.weight.t0, c.geometry.weight.delta);
  const auto w = geometry::make_weight_config(dom, grid.aux(), c.geometry.weight);
  if (cb.s_max) {
    const double guard = carleman::max_admissible_s(grid, w);
    if (*cb.s_max > guard) {
      throw ConfigError(
          fmt::format("carleman.s_max = {} exceeds the overflow guard; max admissible s = {}", *cb.s_max, guard));
    }
  }
}

void validate_horizon(const ExperimentConfig& c) {
  const double T = c.uc.T;
  const double delta = c.geometry.weight.delta;
  if (!(T > 2.0 * delta)) throw ConfigError(fmt::format("uc.T = {} must exceed 2 delta = {}", T, 2.0 * delta));
  const double t0 = c.geometry.weight.t0;
  if (!(t0 - delta > 0.0) || !(t0 + delta < T)) {
    throw ConfigError(fmt::format("need 0 < t0 - delta < t0 + delta < T (t0 = {}, delta = {}, T = {})", t0, delta, T));
  }
}

}  // namespace mfguc::config
