#include "apt/config.hpp"

#include <cmath>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace apt {

namespace {

template <class E>
struct Names {
  E value;
  const char* name;
};

template <class E, size_t N>
E parse_enum(const std::string& s, const Names<E> (&table)[N], const char* key) {
  for (const auto& e : table)
    if (s == e.name) return e.value;
  std::string allowed;
  for (const auto& e : table) allowed += std::string(allowed.empty() ? "" : ", ") + e.name;
  throw ConfigError(std::string(key) + ": unknown value '" + s + "' (expected one of " + allowed + ")");
}

template <class E, size_t N>
std::string enum_name(E v, const Names<E> (&table)[N]) {
  for (const auto& e : table)
    if (v == e.value) return e.name;
  return "?";
}

const Names<Preset> kPresets[] = {
    {Preset::problem1, "problem1"}, {Preset::problem2, "problem2"}, {Preset::problem3, "problem3"},
    {Preset::custom, "custom"}};
const Names<Method> kMethods[] = {{Method::iterative, "iterative"}, {Method::steady, "steady"}};
const Names<Layout> kLayouts[] = {{Layout::per_step, "per_step"}, {Layout::split_rj, "split_rj"}};
const Names<Profile> kProfiles[] = {{Profile::exp_abs, "exp_abs"}, {Profile::smooth_r, "smooth_r"}};
const Names<EvolutionMethod> kEvolution[] = {{EvolutionMethod::automatic, "auto"},
                                             {EvolutionMethod::exact_diag, "exact"},
                                             {EvolutionMethod::krylov, "krylov"},
                                             {EvolutionMethod::rk_adaptive, "rk"}};
const Names<VelocitySet> kVelocity[] = {{VelocitySet::gauss_legendre, "gauss_legendre"},
                                        {VelocitySet::s8_half, "s8_half"}};
const Names<RecoveryMode> kRecovery[] = {{RecoveryMode::point, "point"}, {RecoveryMode::integral, "integral"}};

std::vector<double> parse_list(const std::string& s, const std::string& key) {
  std::vector<double> out;
  std::string item;
  std::stringstream ss(s);
  while (std::getline(ss, item, ',')) {
    try {
      size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError(key + ": '" + s + "' is not a comma-separated list of numbers");
    }
  }
  if (out.empty()) throw ConfigError(key + ": empty coefficient list");
  return out;
}

template <class T>
T get_value(const boost::property_tree::ptree& node, const std::string& key) {
  try {
    return node.get_value<T>();
  } catch (const boost::property_tree::ptree_bad_data&) {
    throw ConfigError(key + ": cannot parse '" + node.data() + "'");
  }
}

bool parse_bool(const std::string& s, const std::string& key) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw ConfigError(key + ": expected true or false, got '" + s + "'");
}

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

}  // namespace

Preset parse_preset(const std::string& s) { return parse_enum(s, kPresets, "preset"); }
std::string to_string(Preset p) { return enum_name(p, kPresets); }
Method parse_method(const std::string& s) { return parse_enum(s, kMethods, "method"); }
std::string to_string(Method m) { return enum_name(m, kMethods); }
Layout parse_layout(const std::string& s) { return parse_enum(s, kLayouts, "layout"); }
std::string to_string(Layout l) { return enum_name(l, kLayouts); }
Profile parse_profile(const std::string& s) { return parse_enum(s, kProfiles, "profile"); }
std::string to_string(Profile p) { return enum_name(p, kProfiles); }
EvolutionMethod parse_evolution(const std::string& s) { return parse_enum(s, kEvolution, "evolution"); }
std::string to_string(EvolutionMethod m) { return enum_name(m, kEvolution); }

ProblemConfig preset_config(Preset p, Method m, double epsilon) {
  ProblemConfig c;
  c.preset = p;
  c.method = m;
  c.epsilon = epsilon;
  c.nx = 9;
  c.nv = 4;
  c.velocity_set = VelocitySet::s8_half;
  c.sigma_A = std::vector<double>{0.0};
  c.F_R = std::vector<double>{0.0};
  switch (p) {
    case Preset::problem1:
      c.t_final = 0.05;
      c.sigma_S = std::vector<double>{1.0};
      c.Q = std::vector<double>{0.0};
      c.F_L = std::vector<double>{1.0};
      c.Np = 128;
      break;
    case Preset::problem2:
      c.t_final = 0.1;
      c.sigma_S = std::vector<double>{1.0, 0.0, 100.0};
      c.Q = std::vector<double>{1.0};
      c.F_L = std::vector<double>{0.0};
      c.Np = m == Method::iterative ? 1024 : 512;
      break;
    case Preset::problem3:
      c.t_final = 0.05;
      c.sigma_S = std::vector<double>{1.0};
      c.Q = std::vector<double>{1.0};
      c.F_L = std::vector<double>{0.0, 1.0};
      c.Np = 128;
      break;
    case Preset::custom:
      c.sigma_A.reset();
      c.F_R.reset();
      break;
  }
  return c;
}

void apply_ini(ProblemConfig& c, const std::string& path) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_ini(path, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("config file: " + std::string(e.what()));
  }
  const std::set<std::string> sections = {"domain", "discretization", "physics", "schrodingerization", "run"};
  for (const auto& [section, body] : tree) {
    if (!sections.count(section)) throw ConfigError("config: unknown section [" + section + "]");
    for (const auto& [k, node] : body) {
      const std::string key = section + "." + k;
      const std::string v = node.data();
      if (key == "domain.x_lo") c.x_lo = get_value<double>(node, key);
      else if (key == "domain.x_hi") c.x_hi = get_value<double>(node, key);
      else if (key == "discretization.nx") c.nx = get_value<int>(node, key);
      else if (key == "discretization.nv") c.nv = get_value<int>(node, key);
      else if (key == "discretization.velocity_set") c.velocity_set = parse_enum(v, kVelocity, key.c_str());
      else if (key == "discretization.tau") c.tau = get_value<double>(node, key);
      else if (key == "discretization.t_final") c.t_final = get_value<double>(node, key);
      else if (key == "physics.preset") c.preset = parse_preset(v);
      else if (key == "physics.epsilon") c.epsilon = get_value<double>(node, key);
      else if (key == "physics.sigma_S") c.sigma_S = parse_list(v, key);
      else if (key == "physics.sigma_A") c.sigma_A = parse_list(v, key);
      else if (key == "physics.Q") c.Q = parse_list(v, key);
      else if (key == "physics.F_L") c.F_L = parse_list(v, key);
      else if (key == "physics.F_R") c.F_R = parse_list(v, key);
      else if (key == "schrodingerization.np") c.Np = get_value<int>(node, key);
      else if (key == "schrodingerization.profile") c.profile = parse_profile(v);
      else if (key == "schrodingerization.auto_domain") c.auto_domain = parse_bool(v, key);
      else if (key == "schrodingerization.L") c.L = get_value<double>(node, key);
      else if (key == "schrodingerization.R") c.R = get_value<double>(node, key);
      else if (key == "schrodingerization.source_scale") c.source_scale = get_value<double>(node, key);
      else if (key == "schrodingerization.evolution") c.evolution = parse_evolution(v);
      else if (key == "schrodingerization.max_dim_exact") c.max_dim_exact = get_value<int>(node, key);
      else if (key == "schrodingerization.tol") c.evolution_tol = get_value<double>(node, key);
      else if (key == "schrodingerization.recovery") c.recovery = parse_enum(v, kRecovery, key.c_str());
      else if (key == "run.method") c.method = parse_method(v);
      else if (key == "run.layout") c.layout = parse_layout(v);
      else if (key == "run.T") c.T_evolve = get_value<double>(node, key);
      else if (key == "run.jobs") c.jobs = get_value<int>(node, key);
      else if (key == "run.seed") c.seed = get_value<std::uint64_t>(node, key);
      else if (key == "run.out") c.out_dir = v;
      else throw ConfigError("config: unknown key " + key);
    }
  }
}

void validate(const ProblemConfig& c) {
  if (!(c.epsilon > 0.0) || !std::isfinite(c.epsilon)) throw ConfigError("epsilon: must be positive");
  if (!(c.x_hi > c.x_lo)) throw ConfigError("domain.x_hi: must exceed x_lo");
  if (c.nx < 1) throw ConfigError("nx: must be positive");
  if (c.nv < 1) throw ConfigError("nv: must be positive");
  if (c.tau < 0.0) throw ConfigError("tau: must be positive (0 selects the default)");
  if (!(c.t_final > 0.0)) throw ConfigError("t_final: must be positive");
  if (!is_power_of_two(c.Np) || c.Np < 4) throw ConfigError("np: must be a power of two >= 4");
  if (!c.auto_domain && (c.L < 0.0 || c.R < 0.0)) throw ConfigError("schrodingerization.L/R: must be non-negative");
  if (!(c.source_scale > 0.0)) throw ConfigError("schrodingerization.source_scale: must be positive");
  if (!(c.evolution_tol > 0.0 && c.evolution_tol <= 1e-2))
    throw ConfigError("schrodingerization.tol: must lie in (0, 1e-2]");
  if (c.max_dim_exact < 2) throw ConfigError("schrodingerization.max_dim_exact: must be >= 2");
  if (c.T_evolve < 0.0) throw ConfigError("run.T: must be positive (0 selects 2 N_t)");
  if (c.jobs < 1) throw ConfigError("jobs: must be positive");
  const char* names[] = {"physics.sigma_S", "physics.sigma_A", "physics.Q", "physics.F_L", "physics.F_R"};
  const std::optional<std::vector<double>>* lists[] = {&c.sigma_S, &c.sigma_A, &c.Q, &c.F_L, &c.F_R};
  for (int i = 0; i < 5; ++i)
    if (!*lists[i]) throw ConfigError(std::string(names[i]) + ": required for preset custom");
}

GridSpec grid_spec(const ProblemConfig& c) {
  GridSpec g;
  g.x_lo = c.x_lo;
  g.x_hi = c.x_hi;
  g.nx = c.nx;
  g.nv = c.nv;
  g.velocity_set = c.velocity_set;
  const double h = (c.x_hi - c.x_lo) / (c.nx + 1);
  g.tau = c.tau > 0.0 ? c.tau : (c.method == Method::iterative ? 1.0 : 10.0 / 11.0) * h * h;
  g.t_final = c.t_final;
  g.epsilon = c.epsilon;
  g.method = c.method;
  return g;
}

TransportProblem transport_problem(const ProblemConfig& c) {
  validate(c);
  return make_problem(*c.sigma_S, *c.sigma_A, *c.Q, *c.F_L, *c.F_R);
}

SchrodingerSettings schrodinger_settings(const ProblemConfig& c, int nx) {
  SchrodingerSettings s;
  s.Np = c.Np;
  s.domain.automatic = c.auto_domain;
  s.domain.L_min = c.L > 0.0 ? c.L : nx;
  s.domain.R_min = c.R > 0.0 ? c.R : nx;
  s.profile.kind = c.profile;
  s.recovery.mode = c.recovery;
  s.recovery.jobs = c.jobs;
  s.evolution.method = c.evolution;
  s.evolution.tol = c.evolution_tol;
  s.evolution.max_dim_exact = c.max_dim_exact;
  s.source_scale = c.source_scale;
  return s;
}

}  // namespace apt
