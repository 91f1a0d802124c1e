#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "apt/mesh.hpp"
#include "apt/schrodingerize.hpp"
#include "apt/steady.hpp"
#include "apt/transport.hpp"

namespace apt {

enum class Preset { problem1, problem2, problem3, custom };

struct ProblemConfig {
  Preset preset = Preset::problem1;
  Method method = Method::iterative;

  // [domain]
  double x_lo = 0.0, x_hi = 1.0;

  // [discretization]
  int nx = 9;
  int nv = 4;
  VelocitySet velocity_set = VelocitySet::s8_half;
  double tau = 0.0;  // 0: h^2 (iterative) or (10/11) h^2 (steady)
  double t_final = 0.05;

  // [physics], polynomial coefficients in x (F_L, F_R in |v|)
  double epsilon = 0.1;
  std::optional<std::vector<double>> sigma_S, sigma_A, Q, F_L, F_R;

  // [schrodingerization]
  int Np = 128;
  Profile profile = Profile::smooth_r;
  bool auto_domain = true;
  double L = 0.0, R = 0.0;  // lower limits when auto_domain, exact values otherwise
  double source_scale = 10.0;
  EvolutionMethod evolution = EvolutionMethod::automatic;
  double evolution_tol = 1e-10;
  int max_dim_exact = 128;  // exact diagonalization at or below this mode dimension
  RecoveryMode recovery = RecoveryMode::point;

  // [run]
  Layout layout = Layout::per_step;
  double T_evolve = 0.0;  // 0: 2 N_t
  int jobs = 1;
  std::uint64_t seed = 12345;
  std::string out_dir = "out";
};

Preset parse_preset(const std::string& s);
std::string to_string(Preset p);
Method parse_method(const std::string& s);
std::string to_string(Method m);
Layout parse_layout(const std::string& s);
std::string to_string(Layout l);
Profile parse_profile(const std::string& s);
std::string to_string(Profile p);
EvolutionMethod parse_evolution(const std::string& s);
std::string to_string(EvolutionMethod m);

// Run parameters of the three slab problems; N_p follows the problem/method pair.
ProblemConfig preset_config(Preset p, Method m, double epsilon);

// Overrides fields from an INI file with sections [domain], [discretization],
// [physics], [schrodingerization], [run]. Unknown keys are errors.
void apply_ini(ProblemConfig& cfg, const std::string& path);

// Throws ConfigError naming the offending key.
void validate(const ProblemConfig& cfg);

GridSpec grid_spec(const ProblemConfig& cfg);
TransportProblem transport_problem(const ProblemConfig& cfg);
SchrodingerSettings schrodinger_settings(const ProblemConfig& cfg, int nx);

}  // namespace apt
