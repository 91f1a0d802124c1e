#pragma once

#include <ostream>
#include <vector>

#include "apt/ap_scheme.hpp"
#include "apt/iterative.hpp"
#include "apt/schrodingerize.hpp"

namespace apt {

// per_step: y = [y^{N_t}; ...; y^1] with y^k = [r^k; j^k]; H = I - (A on the block
//           superdiagonal), A = [A1 B1; A2 B2], F = [b; ...; b; b + A y^0].
// split_rj: y = [j^{N_t}; ...; j^1; r^{N_t}; ...; r^1], the same equations reordered.
enum class Layout { per_step, split_rj };

struct GlobalSystem {
  Layout layout = Layout::per_step;
  SpMat H;
  Vec F;
  int nt = 0;
  int n = 0;  // N_v N_x

  long dim() const { return 2L * n * nt; }
};

GlobalSystem build_global_system(const StepMatrices& sm, const ParityState& state0, int nt, Layout layout);

// Index of entry (step k in 1..N_t, component c in 0..2n-1 with r first) of y.
long trajectory_index(const GlobalSystem& gs, int step, int comp);

// Trajectory y^1..y^{N_t} as scaled states; element k-1 is step k.
std::vector<ParityState> unpack_trajectory(const GlobalSystem& gs, const Vec& y);

// Reorders a vector between the two layouts.
Vec to_per_step(const GlobalSystem& gs, const Vec& y);

// Block back-substitution of H y = F.
Vec solve_direct(const GlobalSystem& gs);

// Exact y(T) of dy/dT = F - H y. I - H is nilpotent, so exp(-HT) is a finite sum.
Vec steady_flow(const GlobalSystem& gs, const Vec& y0, double T);

// exp(-H T) v by the same finite sum.
Vec apply_exp_minus_HT(const GlobalSystem& gs, const Vec& v, double T);

struct SteadyRunConfig {
  double T_evolve = 0.0;  // 0 selects 2 N_t
  double delta = 0.0;     // 0 selects 1 / N_x
  bool estimate_T = false;
  HomogenizeVariant variant = HomogenizeVariant::source;
};

struct SteadyRun {
  Vec y;
  double T = 0.0;
  double tail = 0.0;  // recovered augmented component
  OdeSolution ode;
};

// y(T) of dy/dT = F - H y from y0 (empty means zero) via homogenization and
// Schrodingerization.
SteadyRun solve_steady_schrodingerized(const GlobalSystem& gs, double T, const SchrodingerSettings& settings,
                                       const Vec& y0 = Vec(),
                                       HomogenizeVariant variant = HomogenizeVariant::source);

// T = log((2 + a2/a1)/delta) / (1 - a1).
double estimate_evolution_time(double norm_A1, double norm_A2, double delta);

struct SteadyResult {
  GlobalSystem gs;
  Vec y_direct, y_schr;
  SteadyRun run;
  std::vector<TransportSolution> direct, schr;  // per step 1..N_t
};

SteadyResult solve_transport_steady(const TransportProblem& prob, const Discretization& disc,
                                    const SchrodingerSettings& settings, Layout layout, double T);

// step,x,rho_direct,rho_schr,flux_direct,flux_schr
void write_trajectory_csv(std::ostream& os, const SteadyResult& res, const Discretization& disc);

}  // namespace apt
