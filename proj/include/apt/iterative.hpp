#pragma once

#include <string>
#include <vector>

#include "apt/ap_scheme.hpp"
#include "apt/schrodingerize.hpp"

namespace apt {

// x^{n+1} = C x^n with x = [j; r; 1; 1] and
// C = [B2 A2 b_j 0; B1 A1 0 b_r; 0 0 1 0; 0 0 0 1].
struct IterationSystem {
  SpMat C;
  Vec x0;
  int nt = 0;
  int n = 0;  // N_v N_x

  double s_target() const { return nt; }
  int dim() const { return 2 * n + 2; }
};

IterationSystem build_iteration_system(const StepMatrices& sm, const ParityState& state0, int nt);

// Splits an augmented vector back into a scaled parity state.
ParityState state_from_augmented(const Vec& x, int n);

// C^{N_t} x0.
Vec iterate_classical(const IterationSystem& sys);
ParityState solve_classical(const IterationSystem& sys);

// exp((C - I) N_t) x0 by a dense matrix exponential.
Vec flow_continuous(const IterationSystem& sys);

struct IterativeRun {
  ParityState state;  // scaled
  Vec x;              // full augmented vector at s = N_t
  OdeSolution ode;
  double tail_defect = 0.0;  // max |x_tail - 1|
};

// dx/ds = (C - I) x evolved to s = N_t through the Schrodingerized system.
IterativeRun solve_schrodingerized(const IterationSystem& sys, const SchrodingerSettings& settings);

struct TransportSolution {
  Vec x;       // interior grid points
  Vec rho;     // mass density
  Vec flux;    // sum_k w_k v_k j_k, the first velocity moment of j
  ParityState state;  // unscaled
};

TransportSolution to_transport_solution(const ParityState& scaled, const Discretization& disc);

struct IterativeResult {
  TransportSolution schr, classical, continuous;
  IterativeRun run;
};

// assemble -> preprocess -> scale -> solve -> unscale; also runs both oracles.
IterativeResult solve_transport_iterative(const TransportProblem& prob, const Discretization& disc,
                                          const SchrodingerSettings& settings);

}  // namespace apt
