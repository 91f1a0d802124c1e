#include "apt/iterative.hpp"

#include <algorithm>
#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

namespace apt {

IterationSystem build_iteration_system(const StepMatrices& sm, const ParityState& state0, int nt) {
  if (!sm.preprocessed) throw StateError("build_iteration_system: step matrices are not preprocessed");
  if (!state0.scaled) throw StateError("build_iteration_system: initial state is not scaled");
  if (nt < 0) throw std::invalid_argument("build_iteration_system: N_t must be non-negative");
  const int n = sm.nx * sm.nv;
  if (state0.r.size() != n || state0.j.size() != n)
    throw ContractViolation("build_iteration_system: state size does not match the step matrices");

  std::vector<Triplet> t;
  auto put = [&](const SpMat& m, int r0, int c0) {
    for (int r = 0; r < m.outerSize(); ++r)
      for (SpMat::InnerIterator it(m, r); it; ++it) t.emplace_back(r0 + it.row(), c0 + it.col(), it.value());
  };
  put(sm.B2, 0, 0);
  put(sm.A2, 0, n);
  put(sm.B1, n, 0);
  put(sm.A1, n, n);
  for (int i = 0; i < n; ++i) {
    if (sm.b_j(i) != 0.0) t.emplace_back(i, 2 * n, sm.b_j(i));
    if (sm.b_r(i) != 0.0) t.emplace_back(n + i, 2 * n + 1, sm.b_r(i));
  }
  t.emplace_back(2 * n, 2 * n, 1.0);
  t.emplace_back(2 * n + 1, 2 * n + 1, 1.0);

  IterationSystem sys;
  sys.n = n;
  sys.nt = nt;
  sys.C.resize(2 * n + 2, 2 * n + 2);
  sys.C.setFromTriplets(t.begin(), t.end());
  sys.x0.resize(2 * n + 2);
  sys.x0 << state0.j, state0.r, 1.0, 1.0;
  return sys;
}

ParityState state_from_augmented(const Vec& x, int n) {
  ParityState s;
  s.j = x.head(n);
  s.r = x.segment(n, n);
  s.scaled = true;
  return s;
}

Vec iterate_classical(const IterationSystem& sys) {
  Vec x = sys.x0;
  for (int k = 0; k < sys.nt; ++k) x = sys.C * x;
  return x;
}

ParityState solve_classical(const IterationSystem& sys) { return state_from_augmented(iterate_classical(sys), sys.n); }

Vec flow_continuous(const IterationSystem& sys) {
  const Mat M = (Mat(sys.C) - Mat::Identity(sys.dim(), sys.dim())) * static_cast<double>(sys.nt);
  return M.exp() * sys.x0;
}

IterativeRun solve_schrodingerized(const IterationSystem& sys, const SchrodingerSettings& settings) {
  SpMat I(sys.dim(), sys.dim());
  I.setIdentity();
  const SpMat M = sys.C - I;

  IterativeRun out;
  out.ode = solve_ode_schrodingerized(M, sys.x0, sys.s_target(), settings, 2);
  out.x = out.ode.u;
  out.state = state_from_augmented(out.x, sys.n);
  out.tail_defect = std::max(std::abs(out.x(2 * sys.n) - 1.0), std::abs(out.x(2 * sys.n + 1) - 1.0));
  return out;
}

TransportSolution to_transport_solution(const ParityState& scaled, const Discretization& disc) {
  TransportSolution s;
  s.x = disc.x_points();
  s.state = unscale_state(scaled, disc);
  s.rho = mass_density(s.state, disc);
  s.flux = Vec::Zero(disc.nx);
  for (int k = 0; k < disc.nv; ++k)
    s.flux += disc.v_weights(k) * disc.v_nodes(k) * s.state.j.segment(k * disc.nx, disc.nx);
  return s;
}

IterativeResult solve_transport_iterative(const TransportProblem& prob, const Discretization& disc,
                                          const SchrodingerSettings& settings) {
  const StepMatrices sm = preprocess(assemble_step_matrices(disc, prob));
  const IterationSystem sys = build_iteration_system(sm, scale_state(zero_state(disc), disc), disc.nt);

  IterativeResult res;
  res.run = solve_schrodingerized(sys, settings);
  res.schr = to_transport_solution(res.run.state, disc);
  res.classical = to_transport_solution(solve_classical(sys), disc);
  res.continuous = to_transport_solution(state_from_augmented(flow_continuous(sys), sys.n), disc);
  return res;
}

}  // namespace apt
