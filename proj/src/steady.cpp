#include "apt/steady.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <stdexcept>

namespace apt {

namespace {

// Inverse of trajectory_index: the time step an entry of y belongs to.
int step_of(const GlobalSystem& gs, long idx) {
  const int n = gs.n, nt = gs.nt;
  long i;
  if (gs.layout == Layout::per_step) {
    i = idx / (2L * n);
  } else {
    i = idx < static_cast<long>(nt) * n ? idx / n : (idx - static_cast<long>(nt) * n) / n;
  }
  return nt - static_cast<int>(i);
}

SpMat one_step_matrix(const StepMatrices& sm) {
  const int n = sm.nx * sm.nv;
  std::vector<Triplet> t;
  auto put = [&](const SpMat& m, int r0, int c0) {
    for (int r = 0; r < m.outerSize(); ++r)
      for (SpMat::InnerIterator it(m, r); it; ++it) t.emplace_back(r0 + it.row(), c0 + it.col(), it.value());
  };
  put(sm.A1, 0, 0);
  put(sm.B1, 0, n);
  put(sm.A2, n, 0);
  put(sm.B2, n, n);
  SpMat A(2 * n, 2 * n);
  A.setFromTriplets(t.begin(), t.end());
  return A;
}

}  // namespace

long trajectory_index(const GlobalSystem& gs, int step, int comp) {
  const long n = gs.n, i = gs.nt - step;
  if (gs.layout == Layout::per_step) return i * 2 * n + comp;
  if (comp < n) return gs.nt * n + i * n + comp;
  return i * n + (comp - n);
}

GlobalSystem build_global_system(const StepMatrices& sm, const ParityState& state0, int nt, Layout layout) {
  if (!sm.preprocessed) throw StateError("build_global_system: step matrices are not preprocessed");
  if (!state0.scaled) throw StateError("build_global_system: initial state is not scaled");
  if (nt < 1) throw std::invalid_argument("build_global_system: N_t must be positive");
  const int n = sm.nx * sm.nv;
  if (state0.r.size() != n || state0.j.size() != n)
    throw ContractViolation("build_global_system: state size does not match the step matrices");

  GlobalSystem gs;
  gs.layout = layout;
  gs.nt = nt;
  gs.n = n;
  const SpMat A = one_step_matrix(sm);
  Vec b(2 * n), y0(2 * n);
  b << sm.b_r, sm.b_j;
  y0 << state0.r, state0.j;
  const Vec first = b + A * y0;

  std::vector<Triplet> t;
  t.reserve(static_cast<size_t>(nt) * (A.nonZeros() + 2 * n));
  gs.F.resize(gs.dim());
  for (int s = 1; s <= nt; ++s) {
    for (int c = 0; c < 2 * n; ++c) {
      const long row = trajectory_index(gs, s, c);
      t.emplace_back(row, row, 1.0);
      gs.F(row) = s == 1 ? first(c) : b(c);
      if (s == 1) continue;
      for (SpMat::InnerIterator it(A, c); it; ++it)
        t.emplace_back(row, trajectory_index(gs, s - 1, static_cast<int>(it.col())), -it.value());
    }
  }
  gs.H.resize(gs.dim(), gs.dim());
  gs.H.setFromTriplets(t.begin(), t.end());
  return gs;
}

std::vector<ParityState> unpack_trajectory(const GlobalSystem& gs, const Vec& y) {
  if (y.size() != gs.dim()) throw ContractViolation("unpack_trajectory: wrong vector length");
  std::vector<ParityState> out(gs.nt);
  for (int s = 1; s <= gs.nt; ++s) {
    ParityState& st = out[s - 1];
    st.r.resize(gs.n);
    st.j.resize(gs.n);
    st.scaled = true;
    for (int c = 0; c < gs.n; ++c) {
      st.r(c) = y(trajectory_index(gs, s, c));
      st.j(c) = y(trajectory_index(gs, s, gs.n + c));
    }
  }
  return out;
}

Vec to_per_step(const GlobalSystem& gs, const Vec& y) {
  if (gs.layout == Layout::per_step) return y;
  Vec out(y.size());
  GlobalSystem ps = gs;
  ps.layout = Layout::per_step;
  for (int s = 1; s <= gs.nt; ++s)
    for (int c = 0; c < 2 * gs.n; ++c) out(trajectory_index(ps, s, c)) = y(trajectory_index(gs, s, c));
  return out;
}

Vec solve_direct(const GlobalSystem& gs) {
  Vec y = Vec::Zero(gs.dim());
  for (int s = 1; s <= gs.nt; ++s) {
    for (int c = 0; c < 2 * gs.n; ++c) {
      const long row = trajectory_index(gs, s, c);
      double diag = 0.0, acc = gs.F(row);
      for (SpMat::InnerIterator it(gs.H, row); it; ++it) {
        if (it.col() == row) {
          diag = it.value();
        } else if (step_of(gs, it.col()) < s) {
          acc -= it.value() * y(it.col());
        } else if (it.value() != 0.0) {
          throw ContractViolation("solve_direct: H is not block upper triangular in time");
        }
      }
      if (diag != 1.0) throw ContractViolation("solve_direct: diagonal block is not the identity");
      y(row) = acc;
    }
  }
  return y;
}

Vec apply_exp_minus_HT(const GlobalSystem& gs, const Vec& v, double T) {
  if (!(T >= 0.0)) throw std::invalid_argument("apply_exp_minus_HT: T must be non-negative");
  SpMat I(gs.dim(), gs.dim());
  I.setIdentity();
  const SpMat N = I - gs.H;
  Vec term = v;
  Vec out = std::exp(-T) * v;
  for (int k = 1; k < gs.nt; ++k) {
    term = N * term;
    if (T == 0.0) break;
    out += std::exp(-T + k * std::log(T) - std::lgamma(k + 1.0)) * term;
  }
  return out;
}

Vec steady_flow(const GlobalSystem& gs, const Vec& y0, double T) {
  const Vec y_inf = solve_direct(gs);
  const Vec start = y0.size() == 0 ? Vec::Zero(gs.dim()) : y0;
  return y_inf + apply_exp_minus_HT(gs, start - y_inf, T);
}

SteadyRun solve_steady_schrodingerized(const GlobalSystem& gs, double T, const SchrodingerSettings& settings,
                                       const Vec& y0, HomogenizeVariant variant) {
  if (!(T > 0.0)) throw std::invalid_argument("solve_steady_schrodingerized: T must be positive");
  const long N = gs.dim();
  if (y0.size() != 0 && y0.size() != N) throw ContractViolation("solve_steady_schrodingerized: bad y0 length");
  const SpMat M = homogenize(SpMat(-gs.H), gs.F, variant);
  Vec u0 = Vec::Zero(N + 1);
  if (y0.size() != 0) u0.head(N) = y0;
  u0(N) = 1.0;

  SteadyRun run;
  run.T = T;
  run.ode = solve_ode_schrodingerized(M, u0, T, settings, 1);
  run.y = run.ode.u.head(N);
  run.tail = run.ode.u(N);
  return run;
}

double estimate_evolution_time(double norm_A1, double norm_A2, double delta) {
  if (!(norm_A1 < 1.0)) throw std::domain_error("no contraction; steady-state method inapplicable");
  if (!(norm_A1 > 0.0) || norm_A2 < 0.0) throw std::invalid_argument("estimate_evolution_time: bad norms");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("estimate_evolution_time: delta must lie in (0,1)");
  return std::log((2.0 + norm_A2 / norm_A1) / delta) / (1.0 - norm_A1);
}

SteadyResult solve_transport_steady(const TransportProblem& prob, const Discretization& disc,
                                    const SchrodingerSettings& settings, Layout layout, double T) {
  const StepMatrices sm = preprocess(assemble_step_matrices(disc, prob));
  SteadyResult res;
  res.gs = build_global_system(sm, scale_state(zero_state(disc), disc), disc.nt, layout);
  res.y_direct = solve_direct(res.gs);
  res.run = solve_steady_schrodingerized(res.gs, T > 0.0 ? T : 2.0 * disc.nt, settings);
  res.y_schr = res.run.y;
  for (const auto& st : unpack_trajectory(res.gs, res.y_direct)) res.direct.push_back(to_transport_solution(st, disc));
  for (const auto& st : unpack_trajectory(res.gs, res.y_schr)) res.schr.push_back(to_transport_solution(st, disc));
  return res;
}

void write_trajectory_csv(std::ostream& os, const SteadyResult& res, const Discretization& disc) {
  os << "step,t,x,rho_direct,rho_schr,flux_direct,flux_schr\n";
  os << std::setprecision(17);
  for (size_t s = 0; s < res.direct.size(); ++s) {
    const auto& d = res.direct[s];
    const auto& q = res.schr[s];
    for (int m = 0; m < disc.nx; ++m)
      os << s + 1 << ',' << (s + 1) * disc.tau << ',' << d.x(m) << ',' << d.rho(m) << ',' << q.rho(m) << ','
         << d.flux(m) << ',' << q.flux(m) << '\n';
  }
}

}  // namespace apt
