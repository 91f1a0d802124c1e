#include <cmath>
#include <random>

#include <unsupported/Eigen/MatrixFunctions>

#include "apt/iterative.hpp"
#include "doctest.h"

using namespace apt;

namespace {

Discretization grid(double eps, int nx = 9, int nt = 5) {
  GridSpec g;
  g.nx = nx;
  g.nv = 4;
  g.velocity_set = VelocitySet::s8_half;
  const double h = 1.0 / (nx + 1);
  g.tau = h * h;
  g.t_final = nt * g.tau;
  g.epsilon = eps;
  return build_discretization(g);
}

ParityState random_scaled(int n, unsigned seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> nd;
  ParityState s{Vec(n), Vec(n), true};
  for (int i = 0; i < n; ++i) {
    s.r(i) = nd(gen);
    s.j(i) = nd(gen);
  }
  return s;
}

// Small preprocessed step matrices with random entries of size ~scale.
StepMatrices random_step(int nx, int nv, unsigned seed, double scale) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> nd;
  const int n = nx * nv;
  auto rnd = [&] {
    Mat m(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) m(i, j) = scale * nd(gen);
    return SpMat(m.sparseView());
  };
  StepMatrices sm;
  sm.nx = nx;
  sm.nv = nv;
  sm.A1 = rnd();
  sm.B1 = rnd();
  sm.A2 = rnd();
  sm.B2 = rnd();
  sm.b_r = Vec(n);
  sm.b_j = Vec(n);
  for (int i = 0; i < n; ++i) {
    sm.b_r(i) = nd(gen);
    sm.b_j(i) = nd(gen);
  }
  sm.weights = Vec::Constant(nv, 1.0 / nv);
  sm.preprocessed = true;
  return sm;
}

SchrodingerSettings settings(int Np) {
  SchrodingerSettings s;
  s.Np = Np;
  s.profile.kind = Profile::smooth_r;
  s.source_scale = 10.0;
  return s;
}

}  // namespace

TEST_CASE("one application of C is one step of the scheme") {
  const Discretization d = grid(0.1);
  const StepMatrices sm = preprocess(assemble_step_matrices(d, problem_III()));
  const ParityState s = random_scaled(d.n(), 1);
  const IterationSystem sys = build_iteration_system(sm, s, 1);
  CHECK(sys.dim() == 2 * d.n() + 2);
  CHECK(sys.C.rows() == sys.dim());
  const ParityState a = solve_classical(sys);
  const ParityState b = sm.apply(s);
  CHECK((a.r - b.r).norm() < 1e-13);
  CHECK((a.j - b.j).norm() < 1e-13);
}

TEST_CASE("N_t steps of C equal N_t applications of the step") {
  const Discretization d = grid(1e-3);
  const StepMatrices sm = preprocess(assemble_step_matrices(d, problem_II()));
  const ParityState s0 = random_scaled(d.n(), 2);
  const IterationSystem sys = build_iteration_system(sm, s0, 7);
  ParityState s = s0;
  for (int k = 0; k < 7; ++k) s = sm.apply(s);
  const Vec x = iterate_classical(sys);
  CHECK((state_from_augmented(x, sys.n).r - s.r).norm() < 1e-12 * (1 + s.r.norm()));
  CHECK(x(2 * sys.n) == 1.0);
  CHECK(x(2 * sys.n + 1) == 1.0);
}

TEST_CASE("zero horizon returns the initial state") {
  const StepMatrices sm = random_step(2, 2, 3, 0.2);
  const ParityState s = random_scaled(4, 4);
  const IterationSystem sys = build_iteration_system(sm, s, 0);
  CHECK((iterate_classical(sys) - sys.x0).norm() == 0.0);
  CHECK((flow_continuous(sys) - sys.x0).norm() < 1e-15);
}

TEST_CASE("zero dynamics produce the source after one step") {
  StepMatrices sm = random_step(2, 2, 5, 0.0);
  const ParityState s = random_scaled(4, 6);
  const ParityState out = solve_classical(build_iteration_system(sm, s, 3));
  CHECK((out.r - sm.b_r).norm() == 0.0);
  CHECK((out.j - sm.b_j).norm() == 0.0);
}

TEST_CASE("input contracts") {
  const Discretization d = grid(0.1);
  const StepMatrices raw = assemble_step_matrices(d, problem_I());
  const StepMatrices pp = preprocess(raw);
  const ParityState z = zero_state(d);
  CHECK_THROWS_AS(build_iteration_system(raw, scale_state(z, d), 2), StateError);
  CHECK_THROWS_AS(build_iteration_system(pp, z, 2), StateError);
  CHECK_THROWS_AS(build_iteration_system(pp, random_scaled(3, 1), 2), ContractViolation);
  CHECK_THROWS(build_iteration_system(pp, scale_state(z, d), -1));
}

TEST_CASE("Schrodingerized flow of a random C matches the dense exponential") {
  for (unsigned seed : {7u, 8u, 9u}) {
    const StepMatrices sm = random_step(2, 2, seed, 0.25);
    const IterationSystem sys = build_iteration_system(sm, random_scaled(4, seed + 10), 3);
    REQUIRE(sys.dim() == 10);
    const Vec ref = flow_continuous(sys);
    const IterativeRun run = solve_schrodingerized(sys, settings(1024));
    CHECK((run.x - ref).norm() < 1e-4 * ref.norm());
    CHECK(run.tail_defect < 1e-4);
    CHECK(run.ode.hermiticity_defect <= 1e-12);
  }
}

TEST_CASE("Schrodingerized solve is linear in the initial state") {
  const StepMatrices sm = random_step(2, 2, 31, 0.25);
  StepMatrices hom = sm;
  hom.b_r.setZero();
  hom.b_j.setZero();
  const ParityState a = random_scaled(4, 32), b = random_scaled(4, 33);
  ParityState c{2.0 * a.r - 0.5 * b.r, 2.0 * a.j - 0.5 * b.j, true};
  const auto xa = solve_schrodingerized(build_iteration_system(hom, a, 2), settings(256)).x;
  const auto xb = solve_schrodingerized(build_iteration_system(hom, b, 2), settings(256)).x;
  const auto xc = solve_schrodingerized(build_iteration_system(hom, c, 2), settings(256)).x;
  const Vec comb = 2.0 * xa - 0.5 * xb;
  CHECK((xc.head(8) - comb.head(8)).norm() < 1e-10 * (1.0 + xc.norm()));
}

TEST_CASE("transport pipeline tracks the continuous embedding") {
  const Discretization d = grid(0.1);
  const IterativeResult res = solve_transport_iterative(problem_I(), d, settings(128));
  const double rel = (res.schr.rho - res.continuous.rho).norm() / res.continuous.rho.norm();
  CHECK(rel < 1e-3);
  CHECK(res.run.tail_defect < 1e-3);
  CHECK(res.classical.rho.minCoeff() >= 0.0);
}

TEST_CASE("flux is the first velocity moment of the unscaled j") {
  const Discretization d = grid(0.1);
  const ParityState raw{Vec::Ones(d.n()), Vec::LinSpaced(d.n(), 0.0, 1.0), false};
  const TransportSolution s = to_transport_solution(scale_state(raw, d), d);
  for (int m = 0; m < d.nx; ++m) {
    double f = 0.0;
    for (int k = 0; k < d.nv; ++k) f += d.v_weights(k) * d.v_nodes(k) * raw.j(k * d.nx + m);
    CHECK(s.flux(m) == doctest::Approx(f).epsilon(1e-13));
    CHECK(s.rho(m) == doctest::Approx(1.0).epsilon(1e-13));
  }
  CHECK((s.state.j - raw.j).norm() < 1e-13);
}
