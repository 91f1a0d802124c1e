#include <cmath>
#include <random>
#include <vector>

#include "apt/ap_scheme.hpp"
#include "doctest.h"

using namespace apt;

namespace {

Discretization grid(double eps, int nx = 9, VelocitySet vs = VelocitySet::s8_half, int nv = 4) {
  GridSpec g;
  g.nx = nx;
  g.nv = nv;
  g.velocity_set = vs;
  const double h = 1.0 / (nx + 1);
  g.tau = h * h;
  g.t_final = 5 * g.tau;
  g.epsilon = eps;
  return build_discretization(g);
}

ParityState random_state(const Discretization& d, unsigned seed) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  ParityState s{Vec(d.n()), Vec(d.n()), false};
  for (int i = 0; i < d.n(); ++i) {
    s.r(i) = u(gen);
    s.j(i) = u(gen);
  }
  return s;
}

// One relaxation + convection step written with explicit ghost cells at x_0
// and x_{N_x+1}; sigma_S = 1, sigma_A = 0, constant source q.
ParityState ghost_cell_step(const ParityState& s, const Discretization& d, double q, double (*FL)(double),
                            double (*FR)(double)) {
  const int nx = d.nx, nv = d.nv;
  const double h = d.h, tau = d.tau, eps = d.epsilon, lam = tau / h;
  const long double a = static_cast<long double>(tau) / (static_cast<long double>(eps) * eps);
  const double b1 = static_cast<double>(std::exp(-a));
  const double b2 = static_cast<double>(1.0L - (1.0L + a) * std::exp(-a));
  const double b3 = static_cast<double>(a * std::exp(-a) * (1.0L - static_cast<long double>(eps) * eps));

  auto r_ghosts = [&](const std::vector<double>& rk, double v) {
    const double d0 = eps * v + h;
    std::vector<double> ext(nx + 2);
    for (int m = 0; m < nx; ++m) ext[m + 1] = rk[m];
    ext[0] = eps * v / d0 * rk[0] + h / d0 * FL(v);
    ext[nx + 1] = eps * v / d0 * rk[nx - 1] + h / d0 * FR(v);
    return ext;
  };
  auto j_ghosts = [&](const std::vector<double>& rk, const std::vector<double>& jk, double v) {
    const double d0 = eps * v + h;
    std::vector<double> ext(nx + 2);
    for (int m = 0; m < nx; ++m) ext[m + 1] = jk[m];
    ext[0] = -v / d0 * rk[0] + v / d0 * FL(v);
    ext[nx + 1] = v / d0 * rk[nx - 1] - v / d0 * FR(v);
    return ext;
  };
  auto slice = [&](const Vec& x, int k) { return std::vector<double>(x.data() + k * nx, x.data() + (k + 1) * nx); };

  // relaxation
  std::vector<std::vector<double>> rext(nv);
  std::vector<double> rho_ext(nx + 2, 0.0);
  for (int k = 0; k < nv; ++k) {
    rext[k] = r_ghosts(slice(s.r, k), d.v_nodes(k));
    for (int m = 0; m < nx + 2; ++m) rho_ext[m] += d.v_weights(k) * rext[k][m];
  }
  ParityState mid{Vec(d.n()), Vec(d.n()), false};
  for (int k = 0; k < nv; ++k) {
    const double v = d.v_nodes(k);
    for (int m = 1; m <= nx; ++m) {
      const int i = k * nx + m - 1;
      mid.r(i) = b1 * s.r(i) + (1.0 - b1) * rho_ext[m];
      mid.j(i) = b1 * s.j(i) - b2 * v * (rho_ext[m + 1] - rho_ext[m - 1]) / (2 * h) -
                 b3 * v * (rext[k][m + 1] - rext[k][m - 1]) / (2 * h);
    }
  }

  // convection
  ParityState out{Vec(d.n()), Vec(d.n()), false};
  for (int k = 0; k < nv; ++k) {
    const double v = d.v_nodes(k);
    const auto rk = slice(mid.r, k), jk = slice(mid.j, k);
    const auto R = r_ghosts(rk, v), J = j_ghosts(rk, jk, v);
    for (int m = 1; m <= nx; ++m) {
      const int i = k * nx + m - 1;
      out.r(i) = R[m] - lam * v / 2 * (J[m + 1] - J[m - 1]) + lam * v / 2 * (R[m + 1] - 2 * R[m] + R[m - 1]) + tau * q;
      out.j(i) = J[m] - lam * v / 2 * (R[m + 1] - R[m - 1]) + lam * v / 2 * (J[m + 1] - 2 * J[m] + J[m - 1]);
    }
  }
  return out;
}

double one(double) { return 1.0; }
double zero(double) { return 0.0; }
double ident(double v) { return v; }
double half(double) { return 0.5; }

}  // namespace

TEST_CASE("betas against the extended-precision closed form") {
  CHECK(betas(0.01, 0.1, 1.0, 1.0).b1 == doctest::Approx(0.36787944117144233).epsilon(1e-15));
  CHECK(betas(0.01, 0.1, 1.0, 1.0).b2 == doctest::Approx(0.26424111765711533).epsilon(1e-14));
  CHECK(betas(0.01, 0.1, 1.0, 1.0).b3 == doctest::Approx(0.36420064676).epsilon(1e-10));

  for (double a : {1e-12, 1e-6, 1e-3, 0.05, 0.099, 0.1, 0.5, 3.0, 40.0, 600.0}) {
    const double eps = 0.3, tau = a * eps * eps;
    const Betas b = betas(tau, eps, 1.0, 1.0);
    const long double al = static_cast<long double>(tau) / (0.3L * 0.3L);
    const long double bracket = al < 0.01L ? al * al / 2 - al * al * al / 3 + al * al * al * al / 8 - al * al * al * al * al / 30
                                           : 1.0L - (1.0L + al) * std::exp(-al);
    CHECK(b.b1 == doctest::Approx(static_cast<double>(std::exp(-al))).epsilon(1e-14));
    CHECK(b.b2 == doctest::Approx(static_cast<double>(bracket)).epsilon(1e-12));
    CHECK(b.b3 == doctest::Approx(static_cast<double>(al * std::exp(-al) * (1.0L - 0.09L))).epsilon(1e-13));
  }
}

TEST_CASE("betas reach the stiff limit without overflow") {
  const Betas b = betas(0.01, 1e-8, 1.0, 1.0);
  CHECK(b.b1 == 0.0);
  CHECK(b.b2 == 1.0);
  CHECK(b.b3 == 0.0);
  const Betas c = betas(0.01, 1e-8, 2.0, 4.0);
  CHECK(c.b2 == doctest::Approx(0.25));
  CHECK_THROWS(betas(0.0, 0.1, 1.0, 1.0));
}

TEST_CASE("composed step matrices equal the ghost-cell stencil") {
  struct Case {
    double eps, q;
    double (*FL)(double);
    double (*FR)(double);
    std::vector<double> ql, fl, fr;
  };
  const Case cases[] = {
      {0.1, 0.0, one, zero, {0.0}, {1.0}, {0.0}},
      {1e-8, 0.0, one, zero, {0.0}, {1.0}, {0.0}},
      {0.1, 1.0, ident, zero, {1.0}, {0.0, 1.0}, {0.0}},
      {0.7, 1.0, ident, half, {1.0}, {0.0, 1.0}, {0.5}},
      {1e-4, 0.0, one, half, {0.0}, {1.0}, {0.5}},
  };
  for (const auto& c : cases) {
    const Discretization d = grid(c.eps);
    const TransportProblem p = make_problem({1.0}, {0.0}, c.ql, c.fl, c.fr);
    const StepMatrices sm = assemble_step_matrices(d, p);
    for (unsigned seed = 1; seed <= 3; ++seed) {
      const ParityState s = random_state(d, seed);
      const ParityState a = sm.apply(s);
      const ParityState g = ghost_cell_step(s, d, c.q, c.FL, c.FR);
      CHECK((a.r - g.r).lpNorm<Eigen::Infinity>() < 1e-12);
      CHECK((a.j - g.j).lpNorm<Eigen::Infinity>() < 1e-12);
    }
  }
}

TEST_CASE("step matrices equal relaxation followed by convection") {
  const TransportProblem p = problem_II();
  for (double eps : {1.0, 0.1, 1e-3, 1e-8}) {
    const Discretization d = grid(eps);
    const BuildingBlocks b = build_blocks(d, p);
    const StepMatrices sm = compose_step_matrices(b);
    const ParityState s = random_state(d, 11);
    const ParityState a = sm.apply(s);
    const ParityState seq = convection_step(relaxation_step(s, b), b);
    CHECK((a.r - seq.r).lpNorm<Eigen::Infinity>() < 1e-12);
    CHECK((a.j - seq.j).lpNorm<Eigen::Infinity>() < 1e-12);
  }
}

TEST_CASE("relaxation conserves the mass density") {
  const Discretization d = grid(0.05);
  const BuildingBlocks b = build_blocks(d, problem_I());
  const ParityState s = random_state(d, 4);
  const ParityState out = relaxation_step(s, b);
  CHECK((mass_density(out, d) - mass_density(s, d)).norm() < 1e-14);
}

TEST_CASE("stiff relaxation makes r isotropic") {
  const Discretization d = grid(1e-8);
  const BuildingBlocks b = build_blocks(d, problem_I());
  const ParityState s = random_state(d, 5);
  const ParityState out = relaxation_step(s, b);
  const Vec rho = mass_density(s, d);
  for (int k = 0; k < d.nv; ++k) CHECK((out.r.segment(k * d.nx, d.nx) - rho).norm() < 1e-14);
}

TEST_CASE("preprocessing is a similarity of the scaled state") {
  const Discretization d = grid(0.1);
  const StepMatrices sm = assemble_step_matrices(d, problem_III());
  const StepMatrices pp = preprocess(sm);
  CHECK(pp.preprocessed);
  const ParityState s = random_state(d, 9);
  const ParityState direct = sm.apply(s);
  const ParityState via = unscale_state(pp.apply(scale_state(s, d)), d);
  CHECK((direct.r - via.r).norm() < 1e-12);
  CHECK((direct.j - via.j).norm() < 1e-12);
  CHECK(pp.B2.isApprox(sm.B2));
}

TEST_CASE("state errors") {
  const Discretization d = grid(0.1);
  const StepMatrices sm = assemble_step_matrices(d, problem_I());
  const StepMatrices pp = preprocess(sm);
  CHECK_THROWS_AS(preprocess(pp), StateError);
  const ParityState s = zero_state(d);
  const ParityState sc = scale_state(s, d);
  CHECK_THROWS_AS(scale_state(sc, d), StateError);
  CHECK_THROWS_AS(unscale_state(s, d), StateError);
  CHECK_THROWS_AS(pp.apply(s), StateError);
  CHECK_THROWS_AS(sm.apply(sc), StateError);
  CHECK_THROWS_AS(mass_density(sc, d), StateError);
  const BuildingBlocks b = build_blocks(d, problem_I());
  CHECK_THROWS_AS(relaxation_step(sc, b), StateError);
  CHECK_THROWS_AS(convection_step(ParityState{Vec::Zero(3), Vec::Zero(3), false}, b), ContractViolation);
}

TEST_CASE("block sizes and sparsity pattern") {
  const Discretization d = grid(0.1, 6, VelocitySet::gauss_legendre, 3);
  const StepMatrices sm = assemble_step_matrices(d, problem_I());
  CHECK(sm.A1.rows() == 18);
  CHECK(sm.B2.cols() == 18);
  CHECK(sm.b_r.size() == 18);
  // velocity coupling enters through W only: each row touches every velocity block
  for (int row = 0; row < 18; ++row) {
    int blocks = 0;
    for (int k = 0; k < 3; ++k)
      if (Mat(sm.A1).row(row).segment(k * 6, 6).cwiseAbs().maxCoeff() > 0) ++blocks;
    CHECK(blocks == 3);
  }
}
