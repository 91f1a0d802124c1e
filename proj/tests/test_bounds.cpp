#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "apt/bounds.hpp"
#include "doctest.h"

using namespace apt;

namespace {

// H_bar + E reproduces H up to rounding of the summands.
double split_defect(const SplitSystem& s) {
  const Mat hb = Mat(s.H_bar), e = Mat(s.E), h = Mat(s.gs.H);
  double worst = 0.0;
  for (Eigen::Index i = 0; i < h.rows(); ++i)
    for (Eigen::Index j = 0; j < h.cols(); ++j) {
      const double scale = std::max(std::abs(hb(i, j)), std::abs(e(i, j)));
      const double d = std::abs(hb(i, j) + e(i, j) - h(i, j));
      if (d > 0.0) worst = std::max(worst, d / (scale * std::numeric_limits<double>::epsilon()));
    }
  return worst;
}

Discretization ladder_grid(int nx, int nv, int nt, double eps) {
  GridSpec g;
  g.nx = nx;
  g.nv = nv;
  g.velocity_set = VelocitySet::gauss_legendre;
  const double h = 1.0 / (nx + 1);
  g.tau = (10.0 / 11.0) * h * h;
  g.t_final = (nt - 0.5) * g.tau;
  g.epsilon = eps;
  g.method = Method::steady;
  g.require_even_nx = true;
  return build_discretization(g);
}

}  // namespace

TEST_CASE("split is exact and E vanishes in the stiff limit") {
  const Discretization d = ladder_grid(4, 2, 3, 1e-8);
  const SplitSystem s = split_system(d, problem_I());
  CHECK(s.E.nonZeros() == 0);
  CHECK(s.stiff_scale == 0.0);
  CHECK(split_defect(s) == 0.0);
}

TEST_CASE("E is of the size of the stiff weights at moderate epsilon") {
  for (double eps : {0.3, 0.1, 0.05}) {
    const Discretization d = ladder_grid(4, 2, 3, eps);
    const SplitSystem s = split_system(d, problem_I());
    CHECK(split_defect(s) <= 2.0);
    CHECK(s.stiff_scale > 0.0);
    const double ratio = max_abs(s.E) / s.stiff_scale;
    CHECK(ratio < 50.0);
  }
  CHECK_THROWS_AS(split_system(ladder_grid(4, 2, 3, 0.1), problem_II()), Unsupported);
}

TEST_CASE("closed form at t = 0 and for a single step") {
  const Discretization d = ladder_grid(4, 2, 3, 1e-8);
  const ReducedBlocks rb = reduced_blocks(d, problem_I());
  const Mat I0 = exp_Hbar_closed_form(rb.A1_bar, rb.A2_bar, 0.0, 3);
  CHECK(I0 == Mat::Identity(I0.rows(), I0.cols()));
  const Mat one = exp_Hbar_closed_form(rb.A1_bar, rb.A2_bar, 0.7, 1);
  CHECK((one - std::exp(-0.7) * Mat::Identity(one.rows(), one.cols())).cwiseAbs().maxCoeff() < 1e-16);
  CHECK_THROWS(exp_Hbar_closed_form(rb.A1_bar, rb.A2_bar, 1.0, 0));
}

TEST_CASE("closed form equals the dense exponential") {
  for (int nt : {1, 3, 8}) {
    const Discretization d = ladder_grid(4, 2, nt, 1e-8);
    const SplitSystem s = split_system(d, problem_I());
    for (double t : {0.5, 1.0, 5.0}) {
      const Mat cf = exp_Hbar_closed_form(s.A1_bar, s.A2_bar, t, nt);
      CHECK((cf - dense_exp(s.H_bar, t)).cwiseAbs().maxCoeff() <= 1e-10);
    }
  }
}

TEST_CASE("bound on the exponential holds on sampled T") {
  const Discretization d = ladder_grid(4, 2, 8, 1e-8);
  const SplitSystem s = split_system(d, problem_I());
  const BoundReport rep = matrix_2norms(reduced_blocks(d, problem_I()), d);
  REQUIRE(rep.contraction);
  for (int i = 0; i < 20; ++i) {
    const double T = 0.25 * std::pow(1.35, i);
    CHECK(norm2(dense_exp(s.H_bar, T)) <= rep.exp_bound(T));
  }
  CHECK_THROWS_AS(bound_exp_norm(1.0, 1.0, 1.0), std::domain_error);
}

TEST_CASE("norm2 agrees between the SVD and power-iteration paths") {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const int n = 1500;
  std::vector<Triplet> t;
  for (int i = 0; i < n; ++i) {
    t.emplace_back(i, i, 0.5 * u(gen));
    if (i + 1 < n) t.emplace_back(i, i + 1, 0.3 * u(gen));
  }
  t.emplace_back(10, 10, 3.0);
  SpMat big(n, n);
  big.setFromTriplets(t.begin(), t.end());
  const double p = norm2(big);
  const Mat blk = Mat(big).topLeftCorner(40, 40);
  CHECK(p >= norm2(blk) - 1e-7);
  CHECK(p == doctest::Approx(Eigen::JacobiSVD<Mat>(Mat(big)).singularValues()(0)).epsilon(1e-6));

  Mat small(2, 2);
  small << 3, 0, 4, 0;
  CHECK(norm2(small) == doctest::Approx(5.0));
}

TEST_CASE("spectra of L_h and D_h") {
  const EigLemmaReport r2 = eig_lemma_checks(2);
  CHECK(r2.L_eigs(0) == doctest::Approx(-3.0));
  CHECK(r2.L_eigs(1) == doctest::Approx(-1.0));
  for (int nx = 2; nx <= 64; ++nx) {
    const EigLemmaReport r = eig_lemma_checks(nx);
    CHECK(r.load_bearing_ok());
    CHECK(r.classical_formula_L);
    CHECK(r.classical_formula_D);
  }
  CHECK_THROWS(eig_lemma_checks(1));
}

TEST_CASE("reduced norms on a small ladder") {
  for (int nx : {4, 8}) {
    const Discretization d = ladder_grid(nx, 4, static_cast<int>(std::ceil(11.0 / 10.0 * (nx + 1) * (nx + 1))), 1e-8);
    const BoundReport rep = matrix_2norms(reduced_blocks(d, problem_I()), d);
    CHECK(rep.contraction);
    CHECK(rep.lower_ok);
    CHECK(rep.norm_A1_bar >= rep.lower_A1_nv);
    CHECK(rep.contraction_gap * rep.nt > 1.0);
    CHECK(rep.T_estimate > 0.0);
  }
}

TEST_CASE("perturbation bound at moderate epsilon") {
  const Discretization d = ladder_grid(4, 2, 6, 0.02);
  const SplitSystem s = split_system(d, problem_I());
  const BoundReport rep = matrix_2norms(ReducedBlocks{s.A1_bar, s.A2_bar}, d);
  const double nE = norm2(s.E);
  REQUIRE(nE > 0.0);
  for (double T : {0.5, 2.0, 8.0, 30.0})
    CHECK(perturbation_error_measured(s, T) <= perturbation_error_bound(nE, rep.norm_A1_bar, rep.norm_A2_bar, T));
}

TEST_CASE("Weyl, first-order perturbation and block-norm checks") {
  const MatrixLemmaReport rep = weyl_and_perturbation_checks(12, 30, 99);
  CHECK(rep.trials == 30);
  CHECK(rep.weyl_violations == 0);
  CHECK(rep.perturbation_order == doctest::Approx(2.0).epsilon(0.05));
  CHECK(rep.block_norm_violations == 0);
  CHECK_THROWS(weyl_and_perturbation_checks(65, 1, 1));
}
