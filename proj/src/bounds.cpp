#include "apt/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <unsupported/Eigen/MatrixFunctions>

namespace apt {

namespace {

Betas stiff_limit(const Discretization& disc, const TransportProblem& prob) {
  return {0.0, 1.0 / prob.sigma(disc.x_lo, disc.epsilon), 0.0};
}

void require_constant(const TransportProblem& prob) {
  if (!prob.constant_coefficient)
    throw Unsupported("spectral bounds: only constant-coefficient problems are covered");
}

Mat tridiag_dense(int n, double lo, double d, double up) {
  Mat m = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    m(i, i) = d;
    if (i > 0) m(i, i - 1) = lo;
    if (i + 1 < n) m(i, i + 1) = up;
  }
  return m;
}

bool same_sorted(Vec a, Vec b, double tol) {
  if (a.size() != b.size()) return false;
  std::sort(a.data(), a.data() + a.size());
  std::sort(b.data(), b.data() + b.size());
  return (a - b).cwiseAbs().maxCoeff() <= tol;
}

double power_norm2(const std::function<Vec(const Vec&)>& apply, const std::function<Vec(const Vec&)>& apply_t,
                   Eigen::Index cols) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.5, 1.5);
  Vec x(cols);
  for (Eigen::Index i = 0; i < cols; ++i) x(i) = u(rng);
  x.normalize();
  double sigma2 = 0.0;
  for (int it = 0; it < 10000; ++it) {
    Vec y = apply_t(apply(x));
    const double s = y.norm();
    if (s == 0.0) return 0.0;
    x = y / s;
    if (std::abs(s - sigma2) <= 1e-8 * s) {
      sigma2 = s;
      break;
    }
    sigma2 = s;
  }
  return std::sqrt(sigma2);
}

}  // namespace

ReducedBlocks reduced_blocks(const Discretization& disc, const TransportProblem& prob) {
  require_constant(prob);
  const StepMatrices sm = preprocess(assemble_step_matrices(disc, prob, stiff_limit(disc, prob)));
  return {Mat(sm.A1), Mat(sm.A2)};
}

SplitSystem split_system(const Discretization& disc, const TransportProblem& prob) {
  require_constant(prob);
  const ParityState zero = scale_state(zero_state(disc), disc);
  const StepMatrices sm = preprocess(assemble_step_matrices(disc, prob));
  const StepMatrices sm_bar = preprocess(assemble_step_matrices(disc, prob, stiff_limit(disc, prob)));

  SplitSystem s;
  s.gs = build_global_system(sm, zero, disc.nt, Layout::split_rj);
  const GlobalSystem gs_bar = build_global_system(sm_bar, zero, disc.nt, Layout::split_rj);
  s.A1_bar = Mat(sm_bar.A1);
  s.A2_bar = Mat(sm_bar.A2);

  // E := H - H_bar, exact up to one rounding per entry.
  s.H_bar = gs_bar.H;
  s.E = s.gs.H - gs_bar.H;
  s.E.prune(0.0);
  const double a = prob.sigma_S(disc.x_lo) * disc.tau / (disc.epsilon * disc.epsilon);
  s.stiff_scale = a > 700.0 ? 0.0 : a * std::exp(-a);
  return s;
}

Mat exp_Hbar_closed_form(const Mat& A1, const Mat& A2, double t, int nt) {
  const Eigen::Index n = A1.rows();
  if (A1.cols() != n || A2.rows() != n || A2.cols() != n)
    throw ContractViolation("exp_Hbar_closed_form: blocks must be square and of equal size");
  if (nt < 1) throw std::invalid_argument("exp_Hbar_closed_form: N_t must be positive");
  const Eigen::Index N = n * nt;
  Mat out = Mat::Identity(2 * N, 2 * N);
  Mat P = Mat::Identity(n, n);  // A1^{k-1} t^{k-1} / (k-1)!
  for (int k = 1; k < nt; ++k) {
    const Mat X = A2 * P * (t / k);
    P = P * A1 * (t / k);
    for (int i = 0; i + k < nt; ++i) {
      out.block(i * n, N + (i + k) * n, n, n) = X;
      out.block(N + i * n, N + (i + k) * n, n, n) = P;
    }
  }
  return std::exp(-t) * out;
}

double bound_exp_norm(double a1, double a2, double T) {
  if (!(a1 > 0.0 && a1 < 1.0)) throw std::domain_error("bound_exp_norm: requires 0 < ||A1_bar|| < 1");
  return (2.0 + a2 / a1) * std::exp((a1 - 1.0) * T);
}

double norm2(const Mat& M) {
  if (M.size() == 0) return 0.0;
  if (std::max(M.rows(), M.cols()) <= 1000) {
    Eigen::JacobiSVD<Mat> svd(M);
    return svd.singularValues()(0);
  }
  return power_norm2([&](const Vec& x) -> Vec { return M * x; },
                     [&](const Vec& y) -> Vec { return M.transpose() * y; }, M.cols());
}

double norm2(const SpMat& M) {
  if (M.size() == 0 || M.nonZeros() == 0) return 0.0;
  if (std::max(M.rows(), M.cols()) <= 1000) return norm2(Mat(M));
  return power_norm2([&](const Vec& x) -> Vec { return M * x; },
                     [&](const Vec& y) -> Vec { return M.transpose() * y; }, M.cols());
}

BoundReport matrix_2norms(const ReducedBlocks& rb, const Discretization& disc) {
  BoundReport r;
  r.nx = disc.nx;
  r.nv = disc.nv;
  r.nt = disc.nt;
  r.norm_A1_bar = norm2(rb.A1_bar);
  r.norm_A2_bar = norm2(rb.A2_bar);
  r.lower_A1 = 5.0 / 11.0 * disc.v_weights.maxCoeff();
  r.lower_A1_nv = 5.0 / (11.0 * disc.nv);
  const double pi2 = std::numbers::pi * std::numbers::pi;
  const double np1 = disc.nx + 1.0;
  r.upper_A1_formula = 1.0 - pi2 / 2.0 * disc.v_nodes.minCoeff() * disc.nx / (disc.nt * np1 * np1) -
                       disc.lambda() / (3.0 * disc.h) * pi2 / (np1 * np1);
  r.contraction_gap = 1.0 - r.norm_A1_bar;
  r.contraction = r.norm_A1_bar < 1.0;
  r.lower_ok = r.norm_A1_bar >= r.lower_A1 && r.lower_A1 >= r.lower_A1_nv;
  r.upper_formula_holds = r.norm_A1_bar <= r.upper_A1_formula;
  if (r.contraction) r.T_estimate = estimate_evolution_time(r.norm_A1_bar, r.norm_A2_bar, 1.0 / disc.nx);
  return r;
}

Mat dense_exp(const SpMat& H, double t) { return Mat(-t * Mat(H)).exp(); }

void check_closed_form(BoundReport& rep, const SplitSystem& split, const std::vector<double>& times) {
  rep.closed_form_checked = true;
  rep.closed_form_error = 0.0;
  for (double t : times) {
    const Mat cf = exp_Hbar_closed_form(split.A1_bar, split.A2_bar, t, split.gs.nt);
    const Mat ref = dense_exp(split.H_bar, t);
    rep.closed_form_error = std::max(rep.closed_form_error, (cf - ref).cwiseAbs().maxCoeff());
  }
  rep.closed_form_ok = rep.closed_form_error <= 1e-10;
  rep.E_norm = norm2(split.E);
  rep.E_max = split.E.nonZeros() ? max_abs(split.E) : 0.0;
}

double perturbation_error_bound(double norm_E, double a1, double a2, double T) {
  const double c = 2.0 + a2 / a1;
  return T * norm_E * c * c * std::exp((a1 - 1.0) * T);
}

double perturbation_error_measured(const SplitSystem& split, double T) {
  return norm2(Mat(dense_exp(split.gs.H, T) - dense_exp(split.H_bar, T)));
}

EigLemmaReport eig_lemma_checks(int nx) {
  if (nx < 2) throw std::invalid_argument("eig_lemma_checks: N_x must be at least 2");
  EigLemmaReport r;
  r.nx = nx;
  const double pi = std::numbers::pi;
  const Mat L = tridiag_dense(nx, 1.0, -2.0, 1.0);
  const Mat D = tridiag_dense(nx, -1.0, 0.0, 1.0);
  const Mat D2 = D * D;

  r.L_eigs = Eigen::SelfAdjointEigenSolver<Mat>(L, Eigen::EigenvaluesOnly).eigenvalues();
  r.D2_eigs = Eigen::SelfAdjointEigenSolver<Mat>(D2, Eigen::EigenvaluesOnly).eigenvalues();
  const Eigen::VectorXcd dz = Eigen::EigenSolver<Mat>(D, false).eigenvalues();
  r.D_abs_eigs = dz.cwiseAbs();
  std::sort(r.D_abs_eigs.data(), r.D_abs_eigs.data() + nx);
  r.D_real_part_max = dz.real().cwiseAbs().maxCoeff();

  Vec stated_L(nx), classical_L(nx), stated_D(nx), classical_D(nx);
  for (int k = 1; k <= nx; ++k) {
    const double s = std::sin(pi * (2 * k - 1) / (2.0 * (nx + 1)));
    stated_L(k - 1) = -2.0 + 2.0 * s;
    stated_D(k - 1) = 2.0 * s;
    classical_L(k - 1) = -2.0 + 2.0 * std::cos(k * pi / (nx + 1));
    classical_D(k - 1) = 2.0 * std::abs(std::cos(k * pi / (nx + 1)));
  }
  r.stated_formula_L = same_sorted(r.L_eigs, stated_L, 1e-10);
  r.classical_formula_L = same_sorted(r.L_eigs, classical_L, 1e-10);
  r.stated_formula_D = same_sorted(r.D_abs_eigs, stated_D, 1e-10);
  r.classical_formula_D = same_sorted(r.D_abs_eigs, classical_D, 1e-10);

  Mat shown = Mat::Zero(nx, nx);
  for (int i = 0; i < nx; ++i) {
    shown(i, i) = (i == 0 || i == nx - 1) ? -1.0 : -2.0;
    if (i + 2 < nx) shown(i, i + 2) = shown(i + 2, i) = 1.0;
  }
  r.D2_display_matches = (D2 - shown).cwiseAbs().maxCoeff() == 0.0;

  r.L_max_negative = r.L_eigs.maxCoeff() < 0.0;
  r.L_min_above_m4 = r.L_eigs.minCoeff() > -4.0;
  r.D_imaginary = r.D_real_part_max <= 1e-12;
  r.D_abs_below_2 = r.D_abs_eigs.maxCoeff() < 2.0;
  r.D2_in_range = r.D2_eigs.minCoeff() > -4.0 && r.D2_eigs.maxCoeff() <= 1e-12;
  return r;
}

MatrixLemmaReport weyl_and_perturbation_checks(int dim, int trials, std::uint64_t seed) {
  if (dim < 3 || dim > 64) throw std::invalid_argument("weyl_and_perturbation_checks: dim must lie in [3, 64]");
  if (trials < 1) throw std::invalid_argument("weyl_and_perturbation_checks: trials must be positive");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  auto random_sym = [&](int n) {
    Mat m(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) m(i, j) = g(rng);
    return Mat((m + m.transpose()) / 2.0);
  };
  using ES = Eigen::SelfAdjointEigenSolver<Mat>;

  MatrixLemmaReport rep;
  rep.trials = trials;
  for (int t = 0; t < trials; ++t) {
    const Mat X = random_sym(dim), Y = random_sym(dim);
    const Vec lx = ES(X, Eigen::EigenvaluesOnly).eigenvalues();
    const Vec ly = ES(Y, Eigen::EigenvaluesOnly).eigenvalues();
    const Vec lz = ES(X + Y, Eigen::EigenvaluesOnly).eigenvalues();
    const double tol = 1e-12 * (lx.cwiseAbs().maxCoeff() + ly.cwiseAbs().maxCoeff());
    for (int k = 0; k < dim; ++k)
      if (lz(k) < lx(k) + ly(0) - tol || lz(k) > lx(k) + ly(dim - 1) + tol) {
        ++rep.weyl_violations;
        break;
      }
  }

  // Remainder of the first-order eigenvalue expansion over a halving sequence of eps.
  double slope_sum = 0.0;
  for (int t = 0; t < trials; ++t) {
    const Mat A = random_sym(dim), E = random_sym(dim);
    const ES es(A);
    const Vec first = (es.eigenvectors().transpose() * E * es.eigenvectors()).diagonal();
    std::vector<double> le, lr;
    for (int s = 0; s < 6; ++s) {
      const double eps = 1e-2 * std::ldexp(1.0, -s);
      const Vec lam = ES(A + eps * E, Eigen::EigenvaluesOnly).eigenvalues();
      const double rem = (lam - es.eigenvalues() - eps * first).cwiseAbs().maxCoeff();
      le.push_back(std::log(eps));
      lr.push_back(std::log(rem));
    }
    const double n = static_cast<double>(le.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < le.size(); ++i) {
      sx += le[i];
      sy += lr[i];
      sxx += le[i] * le[i];
      sxy += le[i] * lr[i];
    }
    slope_sum += (n * sxy - sx * sy) / (n * sxx - sx * sx);
  }
  rep.perturbation_order = slope_sum / trials;

  // Block-norm lemma on 3 x 3 block matrices.
  const int m = 3, b = dim / 3;
  for (int t = 0; t < trials; ++t) {
    Mat B(m * b, m * b);
    for (int i = 0; i < m * b; ++i)
      for (int j = 0; j < m * b; ++j) B(i, j) = g(rng);
    double rhs = 0.0;
    for (int k = -(m - 1); k <= m - 1; ++k) {
      double sup = 0.0;
      for (int i = 0; i < m; ++i) {
        const int j = i + k;
        if (j < 0 || j >= m) continue;
        sup = std::max(sup, norm2(Mat(B.block(i * b, j * b, b, b))));
      }
      rhs += sup;
    }
    if (norm2(B) > rhs * (1.0 + 1e-12)) ++rep.block_norm_violations;
  }
  return rep;
}

}  // namespace apt
