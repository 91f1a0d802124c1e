#include "apt/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <boost/numeric/odeint.hpp>

namespace apt {

void validate(const EvolutionConfig& cfg) {
  if (!(cfg.tol > 0.0 && cfg.tol <= 1e-2)) throw ConfigError("evolution: tol must lie in (0, 1e-2]");
  if (cfg.max_dim_exact < 2) throw ConfigError("evolution: max_dim_exact must be >= 2");
  if (cfg.krylov_dim < 2) throw ConfigError("evolution: krylov_dim must be >= 2");
}

double hermiticity_defect(const CSpMat& H) {
  if (H.rows() != H.cols()) throw ContractViolation("hermiticity_defect: matrix is not square");
  const CSpMat D = H - CSpMat(H.adjoint());
  double out = 0.0;
  for (int r = 0; r < D.outerSize(); ++r)
    for (CSpMat::InnerIterator it(D, r); it; ++it) out = std::max(out, std::abs(it.value()));
  return out;
}

namespace {

double max_entry(const CSpMat& H) {
  double out = 0.0;
  for (int r = 0; r < H.outerSize(); ++r)
    for (CSpMat::InnerIterator it(H, r); it; ++it) out = std::max(out, std::abs(it.value()));
  return out;
}

// Max absolute row sum; bounds the spectral radius of H.
double norm_inf(const CSpMat& H) {
  double out = 0.0;
  for (int r = 0; r < H.outerSize(); ++r) {
    double s = 0.0;
    for (CSpMat::InnerIterator it(H, r); it; ++it) s += std::abs(it.value());
    out = std::max(out, s);
  }
  return out;
}

CVec evolve_krylov(const CSpMat& H, const CVec& psi0, double t, const EvolutionConfig& cfg) {
  const Eigen::Index n = H.rows();
  const int m_max = static_cast<int>(std::min<Eigen::Index>(cfg.krylov_dim, n));
  const double hnorm = std::max(norm_inf(H), 1e-300);
  CVec w = psi0;
  double done = 0.0;
  double dt_next = t;
  CMat V(n, m_max + 1);
  while (done < t) {
    const double beta = w.norm();
    if (beta == 0.0) break;
    V.col(0) = w / beta;
    std::vector<double> alpha, off;
    int m = 0;
    bool breakdown = false;
    double beta_next = 0.0;
    for (; m < m_max; ++m) {
      CVec z = H * V.col(m);
      const double a = V.col(m).dot(z).real();
      alpha.push_back(a);
      // Full reorthogonalization, twice.
      for (int pass = 0; pass < 2; ++pass)
        for (int i = 0; i <= m; ++i) z -= V.col(i) * V.col(i).dot(z);
      beta_next = z.norm();
      if (beta_next <= 1e-13 * hnorm) {
        breakdown = true;
        ++m;
        break;
      }
      if (m + 1 < m_max + 1) V.col(m + 1) = z / beta_next;
      if (m + 1 < m_max) off.push_back(beta_next);
    }
    const int dim = breakdown ? m : m_max;
    Vec diag(dim), sub(std::max(dim - 1, 0));
    for (int i = 0; i < dim; ++i) diag(i) = alpha[i];
    for (int i = 0; i + 1 < dim; ++i) sub(i) = off[i];
    Eigen::SelfAdjointEigenSolver<Mat> es;
    es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    const Mat& Q = es.eigenvectors();
    const Vec& lam = es.eigenvalues();
    auto small_exp = [&](double dt) {
      CVec y(dim);
      CVec coef = (Q.row(0).transpose().cast<cplx>().array() *
                   (-cplx(0, 1) * lam.cast<cplx>().array() * dt).exp()).matrix();
      y = Q.cast<cplx>() * coef;
      return y;
    };

    const double remaining = t - done;
    double dt = std::min(remaining, dt_next);
    CVec y;
    if (breakdown) {
      dt = remaining;
      y = small_exp(dt);
    } else {
      const double budget_rate = cfg.tol / t;
      for (int tries = 0;; ++tries) {
        y = small_exp(dt);
        const double err = beta * beta_next * std::abs(y(dim - 1));
        if (err <= budget_rate * dt || tries > 200) {
          if (err < 0.1 * budget_rate * dt) dt_next = std::min(2.0 * dt, remaining);
          else dt_next = dt;
          break;
        }
        const double shrink = std::pow(budget_rate * dt / err, 1.0 / dim);
        dt *= std::clamp(0.9 * shrink, 0.1, 0.7);
      }
    }
    w = beta * (V.leftCols(dim) * y);
    done += dt;
    if (breakdown) break;
  }
  return w;
}

CVec evolve_rk(const CSpMat& H, const CVec& psi0, double t, const EvolutionConfig& cfg) {
  namespace odeint = boost::numeric::odeint;
  using State = std::vector<cplx>;
  State x(psi0.data(), psi0.data() + psi0.size());
  const Eigen::Index n = psi0.size();
  auto rhs = [&](const State& s, State& ds, double) {
    Eigen::Map<const CVec> sv(s.data(), n);
    Eigen::Map<CVec> dv(ds.data(), n);
    dv.noalias() = -cplx(0, 1) * (H * sv);
  };
  const double tol = std::min(cfg.tol, 1e-12) * 0.1;
  const double hnorm = std::max(norm_inf(H), 1e-12);
  odeint::integrate_adaptive(odeint::make_controlled<odeint::runge_kutta_dopri5<State>>(tol, tol), rhs, x,
                             0.0, t, std::min(t, 0.1 / hnorm));
  return Eigen::Map<CVec>(x.data(), n);
}

}  // namespace

CVec evolve_exact(const CMat& H, const CVec& psi0, double t) {
  Eigen::SelfAdjointEigenSolver<CMat> es(H);
  const CVec coef = es.eigenvectors().adjoint() * psi0;
  const CVec phase = (-cplx(0, 1) * es.eigenvalues().cast<cplx>().array() * t).exp();
  return es.eigenvectors() * (phase.array() * coef.array()).matrix();
}

CVec evolve(const CSpMat& H, const CVec& psi0, double t, const EvolutionConfig& cfg) {
  validate(cfg);
  if (H.rows() != H.cols() || H.rows() != psi0.size())
    throw ContractViolation("evolve: dimension mismatch");
  if (!(t >= 0.0)) throw std::invalid_argument("evolve: t must be non-negative");
  const double scale = std::max(1.0, max_entry(H));
  if (hermiticity_defect(H) > 1e-12 * scale) throw ContractViolation("evolve: H is not Hermitian");
  if (t == 0.0 || psi0.norm() == 0.0) return psi0;

  EvolutionMethod method = cfg.method;
  if (method == EvolutionMethod::automatic)
    method = H.rows() <= cfg.max_dim_exact ? EvolutionMethod::exact_diag : EvolutionMethod::krylov;
  switch (method) {
    case EvolutionMethod::exact_diag:
      return evolve_exact(CMat(H), psi0, t);
    case EvolutionMethod::rk_adaptive:
      return evolve_rk(H, psi0, t, cfg);
    default:
      return evolve_krylov(H, psi0, t, cfg);
  }
}

int qubits_for(long dim) {
  int q = 0;
  while ((1L << q) < dim) ++q;
  return q;
}

namespace {
template <class M>
ComplexityCounters counters_impl(const M& H) {
  ComplexityCounters c;
  c.dim = H.rows();
  c.qubits = qubits_for(c.dim);
  for (int r = 0; r < H.outerSize(); ++r) {
    long nnz = 0;
    for (typename M::InnerIterator it(H, r); it; ++it) {
      if (it.value() == typename M::Scalar(0)) continue;
      ++nnz;
      c.max_abs = std::max(c.max_abs, static_cast<double>(std::abs(it.value())));
    }
    c.sparsity = std::max(c.sparsity, nnz);
  }
  return c;
}
}  // namespace

ComplexityCounters complexity_counters(const CSpMat& H) { return counters_impl(H); }
ComplexityCounters complexity_counters(const SpMat& H) { return counters_impl(H); }

}  // namespace apt
