#include "apt/schrodingerize.hpp"

#include <cmath>
#include <mutex>
#include <numbers>
#include <random>
#include <sstream>
#include <thread>

#include <fftw3.h>

namespace apt {

namespace {

std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

// In-place length-N complex DFT; sign = FFTW_FORWARD or FFTW_BACKWARD (unnormalized).
void dft(std::vector<cplx>& data, int sign) {
  const int N = static_cast<int>(data.size());
  auto* buf = reinterpret_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * N));
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    plan = fftw_plan_dft_1d(N, buf, buf, sign, FFTW_ESTIMATE);
  }
  for (int i = 0; i < N; ++i) {
    buf[i][0] = data[i].real();
    buf[i][1] = data[i].imag();
  }
  fftw_execute(plan);
  for (int i = 0; i < N; ++i) data[i] = cplx(buf[i][0], buf[i][1]);
  {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }
  fftw_free(buf);
}

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

double binom(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

double smoothstep(double x, int r) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  double s = 0.0;
  for (int k = 0; k <= r; ++k) s += binom(r + k, k) * binom(2 * r + 1, r - k) * std::pow(-x, k);
  return s * std::pow(x, r + 1);
}

CSpMat to_complex(const SpMat& m) { return m.cast<cplx>(); }

// Smallest and largest eigenvalue of a real symmetric sparse matrix by Lanczos
// with full reorthogonalization.
std::pair<double, double> lanczos_extremes(const SpMat& S) {
  const Eigen::Index n = S.rows();
  const int m_max = static_cast<int>(std::min<Eigen::Index>(n, 200));
  std::mt19937_64 rng(12345);
  std::normal_distribution<double> nd;
  Vec v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = nd(rng);
  v.normalize();
  Mat V(n, m_max);
  std::vector<double> a, b;
  V.col(0) = v;
  int m = 0;
  for (; m < m_max; ++m) {
    Vec z = S * V.col(m);
    a.push_back(V.col(m).dot(z));
    for (int pass = 0; pass < 2; ++pass) z -= V.leftCols(m + 1) * (V.leftCols(m + 1).transpose() * z);
    const double beta = z.norm();
    if (m + 1 == m_max || beta < 1e-12) {
      ++m;
      break;
    }
    b.push_back(beta);
    V.col(m + 1) = z / beta;
  }
  Vec d = Eigen::Map<Vec>(a.data(), m);
  Vec e = Eigen::Map<Vec>(b.data(), m - 1);
  Eigen::SelfAdjointEigenSolver<Mat> es;
  es.computeFromTridiagonal(d, e, Eigen::EigenvaluesOnly);
  return {es.eigenvalues()(0), es.eigenvalues()(m - 1)};
}

}  // namespace

SpMat homogenize(const SpMat& A, const Vec& b, HomogenizeVariant variant) {
  const Eigen::Index n = A.rows();
  if (A.cols() != n || b.size() != n) throw std::invalid_argument("homogenize: dimension mismatch");
  std::vector<Triplet> t;
  t.reserve(A.nonZeros() + n + 1);
  for (int r = 0; r < A.outerSize(); ++r)
    for (SpMat::InnerIterator it(A, r); it; ++it) t.emplace_back(it.row(), it.col(), it.value());
  for (Eigen::Index i = 0; i < n; ++i)
    if (b(i) != 0.0) t.emplace_back(i, n, b(i));
  if (variant == HomogenizeVariant::unit_corner) t.emplace_back(n, n, 1.0);
  SpMat M(n + 1, n + 1);
  M.setFromTriplets(t.begin(), t.end());
  return M;
}

HermitianSplit hermitian_split(const CSpMat& M) {
  if (M.rows() != M.cols()) throw std::invalid_argument("hermitian_split: matrix is not square");
  const CSpMat Mh = M.adjoint();
  HermitianSplit s;
  s.H1 = (M + Mh) * cplx(0.5, 0.0);
  s.H2 = (M - Mh) * cplx(0.0, -0.5);
  s.H1.prune(cplx(0.0));
  s.H2.prune(cplx(0.0));
  return s;
}

HermitianSplit hermitian_split(const SpMat& M) { return hermitian_split(CSpMat(to_complex(M))); }

SpectrumSummary hermitian_part_spectrum(const SpMat& M) {
  const SpMat S = (M + SpMat(M.transpose())) * 0.5;
  SpectrumSummary out;
  if (S.rows() == 0) return out;
  if (S.rows() <= 2000) {
    Eigen::SelfAdjointEigenSolver<Mat> es(Mat(S), Eigen::EigenvaluesOnly);
    out.lambda_min = es.eigenvalues()(0);
    out.lambda_max = es.eigenvalues()(S.rows() - 1);
  } else {
    auto [lo, hi] = lanczos_extremes(S);
    out.lambda_min = lo;
    out.lambda_max = hi;
  }
  return out;
}

WarpedGrid build_p_grid(double L, double R, int Np, const SpectrumSummary& spec, double t_final) {
  if (!is_power_of_two(Np)) throw std::invalid_argument("build_p_grid: N_p must be a power of two");
  if (Np < 2) throw std::invalid_argument("build_p_grid: N_p must be at least 2");
  if (!(L > 0) || !(R > 0)) throw std::invalid_argument("build_p_grid: L and R must be positive");
  WarpedGrid g;
  g.L = L;
  g.R = R;
  g.Np = Np;
  g.dp = (R + L) / Np;
  g.p.resize(Np);
  g.mu.resize(Np);
  for (int k = 0; k < Np; ++k) {
    g.p(k) = -L + k * g.dp;
    g.mu(k) = 2.0 * std::numbers::pi / (R + L) * (k - Np / 2);
  }
  const double reach_minus = spec.lambda_minus() * t_final;
  const double reach_plus = spec.lambda_plus() * t_final;
  if (!(L > reach_minus)) {
    std::ostringstream os;
    os << "L = " << L << " does not exceed lambda_minus * t = " << reach_minus;
    g.warnings.push_back(os.str());
  }
  if (!(R > reach_plus)) {
    std::ostringstream os;
    os << "R = " << R << " does not exceed lambda_plus * t = " << reach_plus;
    g.warnings.push_back(os.str());
  }
  return g;
}

WarpedGrid choose_p_grid(const DomainChoice& dc, int Np, const SpectrumSummary& spec, double t_final) {
  if (!dc.automatic) return build_p_grid(dc.L_min, dc.R_min, Np, spec, t_final);
  const double L = std::max(dc.L_min, 1.1 * spec.lambda_minus() * t_final + dc.left_pad);
  const double R = std::max(dc.R_min, 1.1 * spec.lambda_plus() * t_final + dc.right_pad);
  return build_p_grid(L, R, Np, spec, t_final);
}

double profile_value(double p, const ProfileOptions& opt) {
  if (opt.kind == Profile::exp_abs) return std::exp(-std::abs(p));
  if (p >= 0.0) return std::exp(-p);
  return std::exp(-p) * smoothstep((p + opt.width) / opt.width, opt.r);
}

Vec p_profile(const WarpedGrid& grid, const ProfileOptions& opt) {
  if (opt.kind == Profile::smooth_r && (opt.r < 0 || !(opt.width > 0)))
    throw std::invalid_argument("p_profile: smooth_r needs r >= 0 and width > 0");
  Vec g(grid.Np);
  for (int k = 0; k < grid.Np; ++k) g(k) = profile_value(grid.p(k), opt);
  return g;
}

CVec warped_initial(const Vec& u0, const WarpedGrid& grid, const ProfileOptions& opt) {
  const Vec g = p_profile(grid, opt);
  const Eigen::Index n = u0.size();
  CVec out(grid.Np * n);
  for (int q = 0; q < grid.Np; ++q) out.segment(q * n, n) = (g(q) * u0).cast<cplx>();
  return out;
}

CVec to_fourier(const CVec& warped, const WarpedGrid& grid, int n) {
  const int Np = grid.Np;
  if (warped.size() != static_cast<Eigen::Index>(Np) * n) throw std::invalid_argument("to_fourier: size mismatch");
  CVec out(warped.size());
  std::vector<cplx> buf(Np);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < Np; ++j) buf[j] = (j % 2 == 0 ? 1.0 : -1.0) * warped(j * n + i);
    dft(buf, FFTW_FORWARD);
    for (int l = 0; l < Np; ++l) out(l * n + i) = buf[l] / static_cast<double>(Np);
  }
  return out;
}

CVec from_fourier(const CVec& coeffs, const WarpedGrid& grid, int n) {
  const int Np = grid.Np;
  if (coeffs.size() != static_cast<Eigen::Index>(Np) * n) throw std::invalid_argument("from_fourier: size mismatch");
  CVec out(coeffs.size());
  std::vector<cplx> buf(Np);
  for (int i = 0; i < n; ++i) {
    for (int l = 0; l < Np; ++l) buf[l] = coeffs(l * n + i);
    dft(buf, FFTW_BACKWARD);
    for (int j = 0; j < Np; ++j) out(j * n + i) = (j % 2 == 0 ? 1.0 : -1.0) * buf[j];
  }
  return out;
}

CSpMat SchrodingerizedSystem::mode_hamiltonian(int l) const {
  CSpMat H = split.H1 * cplx(grid.mu(l), 0.0) - split.H2;
  return H;
}

CSpMat SchrodingerizedSystem::assemble_total() const {
  const int n = base_dim, Np = grid.Np;
  std::vector<Eigen::Triplet<cplx>> t;
  for (int l = 0; l < Np; ++l) {
    const CSpMat H = mode_hamiltonian(l);
    for (int r = 0; r < H.outerSize(); ++r)
      for (CSpMat::InnerIterator it(H, r); it; ++it) t.emplace_back(l * n + it.row(), l * n + it.col(), it.value());
  }
  CSpMat out(static_cast<Eigen::Index>(Np) * n, static_cast<Eigen::Index>(Np) * n);
  out.setFromTriplets(t.begin(), t.end());
  return out;
}

double SchrodingerizedSystem::hermiticity_defect() const {
  return std::max(apt::hermiticity_defect(split.H1), apt::hermiticity_defect(split.H2));
}

SchrodingerizedSystem schrodingerize_system(const SpMat& M, const WarpedGrid& grid,
                                            std::optional<SpectrumSummary> spec) {
  if (M.rows() != M.cols()) throw std::invalid_argument("schrodingerize_system: matrix is not square");
  SchrodingerizedSystem s;
  s.split = hermitian_split(M);
  s.grid = grid;
  s.base_dim = static_cast<int>(M.rows());
  s.spectrum = spec ? *spec : hermitian_part_spectrum(M);
  if (s.hermiticity_defect() > 1e-12) throw ContractViolation("schrodingerize_system: Hermiticity check failed");
  return s;
}

double default_p_star(const SpectrumSummary& spec, double t, double margin) {
  return margin * spec.lambda_plus() * t;
}

namespace {

int recovery_index(const WarpedGrid& grid, double p_star) {
  if (p_star > grid.R) throw std::out_of_range("recover: p_star exceeds R");
  const int q = static_cast<int>(std::ceil((p_star + grid.L) / grid.dp - 1e-9));
  if (q >= grid.Np) throw std::out_of_range("recover: no grid point at or above p_star");
  return std::max(q, 0);
}

}  // namespace

Vec recover(const CVec& psi, const WarpedGrid& grid, RecoveryMode mode, double p_star, int n) {
  if (psi.size() != static_cast<Eigen::Index>(grid.Np) * n) throw std::invalid_argument("recover: size mismatch");
  const int q = recovery_index(grid, p_star);
  if (mode == RecoveryMode::point) return std::exp(grid.p(q)) * psi.segment(q * n, n).real();
  // e^{p} int_p^R u_hat dq' normalized by the same quadrature of e^{-q'}
  Vec acc = Vec::Zero(n);
  double norm = 0.0;
  for (int k = q; k < grid.Np; ++k) {
    acc += psi.segment(k * n, n).real();
    norm += std::exp(-grid.p(k));
  }
  return acc / norm;
}

SchrodingerRun evolve_and_recover(const SchrodingerizedSystem& sys, const Vec& u0, double t,
                                  const ProfileOptions& prof, const EvolutionConfig& evo,
                                  const RecoveryOptions& rec) {
  const WarpedGrid& g = sys.grid;
  const int n = sys.base_dim, Np = g.Np;
  if (u0.size() != n) throw std::invalid_argument("evolve_and_recover: u0 has wrong length");
  validate(evo);

  SchrodingerRun run;
  run.p_star = rec.p_star ? *rec.p_star : default_p_star(sys.spectrum, t, rec.margin);
  const int q = recovery_index(g, run.p_star);
  run.p_used = g.p(q);

  std::vector<cplx> c(Np);
  const Vec prof_vals = p_profile(g, prof);
  for (int j = 0; j < Np; ++j) c[j] = (j % 2 == 0 ? 1.0 : -1.0) * prof_vals(j);
  dft(c, FFTW_FORWARD);
  double cmax = 0.0;
  for (auto& x : c) {
    x /= static_cast<double>(Np);
    cmax = std::max(cmax, std::abs(x));
  }

  // Weight of the phase factor applied to mode l when sampling u_hat.
  std::vector<cplx> sample(Np);
  for (int l = 0; l < Np; ++l) {
    if (rec.mode == RecoveryMode::point) {
      sample[l] = std::exp(cplx(0, g.mu(l) * (g.p(q) + g.L)));
    } else {
      cplx s = 0.0;
      for (int k = q; k < Np; ++k) s += std::exp(cplx(0, g.mu(l) * (g.p(k) + g.L)));
      sample[l] = s;
    }
  }

  // Real data: mode Np - l is the conjugate of mode l, so evolve l = 0..Np/2 only.
  std::vector<int> modes;
  std::vector<double> mult;
  for (int l = 0; l <= Np / 2; ++l) {
    const double w = (l == 0 || l == Np / 2) ? 1.0 : 2.0;
    if (std::abs(c[l]) <= rec.coefficient_cutoff * cmax) {
      run.modes_skipped += static_cast<int>(w);
      continue;
    }
    modes.push_back(l);
    mult.push_back(w);
    run.modes_evolved += static_cast<int>(w);
  }

  std::vector<Vec> contrib(modes.size());
  std::vector<double> defect(modes.size(), 0.0);
  auto work = [&](size_t idx) {
    const int l = modes[idx];
    const CVec psi0 = c[l] * u0.cast<cplx>();
    const CVec psi = evolve(sys.mode_hamiltonian(l), psi0, t, evo);
    defect[idx] = std::abs(psi.norm() - psi0.norm()) / (1.0 + t);
    contrib[idx] = mult[idx] * (sample[l] * psi).real();
  };
  const int jobs = std::max(1, std::min<int>(rec.jobs, static_cast<int>(modes.size())));
  if (jobs == 1) {
    for (size_t i = 0; i < modes.size(); ++i) work(i);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < jobs; ++w)
      pool.emplace_back([&, w] {
        for (size_t i = w; i < modes.size(); i += jobs) work(i);
      });
    for (auto& th : pool) th.join();
  }

  Vec acc = Vec::Zero(n);
  for (size_t i = 0; i < modes.size(); ++i) {
    acc += contrib[i];
    run.max_norm_defect = std::max(run.max_norm_defect, defect[i]);
  }
  if (rec.mode == RecoveryMode::point) {
    run.u = std::exp(g.p(q)) * acc;
  } else {
    double norm = 0.0;
    for (int k = q; k < Np; ++k) norm += std::exp(-g.p(k));
    run.u = acc / norm;
  }
  return run;
}

Vec evolve_and_recover_full(const SchrodingerizedSystem& sys, const Vec& u0, double t,
                            const ProfileOptions& prof, const EvolutionConfig& evo, RecoveryMode mode,
                            double p_star) {
  const int n = sys.base_dim;
  const CVec c = to_fourier(warped_initial(u0, sys.grid, prof), sys.grid, n);
  CVec evolved(c.size());
  for (int l = 0; l < sys.grid.Np; ++l)
    evolved.segment(l * n, n) = evolve(sys.mode_hamiltonian(l), c.segment(l * n, n), t, evo);
  return recover(from_fourier(evolved, sys.grid, n), sys.grid, mode, p_star, n);
}

OdeSolution solve_ode_schrodingerized(const SpMat& M, const Vec& u0, double t, const SchrodingerSettings& s,
                                      int n_aug) {
  const int n = static_cast<int>(M.rows());
  if (n_aug < 0 || n_aug > n) throw std::invalid_argument("solve_ode_schrodingerized: bad n_aug");
  if (!(s.source_scale > 0.0)) throw ConfigError("schrodingerization: source_scale must be positive");
  Vec d = Vec::Ones(n);
  d.tail(n_aug).setConstant(s.source_scale);

  SpMat Ms = M;
  for (int r = 0; r < Ms.outerSize(); ++r)
    for (SpMat::InnerIterator it(Ms, r); it; ++it) it.valueRef() *= d(it.row()) / d(it.col());

  OdeSolution out;
  out.spectrum = hermitian_part_spectrum(Ms);
  out.grid = choose_p_grid(s.domain, s.Np, out.spectrum, t);
  const SchrodingerizedSystem sys = schrodingerize_system(Ms, out.grid, out.spectrum);
  out.hermiticity_defect = sys.hermiticity_defect();
  out.run = evolve_and_recover(sys, d.cwiseProduct(u0), t, s.profile, s.evolution, s.recovery);
  out.u = out.run.u.cwiseQuotient(d);

  // mode 0 carries the largest |mu|, so its pattern and entries bound all modes.
  out.counters = complexity_counters(sys.mode_hamiltonian(0));
  out.counters.dim = static_cast<long>(out.grid.Np) * n;
  out.counters.qubits = qubits_for(out.counters.dim);
  return out;
}

}  // namespace apt
