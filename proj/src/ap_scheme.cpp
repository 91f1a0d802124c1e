#include "apt/ap_scheme.hpp"

#include <cmath>
#include <iomanip>
#include <vector>

namespace apt {

namespace {

SpMat sparse_diag(const Vec& d) {
  SpMat m(d.size(), d.size());
  std::vector<Triplet> t;
  t.reserve(d.size());
  for (Eigen::Index i = 0; i < d.size(); ++i)
    if (d(i) != 0.0) t.emplace_back(i, i, d(i));
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

// K (dense, N_v x N_v) kron I_{nx}
SpMat kron_identity(const Mat& K, int nx) {
  const int nv = static_cast<int>(K.rows());
  SpMat m(nv * nx, nv * nx);
  std::vector<Triplet> t;
  for (int a = 0; a < nv; ++a)
    for (int b = 0; b < nv; ++b)
      if (K(a, b) != 0.0)
        for (int i = 0; i < nx; ++i) t.emplace_back(a * nx + i, b * nx + i, K(a, b));
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

// Block-diagonal matrix with blocks[k] on the k-th diagonal block.
SpMat block_diag(const std::vector<SpMat>& blocks) {
  Eigen::Index n = 0;
  for (const auto& b : blocks) n += b.rows();
  SpMat m(n, n);
  std::vector<Triplet> t;
  Eigen::Index off = 0;
  for (const auto& b : blocks) {
    for (int r = 0; r < b.outerSize(); ++r)
      for (SpMat::InnerIterator it(b, r); it; ++it) t.emplace_back(off + it.row(), off + it.col(), it.value());
    off += b.rows();
  }
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

// Replicate a per-grid-point vector over all velocity blocks.
Vec replicate(const Vec& per_x, int nv) {
  const auto nx = per_x.size();
  Vec out(nv * nx);
  for (int k = 0; k < nv; ++k) out.segment(k * nx, nx) = per_x;
  return out;
}

SpMat tridiag(int n, double lo, double mid, double hi) {
  SpMat m(n, n);
  std::vector<Triplet> t;
  for (int i = 0; i < n; ++i) {
    if (i > 0 && lo != 0.0) t.emplace_back(i, i - 1, lo);
    if (mid != 0.0) t.emplace_back(i, i, mid);
    if (i + 1 < n && hi != 0.0) t.emplace_back(i, i + 1, hi);
  }
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

SpMat pruned(SpMat m) {
  m.prune([](Eigen::Index, Eigen::Index, double v) { return v != 0.0; });
  m.makeCompressed();
  return m;
}

}  // namespace

Betas betas(double tau, double eps, double sigma_S, double sigma) {
  if (!(tau > 0) || !(eps > 0) || !(sigma_S > 0) || !(sigma > 0))
    throw std::invalid_argument("betas: tau, epsilon, sigma_S, sigma must be positive");
  const double a = sigma_S * tau / (eps * eps);
  if (a > 700.0) return {0.0, 1.0 / sigma, 0.0};
  const double e = std::exp(-a);
  double bracket;  // 1 - (1 + a) e^{-a}
  if (a < 0.1) {
    // sum_{k>=2} (-1)^k (k-1) a^k / k!
    bracket = 0.0;
    double term = a;  // a^k / k! at k = 1
    for (int k = 2; k < 30; ++k) {
      term *= a / k;
      bracket += ((k % 2 == 0) ? 1.0 : -1.0) * (k - 1) * term;
    }
  } else {
    bracket = -std::expm1(-a) - a * e;
  }
  return {e, bracket / sigma, (tau / (eps * eps)) * e * (1.0 - eps * eps)};
}

BuildingBlocks build_blocks(const Discretization& d, const TransportProblem& p,
                            std::optional<Betas> beta_override) {
  BuildingBlocks b;
  const int nx = d.nx, nv = d.nv;
  const double h = d.h, eps = d.epsilon;
  b.nx = nx;
  b.nv = nv;
  b.v = d.v_nodes;
  b.w = d.v_weights;
  b.V = b.v.asDiagonal();
  b.W = Vec::Ones(nv) * b.w.transpose();
  b.Wd = b.w.asDiagonal();
  b.Dh = tridiag(nx, -1.0, 0.0, 1.0);
  b.Lh = tridiag(nx, 1.0, -2.0, 1.0);
  b.I1 = SpMat(nx, nx);
  b.I1.insert(0, 0) = 1.0;
  b.I2 = SpMat(nx, nx);
  b.I2.insert(nx - 1, nx - 1) = 1.0;
  b.tau = d.tau;
  b.lambda = d.lambda();
  b.h = h;
  b.eps = eps;

  const Vec x = d.x_points();
  b.sigma_A.resize(nx);
  b.Q.resize(nx);
  b.beta1.resize(nx);
  b.beta2.resize(nx);
  b.beta3.resize(nx);
  for (int m = 0; m < nx; ++m) {
    const double sS = p.sigma_S(x(m));
    const double sig = p.sigma(x(m), eps);
    if (!(sig > 0)) throw ConfigError("physics: sigma must be positive on the grid");
    b.sigma_A(m) = p.sigma_A(x(m));
    b.Q(m) = p.Q(x(m));
    const Betas bt = beta_override ? *beta_override : betas(d.tau, eps, sS, sig);
    b.beta1(m) = bt.b1;
    b.beta2(m) = bt.b2;
    b.beta3(m) = bt.b3;
  }
  b.sigma_L = p.sigma(x(0), eps);
  b.sigma_R = p.sigma(x(nx - 1), eps);
  const double sL = b.sigma_L, sR = b.sigma_R;

  b.E_nabla_L.resize(nv);
  b.E_nabla_R.resize(nv);
  b.B_n = Vec::Zero(nv * nx);
  b.f_star = Vec::Zero(nv * nx);
  b.g_star = Vec::Zero(nv * nx);
  std::vector<SpMat> grad(nv), lb(nv), db(nv);
  for (int k = 0; k < nv; ++k) {
    const double vk = b.v(k);
    const double dL = eps * vk + sL * h, dR = eps * vk + sR * h;
    b.E_nabla_L(k) = eps * vk / dL;
    b.E_nabla_R(k) = eps * vk / dR;
    const double FL = p.F_L(vk), FR = p.F_R(vk);

    SpMat g = b.Dh;
    g.coeffRef(0, 0) += -b.E_nabla_L(k);
    g.coeffRef(nx - 1, nx - 1) += b.E_nabla_R(k);
    grad[k] = pruned(g / (2.0 * h));

    SpMat l = b.Lh;
    l.coeffRef(0, 0) += (eps * vk - vk) / dL;
    l.coeffRef(nx - 1, nx - 1) += (eps * vk - vk) / dR;
    lb[k] = pruned(l);

    SpMat dd = b.Dh;
    dd.coeffRef(0, 0) += (vk - eps * vk) / dL;
    dd.coeffRef(nx - 1, nx - 1) += -(vk - eps * vk) / dR;
    db[k] = pruned(dd);

    const int first = k * nx, last = k * nx + nx - 1;
    b.B_n(first) += -sL * FL / (2.0 * dL);
    b.B_n(last) += sR * FR / (2.0 * dR);
    const double fL = (sL * h * vk + vk * vk) / dL * FL;
    const double fR = (sR * h * vk + vk * vk) / dR * FR;
    b.f_star(first) += fL;
    b.f_star(last) += fR;
    b.g_star(first) += fL;
    b.g_star(last) += -fR;
  }
  b.grad = block_diag(grad);
  b.L_bdry = block_diag(lb);
  b.D_bdry = block_diag(db);
  return b;
}

ParityState zero_state(const Discretization& d) {
  return {Vec::Zero(d.n()), Vec::Zero(d.n()), false};
}

ParityState relaxation_step(const ParityState& s, const BuildingBlocks& b) {
  const int nx = b.nx, nv = b.nv;
  if (s.r.size() != nv * nx || s.j.size() != nv * nx)
    throw ContractViolation("relaxation_step: state dimension mismatch");
  if (s.scaled) throw StateError("relaxation_step: expects an unscaled state");
  const double h = b.h;

  // Boundary-modified central gradient of r plus incoming data, per velocity.
  Vec G(nv * nx);
  for (int k = 0; k < nv; ++k) {
    const double* r = s.r.data() + k * nx;
    for (int m = 0; m < nx; ++m) {
      const double left = m > 0 ? r[m - 1] : b.E_nabla_L(k) * r[0];
      const double right = m + 1 < nx ? r[m + 1] : b.E_nabla_R(k) * r[nx - 1];
      G(k * nx + m) = (right - left) / (2.0 * h) + b.B_n(k * nx + m);
    }
  }

  ParityState out{Vec(nv * nx), Vec(nv * nx), false};
  for (int m = 0; m < nx; ++m) {
    double rho = 0.0, gbar = 0.0;
    for (int k = 0; k < nv; ++k) {
      rho += b.w(k) * s.r(k * nx + m);
      gbar += b.w(k) * G(k * nx + m);
    }
    const double b1 = b.beta1(m), b2 = b.beta2(m), b3 = b.beta3(m);
    for (int k = 0; k < nv; ++k) {
      const int i = k * nx + m;
      out.r(i) = b1 * s.r(i) + (1.0 - b1) * rho;
      out.j(i) = b1 * s.j(i) - b2 * b.v(k) * gbar - b3 * b.v(k) * G(i);
    }
  }
  return out;
}

ParityState convection_step(const ParityState& s, const BuildingBlocks& b) {
  const int nx = b.nx, nv = b.nv;
  if (s.r.size() != nv * nx || s.j.size() != nv * nx)
    throw ContractViolation("convection_step: state dimension mismatch");
  if (s.scaled) throw StateError("convection_step: expects an unscaled state");
  const double half = b.lambda / 2.0, eps = b.eps, h = b.h;

  ParityState out{Vec(nv * nx), Vec(nv * nx), false};
  for (int k = 0; k < nv; ++k) {
    const double vk = b.v(k);
    const double cL = (vk - eps * vk) / (eps * vk + b.sigma_L * h);
    const double cR = (vk - eps * vk) / (eps * vk + b.sigma_R * h);
    const double* r = s.r.data() + k * nx;
    const double* j = s.j.data() + k * nx;
    for (int m = 0; m < nx; ++m) {
      const int i = k * nx + m;
      const double rl = m > 0 ? r[m - 1] : 0.0, rr = m + 1 < nx ? r[m + 1] : 0.0;
      const double jl = m > 0 ? j[m - 1] : 0.0, jr = m + 1 < nx ? j[m + 1] : 0.0;
      double lap_r = rl - 2.0 * r[m] + rr;
      double dif_r = rr - rl;
      if (m == 0) {
        lap_r -= cL * r[0];
        dif_r += cL * r[0];
      }
      if (m == nx - 1) {
        lap_r -= cR * r[m];
        dif_r -= cR * r[m];
      }
      const double damp = 1.0 - b.tau * b.sigma_A(m);
      out.r(i) = damp * r[m] + half * vk * lap_r - half * vk * (jr - jl) + half * b.f_star(i) +
                 b.tau * b.Q(m);
      out.j(i) = damp * j[m] + half * vk * (jl - 2.0 * j[m] + jr) - half * vk * dif_r +
                 half * b.g_star(i);
    }
  }
  return out;
}

ParityState StepMatrices::apply(const ParityState& s) const {
  if (s.scaled != preprocessed)
    throw StateError(preprocessed ? "StepMatrices::apply: preprocessed matrices need a scaled state"
                                  : "StepMatrices::apply: raw matrices need an unscaled state");
  ParityState out;
  out.r = A1 * s.r + B1 * s.j + b_r;
  out.j = A2 * s.r + B2 * s.j + b_j;
  out.scaled = s.scaled;
  return out;
}

StepMatrices compose_step_matrices(const BuildingBlocks& b) {
  const int nx = b.nx, nv = b.nv;
  const Vec b1 = replicate(b.beta1, nv), b2 = replicate(b.beta2, nv), b3 = replicate(b.beta3, nv);
  const SpMat WI = kron_identity(b.W, nx);
  const SpMat VI = kron_identity(b.V, nx);
  const SpMat VWI = kron_identity(b.V * b.W, nx);
  const SpMat IDh = block_diag(std::vector<SpMat>(nv, b.Dh));
  const SpMat ILh = block_diag(std::vector<SpMat>(nv, b.Lh));

  // Relaxation: r* = R_rr r, j* = R_jj j + R_jr r + c_j.
  const SpMat R_rr = sparse_diag(b1) + SpMat(sparse_diag((1.0 - b1.array()).matrix()) * WI);
  const SpMat relax_mix = SpMat(sparse_diag(b2) * VWI) + SpMat(sparse_diag(b3) * VI);
  const SpMat R_jr = -(relax_mix * b.grad);
  const Vec c_j = -(relax_mix * b.B_n);
  const SpMat R_jj = sparse_diag(b1);

  // Convection.
  const Vec damp = replicate((1.0 - b.tau * b.sigma_A.array()).matrix(), nv);
  const double half = b.lambda / 2.0;
  const SpMat C_rr = sparse_diag(damp) + half * SpMat(VI * b.L_bdry);
  const SpMat C_rj = -half * SpMat(VI * IDh);
  const SpMat C_jj = sparse_diag(damp) + half * SpMat(VI * ILh);
  const SpMat C_jr = -half * SpMat(VI * b.D_bdry);

  StepMatrices sm;
  sm.nx = nx;
  sm.nv = nv;
  sm.weights = b.w;
  sm.beta1 = b.beta1;
  sm.beta2 = b.beta2;
  sm.beta3 = b.beta3;
  sm.A1 = pruned(SpMat(C_rr * R_rr) + SpMat(C_rj * R_jr));
  sm.B1 = pruned(C_rj * R_jj);
  sm.A2 = pruned(SpMat(C_jr * R_rr) + SpMat(C_jj * R_jr));
  sm.B2 = pruned(C_jj * R_jj);
  sm.b_r = C_rj * c_j + half * b.f_star + b.tau * replicate(b.Q, nv);
  sm.b_j = C_jj * c_j + half * b.g_star;
  sm.preprocessed = false;
  return sm;
}

StepMatrices assemble_step_matrices(const Discretization& d, const TransportProblem& p,
                                    std::optional<Betas> beta_override) {
  return compose_step_matrices(build_blocks(d, p, beta_override));
}

StepMatrices preprocess(const StepMatrices& sm) {
  if (sm.preprocessed) throw StateError("preprocess: step matrices already preprocessed");
  const int nx = sm.nx;
  Vec s(sm.nv * nx);
  for (int k = 0; k < sm.nv; ++k) s.segment(k * nx, nx).setConstant(std::sqrt(sm.weights(k)));
  const Vec sinv = s.cwiseInverse();
  StepMatrices out = sm;
  out.A1 = pruned(SpMat(s.asDiagonal() * sm.A1 * sinv.asDiagonal()));
  out.B1 = pruned(static_cast<double>(nx) * SpMat(s.asDiagonal() * sm.B1));
  out.A2 = pruned(SpMat(sm.A2 * sinv.asDiagonal()) / static_cast<double>(nx));
  out.B2 = sm.B2;
  out.b_r = s.cwiseProduct(sm.b_r);
  out.b_j = sm.b_j / static_cast<double>(nx);
  out.preprocessed = true;
  return out;
}

namespace {
Vec sqrt_weight_vector(const Discretization& d) {
  Vec s(d.n());
  for (int k = 0; k < d.nv; ++k) s.segment(k * d.nx, d.nx).setConstant(std::sqrt(d.v_weights(k)));
  return s;
}
}  // namespace

ParityState scale_state(const ParityState& st, const Discretization& d) {
  if (st.scaled) throw StateError("scale_state: state already scaled");
  return {sqrt_weight_vector(d).cwiseProduct(st.r), st.j / static_cast<double>(d.nx), true};
}

ParityState unscale_state(const ParityState& st, const Discretization& d) {
  if (!st.scaled) throw StateError("unscale_state: state is not scaled");
  return {st.r.cwiseQuotient(sqrt_weight_vector(d)), st.j * static_cast<double>(d.nx), false};
}

Vec mass_density(const ParityState& st, const Discretization& d) {
  if (st.scaled) throw StateError("mass_density: expects an unscaled state");
  Vec rho = Vec::Zero(d.nx);
  for (int k = 0; k < d.nv; ++k) rho += d.v_weights(k) * st.r.segment(k * d.nx, d.nx);
  return rho;
}

double max_abs(const SpMat& m) {
  double out = 0.0;
  for (int r = 0; r < m.outerSize(); ++r)
    for (SpMat::InnerIterator it(m, r); it; ++it) out = std::max(out, std::abs(it.value()));
  return out;
}

void write_triplets(std::ostream& os, const SpMat& m) {
  os << std::setprecision(17);
  for (int r = 0; r < m.outerSize(); ++r)
    for (SpMat::InnerIterator it(m, r); it; ++it) os << it.row() << ' ' << it.col() << ' ' << it.value() << '\n';
}

}  // namespace apt
