#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "apt/common.hpp"
#include "apt/evolution.hpp"

namespace apt {

// source:      [[A, b], [0, 0]]  (the augmented component stays constant)
// unit_corner: [[A, b], [0, 1]]
enum class HomogenizeVariant { source, unit_corner };

SpMat homogenize(const SpMat& A, const Vec& b, HomogenizeVariant variant = HomogenizeVariant::source);

// M = H1 + i H2 with H1 = (M + M^T)/2, H2 = (M - M^T)/(2i).
struct HermitianSplit {
  CSpMat H1, H2;
};
HermitianSplit hermitian_split(const SpMat& M);
HermitianSplit hermitian_split(const CSpMat& M);

// Extreme eigenvalues of the Hermitian part (M + M^T)/2.
// lambda_plus = max(0, lambda_max), lambda_minus = max(0, -lambda_min).
struct SpectrumSummary {
  double lambda_max = 0.0, lambda_min = 0.0;
  double lambda_plus() const { return std::max(0.0, lambda_max); }
  double lambda_minus() const { return std::max(0.0, -lambda_min); }
};
SpectrumSummary hermitian_part_spectrum(const SpMat& M);

struct WarpedGrid {
  double L = 0.0, R = 0.0;
  int Np = 0;
  double dp = 0.0;
  Vec p;   // p_k = -L + k dp
  Vec mu;  // 2 pi / (R + L) (k - Np/2)
  std::vector<std::string> warnings;
};

// Warns (does not fail) when L or R is smaller than the spectral reach over t_final.
WarpedGrid build_p_grid(double L, double R, int Np, const SpectrumSummary& spec, double t_final);

// Automatic domain: L = max(L_min, 1.1 lambda_minus t + left_pad),
// R = max(R_min, 1.1 lambda_plus t + right_pad).
struct DomainChoice {
  bool automatic = true;
  double L_min = 0.0, R_min = 0.0;  // with automatic = false these are L and R
  double left_pad = 3.0, right_pad = 8.0;
};
WarpedGrid choose_p_grid(const DomainChoice& dc, int Np, const SpectrumSummary& spec, double t_final);

enum class Profile { exp_abs, smooth_r };

// smooth_r: g(p) = e^{-p} for p >= 0 and e^{-p} S_r((p + width)/width) for p < 0,
// where S_r is the degree 2r+1 smoothstep (C^r at both ends, 0 below 0, 1 above 1).
struct ProfileOptions {
  Profile kind = Profile::exp_abs;
  int r = 4;
  double width = 3.0;
};

double profile_value(double p, const ProfileOptions& opt);
Vec p_profile(const WarpedGrid& grid, const ProfileOptions& opt);

// [g(p_0) u0; g(p_1) u0; ...]
CVec warped_initial(const Vec& u0, const WarpedGrid& grid, const ProfileOptions& opt = {});

// p-space <-> Fourier coefficients per base component: u(p_j) = sum_l c_l e^{i mu_l (p_j + L)}.
CVec to_fourier(const CVec& warped, const WarpedGrid& grid, int base_dim);
CVec from_fourier(const CVec& coeffs, const WarpedGrid& grid, int base_dim);

struct SchrodingerizedSystem {
  HermitianSplit split;
  WarpedGrid grid;
  int base_dim = 0;
  SpectrumSummary spectrum;

  // mu_l H1 - H2
  CSpMat mode_hamiltonian(int l) const;
  // D_mu kron H1 - I kron H2; only for small instances.
  CSpMat assemble_total() const;
  double hermiticity_defect() const;
};

SchrodingerizedSystem schrodingerize_system(const SpMat& M, const WarpedGrid& grid,
                                            std::optional<SpectrumSummary> spec = std::nullopt);

enum class RecoveryMode { point, integral };

// psi in p-space (layout of warped_initial). Point mode uses the first grid p >= p_star.
Vec recover(const CVec& psi, const WarpedGrid& grid, RecoveryMode mode, double p_star, int base_dim);

struct RecoveryOptions {
  RecoveryMode mode = RecoveryMode::point;
  std::optional<double> p_star;  // default: 1.1 lambda_plus t
  double margin = 1.1;
  double coefficient_cutoff = 1e-15;  // skip modes with |c_l| below this fraction of max |c|
  int jobs = 1;
};

struct SchrodingerRun {
  Vec u;
  double p_star = 0.0;
  double p_used = 0.0;  // grid point actually sampled
  int modes_evolved = 0;
  int modes_skipped = 0;
  double max_norm_defect = 0.0;  // max over modes of |‖psi_l(t)‖ - ‖psi_l(0)‖| / (1 + t)
};

// Evolves the Fourier-diagonal system mode by mode and recovers u(t) without
// forming the N_p n dimensional state.
SchrodingerRun evolve_and_recover(const SchrodingerizedSystem& sys, const Vec& u0, double t,
                                  const ProfileOptions& prof, const EvolutionConfig& evo,
                                  const RecoveryOptions& rec);

// Same result through the full p-space state: FFT, per-mode evolution, inverse FFT, recover.
Vec evolve_and_recover_full(const SchrodingerizedSystem& sys, const Vec& u0, double t,
                            const ProfileOptions& prof, const EvolutionConfig& evo, RecoveryMode mode,
                            double p_star);

double default_p_star(const SpectrumSummary& spec, double t, double margin = 1.1);

struct SchrodingerSettings {
  int Np = 128;
  DomainChoice domain;
  ProfileOptions profile;
  RecoveryOptions recovery;
  EvolutionConfig evolution;
  // The last n_aug components (constant source carriers) are multiplied by this
  // factor before the warped transform and divided by it after recovery.
  double source_scale = 1.0;
};

struct OdeSolution {
  Vec u;
  WarpedGrid grid;
  SpectrumSummary spectrum;
  SchrodingerRun run;
  ComplexityCounters counters;  // of the full H_total (sparsity, max entry, N_p n)
  double hermiticity_defect = 0.0;
};

// du/dt = M u through the Schrodingerized system, sampled at time t.
OdeSolution solve_ode_schrodingerized(const SpMat& M, const Vec& u0, double t, const SchrodingerSettings& s,
                                      int n_aug = 0);

}  // namespace apt
