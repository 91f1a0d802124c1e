#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "apt/ap_scheme.hpp"
#include "apt/steady.hpp"

namespace apt {

// Preprocessed A1, A2 with the relaxation weights at their stiff limit
// (beta1, beta2, beta3) = (0, 1/sigma, 0). With these weights B1 = B2 = 0.
struct ReducedBlocks {
  Mat A1_bar, A2_bar;
};
ReducedBlocks reduced_blocks(const Discretization& disc, const TransportProblem& prob);

// H = H_bar + E in the split_rj layout with zero initial data.
struct SplitSystem {
  GlobalSystem gs;     // H assembled with the actual weights
  SpMat H_bar, E;
  Mat A1_bar, A2_bar;
  double stiff_scale = 0.0;  // (tau/eps^2) exp(-tau/eps^2)
};

// Throws Unsupported for variable-coefficient problems.
SplitSystem split_system(const Discretization& disc, const TransportProblem& prob);

// exp(-H_bar t) = e^{-t} [I X; 0 Y] with X, Y block upper triangular Toeplitz:
// superdiagonal k of Y holds A1^k t^k/k!, of X holds A2 A1^{k-1} t^k/k!.
Mat exp_Hbar_closed_form(const Mat& A1_bar, const Mat& A2_bar, double t, int nt);

// (2 + a2/a1) exp((a1 - 1) T)
double bound_exp_norm(double norm_A1, double norm_A2, double T);

// Spectral norm: SVD up to dimension 1000, power iteration on M^T M beyond.
double norm2(const Mat& M);
double norm2(const SpMat& M);

struct BoundReport {
  int nx = 0, nv = 0, nt = 0;
  double norm_A1_bar = 0.0, norm_A2_bar = 0.0;
  double lower_A1 = 0.0;         // (5/11) max_k w_k
  double lower_A1_nv = 0.0;      // 5 / (11 N_v)
  double upper_A1_formula = 0.0;  // closed-form upper estimate, reported only
  double contraction_gap = 0.0;  // 1 - ||A1_bar||
  bool contraction = false;
  bool lower_ok = false;
  bool upper_formula_holds = false;
  bool closed_form_checked = false;
  bool closed_form_ok = false;
  double closed_form_error = 0.0;
  double E_norm = 0.0, E_max = 0.0;
  double T_estimate = 0.0;  // for delta = 1/N_x; 0 without contraction

  double exp_bound(double T) const { return bound_exp_norm(norm_A1_bar, norm_A2_bar, T); }
};

BoundReport matrix_2norms(const ReducedBlocks& rb, const Discretization& disc);

// Adds the closed-form check (dense oracle) and E norms on a small instance.
void check_closed_form(BoundReport& rep, const SplitSystem& split, const std::vector<double>& times);

// T ||E|| (2 + a2/a1)^2 exp((a1 - 1) T)
double perturbation_error_bound(double norm_E, double norm_A1, double norm_A2, double T);

// Dense exp(-H T) - exp(-H_bar T); small instances only.
double perturbation_error_measured(const SplitSystem& split, double T);

// Dense matrix exponential exp(-H t), the oracle for the closed form.
Mat dense_exp(const SpMat& H, double t);

struct EigLemmaReport {
  int nx = 0;
  Vec L_eigs, D_abs_eigs, D2_eigs;  // ascending; D_h spectrum as magnitudes
  double D_real_part_max = 0.0;     // max |Re| over the D_h spectrum
  bool stated_formula_L = false, stated_formula_D = false;
  bool classical_formula_L = false, classical_formula_D = false;
  bool D2_display_matches = false;
  bool L_max_negative = false, L_min_above_m4 = false;
  bool D_imaginary = false, D_abs_below_2 = false;
  bool D2_in_range = false;

  bool load_bearing_ok() const {
    return L_max_negative && L_min_above_m4 && D_imaginary && D_abs_below_2 && D2_in_range;
  }
};

EigLemmaReport eig_lemma_checks(int nx);

struct MatrixLemmaReport {
  int trials = 0;
  int weyl_violations = 0;
  double perturbation_order = 0.0;  // fitted log-log slope of the second-order remainder
  int block_norm_violations = 0;
};

MatrixLemmaReport weyl_and_perturbation_checks(int dim, int trials, std::uint64_t seed);

}  // namespace apt
