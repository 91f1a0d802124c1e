#pragma once

#include <optional>
#include <ostream>

#include "apt/common.hpp"
#include "apt/mesh.hpp"
#include "apt/transport.hpp"

namespace apt {

struct Betas {
  double b1 = 0.0, b2 = 0.0, b3 = 0.0;
};

// Relaxation weights at one grid point. Falls back to the limit (0, 1/sigma, 0)
// once sigma_S tau / eps^2 exceeds 700.
Betas betas(double tau, double eps, double sigma_S_at_x, double sigma_at_x);

// Operators of the relaxation and convection steps. Vectors of length N_v*N_x
// are k-major: entry k*N_x + m is velocity k at grid point x_{m+1}.
struct BuildingBlocks {
  int nx = 0, nv = 0;
  Vec v, w;                        // ordinates and weights
  Mat V, W, Wd;                    // N_v x N_v: diag(v), 1 w^T, diag(w)
  SpMat Dh, Lh, I1, I2;            // N_x x N_x; I1/I2 pick the first/last point
  Vec E_nabla_L, E_nabla_R;        // eps v_k / (eps v_k + sigma h) at each end
  SpMat grad;                      // boundary-modified gradient, block diagonal
  SpMat L_bdry, D_bdry;            // boundary-modified Laplacian / gradient
  Vec B_n, f_star, g_star;         // boundary source vectors
  Vec beta1, beta2, beta3;         // per grid point, length N_x
  Vec sigma_A, Q;                  // per grid point, length N_x
  double tau = 0.0, lambda = 0.0, h = 0.0, eps = 0.0;
  double sigma_L = 1.0, sigma_R = 1.0;  // sigma at x_1 and x_{N_x}
};

BuildingBlocks build_blocks(const Discretization& disc, const TransportProblem& prob,
                            std::optional<Betas> beta_override = std::nullopt);

struct ParityState {
  Vec r, j;
  bool scaled = false;
};

ParityState zero_state(const Discretization& disc);

// Exact relaxation over one step (exponential integrator).
ParityState relaxation_step(const ParityState& s, const BuildingBlocks& b);

// Upwind convection with incoming-boundary sources.
ParityState convection_step(const ParityState& s, const BuildingBlocks& b);

struct StepMatrices {
  SpMat A1, B1, A2, B2;
  Vec b_r, b_j;
  Vec beta1, beta2, beta3;
  Vec weights;
  int nx = 0, nv = 0;
  bool preprocessed = false;

  // (A1 r + B1 j + b_r, A2 r + B2 j + b_j)
  ParityState apply(const ParityState& s) const;
};

// One-step matrices obtained by composing the relaxation and convection
// operators.
StepMatrices assemble_step_matrices(const Discretization& disc, const TransportProblem& prob,
                                    std::optional<Betas> beta_override = std::nullopt);
StepMatrices compose_step_matrices(const BuildingBlocks& b);

// r -> (W_d^{1/2} x I) r and j -> j / N_x applied to the step matrices.
StepMatrices preprocess(const StepMatrices& sm);

ParityState scale_state(const ParityState& s, const Discretization& disc);
ParityState unscale_state(const ParityState& s, const Discretization& disc);

// rho_m = sum_k w_k r_{k,m}; requires an unscaled state.
Vec mass_density(const ParityState& s, const Discretization& disc);

double max_abs(const SpMat& m);

// "row col value" lines, zero-based, row-major order.
void write_triplets(std::ostream& os, const SpMat& m);

}  // namespace apt
