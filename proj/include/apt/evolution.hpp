#pragma once

#include "apt/common.hpp"

namespace apt {

enum class EvolutionMethod { automatic, exact_diag, krylov, rk_adaptive };

struct EvolutionConfig {
  EvolutionMethod method = EvolutionMethod::automatic;
  double tol = 1e-10;        // 2-norm error target over the whole interval
  int max_dim_exact = 512;   // automatic: exact_diag at or below this size
  int krylov_dim = 30;
};

void validate(const EvolutionConfig& cfg);

// max |H - H^dagger| over stored entries
double hermiticity_defect(const CSpMat& H);

// psi(t) = exp(-i H t) psi0 for Hermitian H.
CVec evolve(const CSpMat& H, const CVec& psi0, double t, const EvolutionConfig& cfg = {});

// Dense path, also used by the exact_diag branch.
CVec evolve_exact(const CMat& H, const CVec& psi0, double t);

struct ComplexityCounters {
  long sparsity = 0;   // max nonzeros in any row
  double max_abs = 0;  // largest entry magnitude
  long dim = 0;
  int qubits = 0;      // ceil(log2 dim)
  double chi(double t) const { return static_cast<double>(sparsity) * max_abs * t; }
};

ComplexityCounters complexity_counters(const CSpMat& H);
ComplexityCounters complexity_counters(const SpMat& H);
int qubits_for(long dim);

}  // namespace apt
