#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "apt/bounds.hpp"
#include "apt/config.hpp"
#include "apt/iterative.hpp"
#include "apt/steady.hpp"

namespace apt {

double relative_l2(const Vec& a, const Vec& ref);

struct ErrorMetrics {
  double rho = 0.0, j = 0.0;  // relative L2; j over the full unscaled parity vector
  double max() const { return std::max(rho, j); }
};

ErrorMetrics compare(const TransportSolution& a, const TransportSolution& ref);

struct SolveReport {
  ProblemConfig cfg;
  Discretization disc;
  TransportSolution schr, oracle;
  ErrorMetrics vs_oracle;
  // iterative: the exp((C - I) N_t) embedding of the same iteration
  std::optional<TransportSolution> continuous;
  std::optional<ErrorMetrics> vs_continuous, continuous_vs_oracle;
  // steady: whole space-time trajectory
  double trajectory_error = 0.0;
  std::optional<SteadyResult> steady;

  double evolution_time = 0.0;
  ComplexityCounters counters;
  double hermiticity_defect = 0.0;
  double norm_defect = 0.0;
  double L = 0.0, R = 0.0, p_star = 0.0, p_used = 0.0;
  int modes_evolved = 0, modes_skipped = 0;
  std::vector<std::string> warnings;
  double seconds = 0.0;

  // Schrodingerized output against the flow it emulates: the continuous
  // embedding (iterative) or the direct trajectory (steady).
  double contract_error() const;
  bool contract_ok(double tol = 2e-2) const;
};

SolveReport run_solve(const ProblemConfig& cfg);

// Writes solution.csv, errors.csv, plot.py, run.json (and trajectory.csv for
// steady runs) into dir; returns the file names written.
std::vector<std::string> write_solve_outputs(const SolveReport& rep, const std::filesystem::path& dir);

struct LadderRung {
  BoundReport report;
  std::vector<double> A2_over_sqrt_nv;  // across the N_v ratio set
  std::vector<int> nv_set;
  int check_nt = 0;  // horizon used for the closed-form check
};

struct BoundsLadder {
  double epsilon = 1e-8;
  std::vector<LadderRung> rungs;
  double gap_slope = 0.0;   // log-log slope of 1 - ||A1_bar|| against N_t
  double gap_c_min = 0.0;   // min over rungs of (1 - ||A1_bar||) N_t
  MatrixLemmaReport matrix_lemmas;
  std::vector<EigLemmaReport> lemmas;
};

BoundsLadder run_bounds_ladder(const std::vector<int>& nxs, int nv, double epsilon, std::uint64_t seed);

// Entry point of the aptq tool. Exit codes: 0 success, 1 numerical-contract
// failure, 2 configuration error.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace apt
