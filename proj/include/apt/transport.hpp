#pragma once

#include <functional>
#include <string>
#include <vector>

namespace apt {

using Fn = std::function<double(double)>;

// Coefficients and incoming data of the slab transport problem.
struct TransportProblem {
  Fn sigma_S;
  Fn sigma_A;
  Fn Q;
  Fn F_L;  // incoming at x_lo, v > 0
  Fn F_R;  // incoming at x_hi, v < 0 (given as a function of |v|)
  bool constant_coefficient = false;

  double sigma(double x, double eps) const { return sigma_S(x) + eps * eps * sigma_A(x); }
};

// Polynomial with coefficients c0 + c1 t + c2 t^2 + ...
Fn polynomial(std::vector<double> coeffs);

TransportProblem make_problem(const std::vector<double>& sigma_S, const std::vector<double>& sigma_A,
                              const std::vector<double>& Q, const std::vector<double>& F_L,
                              const std::vector<double>& F_R);

TransportProblem problem_I();    // F_L = 1, sigma_S = 1
TransportProblem problem_II();   // sigma_S = 1 + (10x)^2, Q = 1
TransportProblem problem_III();  // F_L = v, sigma_S = 1, Q = 1

}  // namespace apt
