#include "apt/transport.hpp"

#include <algorithm>

namespace apt {

Fn polynomial(std::vector<double> c) {
  if (c.empty()) c.push_back(0.0);
  return [c](double t) {
    double acc = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * t + *it;
    return acc;
  };
}

namespace {
bool is_const(const std::vector<double>& c, double value) {
  if (c.empty()) return value == 0.0;
  return c[0] == value && std::all_of(c.begin() + 1, c.end(), [](double x) { return x == 0.0; });
}
}  // namespace

TransportProblem make_problem(const std::vector<double>& sigma_S, const std::vector<double>& sigma_A,
                              const std::vector<double>& Q, const std::vector<double>& F_L,
                              const std::vector<double>& F_R) {
  TransportProblem p;
  p.sigma_S = polynomial(sigma_S);
  p.sigma_A = polynomial(sigma_A);
  p.Q = polynomial(Q);
  p.F_L = polynomial(F_L);
  p.F_R = polynomial(F_R);
  p.constant_coefficient = is_const(sigma_S, 1.0) && is_const(sigma_A, 0.0) && is_const(Q, 0.0);
  return p;
}

TransportProblem problem_I() { return make_problem({1.0}, {0.0}, {0.0}, {1.0}, {0.0}); }

TransportProblem problem_II() {
  return make_problem({1.0, 0.0, 100.0}, {0.0}, {1.0}, {0.0}, {0.0});
}

TransportProblem problem_III() { return make_problem({1.0}, {0.0}, {1.0}, {0.0, 1.0}, {0.0}); }

}  // namespace apt
