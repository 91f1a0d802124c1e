#pragma once

#include "apt/common.hpp"

namespace apt {

enum class Method { iterative, steady };
enum class VelocitySet { gauss_legendre, s8_half };

struct Quadrature {
  Vec nodes;
  Vec weights;
};

// Gauss-Legendre rule on (0,1), weights summing to 1. Nodes ascending.
Quadrature gauss_legendre_01(int nv);

// Positive half of the 8-point Gauss-Legendre set on [-1,1]: four nodes in
// (0,1) whose weights already sum to 1.
Quadrature s8_positive_half();

// Largest admissible tau/h^2 for each time-marching method.
double cfl_limit(Method m);

struct GridSpec {
  double x_lo = 0.0;
  double x_hi = 1.0;
  int nx = 0;
  int nv = 0;  // ignored for s8_half (always 4)
  VelocitySet velocity_set = VelocitySet::gauss_legendre;
  double tau = 0.0;
  double t_final = 0.0;
  double epsilon = 0.0;
  Method method = Method::iterative;
  bool require_even_nx = false;
};

struct Discretization {
  double x_lo = 0.0, x_hi = 1.0;
  int nx = 0, nv = 0, nt = 0;
  double h = 0.0, tau = 0.0, epsilon = 0.0;
  Vec v_nodes, v_weights;
  Method method = Method::iterative;

  double lambda() const { return tau / h; }
  int n() const { return nv * nx; }
  // Interior grid points x_1..x_{N_x}.
  Vec x_points() const;
};

// Validates the spec and fills h, N_t = ceil(t_final/tau) and the quadrature.
Discretization build_discretization(const GridSpec& spec);

}  // namespace apt
