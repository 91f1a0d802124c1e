#include "apt/mesh.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace apt {

namespace {

// Legendre P_n(x) and P_n'(x) by the three-term recurrence.
void legendre(int n, double x, double& p, double& dp) {
  double p0 = 1.0, p1 = x;
  if (n == 0) {
    p = 1.0;
    dp = 0.0;
    return;
  }
  for (int k = 2; k <= n; ++k) {
    const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = pk;
  }
  p = p1;
  dp = n * (x * p1 - p0) / (x * x - 1.0);
}

// Nodes/weights on [-1,1], ascending.
void gauss_legendre_pm1(int n, Vec& x, Vec& w) {
  x.resize(n);
  w.resize(n);
  for (int i = 0; i < n; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double p = 0, dp = 0;
    for (int it = 0; it < 100; ++it) {
      legendre(n, z, p, dp);
      const double dz = p / dp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    legendre(n, z, p, dp);
    x(n - 1 - i) = z;
    w(n - 1 - i) = 2.0 / ((1.0 - z * z) * dp * dp);
  }
}

}  // namespace

Quadrature gauss_legendre_01(int nv) {
  if (nv < 1) throw std::invalid_argument("gauss_legendre_01: N_v must be >= 1");
  Quadrature q;
  if (nv == 1) {
    q.nodes = Vec::Constant(1, 0.5);
    q.weights = Vec::Constant(1, 1.0);
    return q;
  }
  Vec x, w;
  gauss_legendre_pm1(nv, x, w);
  q.nodes = (x.array() + 1.0) / 2.0;
  q.weights = w / 2.0;
  return q;
}

Quadrature s8_positive_half() {
  Vec x, w;
  gauss_legendre_pm1(8, x, w);
  Quadrature q;
  q.nodes = x.tail(4);
  q.weights = w.tail(4);
  return q;
}

double cfl_limit(Method m) { return m == Method::iterative ? 1.0 : 10.0 / 11.0; }

Vec Discretization::x_points() const {
  Vec x(nx);
  for (int m = 0; m < nx; ++m) x(m) = x_lo + (m + 1) * h;
  return x;
}

Discretization build_discretization(const GridSpec& s) {
  if (!(s.x_hi > s.x_lo)) throw ConfigError("domain: x_hi must exceed x_lo");
  if (s.nx < 1) throw ConfigError("discretization: nx must be positive");
  if (s.velocity_set == VelocitySet::gauss_legendre && s.nv < 1)
    throw ConfigError("discretization: nv must be positive");
  if (!(s.tau > 0)) throw ConfigError("discretization: tau must be positive");
  if (!(s.t_final > 0)) throw ConfigError("run: t_final must be positive");
  if (!(s.epsilon > 0)) throw ConfigError("physics: epsilon must be positive");
  if (s.require_even_nx && s.nx % 2 != 0)
    throw ConfigError("discretization: nx must be even (got " + std::to_string(s.nx) + ")");

  Discretization d;
  d.x_lo = s.x_lo;
  d.x_hi = s.x_hi;
  d.nx = s.nx;
  d.h = (s.x_hi - s.x_lo) / (s.nx + 1);
  d.tau = s.tau;
  d.epsilon = s.epsilon;
  d.method = s.method;

  const double ratio = s.tau / (d.h * d.h);
  // Tolerance absorbs rounding in presets such as tau = (10/11) h^2.
  if (ratio > cfl_limit(s.method) * (1.0 + 1e-12)) {
    std::ostringstream msg;
    msg << (s.method == Method::iterative ? "CFL 1 violated" : "CFL 10/11 violated")
        << ": tau/h^2 = " << ratio;
    throw ConfigError(msg.str());
  }

  const Quadrature q = s.velocity_set == VelocitySet::s8_half ? s8_positive_half()
                                                              : gauss_legendre_01(s.nv);
  d.v_nodes = q.nodes;
  d.v_weights = q.weights;
  d.nv = static_cast<int>(q.nodes.size());

  d.nt = static_cast<int>(std::ceil(s.t_final / s.tau * (1.0 - 1e-12)));
  if (d.nt < 1) d.nt = 1;
  return d;
}

}  // namespace apt
