// Problem data and the benchmark problems with closed-form solutions.

#ifndef HELMLSQ_PROBLEM_HPP
#define HELMLSQ_PROBLEM_HPP

#include <functional>
#include <string>

#include "helmlsq/element_basis.hpp"
#include "helmlsq/geometry.hpp"

namespace helmlsq {

struct ProblemCoefficients {
  double omega = 1.0;
  double rho = 1e-5;  // interface impedance parameter
  bool c_constant = true;
  std::function<double(double, double)> c;        // wave speed, > 0
  std::function<Complex(double, double)> f;       // volume source
  // Impedance data on the domain boundary; (nx, ny) is the outward normal.
  std::function<Complex(double, double, double, double)> g;

  double kappa(double x, double y) const { return omega / c(x, y); }
};

struct BenchmarkProblem {
  std::string name;
  Point lo, hi;
  ProblemCoefficients coeffs;
  std::function<Complex(double, double)> u_ex;
  // Gradient of the exact solution, (du/dx, du/dy).
  std::function<std::pair<Complex, Complex>(double, double)> grad_u_ex;
  int k_mode = 0;  // duct only
};

// Rigid-walled duct on [0,2]x[0,1]: constant wave number, f = 0,
//   u_ex = cos(k pi y) (A1 e^{-i w_x x} + A2 e^{i w_x x}),
// with (A1, A2) from the 2x2 impedance system and w_x = sqrt(w^2 - (k pi)^2).
BenchmarkProblem make_duct(double omega, int k_mode);

// Gaussian-lens wave speed on the unit square:
//   c(x,y) = (4/3)(1 - exp(-32((x-1/2)^2+(y-1/2)^2))/8),
//   u_ex = c e^{i w x y},  f = -Lap(u_ex) - (w/c)^2 u_ex (closed form).
BenchmarkProblem make_lens(double omega);

// Tensor-polynomial manufactured solution of per-axis degree `degree` with a
// constant wave number; data derived exactly. Used by the exactness oracles.
BenchmarkProblem make_manufactured(double omega, int degree, Point lo = {0, 0},
                                   Point hi = {1, 1});

// Residual -Lap(u_ex) - kappa^2 u_ex - f at a point via 4th-order central
// finite differences of u_ex (test oracle).
Complex helmholtz_residual_fd(const BenchmarkProblem& prob, double x, double y, double step);

// || u_ex - u_h ||_{L2} / || u_ex ||_{L2}, elementwise tensor quadrature.
double relative_l2_error(const MeshTopology& mesh, const ElementBasis& basis,
                         const Eigen::VectorXcd& fields, const BenchmarkProblem& prob,
                         int quad_order, int workers = 0);

}  // namespace helmlsq

#endif
