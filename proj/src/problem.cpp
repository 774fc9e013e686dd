#include "helmlsq/problem.hpp"

#include <cmath>
#include <stdexcept>

#include "helmlsq/parallel.hpp"

namespace helmlsq {

namespace {
const Complex kI(0.0, 1.0);
}

BenchmarkProblem make_duct(double omega, int k_mode) {
  const double kpi = k_mode * M_PI;
  if (!(omega > kpi))
    throw std::invalid_argument("make_duct: need omega > k*pi (propagating mode)");
  const double wx = std::sqrt(omega * omega - kpi * kpi);

  Eigen::Matrix2cd M;
  M << Complex(wx), Complex(-wx),
      (omega - wx) * std::exp(-2.0 * kI * wx), (omega + wx) * std::exp(2.0 * kI * wx);
  Eigen::Vector2cd rhs(Complex(0.0, -1.0), Complex(0.0, 0.0));
  const Eigen::Vector2cd A = M.fullPivLu().solve(rhs);
  const Complex A1 = A(0), A2 = A(1);

  BenchmarkProblem prob;
  prob.name = "duct";
  prob.lo = {0.0, 0.0};
  prob.hi = {2.0, 1.0};
  prob.k_mode = k_mode;
  prob.u_ex = [=](double x, double y) {
    return std::cos(kpi * y) * (A1 * std::exp(-kI * wx * x) + A2 * std::exp(kI * wx * x));
  };
  prob.grad_u_ex = [=](double x, double y) -> std::pair<Complex, Complex> {
    const Complex ex1 = std::exp(-kI * wx * x), ex2 = std::exp(kI * wx * x);
    const Complex ux = std::cos(kpi * y) * (-kI * wx * A1 * ex1 + kI * wx * A2 * ex2);
    const Complex uy = -kpi * std::sin(kpi * y) * (A1 * ex1 + A2 * ex2);
    return {ux, uy};
  };
  prob.coeffs.omega = omega;
  prob.coeffs.c_constant = true;
  prob.coeffs.c = [](double, double) { return 1.0; };
  prob.coeffs.f = [](double, double) { return Complex(0.0, 0.0); };
  auto u = prob.u_ex;
  auto grad = prob.grad_u_ex;
  prob.coeffs.g = [u, grad, omega](double x, double y, double nx, double ny) {
    const auto [ux, uy] = grad(x, y);
    return ux * nx + uy * ny + kI * omega * u(x, y);
  };
  return prob;
}

BenchmarkProblem make_lens(double omega) {
  const double r1 = 0.5, r2 = 0.5;
  auto E = [=](double x, double y) {
    return std::exp(-32.0 * ((x - r1) * (x - r1) + (y - r2) * (y - r2)));
  };
  auto c = [=](double x, double y) { return (4.0 / 3.0) * (1.0 - E(x, y) / 8.0); };
  // c_x = (32/3)(x-r1)E, c_xx = (32/3)E(1 - 64(x-r1)^2), symmetric in y.
  auto cx = [=](double x, double y) { return (32.0 / 3.0) * (x - r1) * E(x, y); };
  auto cy = [=](double x, double y) { return (32.0 / 3.0) * (y - r2) * E(x, y); };
  auto cxx = [=](double x, double y) {
    return (32.0 / 3.0) * E(x, y) * (1.0 - 64.0 * (x - r1) * (x - r1));
  };
  auto cyy = [=](double x, double y) {
    return (32.0 / 3.0) * E(x, y) * (1.0 - 64.0 * (y - r2) * (y - r2));
  };

  BenchmarkProblem prob;
  prob.name = "lens";
  prob.lo = {0.0, 0.0};
  prob.hi = {1.0, 1.0};
  prob.u_ex = [=](double x, double y) { return c(x, y) * std::exp(kI * omega * x * y); };
  prob.grad_u_ex = [=](double x, double y) -> std::pair<Complex, Complex> {
    const Complex e = std::exp(kI * omega * x * y);
    return {(cx(x, y) + kI * omega * y * c(x, y)) * e,
            (cy(x, y) + kI * omega * x * c(x, y)) * e};
  };
  prob.coeffs.omega = omega;
  prob.coeffs.c_constant = false;
  prob.coeffs.c = c;
  prob.coeffs.f = [=](double x, double y) {
    const Complex e = std::exp(kI * omega * x * y);
    const double cv = c(x, y);
    const Complex lap =
        (cxx(x, y) + cyy(x, y) + 2.0 * kI * omega * (y * cx(x, y) + x * cy(x, y)) -
         omega * omega * (x * x + y * y) * cv) * e;
    const double kap = omega / cv;
    return -lap - kap * kap * cv * e;
  };
  auto u = prob.u_ex;
  auto grad = prob.grad_u_ex;
  prob.coeffs.g = [u, grad, c, omega](double x, double y, double nx, double ny) {
    const auto [ux, uy] = grad(x, y);
    return ux * nx + uy * ny + kI * (omega / c(x, y)) * u(x, y);
  };
  return prob;
}

BenchmarkProblem make_manufactured(double omega, int degree, Point lo, Point hi) {
  if (degree < 1) throw std::invalid_argument("make_manufactured: need degree >= 1");
  // Fixed tensor polynomial u(x,y) = P(x) Q(y) with complex coefficients.
  Eigen::VectorXcd P(degree + 1), Q(degree + 1);
  for (int i = 0; i <= degree; ++i) {
    P(i) = Complex(1.0 / (1.0 + i), 0.5 - 0.15 * i);
    Q(i) = Complex(0.7 - 0.2 * i, 1.0 / (2.0 + i));
  }
  auto poly = [](const Eigen::VectorXcd& a, double t) {
    Complex v = 0;
    for (int i = int(a.size()) - 1; i >= 0; --i) v = v * t + a(i);
    return v;
  };
  auto dpoly = [](const Eigen::VectorXcd& a, double t) {
    Complex v = 0;
    for (int i = int(a.size()) - 1; i >= 1; --i) v = v * t + double(i) * a(i);
    return v;
  };
  auto ddpoly = [](const Eigen::VectorXcd& a, double t) {
    Complex v = 0;
    for (int i = int(a.size()) - 1; i >= 2; --i) v = v * t + double(i) * (i - 1) * a(i);
    return v;
  };

  BenchmarkProblem prob;
  prob.name = "manufactured";
  prob.lo = lo;
  prob.hi = hi;
  prob.u_ex = [=](double x, double y) { return poly(P, x) * poly(Q, y); };
  prob.grad_u_ex = [=](double x, double y) -> std::pair<Complex, Complex> {
    return {dpoly(P, x) * poly(Q, y), poly(P, x) * dpoly(Q, y)};
  };
  prob.coeffs.omega = omega;
  prob.coeffs.c_constant = true;
  prob.coeffs.c = [](double, double) { return 1.0; };
  prob.coeffs.f = [=](double x, double y) {
    const Complex lap = ddpoly(P, x) * poly(Q, y) + poly(P, x) * ddpoly(Q, y);
    return -lap - omega * omega * poly(P, x) * poly(Q, y);
  };
  auto u = prob.u_ex;
  auto grad = prob.grad_u_ex;
  prob.coeffs.g = [u, grad, omega](double x, double y, double nx, double ny) {
    const auto [ux, uy] = grad(x, y);
    return ux * nx + uy * ny + kI * omega * u(x, y);
  };
  return prob;
}

Complex helmholtz_residual_fd(const BenchmarkProblem& prob, double x, double y, double h) {
  auto u = prob.u_ex;
  auto lap1 = [&](double cx, double cy, bool along_x) {
    auto at = [&](double t) { return along_x ? u(cx + t, cy) : u(cx, cy + t); };
    return (-at(2 * h) + 16.0 * at(h) - 30.0 * at(0) + 16.0 * at(-h) - at(-2 * h)) /
           (12.0 * h * h);
  };
  const Complex lap = lap1(x, y, true) + lap1(x, y, false);
  const double kap = prob.coeffs.kappa(x, y);
  return -lap - kap * kap * u(x, y) - prob.coeffs.f(x, y);
}

double relative_l2_error(const MeshTopology& mesh, const ElementBasis& basis,
                         const Eigen::VectorXcd& fields, const BenchmarkProblem& prob,
                         int quad_order, int workers) {
  const int nq = std::max(quad_order, basis.p + 3);
  const QuadratureRule quad = gauss_legendre(nq);
  const int n2 = basis.n2d();
  if (fields.size() != Eigen::Index(n2) * mesh.n_elements())
    throw std::invalid_argument("relative_l2_error: field size mismatch");

  // Per-axis basis values at the quadrature nodes.
  Eigen::MatrixXd B(nq, basis.p + 1);
  for (int a = 0; a < nq; ++a) B.row(a) = legendre_values(basis.p, quad.x(a)).transpose();

  const int N = mesh.n_elements();
  Eigen::VectorXd num(N), den(N);
  parallel_for(N, workers, [&](std::ptrdiff_t k) {
    const Element& el = mesh.elements[k];
    const Eigen::VectorXcd c = fields.segment(k * n2, n2);
    const auto M = coeff_matrix(basis, c);
    // u_h at all tensor nodes: (B M^T B^T)(a,b) at (x_a, y_b).
    const Eigen::MatrixXcd vals = B.cast<Complex>() * M.transpose() * B.transpose().cast<Complex>();
    double ln = 0, ld = 0;
    for (int a = 0; a < nq; ++a)
      for (int b = 0; b < nq; ++b) {
        const double x = el.x0 + mesh.dx * quad.x(a);
        const double y = el.y0 + mesh.dy * quad.x(b);
        const Complex ue = prob.u_ex(x, y);
        const double w = quad.w(a) * quad.w(b);
        ln += w * std::norm(ue - vals(a, b));
        ld += w * std::norm(ue);
      }
    num(k) = ln;
    den(k) = ld;
  });
  const double nsum = num.sum(), dsum = den.sum();
  if (!(dsum > 0)) throw std::runtime_error("relative_l2_error: exact solution has zero norm");
  return std::sqrt(nsum / dsum);
}

}  // namespace helmlsq
