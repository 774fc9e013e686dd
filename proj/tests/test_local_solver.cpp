#include <random>

#include "doctest.h"
#include "helmlsq/interface_operator.hpp"
#include "helmlsq/local_solver.hpp"
#include "oracles.hpp"

using namespace helmlsq;

namespace {

ProblemCoefficients zero_data_coeffs(double omega, double rho = 1e-5) {
  ProblemCoefficients c;
  c.omega = omega;
  c.rho = rho;
  c.c_constant = true;
  c.c = [](double, double) { return 1.0; };
  c.f = [](double, double) { return Complex(0, 0); };
  c.g = [](double, double, double, double) { return Complex(0, 0); };
  return c;
}

Eigen::VectorXcd random_edge_vector(const LocalSystem& ls, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> gauss;
  Eigen::VectorXcd v(ls.n_interface_dofs());
  for (long i = 0; i < v.size(); ++i) v(i) = Complex(gauss(rng), gauss(rng));
  return v;
}

}  // namespace

TEST_CASE("single-element linear solution is reproduced exactly") {
  // u = x + y with kappa = 1: f = -(x+y), g = du/dn + i u.
  const MeshTopology mesh = build_mesh({0, 0}, {1, 1}, 1, 1);
  ProblemCoefficients c = zero_data_coeffs(1.0);
  c.f = [](double x, double y) { return Complex(-(x + y), 0); };
  c.g = [](double x, double y, double nx, double ny) {
    return Complex(nx + ny, 0) + Complex(0, 1) * Complex(x + y, 0);
  };
  const LocalSystem ls(mesh, c, 1, 2);
  const Eigen::VectorXcd u2 = ls.solve_u2();
  BenchmarkProblem probe;
  probe.lo = mesh.lo;
  probe.hi = mesh.hi;
  probe.coeffs = c;
  probe.u_ex = [](double x, double y) { return Complex(x + y, 0); };
  CHECK(relative_l2_error(mesh, ls.basis(), u2, probe, 6) < 1e-10);
}

TEST_CASE("zero data gives zero fields") {
  const MeshTopology mesh = build_mesh({0, 0}, {1, 1}, 3, 3);
  const LocalSystem ls(mesh, zero_data_coeffs(2.0), 1, 3);
  CHECK(ls.solve_u2().norm() == 0.0);
  const Eigen::VectorXcd zero = Eigen::VectorXcd::Zero(ls.n_interface_dofs());
  CHECK(ls.solve_u1(zero).norm() == 0.0);
}

TEST_CASE("kappa = 0 limit: real part is the stiffness, constants in its kernel") {
  const MeshTopology mesh = build_mesh({0, 0}, {1, 1}, 3, 3);
  ProblemCoefficients c = zero_data_coeffs(0.0, 1.0);
  c.omega = 0.0;  // kappa = 0
  const LocalSystem ls(mesh, c, 1, 2);
  const int center = mesh.element_id(1, 1);  // all four sides interior
  const Eigen::MatrixXcd& A = ls.op(center).kernel->A;
  const Eigen::MatrixXcd H = 0.5 * (A + A.adjoint());  // = stiffness
  CHECK((A - A.transpose()).norm() < 1e-13);  // complex symmetric
  CHECK(H.imag().norm() < 1e-13);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H.real());
  CHECK(es.eigenvalues().minCoeff() > -1e-12);
  CHECK(std::abs(es.eigenvalues()(0)) < 1e-12);   // constants
  CHECK(es.eigenvalues()(1) > 1e-6);              // one-dimensional kernel
  // The constant function: first basis function of the orthonormal family.
  Eigen::VectorXcd ones = Eigen::VectorXcd::Zero(ls.n2d());
  ones(0) = 1.0;
  CHECK((H * ones).norm() < 1e-13);
}

TEST_CASE("solve_u1 is linear and local") {
  const MeshTopology mesh = build_mesh({0, 0}, {1, 1}, 3, 3);
  const LocalSystem ls(mesh, zero_data_coeffs(3.0), 2, 4);
  const Eigen::VectorXcd l1 = random_edge_vector(ls, 1);
  const Eigen::VectorXcd l2 = random_edge_vector(ls, 2);
  const Complex a(0.3, -1.2), b(-0.7, 0.4);
  const Eigen::VectorXcd lhs = ls.solve_u1(a * l1 + b * l2);
  const Eigen::VectorXcd rhs = a * ls.solve_u1(l1) + b * ls.solve_u1(l2);
  CHECK((lhs - rhs).norm() <= 1e-12 * rhs.norm());

  // Support on one edge reaches exactly its two elements.
  Eigen::VectorXcd one = Eigen::VectorXcd::Zero(ls.n_interface_dofs());
  one(5 * ls.modes_per_edge()) = 1.0;
  const Eigen::VectorXcd fields = ls.solve_u1(one);
  const InteriorEdge& fe = mesh.interior_edges[5];
  const int n2 = ls.n2d();
  for (int k = 0; k < mesh.n_elements(); ++k) {
    const double nrm = fields.segment(Eigen::Index(k) * n2, n2).norm();
    if (k == fe.owner || k == fe.neighbor)
      CHECK(nrm > 0);
    else
      CHECK(nrm == 0.0);
  }
}

TEST_CASE("polynomial solutions with the exact multiplier are reproduced") {
  // Per-axis degree p data; the edge space is run at q = p so the exact
  // multiplier is representable.
  const int p = 4;
  const BenchmarkProblem prob = make_manufactured(2.0, p);
  for (auto [nx, ny] : std::vector<std::pair<int, int>>{{1, 1}, {3, 2}, {4, 4}}) {
    const MeshTopology mesh = build_mesh(prob.lo, prob.hi, nx, ny);
    const LocalSystem ls(mesh, prob.coeffs, p, p);
    const Eigen::VectorXcd lambda = oracles::exact_multiplier(ls, prob);
    const Eigen::VectorXcd uh = ls.solve_u1(lambda) + ls.solve_u2();
    CHECK(relative_l2_error(mesh, ls.basis(), uh, prob, p + 4) < 1e-8);
  }
}

TEST_CASE("adjoint pairing identity") {
  const MeshTopology mesh = build_mesh({0, 0}, {1, 1}, 3, 2);
  const LocalSystem ls(mesh, zero_data_coeffs(2.5), 2, 4);
  const int n1 = ls.basis().n1d();
  const long E = long(mesh.interior_edges.size());

  std::mt19937 rng(3);
  std::normal_distribution<double> gauss;
  Eigen::VectorXcd w(E * n1);
  for (long i = 0; i < w.size(); ++i) w(i) = Complex(gauss(rng), gauss(rng));
  const Eigen::VectorXcd lambda = random_edge_vector(ls, 4);

  // <adjoint(w), lambda> against the pointwise-quadrature pairing of w with
  // the jumps of u1(lambda).
  const Complex lhs = lambda.dot(ls.solve_u1_adjoint(w));
  const Eigen::VectorXcd fields = ls.solve_u1(lambda);
  const QuadratureRule quad = gauss_legendre(ls.p() + 3);
  Complex rhs = 0;
  for (long f = 0; f < E; ++f) {
    const InteriorEdge& fe = mesh.interior_edges[f];
    Complex acc = 0;
    for (int a = 0; a < quad.n; ++a) {
      Complex wv = 0;
      const Eigen::VectorXd vals = legendre_values(ls.p(), quad.x(a));
      for (int m = 0; m < n1; ++m) wv += w(f * n1 + m) * vals(m);
      const int n2 = ls.n2d();
      auto value = [&](int elem) {
        const Element& el = mesh.elements[elem];
        const double x = fe.vertical ? fe.start.x : fe.start.x + quad.x(a) * fe.length;
        const double y = fe.vertical ? fe.start.y + quad.x(a) * fe.length : fe.start.y;
        return eval_field(ls.basis(), fields.segment(Eigen::Index(elem) * n2, n2),
                          (x - el.x0) / mesh.dx, (y - el.y0) / mesh.dy);
      };
      acc += quad.w(a) * wv * std::conj(value(fe.owner) - value(fe.neighbor));
    }
    rhs += fe.length * acc;
  }
  // Both sides equal sum_e int_e w conj([u1(lambda)]).
  CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(rhs)));

  SUBCASE("zero input") {
    CHECK(ls.solve_u1_adjoint(Eigen::VectorXcd::Zero(E * n1)).norm() == 0.0);
  }
}

TEST_CASE("two-element mesh: composite map against explicit dense pieces") {
  const MeshTopology mesh = build_mesh({0, 0}, {2, 1}, 2, 1);
  const LocalSystem ls(mesh, zero_data_coeffs(1.5), 1, 3);
  REQUIRE(mesh.interior_edges.size() == 1);
  const int me = ls.modes_per_edge(), n1 = ls.basis().n1d(), n2 = ls.n2d();

  for (int k = 0; k < 2; ++k) {
    const auto& kern = *ls.op(k).kernel;
    for (int s = 0; s < 4; ++s) {
      const int f = mesh.edge_of_side[k][s];
      if (f < 0) {
        CHECK(kern.u1_trace.middleCols(s * me, me).norm() == 0.0);
        continue;
      }
      // Column-by-column: T A^{-1} C with C = sign * len * trace-adjoint.
      for (int m = 0; m < me; ++m) {
        Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(n2);
        Eigen::VectorXcd unit = Eigen::VectorXcd::Zero(n1);
        unit(m) = double(mesh.sign_of_side[k][s]) * ls.side_length(s);
        add_trace_adjoint(ls.basis(), Side(s), unit, rhs);
        const Eigen::VectorXcd sol = kern.A.fullPivLu().solve(rhs);
        for (int s2 = 0; s2 < 4; ++s2) {
          const Eigen::VectorXcd tr = trace_coeffs(ls.basis(), sol, Side(s2));
          CHECK((kern.u1_trace.block(s2 * n1, s * me + m, n1, 1) - tr).norm() < 1e-11);
        }
      }
    }
  }
}

TEST_CASE("assembled matrix equals brute-force quadrature of the form") {
  // Independent route: sample every term of the sesquilinear form at tensor
  // quadrature points, basis pair by basis pair, on a variable-speed problem.
  const BenchmarkProblem prob = make_lens(6.0);
  const MeshTopology mesh = build_mesh(prob.lo, prob.hi, 3, 3);
  const int p = 2, q = 1;
  const LocalSystem ls(mesh, prob.coeffs, q, p);
  const QuadratureRule quad = gauss_legendre(p + 2);
  const int n1 = p + 1, n2 = ls.n2d();

  for (int k : {mesh.element_id(1, 1), mesh.element_id(0, 0), mesh.element_id(2, 1)}) {
    const Element& el = mesh.elements[k];
    Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(n2, n2);
    auto basis_at = [&](int n, double xi, double eta) {
      return legendre_values(p, xi)(n / n1) * legendre_values(p, eta)(n % n1);
    };
    auto grad_at = [&](int n, double xi, double eta) -> std::pair<double, double> {
      return {legendre_derivatives(p, xi)(n / n1) * legendre_values(p, eta)(n % n1) / mesh.dx,
              legendre_values(p, xi)(n / n1) * legendre_derivatives(p, eta)(n % n1) / mesh.dy};
    };
    for (int a = 0; a < quad.n; ++a)
      for (int b = 0; b < quad.n; ++b) {
        const double xi = quad.x(a), eta = quad.x(b);
        const double kap = prob.coeffs.kappa(el.x0 + mesh.dx * xi, el.y0 + mesh.dy * eta);
        const double w = quad.w(a) * quad.w(b) * mesh.dx * mesh.dy;
        for (int n = 0; n < n2; ++n)
          for (int m = 0; m < n2; ++m) {
            const auto [gx1, gy1] = grad_at(m, xi, eta);
            const auto [gx2, gy2] = grad_at(n, xi, eta);
            A(n, m) += w * (gx1 * gx2 + gy1 * gy2 -
                            kap * kap * basis_at(m, xi, eta) * basis_at(n, xi, eta));
          }
      }
    for (int s = 0; s < 4; ++s) {
      const double len = ls.side_length(s);
      for (int a = 0; a < quad.n; ++a) {
        const double tau = quad.x(a);
        double xi = tau, eta = tau;
        if (s == kLeft) xi = 0;
        if (s == kRight) xi = 1;
        if (s == kBottom) eta = 0;
        if (s == kTop) eta = 1;
        Complex coef;
        if (mesh.edge_of_side[k][s] >= 0)
          coef = Complex(0, 1) * prob.coeffs.rho * double(mesh.sign_of_side[k][s]);
        else
          coef = Complex(0, 1) *
                 prob.coeffs.kappa(el.x0 + mesh.dx * xi, el.y0 + mesh.dy * eta);
        for (int n = 0; n < n2; ++n)
          for (int m = 0; m < n2; ++m)
            A(n, m) += coef * len * quad.w(a) * basis_at(m, xi, eta) * basis_at(n, xi, eta);
      }
    }
    CHECK((A - ls.op(k).kernel->A).norm() <= 1e-12 * A.norm());
  }
}

TEST_CASE("duct data loads only boundary elements") {
  const BenchmarkProblem prob = make_duct(4 * M_PI, 3);
  const MeshTopology mesh = build_mesh(prob.lo, prob.hi, 8, 4);
  const LocalSystem ls(mesh, prob.coeffs, 1, 3);
  const Eigen::VectorXcd u2 = ls.solve_u2();
  const int n2 = ls.n2d();
  for (int k = 0; k < mesh.n_elements(); ++k) {
    const bool interior_only = mesh.edge_of_side[k][0] >= 0 && mesh.edge_of_side[k][1] >= 0 &&
                               mesh.edge_of_side[k][2] >= 0 && mesh.edge_of_side[k][3] >= 0;
    const double nrm = u2.segment(Eigen::Index(k) * n2, n2).norm();
    if (interior_only)
      CHECK(nrm == 0.0);  // f = 0 and no boundary side
    else
      CHECK(nrm > 0.0);
  }
}

TEST_CASE("singular local matrix is reported") {
  // kappa = 0 and rho = 0 make every local matrix the pure stiffness, which
  // is singular (constants); factorization must report it.
  const MeshTopology mesh = build_mesh({0, 0}, {1, 1}, 3, 3);
  ProblemCoefficients c = zero_data_coeffs(0.0, 0.0);
  CHECK_THROWS_AS(LocalSystem(mesh, c, 1, 2), std::runtime_error);
}
