#include <random>

#include "doctest.h"
#include "helmlsq/interface_operator.hpp"
#include "oracles.hpp"

using namespace helmlsq;

namespace {

LocalSystem make_system(const BenchmarkProblem& prob, int nx, int ny, int q, int p) {
  static std::vector<std::unique_ptr<MeshTopology>> keep;
  keep.push_back(std::make_unique<MeshTopology>(build_mesh(prob.lo, prob.hi, nx, ny)));
  return LocalSystem(*keep.back(), prob.coeffs, q, p);
}

Eigen::VectorXcd random_vec(long n, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> gauss;
  Eigen::VectorXcd v(n);
  for (long i = 0; i < n; ++i) v(i) = Complex(gauss(rng), gauss(rng));
  return v;
}

}  // namespace

TEST_CASE("matrix-free operator equals the pointwise-quadrature oracle") {
  const BenchmarkProblem prob = make_manufactured(3.0, 2);
  const LocalSystem ls = make_system(prob, 2, 2, 1, 3);
  const InterfaceSystem sys(ls);
  const Eigen::MatrixXcd S = dense_interface_matrix(sys);
  const Eigen::MatrixXcd So = oracles::dense_interface_oracle(ls);
  CHECK((S - So).norm() <= 1e-11 * So.norm());
  CHECK((S - S.adjoint()).norm() <= 1e-12 * S.norm());

  SUBCASE("zero in, zero out") {
    CHECK(sys.apply(Eigen::VectorXcd::Zero(sys.dim())).norm() == 0.0);
  }
}

TEST_CASE("positivity of the quadratic form") {
  // omega h <= 1.
  const BenchmarkProblem prob = make_lens(8.0);
  const LocalSystem ls = make_system(prob, 8, 8, 2, 4);
  const InterfaceSystem sys(ls);
  for (int t = 0; t < 100; ++t) {
    const Eigen::VectorXcd x = random_vec(sys.dim(), 100 + t);
    const Complex sxx = x.dot(sys.apply(x));
    CHECK(std::abs(std::imag(sxx)) <= 1e-12 * std::abs(std::real(sxx)));
    CHECK(std::real(sxx) > 0.0);
  }
}

TEST_CASE("scattered application matches the dense operator") {
  const BenchmarkProblem prob = make_manufactured(2.0, 2);
  const LocalSystem ls = make_system(prob, 3, 3, 2, 4);
  const InterfaceSystem sys(ls);
  std::vector<std::pair<long, Complex>> x{{3, Complex(1.0, -0.5)},
                                          {17, Complex(-2.0, 0.25)},
                                          {30, Complex(0.0, 1.0)}};
  Eigen::VectorXcd dense_in = Eigen::VectorXcd::Zero(sys.dim());
  for (auto& [d, v] : x) dense_in(d) = v;
  const Eigen::VectorXcd want = sys.apply(dense_in);

  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(sys.dim());
  std::vector<long> touched;
  sys.apply_scattered(x, out, touched);
  CHECK((out - want).norm() <= 1e-12 * want.norm());
  // Every nonzero output dof was reported.
  for (long d = 0; d < sys.dim(); ++d)
    if (want(d) != 0.0)
      CHECK(std::find(touched.begin(), touched.end(), d) != touched.end());
}

TEST_CASE("s_h two ways: operator pairing vs jump-norm accumulation") {
  const BenchmarkProblem prob = make_manufactured(2.5, 2);
  const LocalSystem ls = make_system(prob, 3, 2, 2, 4);
  const InterfaceSystem sys(ls);
  const Eigen::VectorXcd x = random_vec(sys.dim(), 5);
  const double via_pairing = std::real(x.dot(sys.apply(x)));
  const Eigen::VectorXcd fields = ls.solve_u1(x);
  const double via_jumps = jump_functional(ls, fields);
  CHECK(via_pairing == doctest::Approx(via_jumps).epsilon(1e-12));
}

TEST_CASE("right-hand side pairing oracle") {
  const BenchmarkProblem prob = make_manufactured(2.0, 2);
  const LocalSystem ls = make_system(prob, 3, 3, 2, 4);
  const InterfaceSystem sys(ls);
  const Eigen::VectorXcd u2 = ls.solve_u2();
  const Eigen::VectorXcd b = sys.build_rhs(u2);
  for (int t = 0; t < 10; ++t) {
    const Eigen::VectorXcd mu = random_vec(sys.dim(), 40 + t);
    const Complex via_b = mu.dot(b);
    const Complex via_def = oracles::l_oracle(ls, u2, mu);
    CHECK(std::abs(via_b - via_def) <= 1e-12 * std::max(1.0, std::abs(via_def)));
  }

  SUBCASE("zero data, zero rhs") {
    BenchmarkProblem z = prob;
    z.coeffs.f = [](double, double) { return Complex(0, 0); };
    z.coeffs.g = [](double, double, double, double) { return Complex(0, 0); };
    const LocalSystem lz = make_system(z, 3, 3, 2, 4);
    const InterfaceSystem sz(lz);
    CHECK(sz.build_rhs(lz.solve_u2()).norm() == 0.0);
  }
}

TEST_CASE("operator is independent of the volume and boundary data") {
  const BenchmarkProblem p1 = make_manufactured(2.0, 2);
  BenchmarkProblem p2 = p1;
  p2.coeffs.f = [](double x, double y) { return Complex(std::sin(3 * x), y); };
  p2.coeffs.g = [](double x, double y, double, double) { return Complex(x * y, 1.0); };
  const LocalSystem l1 = make_system(p1, 2, 2, 1, 3);
  const LocalSystem l2 = make_system(p2, 2, 2, 1, 3);
  const Eigen::VectorXcd x = random_vec(InterfaceSystem(l1).dim(), 9);
  CHECK((InterfaceSystem(l1).apply(x) - InterfaceSystem(l2).apply(x)).norm() <=
        1e-14 * x.norm());
}

TEST_CASE("conjugate gradients") {
  const BenchmarkProblem prob = make_manufactured(3.0, 2);
  const LocalSystem ls = make_system(prob, 3, 3, 2, 4);
  const InterfaceSystem sys(ls);

  SUBCASE("zero right-hand side returns immediately") {
    const auto [x, rep] = cg_solve(sys, Eigen::VectorXcd::Zero(sys.dim()), nullptr, 1e-8, 100);
    CHECK(rep.iterations == 0);
    CHECK(rep.converged);
    CHECK(x.norm() == 0.0);
  }

  SUBCASE("matches a dense direct solve") {
    const Eigen::VectorXcd b = random_vec(sys.dim(), 21);
    const auto [x, rep] = cg_solve(sys, b, nullptr, 1e-12, 10000);
    CHECK(rep.converged);
    const Eigen::MatrixXcd S = dense_interface_matrix(sys);
    const Eigen::VectorXcd xd = S.fullPivLu().solve(b);
    CHECK((x - xd).norm() <= 1e-11 * xd.norm() * 10);
  }

  SUBCASE("max_iter exhaustion is flagged, not thrown") {
    const Eigen::VectorXcd b = random_vec(sys.dim(), 22);
    const auto [x, rep] = cg_solve(sys, b, nullptr, 1e-14, 2);
    CHECK_FALSE(rep.converged);
    CHECK(rep.iterations == 2);
  }
}

TEST_CASE("polynomial manufactured solution through the full pipeline") {
  // Per-axis degree q so the exact multiplier lies in the edge space.
  const BenchmarkProblem prob = make_manufactured(2.0, 2);
  for (int n : {4, 8}) {
    const LocalSystem ls = make_system(prob, n, n, 2, 4);
    const InterfaceSystem sys(ls);
    const Eigen::VectorXcd u2 = ls.solve_u2();
    const Eigen::VectorXcd b = sys.build_rhs(u2);
    const auto [lambda, rep] = cg_solve(sys, b, nullptr, 1e-13, 100000);
    CHECK(rep.converged);
    const Eigen::VectorXcd uh = recover_solution(ls, lambda, u2);
    CHECK(relative_l2_error(ls.mesh(), ls.basis(), uh, prob, 8) < 1e-8);

    // The solved multiplier reproduces (near-)zero jumps...
    const double unorm2 = std::norm(uh.norm());
    CHECK(jump_functional(ls, uh) <= 1e-14 * unorm2);
    // ... and minimizes J among random competitors.
    const double J_star = jump_functional(ls, uh);
    for (int t = 0; t < 20; ++t) {
      const Eigen::VectorXcd mu = lambda + 1e-3 * random_vec(sys.dim(), 300 + t);
      const double J_mu = jump_functional(ls, recover_solution(ls, mu, u2));
      CHECK(J_mu >= J_star - 1e-15);
    }
  }
}

TEST_CASE("Galerkin identity of the solved multiplier") {
  const BenchmarkProblem prob = make_manufactured(2.0, 2);
  const LocalSystem ls = make_system(prob, 4, 4, 1, 3);
  const InterfaceSystem sys(ls);
  const Eigen::VectorXcd b = sys.build_rhs(ls.solve_u2());
  const double tol = 1e-10;
  const auto [lambda, rep] = cg_solve(sys, b, nullptr, tol, 100000);
  REQUIRE(rep.converged);
  const Eigen::VectorXcd resid = b - sys.apply(lambda);
  for (long i = 0; i < sys.dim(); ++i) CHECK(std::abs(resid(i)) <= tol * b.norm());
}
