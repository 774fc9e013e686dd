// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Runs the full benchmark configurations; expect minutes.

#include <cstdarg>
#include <cstdio>
#include <random>

#include "helmlsq/experiment.hpp"
#include "helmlsq/parallel.hpp"
#include "helmlsq/preconditioner.hpp"
#include "oracles.hpp"

using namespace helmlsq;

namespace {

int g_failures = 0;

void report(int id, const char* name, bool pass, const std::string& detail) {
  std::printf("[%s] criterion %d: %s — %s\n", pass ? "PASS" : "FAIL", id, name,
              detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

std::string fmt(const char* f, ...) {
  va_list ap;
  va_start(ap, f);
  char buf[512];
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

Eigen::VectorXcd random_vec(long n, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> gauss;
  Eigen::VectorXcd v(n);
  for (long i = 0; i < n; ++i) v(i) = Complex(gauss(rng), gauss(rng));
  return v;
}

// --- 1. Jacobi identity suite -------------------------------------------
void criterion1() {
  double worst = 0;
  for (int q = 1; q <= 6; ++q) worst = std::max(worst, edge_gram_identities(q).max_rel_error);
  // Diagonal psi norms for k <= 10 under exact-degree quadrature.
  const QuadratureRule quad = gauss_legendre(14);
  for (int k = 1; k <= 10; ++k) {
    double nrm = 0;
    for (int a = 0; a < quad.n; ++a) nrm += quad.w(a) * std::pow(jacobi_psi(k, quad.x(a)), 2);
    worst = std::max(worst, std::abs(nrm - psi_norm_sq(k)) / psi_norm_sq(k));
  }
  report(1, "Jacobi identity suite", worst <= 1e-12, fmt("max relative error %.3e", worst));
}

// --- 2. Dense-oracle equivalence ----------------------------------------
void criterion2() {
  double worst_eq = 0, worst_herm = 0;
  for (auto [q, p] : std::vector<std::pair<int, int>>{{1, 3}, {2, 4}})
    for (int n : {2, 3}) {
      const BenchmarkProblem prob = make_manufactured(2.0, q);
      const MeshTopology mesh = build_mesh(prob.lo, prob.hi, n, n);
      const LocalSystem ls(mesh, prob.coeffs, q, p);
      const InterfaceSystem sys(ls);
      const Eigen::MatrixXcd S = dense_interface_matrix(sys);
      const Eigen::MatrixXcd So = oracles::dense_interface_oracle(ls);
      worst_eq = std::max(worst_eq, (S - So).norm() / So.norm());
      worst_herm = std::max(worst_herm, (S - S.adjoint()).norm() / S.norm());
    }
  report(2, "dense-oracle equivalence", worst_eq <= 1e-11 && worst_herm <= 1e-12,
         fmt("column mismatch %.3e, Hermiticity %.3e", worst_eq, worst_herm));
}

// --- 3. Polynomial exactness of the full pipeline ------------------------
void criterion3() {
  double worst = 0;
  const BenchmarkProblem prob = make_manufactured(2.0, 2);  // per-axis degree q
  for (int n : {4, 8}) {
    const MeshTopology mesh = build_mesh(prob.lo, prob.hi, n, n);
    const LocalSystem ls(mesh, prob.coeffs, 2, 4);
    const InterfaceSystem sys(ls);
    const Eigen::VectorXcd u2 = ls.solve_u2();
    const auto [lambda, rep] = cg_solve(sys, sys.build_rhs(u2), nullptr, 1e-13, 100000);
    const Eigen::VectorXcd uh = recover_solution(ls, lambda, u2);
    worst = std::max(worst, relative_l2_error(mesh, ls.basis(), uh, prob, 8));
  }
  report(3, "polynomial exactness (q,p)=(2,4)", worst <= 1e-8, fmt("max Err %.3e", worst));
}

// --- 4. Convergence order, lens, Table-5 scale ---------------------------
void criterion4() {
  ExperimentConfig cfg;
  cfg.problem = "lens";
  cfg.omega = 64;
  cfg.q = 2;
  cfg.p = 4;
  cfg.solver = "pcg";
  cfg.tol = 1e-9;
  const auto rows = run_order_sweep(cfg, {32, 64, 128});
  const double want_err[3] = {4.484e-4, 3.079e-5, 2.016e-6};
  const double want_order[2] = {3.864, 3.933};
  bool pass = true;
  std::string detail;
  for (int i = 0; i < 3; ++i) {
    pass = pass && rows[i].converged && rows[i].err <= 3 * want_err[i] &&
           rows[i].err >= want_err[i] / 3;
    detail += fmt("Err(1/%d)=%.3e ", rows[i].n, rows[i].err);
  }
  for (int i = 0; i < 2; ++i) {
    const double order = rows[i + 1].order.value_or(0.0);
    pass = pass && std::abs(order - want_order[i]) <= 0.4;
    detail += fmt("order=%.3f ", order);
  }
  report(4, "lens convergence order", pass, detail);
}

// --- 5. Pollution index, lens, Table-4 scale ------------------------------
void criterion5() {
  ExperimentConfig cfg;
  cfg.problem = "lens";
  cfg.q = 2;
  cfg.p = 4;
  cfg.solver = "pcg";
  cfg.tol = 1e-9;
  const auto rows = run_pollution_sweep(cfg, {64.0, 128.0}, 1.0);
  const double ref = 3.1e-5;
  bool pass = true;
  std::string detail;
  for (const auto& r : rows) {
    pass = pass && r.converged && r.err <= 3 * ref && r.err >= ref / 3;
    detail += fmt("Err(w=%g)=%.3e ", r.omega, r.err);
  }
  const double delta = rows[1].delta.value_or(1.0);
  pass = pass && delta <= 0.15;
  detail += fmt("delta=%.4f", delta);
  report(5, "pollution index", pass, detail);
}

// --- 6. Duct accuracy, Table-1 point --------------------------------------
void criterion6() {
  ExperimentConfig cfg;
  cfg.problem = "duct";
  cfg.omega = 20 * M_PI;
  cfg.k_mode = 19;
  cfg.n = 28;
  cfg.q = 3;
  cfg.p = 5;
  cfg.solver = "pcg";
  cfg.tol = 1e-9;
  const ResultRow row = run_single(cfg);
  const bool pass = row.converged && row.dof == 12208 && row.err <= 3 * 6.72e-5 &&
                    row.err >= 6.72e-5 / 3;
  report(6, "duct accuracy", pass, fmt("dof=%ld Err=%.3e", row.dof, row.err));
}

// --- 7. Preconditioner efficacy -------------------------------------------
void criterion7() {
  // Ratio check at the stated point, on the duct problem.
  ExperimentConfig duct;
  duct.problem = "duct";
  duct.k_mode = 19;
  duct.q = 3;
  duct.p = 5;
  duct.tol = 1e-6;
  const auto point = run_precond_study(duct, {20 * M_PI}, {64}, {8});
  const long cg0 = point[0].cg_iterations.value_or(0);
  const long pcg0 = point[0].iterations;

  // Growth-rate check over the omega sweep with d = sqrt(h) exactly: the
  // benchmark pairs the iteration tables were produced on.
  ExperimentConfig lens;
  lens.problem = "lens";
  lens.q = 3;
  lens.p = 5;
  lens.tol = 1e-6;
  const auto rows = run_precond_study(lens, {20 * M_PI, 40 * M_PI}, {36, 64}, {6, 8});
  const double rho_pcg = rows[1].rho_iter.value_or(10.0);

  const bool pass = point[0].converged && rows[0].converged && rows[1].converged &&
                    pcg0 * 3 <= cg0 && rho_pcg <= 0.7;
  report(7, "preconditioner efficacy", pass,
         fmt("duct(20pi,1/64,d=1/8): CG=%ld PCG=%ld (ratio %.1f); sweep 20pi->40pi: "
             "PCG %ld->%ld rho_pcg=%.3f (CG %ld->%ld rho_cg=%.3f)",
             cg0, pcg0, double(cg0) / double(pcg0), rows[0].iterations, rows[1].iterations,
             rho_pcg, rows[0].cg_iterations.value_or(0), rows[1].cg_iterations.value_or(0),
             rows[1].rho_iter_cg.value_or(0.0)));
}

// --- 8. Preconditioner validity -------------------------------------------
void criterion8() {
  const BenchmarkProblem prob = make_duct(6 * M_PI, 5);
  const MeshTopology mesh = build_mesh(prob.lo, prob.hi, 24, 12);
  const LocalSystem ls(mesh, prob.coeffs, 2, 4);
  const InterfaceSystem sys(ls);
  const DecompositionLayout layout = build_decomposition(mesh, 4);
  const Preconditioner K(sys, layout);
  double worst_sym = 0;
  bool positive = true;
  for (int t = 0; t < 100; ++t) {
    const Eigen::VectorXcd x = random_vec(sys.dim(), 1000 + t);
    const Eigen::VectorXcd y = random_vec(sys.dim(), 5000 + t);
    const Eigen::VectorXcd Kx = K.apply(x);
    const Complex kxy = y.dot(Kx);
    const Complex kyx = x.dot(K.apply(y));
    worst_sym = std::max(worst_sym,
                         std::abs(kxy - std::conj(kyx)) / std::max(1.0, std::abs(kxy)));
    const Complex kxx = x.dot(Kx);
    positive = positive && std::real(kxx) > 0.0 &&
               std::abs(std::imag(kxx)) <= 1e-10 * std::real(kxx);
  }
  const bool pass = worst_sym <= 1e-10 && positive;
  report(8, "preconditioner validity", pass,
         fmt("pairing symmetry %.3e, positivity %s", worst_sym, positive ? "ok" : "violated"));
}

// --- 9. Inf-sup construction ----------------------------------------------
void criterion9() {
  std::mt19937 rng(31);
  std::normal_distribution<double> gauss;
  bool pass = true;
  double worst = 0;
  for (auto [q, p] : std::vector<std::pair<int, int>>{{1, 3}, {2, 4}, {3, 5}}) {
    const double c = std::sqrt(infsup_constant_sq(q, p));
    for (int t = 0; t < 1000; ++t) {
      Eigen::VectorXcd mu(q + 1);
      for (int i = 0; i <= q; ++i) mu(i) = Complex(gauss(rng), gauss(rng));
      const Eigen::VectorXcd v = infsup_test_function(mu, q, p);
      const double nv = infsup_norm_v(v, p), nm = infsup_norm_mu(mu, q);
      const double pair = std::real(infsup_pairing(mu, v, q, p));
      const double slack = pair - c * nm * nv;
      worst = std::min(worst, slack / std::max(1.0, nm * nv));
      pass = pass && slack >= -1e-12 * std::max(1.0, nm * nv);
    }
  }
  report(9, "inf-sup construction", pass, fmt("worst normalized slack %.3e", worst));
}

}  // namespace

int main(int argc, char** argv) {
  if (argc > 1) set_default_workers(std::atoi(argv[1]));
  criterion1();
  criterion2();
  criterion3();
  criterion9();
  criterion8();
  criterion6();
  criterion4();
  criterion5();
  criterion7();
  std::printf("%s (%d failure%s)\n", g_failures == 0 ? "ACCEPTANCE PASSED" : "ACCEPTANCE FAILED",
              g_failures, g_failures == 1 ? "" : "s");
  return g_failures == 0 ? 0 : 1;
}
