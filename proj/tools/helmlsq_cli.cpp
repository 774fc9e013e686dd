// Command-line driver for the Helmholtz least-squares solver.
//
//   helmlsq run             one solve, CSV row out
//   helmlsq order-sweep     fixed omega, list of mesh sizes
//   helmlsq pollution-sweep fixed omega*h, list of omegas
//   helmlsq precond-study   CG vs PCG iteration counts
//   helmlsq verify          identity and oracle suites, nonzero exit on failure
//
// Every flag can also be given through --config FILE (key=value lines).

#include <iostream>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "helmlsq/experiment.hpp"
#include "helmlsq/parallel.hpp"
#include "helmlsq/preconditioner.hpp"

using namespace helmlsq;

namespace {

// Accepts plain numbers and "Npi" multiples, e.g. "20pi".
double parse_omega(const std::string& s) {
  const auto pos = s.find("pi");
  if (pos == std::string::npos) return std::stod(s);
  const std::string head = s.substr(0, pos);
  return (head.empty() ? 1.0 : std::stod(head)) * M_PI;
}

std::vector<double> parse_omega_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_omega(item));
  return out;
}

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stoi(item));
  return out;
}

// Shared experiment flags live on the main app; subcommands fall through to
// them, so a flat key=value --config file addresses every knob by name.
void add_common_flags(CLI::App& app, ExperimentConfig& cfg, std::string& omega_str) {
  app.add_option("--problem", cfg.problem, "duct | lens | manufactured");
  app.add_option("--omega", omega_str, "angular frequency (accepts e.g. 20pi)");
  app.add_option("--k-mode", cfg.k_mode, "duct transverse mode");
  app.add_option("--degree", cfg.degree, "manufactured per-axis degree (0 = q)");
  app.add_option("--n", cfg.n, "elements per unit length (h = 1/n)");
  app.add_option("--q", cfg.q, "edge multiplier degree");
  app.add_option("--p", cfg.p, "element degree (require p >= q+2)");
  app.add_option("--rho", cfg.rho, "interface impedance parameter");
  app.add_option("--solver", cfg.solver, "cg | pcg");
  app.add_option("--tol", cfg.tol, "relative residual tolerance");
  app.add_option("--max-iter", cfg.max_iter, "iteration cap");
  app.add_option("--subdomain", cfg.subdomain, "elements per subdomain side (0 = auto)");
  app.add_option("--quad-order", cfg.quad_order, "quadrature points per axis (0 = p+2)");
  app.add_option("--workers", cfg.workers, "worker threads (0 = hardware)");
  app.add_option("--out", cfg.out, "CSV output path (stdout if empty)");
  app.set_config("--config");
}

int run_verify(int workers) {
  if (workers > 0) set_default_workers(workers);
  int failures = 0;
  auto check = [&](const std::string& name, bool ok, double value) {
    std::printf("[%s] %s (%.3e)\n", ok ? "ok" : "FAIL", name.c_str(), value);
    if (!ok) ++failures;
  };

  double worst = 0;
  for (int q = 1; q <= 6; ++q) worst = std::max(worst, edge_gram_identities(q).max_rel_error);
  check("edge-basis identities, q <= 6", worst <= 1e-12, worst);

  {
    std::mt19937 rng(17);
    std::normal_distribution<double> gauss;
    double slack = 0;
    for (auto [q, p] : std::vector<std::pair<int, int>>{{1, 3}, {2, 4}, {3, 5}}) {
      const double c = std::sqrt(infsup_constant_sq(q, p));
      for (int t = 0; t < 1000; ++t) {
        Eigen::VectorXcd mu(q + 1);
        for (int i = 0; i <= q; ++i) mu(i) = Complex(gauss(rng), gauss(rng));
        const Eigen::VectorXcd v = infsup_test_function(mu, q, p);
        const double gap = std::real(infsup_pairing(mu, v, q, p)) -
                           c * infsup_norm_mu(mu, q) * infsup_norm_v(v, p);
        slack = std::min(slack, gap);
      }
    }
    check("inf-sup lower bound", slack >= -1e-12, slack);
  }

  {
    const BenchmarkProblem prob = make_manufactured(2.0, 2);
    const MeshTopology mesh = build_mesh(prob.lo, prob.hi, 3, 3);
    const LocalSystem ls(mesh, prob.coeffs, 2, 4);
    const InterfaceSystem sys(ls);
    std::mt19937 rng(23);
    std::normal_distribution<double> gauss;
    double herm = 0, posmin = 1e300;
    for (int t = 0; t < 25; ++t) {
      Eigen::VectorXcd x(sys.dim()), y(sys.dim());
      for (long i = 0; i < sys.dim(); ++i) {
        x(i) = Complex(gauss(rng), gauss(rng));
        y(i) = Complex(gauss(rng), gauss(rng));
      }
      const Complex sxy = y.dot(sys.apply(x));
      const Complex syx = x.dot(sys.apply(y));
      herm = std::max(herm, std::abs(sxy - std::conj(syx)) / std::abs(sxy));
      posmin = std::min(posmin, std::real(x.dot(sys.apply(x))) / x.squaredNorm());
    }
    check("operator Hermiticity (random pairs)", herm <= 1e-12, herm);
    check("operator positivity (random vectors)", posmin > 0, posmin);

    const Eigen::VectorXcd u2 = ls.solve_u2();
    const auto [lambda, rep] = cg_solve(sys, sys.build_rhs(u2), nullptr, 1e-13, 100000);
    const double err =
        relative_l2_error(mesh, ls.basis(), recover_solution(ls, lambda, u2), prob, 8);
    check("polynomial pipeline exactness", rep.converged && err <= 1e-8, err);
  }

  std::printf("verify: %s\n", failures == 0 ? "all checks passed" : "FAILURES");
  return failures == 0 ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"least-squares Helmholtz solver with a substructuring preconditioner"};
  app.require_subcommand(1);

  ExperimentConfig cfg;
  std::string omega_str;
  std::string omega_list_str, n_list_str, sub_list_str;
  double omega_h = 1.0;
  std::string mesh_dump;

  add_common_flags(app, cfg, omega_str);

  auto* run = app.add_subcommand("run", "single solve");
  run->add_option("--dump-mesh", mesh_dump, "write mesh/layout JSON to this path");

  auto* order = app.add_subcommand("order-sweep", "h-convergence study at fixed omega");
  order->add_option("--n-list", n_list_str, "comma-separated mesh sizes")->required();

  auto* poll = app.add_subcommand("pollution-sweep", "fixed omega*h, growing omega");
  poll->add_option("--omega-list", omega_list_str, "comma-separated omegas")->required();
  poll->add_option("--omega-h", omega_h, "target omega*h product");

  auto* study = app.add_subcommand("precond-study", "CG vs PCG iteration growth");
  study->add_option("--omega-list", omega_list_str, "comma-separated omegas")->required();
  study->add_option("--n-list", n_list_str, "mesh sizes paired with the omegas")->required();
  study->add_option("--subdomain-list", sub_list_str, "subdomain sizes per row (0 = auto)");

  auto* verify = app.add_subcommand("verify", "run the identity and oracle suites");
  for (CLI::App* sub : {run, order, poll, study, verify}) sub->fallthrough();

  CLI11_PARSE(app, argc, argv);

  try {
    if (!omega_str.empty()) cfg.omega = parse_omega(omega_str);
    if (cfg.workers > 0) set_default_workers(cfg.workers);

    if (verify->parsed()) return run_verify(cfg.workers);

    std::vector<ResultRow> rows;
    if (run->parsed()) {
      if (!mesh_dump.empty()) {
        const BenchmarkProblem prob = make_problem(cfg);
        const MeshTopology mesh =
            build_mesh(prob.lo, prob.hi,
                       int(std::lround((prob.hi.x - prob.lo.x) * cfg.n)),
                       int(std::lround((prob.hi.y - prob.lo.y) * cfg.n)));
        if (cfg.solver == "pcg") {
          const int n0 =
              cfg.subdomain > 0 ? cfg.subdomain : auto_subdomain(mesh.nx, mesh.ny, cfg.n);
          const DecompositionLayout layout = build_decomposition(mesh, n0);
          dump_mesh_json(mesh, &layout, mesh_dump);
        } else {
          dump_mesh_json(mesh, nullptr, mesh_dump);
        }
      }
      rows.push_back(run_single(cfg));
    } else if (order->parsed()) {
      rows = run_order_sweep(cfg, parse_int_list(n_list_str));
    } else if (poll->parsed()) {
      rows = run_pollution_sweep(cfg, parse_omega_list(omega_list_str), omega_h);
    } else if (study->parsed()) {
      const auto omegas = parse_omega_list(omega_list_str);
      auto ns = parse_int_list(n_list_str);
      auto subs = sub_list_str.empty() ? std::vector<int>(omegas.size(), cfg.subdomain)
                                       : parse_int_list(sub_list_str);
      rows = run_precond_study(cfg, omegas, ns, subs);
    }
    write_results(rows, cfg);
    for (const ResultRow& r : rows)
      if (!r.converged) {
        std::cerr << "solver did not converge (omega=" << r.omega << ", n=" << r.n << ")\n";
        return 3;
      }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
