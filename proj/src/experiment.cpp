#include "helmlsq/experiment.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "helmlsq/parallel.hpp"
#include "json.hpp"

namespace helmlsq {

namespace {

double now_seconds() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

struct Assembled {
  BenchmarkProblem prob;
  MeshTopology mesh;
  std::unique_ptr<LocalSystem> locals;
  std::unique_ptr<InterfaceSystem> sys;
  Eigen::VectorXcd u2, b;
  double setup_seconds = 0;
};

Assembled assemble(const ExperimentConfig& cfg) {
  if (cfg.p < cfg.q + 2)
    throw std::invalid_argument("experiment: require p >= q+2");
  Assembled A;
  const double t0 = now_seconds();
  A.prob = make_problem(cfg);
  A.prob.coeffs.rho = cfg.rho;
  const int nx = int(std::lround((A.prob.hi.x - A.prob.lo.x) * cfg.n));
  const int ny = int(std::lround((A.prob.hi.y - A.prob.lo.y) * cfg.n));
  A.mesh = build_mesh(A.prob.lo, A.prob.hi, nx, ny);
  A.locals = std::make_unique<LocalSystem>(A.mesh, A.prob.coeffs, cfg.q, cfg.p,
                                           cfg.quad_order, cfg.workers);
  A.sys = std::make_unique<InterfaceSystem>(*A.locals, cfg.workers);
  A.u2 = A.locals->solve_u2();
  A.b = A.sys->build_rhs(A.u2);
  A.setup_seconds = now_seconds() - t0;
  return A;
}

ResultRow base_row(const ExperimentConfig& cfg, const Assembled& A) {
  ResultRow row;
  row.problem = cfg.problem;
  row.omega = cfg.omega;
  row.k_mode = (cfg.problem == "duct") ? cfg.k_mode : 0;
  row.n = cfg.n;
  row.h = A.mesh.h;
  row.q = cfg.q;
  row.p = cfg.p;
  row.rho = cfg.rho;
  row.dof = count_interface_dofs(A.mesh, cfg.q);
  row.solver = cfg.solver;
  row.setup_seconds = A.setup_seconds;
  return row;
}

void finish_row(ResultRow& row, const ExperimentConfig& cfg, Assembled& A,
                const Eigen::VectorXcd& lambda, const SolveReport& rep) {
  row.iterations = rep.iterations;
  row.converged = rep.converged;
  row.rel_residual = rep.rel_residual;
  row.solve_seconds = rep.seconds;
  const Eigen::VectorXcd uh = recover_solution(*A.locals, lambda, A.u2, cfg.workers);
  row.err = relative_l2_error(A.mesh, A.locals->basis(), uh, A.prob, cfg.p + 3, cfg.workers);
}

}  // namespace

BenchmarkProblem make_problem(const ExperimentConfig& cfg) {
  if (cfg.problem == "duct") return make_duct(cfg.omega, cfg.k_mode);
  if (cfg.problem == "lens") return make_lens(cfg.omega);
  if (cfg.problem == "manufactured")
    return make_manufactured(cfg.omega, cfg.degree > 0 ? cfg.degree : cfg.q);
  throw std::invalid_argument("unknown problem: " + cfg.problem);
}

int auto_subdomain(int nx, int ny, int n_per_unit) {
  const int g = std::gcd(nx, ny);
  const double target = std::sqrt(double(n_per_unit));  // n0 ~ sqrt(n), d ~ sqrt(h)
  int best = -1;
  double best_score = 1e300;
  for (int n0 = 2; n0 <= g; ++n0) {
    if (g % n0 != 0) continue;
    const double score = std::abs(std::log(n0 / target));
    if (score < best_score - 1e-12 || (std::abs(score - best_score) <= 1e-12 && n0 > best)) {
      best = n0;
      best_score = score;
    }
  }
  if (best < 0)
    throw std::invalid_argument("auto_subdomain: no admissible subdomain size (grid gcd < 2)");
  return best;
}

ResultRow run_single(const ExperimentConfig& cfg) {
  Assembled A = assemble(cfg);
  ResultRow row = base_row(cfg, A);
  PrecondFn pre;
  if (cfg.solver == "pcg") {
    const double t0 = now_seconds();
    const int n0 = cfg.subdomain > 0 ? cfg.subdomain : auto_subdomain(A.mesh.nx, A.mesh.ny, cfg.n);
    row.subdomain = n0;
    const auto layout = std::make_shared<DecompositionLayout>(
        build_decomposition(A.mesh, n0));
    auto precond = std::make_shared<Preconditioner>(*A.sys, *layout, cfg.workers);
    pre = [layout, precond](const Eigen::VectorXcd& v) { return precond->apply(v); };
    row.setup_seconds += now_seconds() - t0;
    const auto [lambda, rep] = cg_solve(*A.sys, A.b, pre, cfg.tol, cfg.max_iter);
    finish_row(row, cfg, A, lambda, rep);
  } else if (cfg.solver == "cg") {
    const auto [lambda, rep] = cg_solve(*A.sys, A.b, nullptr, cfg.tol, cfg.max_iter);
    finish_row(row, cfg, A, lambda, rep);
  } else {
    throw std::invalid_argument("unknown solver: " + cfg.solver);
  }
  return row;
}

std::vector<ResultRow> run_order_sweep(const ExperimentConfig& cfg,
                                       const std::vector<int>& n_list) {
  if (n_list.size() < 2)
    throw std::invalid_argument("run_order_sweep: need at least two mesh sizes");
  std::vector<ResultRow> rows;
  for (int n : n_list) {
    ExperimentConfig c = cfg;
    c.n = n;
    rows.push_back(run_single(c));
    const size_t k = rows.size();
    if (k >= 2) {
      const ResultRow& prev = rows[k - 2];
      ResultRow& cur = rows[k - 1];
      if (cur.h != prev.h)
        cur.order = std::log(cur.err / prev.err) / std::log(cur.h / prev.h);
    }
  }
  return rows;
}

std::vector<ResultRow> run_pollution_sweep(const ExperimentConfig& cfg,
                                           const std::vector<double>& omega_list,
                                           double omega_h) {
  std::vector<ResultRow> rows;
  for (double omega : omega_list) {
    ExperimentConfig c = cfg;
    c.omega = omega;
    c.n = int(std::lround(omega / omega_h));
    rows.push_back(run_single(c));
    const size_t k = rows.size();
    if (k >= 2) {
      const ResultRow& prev = rows[k - 2];
      ResultRow& cur = rows[k - 1];
      cur.delta = std::log(cur.err / prev.err) / std::log(cur.omega / prev.omega);
    }
  }
  return rows;
}

std::vector<ResultRow> run_precond_study(const ExperimentConfig& cfg,
                                         const std::vector<double>& omega_list,
                                         const std::vector<int>& n_list,
                                         const std::vector<int>& subdomain_list) {
  if (omega_list.size() != n_list.size())
    throw std::invalid_argument("run_precond_study: omega and n lists must pair up");
  std::vector<ResultRow> rows;
  for (size_t i = 0; i < omega_list.size(); ++i) {
    ExperimentConfig c = cfg;
    c.omega = omega_list[i];
    c.n = n_list[i];
    c.solver = "pcg";
    c.subdomain = (i < subdomain_list.size() && subdomain_list[i] > 0) ? subdomain_list[i] : 0;
    Assembled A = assemble(c);
    ResultRow row = base_row(c, A);

    const auto [lam_cg, rep_cg] = cg_solve(*A.sys, A.b, nullptr, c.tol, c.max_iter);
    row.cg_iterations = rep_cg.iterations;

    const double t0 = now_seconds();
    const int n0 = c.subdomain > 0 ? c.subdomain : auto_subdomain(A.mesh.nx, A.mesh.ny, c.n);
    row.subdomain = n0;
    const DecompositionLayout layout = build_decomposition(A.mesh, n0);
    const Preconditioner precond(*A.sys, layout, c.workers);
    row.setup_seconds += now_seconds() - t0;
    const auto [lambda, rep] = cg_solve(*A.sys, A.b, precond.as_function(), c.tol, c.max_iter);
    finish_row(row, c, A, lambda, rep);

    if (!rows.empty()) {
      const ResultRow& prev = rows.back();
      const double lw = std::log(row.omega / prev.omega);
      if (lw != 0.0) {
        row.rho_iter = std::log(double(row.iterations) / double(prev.iterations)) / lw;
        if (prev.cg_iterations && row.cg_iterations)
          row.rho_iter_cg =
              std::log(double(*row.cg_iterations) / double(*prev.cg_iterations)) / lw;
      }
    }
    rows.push_back(row);
  }
  return rows;
}

void write_csv(const std::vector<ResultRow>& rows, std::ostream& os) {
  os << "problem,omega,k_mode,n,h,q,p,rho,subdomain,dof,err,order,delta,solver,"
        "iterations,converged,rel_residual,cg_iterations,rho_iter,rho_iter_cg,"
        "setup_seconds,solve_seconds\n";
  auto opt = [](const auto& v) {
    std::ostringstream s;
    if (v) s << *v;
    return s.str();
  };
  for (const ResultRow& r : rows) {
    std::ostringstream s;
    s.precision(12);
    s << r.problem << ',' << r.omega << ',' << r.k_mode << ',' << r.n << ',' << r.h << ','
      << r.q << ',' << r.p << ',' << r.rho << ',' << r.subdomain << ',' << r.dof << ','
      << r.err << ',' << opt(r.order) << ',' << opt(r.delta) << ',' << r.solver << ','
      << r.iterations << ',' << (r.converged ? 1 : 0) << ',' << r.rel_residual << ','
      << opt(r.cg_iterations) << ',' << opt(r.rho_iter) << ',' << opt(r.rho_iter_cg) << ','
      << r.setup_seconds << ',' << r.solve_seconds << '\n';
    os << s.str();
  }
}

void write_results(const std::vector<ResultRow>& rows, const ExperimentConfig& cfg) {
  if (cfg.out.empty()) {
    write_csv(rows, std::cout);
    return;
  }
  std::ofstream f(cfg.out);
  if (!f) throw std::runtime_error("cannot open output file: " + cfg.out);
  write_csv(rows, f);
  nlohmann::json j;
  j["problem"] = cfg.problem;
  j["omega"] = cfg.omega;
  j["k_mode"] = cfg.k_mode;
  j["n"] = cfg.n;
  j["q"] = cfg.q;
  j["p"] = cfg.p;
  j["rho"] = cfg.rho;
  j["solver"] = cfg.solver;
  j["tol"] = cfg.tol;
  j["max_iter"] = cfg.max_iter;
  j["subdomain"] = cfg.subdomain;
  j["quad_order"] = cfg.quad_order;
  j["workers"] = cfg.workers;
  std::ofstream jf(cfg.out + ".config.json");
  jf << j.dump(1) << "\n";
}

}  // namespace helmlsq
