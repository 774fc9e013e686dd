// Batch experiment driver: single solves, h-sweeps (convergence order),
// pollution sweeps (fixed omega*h), and CG-vs-PCG preconditioner studies.

#ifndef HELMLSQ_EXPERIMENT_HPP
#define HELMLSQ_EXPERIMENT_HPP

#include <optional>
#include <string>
#include <vector>

#include "helmlsq/preconditioner.hpp"
#include "helmlsq/problem.hpp"

namespace helmlsq {

struct ExperimentConfig {
  std::string problem = "lens";  // duct | lens | manufactured
  double omega = 64.0;
  int k_mode = 19;      // duct transverse mode
  int degree = 0;       // manufactured per-axis degree; 0 = q
  int n = 32;           // elements per unit length, h = 1/n
  int q = 2;
  int p = 4;
  double rho = 1e-5;
  std::string solver = "pcg";  // cg | pcg
  double tol = 1e-6;
  long max_iter = 1000000;
  int subdomain = 0;    // elements per subdomain side; 0 = closest to sqrt(h)
  int quad_order = 0;   // 0 = p+2
  int workers = 0;
  std::string out;      // CSV path; empty = stdout
};

struct ResultRow {
  std::string problem;
  double omega = 0;
  int k_mode = 0;
  int n = 0;
  double h = 0;
  int q = 0, p = 0;
  double rho = 0;
  int subdomain = 0;  // elements per subdomain side (0 if unpreconditioned)
  long dof = 0;
  double err = -1;
  std::optional<double> order;
  std::optional<double> delta;
  std::string solver;
  long iterations = 0;
  bool converged = false;
  double rel_residual = 0;
  std::optional<long> cg_iterations;       // precond study only
  std::optional<double> rho_iter;          // growth rate of `iterations`
  std::optional<double> rho_iter_cg;       // growth rate of cg_iterations
  double setup_seconds = 0;
  double solve_seconds = 0;
};

BenchmarkProblem make_problem(const ExperimentConfig& cfg);

// Closest divisor-compatible subdomain side to d ~ sqrt(h).
int auto_subdomain(int nx, int ny, int n_per_unit);

ResultRow run_single(const ExperimentConfig& cfg);

// Fixed omega, h-list: fills `order` pairwise.
std::vector<ResultRow> run_order_sweep(const ExperimentConfig& cfg,
                                       const std::vector<int>& n_list);

// Fixed omega*h: n chosen per omega; fills `delta` pairwise.
std::vector<ResultRow> run_pollution_sweep(const ExperimentConfig& cfg,
                                           const std::vector<double>& omega_list,
                                           double omega_h);

// CG and PCG on each configuration; fills both iteration columns and their
// growth rates.
std::vector<ResultRow> run_precond_study(const ExperimentConfig& cfg,
                                         const std::vector<double>& omega_list,
                                         const std::vector<int>& n_list,
                                         const std::vector<int>& subdomain_list);

void write_csv(const std::vector<ResultRow>& rows, std::ostream& os);
void write_results(const std::vector<ResultRow>& rows, const ExperimentConfig& cfg);

}  // namespace helmlsq

#endif
