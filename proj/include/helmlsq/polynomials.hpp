// 1D polynomial families on the reference interval J = [0,1].
//
// Two families live here:
//  - Orthonormal shifted Legendre polynomials. These are the working basis of
//    every edge space and of the tensor element basis: with them the edge mass
//    matrix is the identity (times edge length) and coefficient dot products
//    equal L2 inner products.
//  - The Jacobi-type family psi_k = c_k x(1-x) G_k together with the
//    orthogonalized linear functions phi1*, phi2*. This basis carries the
//    closed-form identities used by the verification suite and the inf-sup
//    test-function construction.

#ifndef HELMLSQ_POLYNOMIALS_HPP
#define HELMLSQ_POLYNOMIALS_HPP

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace helmlsq {

using Complex = std::complex<double>;

// --------------------------------------------------------------------------
// Orthonormal shifted Legendre basis on [0,1]
// --------------------------------------------------------------------------

// L_n(x) = sqrt(2n+1) P_n(2x-1); values for n = 0..degree at x.
Eigen::VectorXd legendre_values(int degree, double x);
// Derivatives dL_n/dx for n = 0..degree at x.
Eigen::VectorXd legendre_derivatives(int degree, double x);

// --------------------------------------------------------------------------
// Jacobi-type edge family
// --------------------------------------------------------------------------

// psi_k(x), k >= 1, by the three-term recursion
//   psi_1 = 12x(1-x),  psi_2 = 120x(1-x)(x-1/2),
//   psi_k = (2(2k+1)/(k-1))(x-1/2) psi_{k-1} - ((k+2)/(k-1)) psi_{k-2}.
// Exact zeros at the endpoints.
double jacobi_psi(int k, double x);

// All of psi_1..psi_m at x (one recursion sweep).
Eigen::VectorXd jacobi_psi_values(int m, double x);

// G_k by the recursion G_1 = 1, G_2 = x-1/2,
//   G_k = (x-1/2) G_{k-1} - ((k-2)(k+2)/(4(2k-1)(2k+1))) G_{k-2}.
double jacobi_G(int k, double x);

// ||psi_k||^2 = k(k+1)(k+2)(k+3)/(2k+3).
double psi_norm_sq(int k);

// Edge basis of degree q in the splitting P_q = P'_q + P_1*:
//   modes 0..q-2 are psi_1..psi_{q-1}, mode q-1 is phi1*, mode q is phi2*.
// For q = 1 the basis is just {phi1 = x, phi2 = 1-x}.
struct EdgeBasis {
  int q = 1;
  // Gram-Schmidt coefficients of phi1*, phi2* against psi_1..psi_{q-1},
  // from the closed-form pairings <phi1, psi_k> = 1, <phi2, psi_k> = (-1)^{k-1}.
  Eigen::VectorXd alpha;  // size q-1
  Eigen::VectorXd beta;   // size q-1

  explicit EdgeBasis(int q);

  double phi1_star(double x) const;
  double phi2_star(double x) const;
  // Value of the full basis at x: (psi_1..psi_{q-1}, phi1*, phi2*).
  Eigen::VectorXd values(double x) const;
  // Gram matrix of the basis (closed form).
  Eigen::MatrixXd gram() const;

  // Closed-form inner products of the starred linear part:
  //   <phi1*,phi1*> = <phi2*,phi2*> = 1/(q(q+2)),
  //   <phi1*,phi2*> = (-1)^{q-1}/(q(q+1)(q+2)).
  double phistar_diag() const;
  double phistar_cross() const;
};

// Report of the closed-form identities of the edge family, each entry paired
// with the same quantity computed by Gauss quadrature.
struct EdgeGramReport {
  int q = 0;
  // <phi1, psi_k> (expected 1) and <phi2, psi_k> (expected (-1)^{k-1}).
  Eigen::VectorXd phi1_psi, phi2_psi;
  // ||psi_k||^2 against psi_norm_sq(k).
  Eigen::VectorXd psi_norms, psi_norms_expected;
  double phistar_diag1 = 0, phistar_diag2 = 0, phistar_cross = 0;
  double phistar_diag_expected = 0, phistar_cross_expected = 0;
  // Largest relative deviation over every entry of the report.
  double max_rel_error = 0;
};

EdgeGramReport edge_gram_identities(int q);

// --------------------------------------------------------------------------
// Inf-sup test function
// --------------------------------------------------------------------------

// Coefficients of mu in the edge basis (psi_1..psi_{q-1}, phi1*, phi2*), size
// q+1. Returns v expanded in psi_1..psi_{p-1} (size p-1): the psi part of mu
// is kept and the P_1* part is replaced by its projection onto
// span{psi_q..psi_{p-1}}. By construction <mu, v> = ||v||^2 and
// ||v|| >= C_{p,q} ||mu||.
Eigen::VectorXcd infsup_test_function(const Eigen::VectorXcd& mu, int q, int p);

// C_{p,q}^2 = 1 - (q+1)(q+2)/((p+1)(p+2)) for p+q even,
//             1 - (q+1)(q+2)/(p(p+1))     for p+q odd.
double infsup_constant_sq(int q, int p);

// L2 pairing/norms for the two expansions above.
Complex infsup_pairing(const Eigen::VectorXcd& mu, const Eigen::VectorXcd& v, int q, int p);
double infsup_norm_mu(const Eigen::VectorXcd& mu, int q);
double infsup_norm_v(const Eigen::VectorXcd& v, int p);

}  // namespace helmlsq

#endif
