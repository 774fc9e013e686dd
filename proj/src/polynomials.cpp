#include "helmlsq/polynomials.hpp"

#include <cmath>
#include <stdexcept>

#include "helmlsq/quadrature.hpp"

namespace helmlsq {

Eigen::VectorXd legendre_values(int degree, double x) {
  Eigen::VectorXd v(degree + 1);
  const double t = 2.0 * x - 1.0;
  double p0 = 1.0, p1 = t;
  v(0) = 1.0;
  if (degree >= 1) v(1) = std::sqrt(3.0) * t;
  for (int n = 2; n <= degree; ++n) {
    const double p2 = ((2 * n - 1) * t * p1 - (n - 1) * p0) / n;
    v(n) = std::sqrt(2.0 * n + 1.0) * p2;
    p0 = p1;
    p1 = p2;
  }
  return v;
}

Eigen::VectorXd legendre_derivatives(int degree, double x) {
  Eigen::VectorXd d(degree + 1);
  const double t = 2.0 * x - 1.0;
  double p0 = 1.0, p1 = t;      // P_{n-1}, P_n
  double q0 = 0.0, q1 = 1.0;    // P'_{n-1}, P'_n (in t)
  d(0) = 0.0;
  if (degree >= 1) d(1) = std::sqrt(3.0) * 2.0;
  for (int n = 2; n <= degree; ++n) {
    const double p2 = ((2 * n - 1) * t * p1 - (n - 1) * p0) / n;
    const double q2 = ((2 * n - 1) * (p1 + t * q1) - (n - 1) * q0) / n;
    d(n) = std::sqrt(2.0 * n + 1.0) * 2.0 * q2;  // chain rule, t = 2x-1
    p0 = p1; p1 = p2;
    q0 = q1; q1 = q2;
  }
  return d;
}

double jacobi_psi(int k, double x) {
  if (k < 1) throw std::invalid_argument("jacobi_psi: need k >= 1");
  return jacobi_psi_values(k, x)(k - 1);
}

Eigen::VectorXd jacobi_psi_values(int m, double x) {
  if (m < 1) throw std::invalid_argument("jacobi_psi_values: need m >= 1");
  Eigen::VectorXd v(m);
  const double s = x * (1.0 - x);
  v(0) = 12.0 * s;
  if (m >= 2) v(1) = 120.0 * s * (x - 0.5);
  for (int k = 3; k <= m; ++k) {
    v(k - 1) = (2.0 * (2 * k + 1) / (k - 1)) * (x - 0.5) * v(k - 2) -
               (double(k + 2) / (k - 1)) * v(k - 3);
  }
  return v;
}

double jacobi_G(int k, double x) {
  if (k < 1) throw std::invalid_argument("jacobi_G: need k >= 1");
  double g0 = 1.0;
  if (k == 1) return g0;
  double g1 = x - 0.5;
  for (int n = 3; n <= k; ++n) {
    const double g2 = (x - 0.5) * g1 -
                      (double(n - 2) * (n + 2) / (4.0 * (2 * n - 1) * (2 * n + 1))) * g0;
    g0 = g1;
    g1 = g2;
  }
  return g1;
}

double psi_norm_sq(int k) {
  return double(k) * (k + 1) * (k + 2) * (k + 3) / (2.0 * k + 3.0);
}

EdgeBasis::EdgeBasis(int q_) : q(q_) {
  if (q < 1) throw std::invalid_argument("EdgeBasis: need q >= 1");
  alpha.resize(q - 1);
  beta.resize(q - 1);
  for (int k = 1; k <= q - 1; ++k) {
    alpha(k - 1) = 1.0 / psi_norm_sq(k);
    beta(k - 1) = ((k % 2 == 1) ? 1.0 : -1.0) / psi_norm_sq(k);
  }
}

double EdgeBasis::phi1_star(double x) const {
  double v = x;
  if (q >= 2) v -= alpha.dot(jacobi_psi_values(q - 1, x));
  return v;
}

double EdgeBasis::phi2_star(double x) const {
  double v = 1.0 - x;
  if (q >= 2) v -= beta.dot(jacobi_psi_values(q - 1, x));
  return v;
}

Eigen::VectorXd EdgeBasis::values(double x) const {
  Eigen::VectorXd out(q + 1);
  if (q >= 2) {
    const Eigen::VectorXd psi = jacobi_psi_values(q - 1, x);
    out.head(q - 1) = psi;
    out(q - 1) = x - alpha.dot(psi);
    out(q) = 1.0 - x - beta.dot(psi);
  } else {
    out(0) = x;
    out(1) = 1.0 - x;
  }
  return out;
}

double EdgeBasis::phistar_diag() const { return 1.0 / (double(q) * (q + 2)); }

double EdgeBasis::phistar_cross() const {
  return ((q % 2 == 1) ? 1.0 : -1.0) / (double(q) * (q + 1) * (q + 2));
}

Eigen::MatrixXd EdgeBasis::gram() const {
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(q + 1, q + 1);
  for (int k = 1; k <= q - 1; ++k) G(k - 1, k - 1) = psi_norm_sq(k);
  if (q == 1) {
    G(0, 0) = G(1, 1) = 1.0 / 3.0;
    G(0, 1) = G(1, 0) = 1.0 / 6.0;
  } else {
    G(q - 1, q - 1) = G(q, q) = phistar_diag();
    G(q - 1, q) = G(q, q - 1) = phistar_cross();
  }
  return G;
}

EdgeGramReport edge_gram_identities(int q) {
  if (q < 1) throw std::invalid_argument("edge_gram_identities: need q >= 1");
  EdgeGramReport rep;
  rep.q = q;
  const EdgeBasis eb(q);
  const int m = std::max(q - 1, 1);
  // Integrands have degree <= 2q+2; q+3 Gauss points are plenty.
  const QuadratureRule quad = gauss_legendre(m + q + 4);

  rep.phi1_psi = Eigen::VectorXd::Zero(m);
  rep.phi2_psi = Eigen::VectorXd::Zero(m);
  rep.psi_norms = Eigen::VectorXd::Zero(m);
  rep.psi_norms_expected.resize(m);
  for (int k = 1; k <= m; ++k) rep.psi_norms_expected(k - 1) = psi_norm_sq(k);

  for (int i = 0; i < quad.n; ++i) {
    const double x = quad.x(i), w = quad.w(i);
    const Eigen::VectorXd psi = jacobi_psi_values(m, x);
    rep.phi1_psi += w * x * psi;
    rep.phi2_psi += w * (1.0 - x) * psi;
    rep.psi_norms += w * psi.cwiseProduct(psi);
    const double f1 = eb.phi1_star(x), f2 = eb.phi2_star(x);
    rep.phistar_diag1 += w * f1 * f1;
    rep.phistar_diag2 += w * f2 * f2;
    rep.phistar_cross += w * f1 * f2;
  }
  rep.phistar_diag_expected = (q == 1) ? 1.0 / 3.0 : eb.phistar_diag();
  rep.phistar_cross_expected = (q == 1) ? 1.0 / 6.0 : eb.phistar_cross();

  double err = 0.0;
  auto rel = [](double got, double want) {
    return std::abs(got - want) / std::max(1.0, std::abs(want));
  };
  for (int k = 1; k <= m; ++k) {
    if (q >= 2) {
      err = std::max(err, rel(rep.phi1_psi(k - 1), 1.0));
      err = std::max(err, rel(rep.phi2_psi(k - 1), (k % 2 == 1) ? 1.0 : -1.0));
    }
    err = std::max(err, std::abs(rep.psi_norms(k - 1) - rep.psi_norms_expected(k - 1)) /
                            rep.psi_norms_expected(k - 1));
  }
  err = std::max(err, rel(rep.phistar_diag1, rep.phistar_diag_expected));
  err = std::max(err, rel(rep.phistar_diag2, rep.phistar_diag_expected));
  err = std::max(err, rel(rep.phistar_cross, rep.phistar_cross_expected));
  rep.max_rel_error = err;
  return rep;
}

double infsup_constant_sq(int q, int p) {
  if ((p + q) % 2 == 0) return 1.0 - double(q + 1) * (q + 2) / (double(p + 1) * (p + 2));
  return 1.0 - double(q + 1) * (q + 2) / (double(p) * (p + 1));
}

Eigen::VectorXcd infsup_test_function(const Eigen::VectorXcd& mu, int q, int p) {
  if (p < q + 2) throw std::invalid_argument("infsup_test_function: need p >= q+2");
  if (mu.size() != q + 1) throw std::invalid_argument("infsup_test_function: bad mu size");
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(p - 1);
  v.head(q - 1) = mu.head(q - 1);
  const Complex a1 = mu(q - 1), a2 = mu(q);
  // <phi1*, psi_k> = 1 and <phi2*, psi_k> = (-1)^{k-1} for k >= q.
  for (int k = q; k <= p - 1; ++k) {
    const Complex pair = a1 + ((k % 2 == 1) ? a2 : -a2);
    v(k - 1) = pair / psi_norm_sq(k);
  }
  return v;
}

Complex infsup_pairing(const Eigen::VectorXcd& mu, const Eigen::VectorXcd& v, int q, int p) {
  // <mu, conj(v)> with mu in (psi_1..psi_{q-1}, phi1*, phi2*), v in psi_1..psi_{p-1}.
  Complex s = 0;
  for (int k = 1; k <= q - 1; ++k) s += mu(k - 1) * std::conj(v(k - 1)) * psi_norm_sq(k);
  const Complex a1 = mu(q - 1), a2 = mu(q);
  for (int k = q; k <= p - 1; ++k) {
    const Complex pair = a1 + ((k % 2 == 1) ? a2 : -a2);
    s += pair * std::conj(v(k - 1));
  }
  return s;
}

double infsup_norm_mu(const Eigen::VectorXcd& mu, int q) {
  double s = 0;
  for (int k = 1; k <= q - 1; ++k) s += std::norm(mu(k - 1)) * psi_norm_sq(k);
  const EdgeBasis eb(q);
  const double d = (q == 1) ? 1.0 / 3.0 : eb.phistar_diag();
  const double c = (q == 1) ? 1.0 / 6.0 : eb.phistar_cross();
  const Complex a1 = mu(q - 1), a2 = mu(q);
  s += d * (std::norm(a1) + std::norm(a2)) + 2.0 * c * std::real(a1 * std::conj(a2));
  return std::sqrt(std::max(0.0, s));
}

double infsup_norm_v(const Eigen::VectorXcd& v, int p) {
  double s = 0;
  for (int k = 1; k <= p - 1; ++k) s += std::norm(v(k - 1)) * psi_norm_sq(k);
  return std::sqrt(s);
}

}  // namespace helmlsq
