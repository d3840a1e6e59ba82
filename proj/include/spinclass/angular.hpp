#pragma once

// Spin-algebra primitives: angular momentum matrices, spin coherent states,
// Clebsch-Gordan coefficients, irreducible multipole operators and spherical
// harmonics (complex and real), plus the sphere quadrature used to check the
// coherent-state resolution of identity.

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace spinclass {

using Complex = std::complex<double>;
using Eigen::Matrix3d;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::Vector3d;
using Eigen::VectorXcd;
using Eigen::VectorXd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kFourPi = 4.0 * kPi;

// Spin quantum number kept as 2j so half-integer values stay exact.
struct SpinLabel {
  int twice_j = 1;

  SpinLabel() = default;
  explicit SpinLabel(int tj) : twice_j(tj) {
    if (twice_j < 1) throw std::invalid_argument("SpinLabel: need 2j >= 1");
  }

  int dim() const { return twice_j + 1; }
  double j() const { return 0.5 * twice_j; }

  friend bool operator==(const SpinLabel& a, const SpinLabel& b) {
    return a.twice_j == b.twice_j;
  }
};

// Point on the unit sphere, canonicalized to theta in [0,pi], phi in [0,2pi).
struct Direction {
  double theta = 0.0;
  double phi = 0.0;

  Direction() = default;

  Direction(double theta_in, double phi_in) {
    const double st = std::sin(theta_in);
    const Vector3d n(st * std::cos(phi_in), st * std::sin(phi_in),
                     std::cos(theta_in));
    *this = from_unit_vector(n, /*tol=*/1e-6);
  }

  static Direction from_unit_vector(const Vector3d& n, double tol = 1e-9) {
    const double r = n.norm();
    if (std::abs(r - 1.0) > tol)
      throw std::invalid_argument("Direction: vector is not unit length");
    Direction d;
    const double rho = std::hypot(n.x(), n.y());
    d.theta = std::atan2(rho, n.z());
    d.phi = (rho < 1e-15) ? 0.0 : std::atan2(n.y(), n.x());
    if (d.phi < 0.0) d.phi += 2.0 * kPi;
    return d;
  }

  Vector3d unit_vector() const {
    const double st = std::sin(theta);
    return Vector3d(st * std::cos(phi), st * std::sin(phi), std::cos(theta));
  }
};

namespace detail {

inline double log_factorial(int n) {
  if (n < 0) throw std::invalid_argument("log_factorial: negative argument");
  return std::lgamma(static_cast<double>(n) + 1.0);
}

// Exact in double for the operand sizes used here (2j <= ~40).
inline double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r *= static_cast<double>(n - k + i) / i;
  return r;
}

inline bool is_half_integer_pair(double j, double m) {
  const double tj = 2.0 * j;
  const double tm = 2.0 * m;
  if (std::abs(tj - std::llround(tj)) > 1e-9) return false;
  if (std::abs(tm - std::llround(tm)) > 1e-9) return false;
  const long long itj = std::llround(tj);
  const long long itm = std::llround(tm);
  if (itj < 0 || std::abs(itm) > itj) return false;
  return ((itj - itm) % 2) == 0;
}

// Racah's sum formula, arguments doubled (2j, 2m). Log-factorial
// accumulation with explicit sign tracking; accurate to ~1e-13 relative
// for the j range this library targets.
inline double cg_doubled(int tj1, int tm1, int tj2, int tm2, int tJ, int tM) {
  if (tM != tm1 + tm2) return 0.0;
  if (tJ < std::abs(tj1 - tj2) || tJ > tj1 + tj2) return 0.0;
  if (((tj1 + tj2 - tJ) % 2) != 0) return 0.0;
  if (std::abs(tM) > tJ) return 0.0;

  const int a1 = (tj1 + tj2 - tJ) / 2;
  const int a2 = (tj1 - tm1) / 2;
  const int a3 = (tj2 + tm2) / 2;
  const int a4 = (tJ - tj2 + tm1) / 2;
  const int a5 = (tJ - tj1 - tm2) / 2;

  const double log_delta2 = log_factorial(a1) +
                            log_factorial((tj1 - tj2 + tJ) / 2) +
                            log_factorial((-tj1 + tj2 + tJ) / 2) -
                            log_factorial((tj1 + tj2 + tJ) / 2 + 1);
  const double log_pref =
      std::log(static_cast<double>(tJ + 1)) + log_delta2 +
      log_factorial((tJ + tM) / 2) + log_factorial((tJ - tM) / 2) +
      log_factorial((tj1 - tm1) / 2) + log_factorial((tj1 + tm1) / 2) +
      log_factorial((tj2 - tm2) / 2) + log_factorial((tj2 + tm2) / 2);

  const int zmin = std::max({0, -a4, -a5});
  const int zmax = std::min({a1, a2, a3});
  if (zmin > zmax) return 0.0;

  double log_term_max = -1e300;
  std::vector<double> log_terms;
  log_terms.reserve(zmax - zmin + 1);
  for (int z = zmin; z <= zmax; ++z) {
    const double lt = -(log_factorial(z) + log_factorial(a1 - z) +
                        log_factorial(a2 - z) + log_factorial(a3 - z) +
                        log_factorial(a4 + z) + log_factorial(a5 + z));
    log_terms.push_back(lt);
    log_term_max = std::max(log_term_max, lt);
  }
  double s = 0.0;
  for (int z = zmin; z <= zmax; ++z) {
    const double t = std::exp(log_terms[z - zmin] - log_term_max);
    s += (z % 2 == 0) ? t : -t;
  }
  return s * std::exp(0.5 * log_pref + log_term_max);
}

}  // namespace detail

// Condon-Shortley <j1 m1 j2 m2 | J M>. Invalid labels (non-half-integer,
// |m| > j, m inconsistent with j) are usage errors; violated selection rules
// just give zero.
inline double clebsch_gordan(double j1, double m1, double j2, double m2,
                             double J, double M) {
  if (!detail::is_half_integer_pair(j1, m1) ||
      !detail::is_half_integer_pair(j2, m2) ||
      !detail::is_half_integer_pair(J, M))
    throw std::invalid_argument("clebsch_gordan: invalid (j, m) labels");
  return detail::cg_doubled(std::llround(2 * j1), std::llround(2 * m1),
                            std::llround(2 * j2), std::llround(2 * m2),
                            std::llround(2 * J), std::llround(2 * M));
}

struct SpinOperators {
  MatrixXcd jx, jy, jz;
};

// Ladder construction in the |j m> basis with m descending from j to -j.
inline SpinOperators angular_momentum_ops(SpinLabel j) {
  const int d = j.dim();
  const double jj = j.j();
  MatrixXcd jplus = MatrixXcd::Zero(d, d);
  MatrixXcd jz = MatrixXcd::Zero(d, d);
  for (int i = 0; i < d; ++i) {
    const double m = jj - i;
    jz(i, i) = m;
    if (i > 0) jplus(i - 1, i) = std::sqrt(jj * (jj + 1.0) - m * (m + 1.0));
  }
  SpinOperators ops;
  ops.jx = 0.5 * (jplus + jplus.adjoint());
  ops.jy = Complex(0.0, -0.5) * (jplus - MatrixXcd(jplus.adjoint()));
  ops.jz = jz;
  return ops;
}

// Coherent state |theta phi>: eigenstate of n.J with eigenvalue j.
// Amplitude at m is sqrt(C(2j, j+m)) sin(t/2)^(j-m) cos(t/2)^(j+m)
// e^{-i (j+m) phi}; the vector is unit norm by the binomial theorem.
inline VectorXcd coherent_ket(SpinLabel j, const Direction& alpha) {
  const int d = j.dim();
  const double c = std::cos(0.5 * alpha.theta);
  const double s = std::sin(0.5 * alpha.theta);
  VectorXcd ket(d);
  for (int i = 0; i < d; ++i) {
    const int up = j.twice_j - i;  // j + m
    const int dn = i;              // j - m
    const double amp = std::sqrt(detail::binomial(j.twice_j, up)) *
                       std::pow(s, dn) * std::pow(c, up);
    ket(i) = amp * std::polar(1.0, -static_cast<double>(up) * alpha.phi);
  }
  return ket;
}

// Irreducible tensor operator T_KQ built from Clebsch-Gordan coefficients:
//   T_KQ = sum_{m,m'} (-1)^{j-m'} <j m; j -m' | K Q> |j m><j m'|.
// Orthonormal (tr T_KQ^dag T_K'Q' = delta delta) with T_KQ^dag = (-1)^Q T_K,-Q.
inline MatrixXcd multipole_operator(SpinLabel j, int K, int Q) {
  if (K < 0 || K > j.twice_j || std::abs(Q) > K)
    throw std::invalid_argument("multipole_operator: K or Q out of range");
  const int d = j.dim();
  MatrixXcd t = MatrixXcd::Zero(d, d);
  for (int i1 = 0; i1 < d; ++i1) {
    const int tm1 = j.twice_j - 2 * i1;
    const int tm2 = tm1 - 2 * Q;
    if (std::abs(tm2) > j.twice_j) continue;
    const int i2 = (j.twice_j - tm2) / 2;
    const double cg =
        detail::cg_doubled(j.twice_j, tm1, j.twice_j, -tm2, 2 * K, 2 * Q);
    const int sign = (((j.twice_j - tm2) / 2) % 2 == 0) ? 1 : -1;
    t(i1, i2) = sign * cg;
  }
  return t;
}

// All T_KQ for one spin, flat-indexed by K*K + K + Q.
struct MultipoleBasis {
  SpinLabel j;
  std::vector<MatrixXcd> ops;

  explicit MultipoleBasis(SpinLabel j_in) : j(j_in) {
    const int kmax = j.twice_j;
    ops.reserve((kmax + 1) * (kmax + 1));
    for (int K = 0; K <= kmax; ++K)
      for (int Q = -K; Q <= K; ++Q) ops.push_back(multipole_operator(j, K, Q));
  }

  static int flat_index(int K, int Q) { return K * K + K + Q; }
  int size() const { return static_cast<int>(ops.size()); }
  const MatrixXcd& at(int K, int Q) const { return ops[flat_index(K, Q)]; }
};

namespace detail {

// sqrt((2l+1)/(4pi) (l-m)!/(l+m)!) P_l^m(x) with the Condon-Shortley phase,
// m >= 0. Standard stable upward recurrence in l.
inline double normalized_legendre(int l, int m, double x) {
  if (m < 0 || m > l) throw std::invalid_argument("normalized_legendre");
  const double somx2 = std::sqrt(std::max(0.0, 1.0 - x * x));
  double pmm = std::sqrt(1.0 / kFourPi);
  for (int k = 1; k <= m; ++k)
    pmm *= -std::sqrt((2.0 * k + 1.0) / (2.0 * k)) * somx2;
  if (l == m) return pmm;
  double pm1 = x * std::sqrt(2.0 * m + 3.0) * pmm;
  if (l == m + 1) return pm1;
  double pl = 0.0;
  for (int ll = m + 2; ll <= l; ++ll) {
    const double a = std::sqrt((4.0 * ll * ll - 1.0) /
                               (static_cast<double>(ll) * ll - m * m));
    const double b =
        std::sqrt((static_cast<double>(ll - 1) * (ll - 1) - m * m) /
                  (4.0 * static_cast<double>(ll - 1) * (ll - 1) - 1.0));
    pl = a * (x * pm1 - b * pmm);
    pmm = pm1;
    pm1 = pl;
  }
  return pl;
}

}  // namespace detail

inline Complex spherical_harmonic(int K, int Q, const Direction& a) {
  if (std::abs(Q) > K) throw std::invalid_argument("spherical_harmonic: |Q| > K");
  const int aq = std::abs(Q);
  const double plm = detail::normalized_legendre(K, aq, std::cos(a.theta));
  const Complex y = plm * std::polar(1.0, aq * a.phi);
  if (Q >= 0) return y;
  return (aq % 2 == 0 ? 1.0 : -1.0) * std::conj(y);
}

// Real orthonormal basis: the usual cosine/sine recombination of the +/-Q
// pair, Y_K0 for Q = 0.
inline double real_spherical_harmonic(int K, int Q, const Direction& a) {
  if (std::abs(Q) > K)
    throw std::invalid_argument("real_spherical_harmonic: |Q| > K");
  const int aq = std::abs(Q);
  const double plm = detail::normalized_legendre(K, aq, std::cos(a.theta));
  if (Q == 0) return plm;
  const double sign = (aq % 2 == 0) ? 1.0 : -1.0;
  const double root2 = std::sqrt(2.0);
  if (Q > 0) return root2 * sign * plm * std::cos(aq * a.phi);
  return root2 * sign * plm * std::sin(aq * a.phi);
}

// Gauss-Legendre rule on [-1, 1], nodes by Newton iteration.
struct QuadratureRule {
  VectorXd nodes;
  VectorXd weights;
};

inline QuadratureRule gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n >= 1 required");
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    rule.nodes(i) = -x;
    rule.nodes(n - 1 - i) = x;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.weights(i) = w;
    rule.weights(n - 1 - i) = w;
  }
  return rule;
}

// Tensor rule on the sphere: Gauss-Legendre in cos(theta) x uniform
// trapezoid in phi, `order` points per axis. Weights sum to 4pi.
struct SphereQuadrature {
  std::vector<Direction> points;
  std::vector<double> weights;
};

inline SphereQuadrature sphere_quadrature(int order) {
  const QuadratureRule gl = gauss_legendre(order);
  SphereQuadrature q;
  q.points.reserve(order * order);
  q.weights.reserve(order * order);
  const double wphi = 2.0 * kPi / order;
  for (int i = 0; i < order; ++i) {
    const double theta = std::acos(gl.nodes(i));
    for (int k = 0; k < order; ++k) {
      Direction d;
      d.theta = theta;
      d.phi = wphi * k;
      q.points.push_back(d);
      q.weights.push_back(gl.weights(i) * wphi);
    }
  }
  return q;
}

// Frobenius norm of (2j+1)/(4pi) \int |a><a| da - 1, evaluated with the
// tensor quadrature above. Converges to zero once the rule resolves the
// degree-2j integrands.
inline double identity_resolution_residual(SpinLabel j, int order) {
  const SphereQuadrature q = sphere_quadrature(order);
  const int d = j.dim();
  MatrixXcd acc = MatrixXcd::Zero(d, d);
  for (std::size_t i = 0; i < q.points.size(); ++i) {
    const VectorXcd ket = coherent_ket(j, q.points[i]);
    acc.noalias() += q.weights[i] * (ket * ket.adjoint());
  }
  acc *= (j.twice_j + 1.0) / kFourPi;
  acc -= MatrixXcd::Identity(d, d);
  return acc.norm();
}

}  // namespace spinclass
