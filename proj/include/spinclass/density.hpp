#pragma once

// Density-matrix machinery: multipole expansion rho_KQ, the one-to-one
// rho <-> P coefficient map, discrete P-functions (delta mixtures), and
// scaled one-parameter families rho_0 + kappa * rho_hat.

#include "spinclass/angular.hpp"

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <vector>

namespace spinclass {

inline bool is_hermitian(const MatrixXcd& m, double tol = 1e-12) {
  return m.rows() == m.cols() && (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

inline void require_hermitian(const MatrixXcd& m, double tol = 1e-12) {
  if (!is_hermitian(m, tol))
    throw std::invalid_argument("matrix is not Hermitian");
}

// Sum of singular values; for Hermitian input this is the sum of |eigenvalue|.
inline double trace_norm(const MatrixXcd& m) {
  require_hermitian(m, 1e-10);
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().sum();
}

inline double hilbert_schmidt_norm(const MatrixXcd& m) { return m.norm(); }

enum class MatrixNorm { kTrace, kHilbertSchmidt };

inline double matrix_norm(const MatrixXcd& m, MatrixNorm which) {
  return which == MatrixNorm::kTrace ? trace_norm(m) : hilbert_schmidt_norm(m);
}

inline const char* norm_name(MatrixNorm which) {
  return which == MatrixNorm::kTrace ? "trace" : "hilbert-schmidt";
}

// Multipole coefficients rho_KQ = tr(rho T_KQ^dag), flat-indexed like
// MultipoleBasis. Hermitian rho implies rho_{K,-Q} = (-1)^Q conj(rho_KQ).
struct MultipoleCoeffs {
  SpinLabel j;
  std::vector<Complex> coeff;

  explicit MultipoleCoeffs(SpinLabel j_in)
      : j(j_in), coeff((j_in.twice_j + 1) * (j_in.twice_j + 1), Complex(0, 0)) {}

  int kmax() const { return j.twice_j; }
  Complex& at(int K, int Q) { return coeff[MultipoleBasis::flat_index(K, Q)]; }
  const Complex& at(int K, int Q) const {
    return coeff[MultipoleBasis::flat_index(K, Q)];
  }
};

// P-function coefficients in the spherical-harmonic basis. Only the
// mandatory components K <= 2j are stored; everything above is pure gauge
// and lives implicitly in DeltaMixture certificates instead.
struct PCoeffs {
  SpinLabel j;
  std::vector<Complex> coeff;

  explicit PCoeffs(SpinLabel j_in)
      : j(j_in), coeff((j_in.twice_j + 1) * (j_in.twice_j + 1), Complex(0, 0)) {}

  int kmax() const { return j.twice_j; }
  Complex& at(int K, int Q) { return coeff[MultipoleBasis::flat_index(K, Q)]; }
  const Complex& at(int K, int Q) const {
    return coeff[MultipoleBasis::flat_index(K, Q)];
  }
};

// Scale factor between rho_KQ and P_KQ:
//   rho_KQ = P_KQ sqrt(4pi) (2j)! / sqrt(Gamma(2j-K+1) Gamma(2j+K+2)).
inline double p_to_rho_scale(SpinLabel j, int K) {
  if (K < 0 || K > j.twice_j)
    throw std::invalid_argument("p_to_rho_scale: K out of range");
  const double lg = detail::log_factorial(j.twice_j) -
                    0.5 * (detail::log_factorial(j.twice_j - K) +
                           detail::log_factorial(j.twice_j + K + 1));
  return std::sqrt(kFourPi) * std::exp(lg);
}

inline MultipoleCoeffs to_multipole(const MatrixXcd& rho, SpinLabel j) {
  if (rho.rows() != j.dim() || rho.cols() != j.dim())
    throw std::invalid_argument("to_multipole: dimension mismatch");
  const MultipoleBasis basis(j);
  MultipoleCoeffs mc(j);
  for (int K = 0; K <= mc.kmax(); ++K)
    for (int Q = -K; Q <= K; ++Q)
      mc.at(K, Q) = (basis.at(K, Q).adjoint() * rho).trace();
  return mc;
}

inline MatrixXcd from_multipole(const MultipoleCoeffs& mc) {
  const MultipoleBasis basis(mc.j);
  MatrixXcd rho = MatrixXcd::Zero(mc.j.dim(), mc.j.dim());
  for (int K = 0; K <= mc.kmax(); ++K)
    for (int Q = -K; Q <= K; ++Q) rho += mc.at(K, Q) * basis.at(K, Q);
  return rho;
}

inline PCoeffs p_coeffs_from_rho(const MultipoleCoeffs& mc) {
  PCoeffs pc(mc.j);
  for (int K = 0; K <= mc.kmax(); ++K) {
    const double s = p_to_rho_scale(mc.j, K);
    for (int Q = -K; Q <= K; ++Q) pc.at(K, Q) = mc.at(K, Q) / s;
  }
  return pc;
}

inline MultipoleCoeffs rho_coeffs_from_p(const PCoeffs& pc) {
  MultipoleCoeffs mc(pc.j);
  for (int K = 0; K <= pc.kmax(); ++K) {
    const double s = p_to_rho_scale(pc.j, K);
    for (int Q = -K; Q <= K; ++Q) mc.at(K, Q) = pc.at(K, Q) * s;
  }
  return mc;
}

inline PCoeffs p_coeffs_of_state(const MatrixXcd& rho, SpinLabel j) {
  return p_coeffs_from_rho(to_multipole(rho, j));
}

// Finite non-negative P-function: weighted delta peaks on the sphere.
// This is the universal classicality certificate emitted by every
// decomposition routine in the library.
struct DeltaMixture {
  struct WeightedPoint {
    double weight = 0.0;
    Direction point;
  };
  std::vector<WeightedPoint> points;

  double total_weight() const {
    double s = 0.0;
    for (const auto& p : points) s += p.weight;
    return s;
  }
};

inline MatrixXcd rho_from_mixture(const DeltaMixture& mix, SpinLabel j) {
  MatrixXcd rho = MatrixXcd::Zero(j.dim(), j.dim());
  for (const auto& p : mix.points) {
    if (p.weight < 0.0)
      throw std::invalid_argument("rho_from_mixture: negative weight");
    const VectorXcd ket = coherent_ket(j, p.point);
    rho.noalias() += p.weight * (ket * ket.adjoint());
  }
  return rho;
}

// Value of the truncated expansion sum_{K<=2j} P_KQ Y_KQ(alpha). Real for
// coefficients with the +-Q Hermiticity relation; the imaginary part is
// discarded.
inline double evaluate_truncated_p(const PCoeffs& pc, const Direction& a) {
  Complex v(0.0, 0.0);
  for (int K = 0; K <= pc.kmax(); ++K)
    for (int Q = -K; Q <= K; ++Q) v += pc.at(K, Q) * spherical_harmonic(K, Q, a);
  return v.real();
}

// One-parameter family rho_0 + kappa * rho_hat with rho_hat traceless and
// normalized (trace norm by default).
struct ScaledFamily {
  MatrixXcd rho_hat;
  MatrixNorm norm = MatrixNorm::kTrace;

  int dim() const { return static_cast<int>(rho_hat.rows()); }
};

inline ScaledFamily make_scaled_family(const MatrixXcd& direction,
                                       MatrixNorm norm = MatrixNorm::kTrace) {
  require_hermitian(direction, 1e-10);
  if (std::abs(direction.trace().real()) > 1e-10 ||
      std::abs(direction.trace().imag()) > 1e-10)
    throw std::invalid_argument("make_scaled_family: direction must be traceless");
  const double n = matrix_norm(direction, norm);
  if (n < 1e-14)
    throw std::invalid_argument("make_scaled_family: zero direction");
  ScaledFamily f;
  f.rho_hat = direction / n;
  f.norm = norm;
  return f;
}

inline MatrixXcd maximally_mixed(int dim) {
  return MatrixXcd::Identity(dim, dim) / static_cast<double>(dim);
}

inline MatrixXcd scaled_state(const ScaledFamily& family, double kappa) {
  if (kappa < 0.0) throw std::invalid_argument("scaled_state: kappa < 0");
  return maximally_mixed(family.dim()) + kappa * family.rho_hat;
}

struct PsdReport {
  double min_eigenvalue = 0.0;
  bool positive = false;
};

inline PsdReport psd_check(const MatrixXcd& rho, double tol = 1e-10) {
  require_hermitian(rho, 1e-10);
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(rho, Eigen::EigenvaluesOnly);
  PsdReport r;
  r.min_eigenvalue = es.eigenvalues().minCoeff();
  r.positive = r.min_eigenvalue >= -tol;
  return r;
}

namespace detail {

// Smallest kappa > 0 where fn(kappa) crosses zero from above, located by
// doubling bracket + bisection. fn must be positive at zero.
template <typename Fn>
double first_zero_crossing(Fn&& fn, double tol = 1e-10) {
  double lo = 0.0;
  double hi = 1.0;
  double flo = fn(lo);
  if (flo <= 0.0) return 0.0;
  double fhi = fn(hi);
  int guard = 0;
  while (fhi > 0.0) {
    lo = hi;
    hi *= 2.0;
    fhi = fn(hi);
    if (++guard > 60)
      throw std::runtime_error("first_zero_crossing: no sign change found");
  }
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (fn(mid) > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace detail

// Kappa at which rho_0 + kappa rho_hat stops being positive semidefinite.
inline double positivity_kappa(const ScaledFamily& family, double tol = 1e-10) {
  return detail::first_zero_crossing(
      [&](double k) { return psd_check(scaled_state(family, k), 0.0).min_eigenvalue; },
      tol);
}

}  // namespace spinclass
