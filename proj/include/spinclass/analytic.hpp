#pragma once

// Closed-form classicality machinery. Spin-1/2: every state decomposes into
// two antipodal coherent states. Spin-1: the state is a mixture of coherent
// states iff Z = W - u u^t >= 0, with an explicit eight-point construction
// and a closed boundary equation along scaled families. For general j,
// moment-based non-classicality witnesses.

#include "spinclass/density.hpp"
#include "spinclass/lpsolve_grid.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace spinclass {

inline Vector3d bloch_vector(const MatrixXcd& rho) {
  if (rho.rows() != 2 || rho.cols() != 2)
    throw std::invalid_argument("bloch_vector: need a 2x2 matrix");
  Vector3d u;
  u.x() = 2.0 * rho(1, 0).real();
  u.y() = 2.0 * rho(1, 0).imag();
  u.z() = (rho(0, 0) - rho(1, 1)).real();
  return u;
}

// Two antipodal points along u with weights (1 +- |u|)/2; reconstructs rho
// exactly. Zero-weight endpoints are dropped, so pure states come back as a
// single coherent point.
inline DeltaMixture qubit_decompose(const MatrixXcd& rho) {
  require_hermitian(rho, 1e-10);
  const Vector3d u = bloch_vector(rho);
  const double r = u.norm();
  if (r > 1.0 + 1e-10)
    throw std::invalid_argument("qubit_decompose: |u| > 1, not a state");
  const Vector3d axis = (r < 1e-14) ? Vector3d(0, 0, 1) : Vector3d(u / r);
  DeltaMixture mix;
  const double wplus = 0.5 * (1.0 + std::min(r, 1.0));
  const double wminus = 1.0 - wplus;
  mix.points.push_back({wplus, Direction::from_unit_vector(axis)});
  if (wminus > 1e-14)
    mix.points.push_back({wminus, Direction::from_unit_vector(-axis)});
  return mix;
}

// First moment u, symmetrized second moment W (trace 1) and Z = W - u u^t
// for a spin-1 state.
struct SpinOneFrame {
  Vector3d u;
  Matrix3d w;
  Matrix3d z;
};

namespace detail {

inline const SpinOperators& spin1_ops() {
  static const SpinOperators ops = angular_momentum_ops(SpinLabel(2));
  return ops;
}

inline std::array<const MatrixXcd*, 3> op_array(const SpinOperators& ops) {
  return {&ops.jx, &ops.jy, &ops.jz};
}

}  // namespace detail

inline SpinOneFrame spin1_frame(const MatrixXcd& rho) {
  if (rho.rows() != 3 || rho.cols() != 3)
    throw std::invalid_argument("spin1_frame: need a 3x3 matrix");
  require_hermitian(rho, 1e-10);
  const auto ops = detail::op_array(detail::spin1_ops());
  SpinOneFrame f;
  for (int a = 0; a < 3; ++a) {
    f.u(a) = (rho * (*ops[a])).trace().real();
    for (int b = 0; b < 3; ++b) {
      const MatrixXcd sym = (*ops[a]) * (*ops[b]) + (*ops[b]) * (*ops[a]);
      f.w(a, b) = (rho * sym).trace().real() - (a == b ? 1.0 : 0.0);
    }
  }
  f.z = f.w - f.u * f.u.transpose();
  return f;
}

struct Spin1Verdict {
  bool p_rep = false;
  double z_min = 0.0;
};

inline Spin1Verdict spin1_is_prep(const MatrixXcd& rho, double tol = 1e-10) {
  const SpinOneFrame f = spin1_frame(rho);
  Eigen::SelfAdjointEigenSolver<Matrix3d> es(f.z, Eigen::EigenvaluesOnly);
  Spin1Verdict v;
  v.z_min = es.eigenvalues().minCoeff();
  v.p_rep = v.z_min >= -tol;
  return v;
}

// Constructive eight-point decomposition. Factor Z = A A^t with A = U sqrt(D)
// from the eigendecomposition Z = U D U^t; A^t A = D is then diagonal, which
// is exactly what makes every n^(i) land on the unit sphere. For each sign
// vector t in {+-1}^3:
//   s   = u^t A t / (1 - |u|^2)
//   tau = -s + sqrt(1 + s^2)
//   n   = u + tau A t,   lambda = 1 / (4 (1 + tau^2)).
// Near-pure coherent states (|u| -> 1) fall back to the single-point
// certificate since tau is singular there.
inline DeltaMixture spin1_decompose(const MatrixXcd& rho, double tol = 1e-10) {
  const SpinOneFrame f = spin1_frame(rho);
  Eigen::SelfAdjointEigenSolver<Matrix3d> es(f.z);
  const Vector3d evals = es.eigenvalues();
  if (evals.minCoeff() < -tol)
    throw std::domain_error("spin1_decompose: Z has a negative eigenvalue, state is not P-rep");

  const double u2 = f.u.squaredNorm();
  DeltaMixture mix;
  if (1.0 - u2 < 1e-9) {
    mix.points.push_back({1.0, Direction::from_unit_vector(f.u.normalized())});
    return mix;
  }

  Matrix3d a = es.eigenvectors();
  for (int i = 0; i < 3; ++i) a.col(i) *= std::sqrt(std::max(0.0, evals(i)));

  for (int bits = 0; bits < 8; ++bits) {
    const Vector3d t((bits & 1) ? 1.0 : -1.0, (bits & 2) ? 1.0 : -1.0,
                     (bits & 4) ? 1.0 : -1.0);
    const Vector3d at = a * t;
    const double s = f.u.dot(at) / (1.0 - u2);
    const double tau = -s + std::sqrt(1.0 + s * s);
    const Vector3d n = f.u + tau * at;
    const double lambda = 0.25 / (1.0 + tau * tau);
    mix.points.push_back({lambda, Direction::from_unit_vector(n.normalized())});
  }
  return mix;
}

// Boundary along a scaled family: with u, W the frame of rho_0 + rho_hat,
//   Z_kappa = kappa W + ((1 - kappa)/3) 1 - kappa^2 u u^t,
// and kappa_e is the smallest positive root of det Z_kappa = 0. det Z_kappa
// is a quartic in kappa; its coefficients are recovered exactly by
// interpolation and the root polished by bisection on the smallest
// eigenvalue.
struct Spin1Boundary {
  double kappa_e = 0.0;
  bool finite = true;
  double positivity_kappa = 0.0;
};

namespace detail {

inline Matrix3d spin1_z_kappa(const Vector3d& u, const Matrix3d& w, double k) {
  return k * w + ((1.0 - k) / 3.0) * Matrix3d::Identity() -
         (k * k) * (u * u.transpose());
}

inline double spin1_zmin_kappa(const Vector3d& u, const Matrix3d& w, double k) {
  Eigen::SelfAdjointEigenSolver<Matrix3d> es(spin1_z_kappa(u, w, k),
                                             Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

// Real roots of a polynomial (ascending coefficients) via the companion
// matrix, leading zeros stripped.
inline std::vector<double> real_polynomial_roots(std::vector<double> coeffs,
                                                 double imag_tol = 1e-7) {
  while (coeffs.size() > 1 && std::abs(coeffs.back()) < 1e-13 *
             (1.0 + std::abs(coeffs.front())))
    coeffs.pop_back();
  const int deg = static_cast<int>(coeffs.size()) - 1;
  std::vector<double> roots;
  if (deg < 1) return roots;
  MatrixXd comp = MatrixXd::Zero(deg, deg);
  for (int i = 1; i < deg; ++i) comp(i, i - 1) = 1.0;
  for (int i = 0; i < deg; ++i) comp(i, deg - 1) = -coeffs[i] / coeffs[deg];
  Eigen::EigenSolver<MatrixXd> es(comp);
  for (int i = 0; i < deg; ++i) {
    const auto r = es.eigenvalues()(i);
    if (std::abs(r.imag()) < imag_tol * (1.0 + std::abs(r.real())))
      roots.push_back(r.real());
  }
  return roots;
}

}  // namespace detail

// kappa_e for a traceless (not necessarily normalized) spin-1 direction.
inline double spin1_kappa_for_direction(const MatrixXcd& rho_hat,
                                        double tol = 1e-12) {
  const SpinOneFrame f = spin1_frame(maximally_mixed(3) + rho_hat);

  // det Z_kappa has degree <= 4; five samples pin it down exactly.
  const std::array<double, 5> nodes = {0.0, 0.5, 1.0, 1.5, 2.0};
  Eigen::Matrix<double, 5, 5> vand;
  Eigen::Matrix<double, 5, 1> dets;
  for (int i = 0; i < 5; ++i) {
    double p = 1.0;
    for (int c = 0; c < 5; ++c) {
      vand(i, c) = p;
      p *= nodes[i];
    }
    dets(i) = detail::spin1_z_kappa(f.u, f.w, nodes[i]).determinant();
  }
  const Eigen::Matrix<double, 5, 1> poly = vand.fullPivLu().solve(dets);
  std::vector<double> coeffs(poly.data(), poly.data() + 5);

  std::vector<double> roots = detail::real_polynomial_roots(coeffs);
  std::sort(roots.begin(), roots.end());
  for (double r : roots) {
    if (r < 1e-12) continue;
    // Accept the first root past which Z actually leaves the PSD cone.
    if (detail::spin1_zmin_kappa(f.u, f.w, r * (1.0 + 1e-6) + 1e-9) < 1e-9) {
      double lo = 0.0, hi = r * (1.0 + 1e-6) + 1e-9;
      while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (detail::spin1_zmin_kappa(f.u, f.w, mid) > 0.0)
          lo = mid;
        else
          hi = mid;
      }
      return 0.5 * (lo + hi);
    }
  }
  return std::numeric_limits<double>::infinity();
}

inline Spin1Boundary spin1_kappa_e(const ScaledFamily& family) {
  if (family.dim() != 3)
    throw std::invalid_argument("spin1_kappa_e: spin-1 family required");
  Spin1Boundary out;
  out.positivity_kappa = positivity_kappa(family);
  out.kappa_e = spin1_kappa_for_direction(family.rho_hat);
  out.finite = std::isfinite(out.kappa_e);
  return out;
}

enum class WitnessKind { kSecondMoment, kThirdMoment };

struct WitnessReport {
  Vector3d direction = Vector3d::UnitZ();
  double value = 0.0;
  WitnessKind kind = WitnessKind::kSecondMoment;
  bool violated = false;
};

// 2j <J_t^2> - (2j-1) <J_t>^2 - j^2; non-negative on every mixture of
// coherent states, zero exactly on coherent states along their own axis.
inline WitnessReport witness_second_moment(const MatrixXcd& rho,
                                           const Vector3d& t, SpinLabel j,
                                           double tol = 1e-10) {
  if (std::abs(t.norm() - 1.0) > 1e-9)
    throw std::invalid_argument("witness_second_moment: |t| != 1");
  if (rho.rows() != j.dim())
    throw std::invalid_argument("witness_second_moment: dimension mismatch");
  const SpinOperators ops = angular_momentum_ops(j);
  const MatrixXcd jt = t.x() * ops.jx + t.y() * ops.jy + t.z() * ops.jz;
  const double m1 = (rho * jt).trace().real();
  const double m2 = (rho * jt * jt).trace().real();
  const double jj = j.j();
  WitnessReport r;
  r.direction = t;
  r.kind = WitnessKind::kSecondMoment;
  r.value = 2.0 * jj * m2 - (2.0 * jj - 1.0) * m1 * m1 - jj * jj;
  r.violated = r.value < -tol;
  return r;
}

// Spin-3/2 third-moment condition: slack = |<J_t^2> - 3/4| -
// 2 |<J_t^3> - (7/4) <J_t>|, non-negative for mixtures of coherent states.
inline WitnessReport witness_third_moment_spin32(const MatrixXcd& rho,
                                                 const Vector3d& t,
                                                 double tol = 1e-10) {
  if (rho.rows() != 4 || rho.cols() != 4)
    throw std::invalid_argument("witness_third_moment_spin32: need dim 4");
  if (std::abs(t.norm() - 1.0) > 1e-9)
    throw std::invalid_argument("witness_third_moment_spin32: |t| != 1");
  const SpinOperators ops = angular_momentum_ops(SpinLabel(3));
  const MatrixXcd jt = t.x() * ops.jx + t.y() * ops.jy + t.z() * ops.jz;
  const double m1 = (rho * jt).trace().real();
  const double m2 = (rho * jt * jt).trace().real();
  const double m3 = (rho * jt * jt * jt).trace().real();
  WitnessReport r;
  r.direction = t;
  r.kind = WitnessKind::kThirdMoment;
  r.value = std::abs(m2 - 0.75) - 2.0 * std::abs(m3 - 1.75 * m1);
  r.violated = r.value < -tol;
  return r;
}

// Worst second-moment witness over all directions. <J_t^2> is the quadratic
// form t^t S t with S the symmetrized second-moment matrix, so the minimum
// over unit t is an exact 3x3 eigenproblem for every j (for spin-1 the form
// is Z itself). For j = 3/2 the third-moment witness is scanned over a
// Fibonacci grid with a shrinking-step local polish and the more violated
// report wins.
inline WitnessReport witness_scan(const MatrixXcd& rho, SpinLabel j,
                                  int third_moment_grid = 400,
                                  int polish_steps = 60) {
  if (rho.rows() != j.dim())
    throw std::invalid_argument("witness_scan: dimension mismatch");
  const SpinOperators ops = angular_momentum_ops(j);
  const auto jops = detail::op_array(ops);
  Vector3d u;
  Matrix3d s;
  for (int a = 0; a < 3; ++a) {
    u(a) = (rho * (*jops[a])).trace().real();
    for (int b = 0; b < 3; ++b)
      s(a, b) = 0.5 * (rho * ((*jops[a]) * (*jops[b]) + (*jops[b]) * (*jops[a])))
                          .trace()
                          .real();
  }
  const double jj = j.j();
  const Matrix3d form = 2.0 * jj * s - (2.0 * jj - 1.0) * (u * u.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix3d> es(form);
  int idx = 0;
  es.eigenvalues().minCoeff(&idx);

  WitnessReport best;
  best.kind = WitnessKind::kSecondMoment;
  best.direction = es.eigenvectors().col(idx);
  best.value = es.eigenvalues()(idx) - jj * jj;
  best.violated = best.value < -1e-10;

  if (j.twice_j == 3 && third_moment_grid > 0) {
    const SphereGrid grid = fibonacci_grid(third_moment_grid);
    WitnessReport worst3;
    bool first = true;
    for (const Direction& d : grid.points) {
      const WitnessReport r = witness_third_moment_spin32(rho, d.unit_vector());
      if (first || r.value < worst3.value) {
        worst3 = r;
        first = false;
      }
    }
    // local polish: greedy tangent steps with shrinking stride
    double step = 2.0 * kPi / std::sqrt(static_cast<double>(third_moment_grid));
    Vector3d t = worst3.direction;
    for (int it = 0; it < polish_steps; ++it) {
      bool improved = false;
      const Vector3d e1 = (std::abs(t.z()) < 0.9 ? Vector3d::UnitZ()
                                                 : Vector3d::UnitX())
                              .cross(t)
                              .normalized();
      const Vector3d e2 = t.cross(e1);
      const std::array<Vector3d, 4> moves = {e1, Vector3d(-e1), e2,
                                             Vector3d(-e2)};
      for (const Vector3d& dir : moves) {
        const Vector3d cand = (t + step * dir).normalized();
        const WitnessReport r = witness_third_moment_spin32(rho, cand);
        if (r.value < worst3.value) {
          worst3 = r;
          t = cand;
          improved = true;
        }
      }
      if (!improved) step *= 0.5;
      if (step < 1e-8) break;
    }
    if (worst3.violated && worst3.value < best.value) return worst3;
  }
  return best;
}

}  // namespace spinclass
