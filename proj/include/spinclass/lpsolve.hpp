#pragma once

// Grid linear programs for P-representability. A trial P-function of
// non-negative delta peaks on a sphere grid turns membership in the
// coherent-state convex hull into LP feasibility, and the boundary location
// into minimizing the total weight: min sum(w) subject to the harmonic
// moment constraints of the traceless direction gives 1/kappa_e directly.
// The engine is a dense two-phase revised simplex with full refactorization
// each iteration (the constraint count is at most a few dozen here, so
// robustness is free).

#include "spinclass/density.hpp"
#include "spinclass/lpsolve_grid.hpp"

#include <algorithm>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

namespace spinclass {

namespace detail {

// Change of basis from complex Y_Kq coefficients to real-harmonic R_KQ
// coefficients for fixed K: r_Q = sum_q g(K)_{qQ} c_q with
// g_{qQ} = \int Y_Kq R_KQ d(alpha). Only q = +-Q entries are non-zero.
inline MatrixXcd real_harmonic_transform(int K) {
  const int n = 2 * K + 1;
  MatrixXcd g = MatrixXcd::Zero(n, n);
  const double inv_r2 = 1.0 / std::sqrt(2.0);
  auto idx = [K](int q) { return q + K; };
  g(idx(0), idx(0)) = 1.0;
  for (int q = 1; q <= K; ++q) {
    const double sign = (q % 2 == 0) ? 1.0 : -1.0;
    g(idx(-q), idx(q)) = inv_r2;
    g(idx(q), idx(q)) = sign * inv_r2;
    g(idx(-q), idx(-q)) = Complex(0.0, -inv_r2);
    g(idx(q), idx(-q)) = Complex(0.0, sign * inv_r2);
  }
  return g;
}

}  // namespace detail

// Coefficients of an expansion in the real harmonics R_KQ, flat-indexed
// like MultipoleBasis. Imaginary parts must be consistent with a real
// expansion; they are checked and dropped.
inline VectorXd real_coeffs_from_p(const PCoeffs& pc, double tol = 1e-9) {
  const int kmax = pc.kmax();
  VectorXd out((kmax + 1) * (kmax + 1));
  for (int K = 0; K <= kmax; ++K) {
    const MatrixXcd g = detail::real_harmonic_transform(K);
    for (int Q = -K; Q <= K; ++Q) {
      Complex v(0.0, 0.0);
      for (int q = -K; q <= K; ++q) v += g(q + K, Q + K) * pc.at(K, q);
      if (std::abs(v.imag()) > tol)
        throw std::invalid_argument(
            "real_coeffs_from_p: coefficients do not describe a real function");
      out(MultipoleBasis::flat_index(K, Q)) = v.real();
    }
  }
  return out;
}

// Values of all real harmonics up to degree kmax at one point, flat-indexed.
inline VectorXd real_harmonic_vector(int kmax, const Direction& a) {
  VectorXd v((kmax + 1) * (kmax + 1));
  for (int K = 0; K <= kmax; ++K)
    for (int Q = -K; Q <= K; ++Q)
      v(MultipoleBasis::flat_index(K, Q)) = real_spherical_harmonic(K, Q, a);
  return v;
}

enum class LPMode { kDecide, kBoundary };

// min c.w  s.t.  A w = b, w >= 0
struct LPStandardForm {
  MatrixXd a;
  VectorXd b;
  VectorXd c;
};

// Decide mode keeps the K=0 row (total weight pinned by the trace), boundary
// mode drops it and minimizes the total weight. Rows are real-harmonic
// labels, columns are grid points.
inline LPStandardForm build_constraints(const PCoeffs& target,
                                        const SphereGrid& grid, LPMode mode) {
  const int kmax = target.kmax();
  const int full = (kmax + 1) * (kmax + 1);
  const int n = grid.size();
  const VectorXd rhs = real_coeffs_from_p(target);

  LPStandardForm lp;
  const int row0 = (mode == LPMode::kBoundary) ? 1 : 0;
  lp.a.resize(full - row0, n);
  for (int i = 0; i < n; ++i) {
    const VectorXd col = real_harmonic_vector(kmax, grid.points[i]);
    lp.a.col(i) = col.segment(row0, full - row0);
  }
  lp.b = rhs.segment(row0, full - row0);
  lp.c = (mode == LPMode::kBoundary) ? VectorXd::Ones(n) : VectorXd::Zero(n);
  return lp;
}

enum class LPStatus { kOptimal, kInfeasible, kUnbounded };

struct LPSolution {
  LPStatus status = LPStatus::kInfeasible;
  VectorXd w;
  double objective = 0.0;
  std::vector<int> basis;
  int iterations = 0;
  // phase-1 optimum: how far b is from the cone of columns (L1, scaled rows)
  double infeasibility = 0.0;
};

struct SimplexOptions {
  double pivot_tol = 1e-10;
  double feas_tol = 1e-9;
  int max_iterations = 50000;
  // Optional starting basis (column indices). Used to warm start nested
  // grid refinements; ignored if it is not primal feasible.
  std::vector<int> initial_basis;
};

namespace detail {

struct SimplexCore {
  const MatrixXd& a;
  const VectorXd& b;
  int m;
  int n_total;      // structural + artificial
  int n_structural;
  std::vector<int> basis;
  VectorXd xb;
  MatrixXd binv;
  int degenerate_pivots = 0;
  bool bland = false;
  int iterations = 0;

  SimplexCore(const MatrixXd& a_in, const VectorXd& b_in, int n_struct)
      : a(a_in), b(b_in), m(static_cast<int>(a_in.rows())),
        n_total(static_cast<int>(a_in.cols())), n_structural(n_struct) {}

  void refactorize() {
    MatrixXd bm(m, m);
    for (int i = 0; i < m; ++i) bm.col(i) = a.col(basis[i]);
    binv = bm.partialPivLu().inverse();
    xb = binv * b;
  }

  // One phase of the revised simplex over columns [0, limit).
  // Returns kOptimal or kUnbounded.
  LPStatus run(const VectorXd& cost, int limit, const SimplexOptions& opt) {
    const double tol = opt.pivot_tol;
    refactorize();
    while (true) {
      if (++iterations > opt.max_iterations)
        throw std::runtime_error("simplex: iteration limit exceeded");
      VectorXd cb(m);
      for (int i = 0; i < m; ++i) cb(i) = cost(basis[i]);
      const VectorXd y = binv.transpose() * cb;

      int entering = -1;
      double best = -tol;
      const VectorXd red =
          cost.head(limit) - a.leftCols(limit).transpose() * y;
      std::vector<char> in_basis(n_total, 0);
      for (int i = 0; i < m; ++i) in_basis[basis[i]] = 1;
      if (!bland) {
        for (int jcol = 0; jcol < limit; ++jcol) {
          if (in_basis[jcol]) continue;
          if (red(jcol) < best) {
            best = red(jcol);
            entering = jcol;
          }
        }
      } else {
        for (int jcol = 0; jcol < limit; ++jcol) {
          if (in_basis[jcol]) continue;
          if (red(jcol) < -tol) {
            entering = jcol;
            break;
          }
        }
      }
      if (entering < 0) return LPStatus::kOptimal;

      const VectorXd dir = binv * a.col(entering);
      int leave = -1;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (int i = 0; i < m; ++i) {
        if (dir(i) > tol) {
          const double ratio = std::max(xb(i), 0.0) / dir(i);
          if (ratio < best_ratio - 1e-12 ||
              (ratio < best_ratio + 1e-12 &&
               (leave < 0 || basis[i] < basis[leave]))) {
            best_ratio = ratio;
            leave = i;
          }
        }
      }
      if (leave < 0) return LPStatus::kUnbounded;
      if (best_ratio < 1e-12) {
        if (++degenerate_pivots > 5 * m + 50) bland = true;
      } else {
        degenerate_pivots = 0;
      }
      basis[leave] = entering;
      refactorize();
    }
  }
};

}  // namespace detail

inline LPSolution simplex_solve(const LPStandardForm& lp,
                                const SimplexOptions& opt = {}) {
  const int m = static_cast<int>(lp.a.rows());
  const int n = static_cast<int>(lp.a.cols());
  if (!lp.a.allFinite() || !lp.b.allFinite() || !lp.c.allFinite())
    throw std::invalid_argument("simplex_solve: non-finite input");

  // Row-sign normalization so b >= 0, then artificial columns.
  MatrixXd a(m, n + m);
  VectorXd b = lp.b;
  a.leftCols(n) = lp.a;
  a.rightCols(m).setZero();
  for (int i = 0; i < m; ++i) {
    if (b(i) < 0.0) {
      b(i) = -b(i);
      a.row(i).head(n) = -lp.a.row(i);
    }
    a(i, n + i) = 1.0;
  }

  detail::SimplexCore core(a, b, n);
  LPSolution sol;

  // Optional warm start: accept the caller's basis only if it is primal
  // feasible; otherwise fall back to the artificial basis.
  bool warm = false;
  if (static_cast<int>(opt.initial_basis.size()) == m) {
    bool ok = true;
    for (int idx : opt.initial_basis)
      if (idx < 0 || idx >= n) ok = false;
    if (ok) {
      core.basis = opt.initial_basis;
      MatrixXd bm(m, m);
      for (int i = 0; i < m; ++i) bm.col(i) = a.col(core.basis[i]);
      Eigen::PartialPivLU<MatrixXd> lu(bm);
      const VectorXd xb = lu.solve(b);
      const double residual = (bm * xb - b).cwiseAbs().maxCoeff();
      if (residual < opt.feas_tol && xb.minCoeff() > -opt.feas_tol) warm = true;
    }
  }

  if (!warm) {
    core.basis.resize(m);
    for (int i = 0; i < m; ++i) core.basis[i] = n + i;

    VectorXd phase1_cost = VectorXd::Zero(n + m);
    phase1_cost.tail(m).setOnes();
    const LPStatus st1 = core.run(phase1_cost, n + m, opt);
    if (st1 != LPStatus::kOptimal)
      throw std::runtime_error("simplex: phase 1 did not terminate at an optimum");
    double art_sum = 0.0;
    for (int i = 0; i < m; ++i)
      if (core.basis[i] >= n) art_sum += std::max(core.xb(i), 0.0);
    sol.infeasibility = art_sum;
    if (art_sum > opt.feas_tol) {
      sol.status = LPStatus::kInfeasible;
      sol.iterations = core.iterations;
      return sol;
    }
    // Drive leftover zero-level artificials out of the basis when a
    // structural pivot exists (a degenerate pivot, so the point does not
    // move). Artificials at a tolerated nonzero level stay basic: they hold
    // the residual, and swapping them would jump to an unrelated vertex.
    for (int i = 0; i < m; ++i) {
      if (core.basis[i] < n) continue;
      if (core.xb(i) > 1e-9) continue;
      const Eigen::RowVectorXd row = core.binv.row(i) * a.leftCols(n);
      std::vector<char> in_basis(n + m, 0);
      for (int k = 0; k < m; ++k) in_basis[core.basis[k]] = 1;
      for (int jcol = 0; jcol < n; ++jcol) {
        if (!in_basis[jcol] && std::abs(row(jcol)) > 1e-8) {
          core.basis[i] = jcol;
          core.refactorize();
          break;
        }
      }
    }
  }

  // Phase 2: structural costs, entering candidates restricted to structural
  // columns; any zero-level artificial left in a dependent row keeps cost 0.
  VectorXd phase2_cost = VectorXd::Zero(n + m);
  phase2_cost.head(n) = lp.c;
  const LPStatus st2 = core.run(phase2_cost, n, opt);
  if (st2 == LPStatus::kUnbounded) {
    sol.status = LPStatus::kUnbounded;
    sol.iterations = core.iterations;
    return sol;
  }

  sol.status = LPStatus::kOptimal;
  sol.w = VectorXd::Zero(n);
  for (int i = 0; i < m; ++i)
    if (core.basis[i] < n) sol.w(core.basis[i]) = std::max(core.xb(i), 0.0);
  sol.objective = lp.c.dot(sol.w);
  sol.basis = core.basis;
  sol.iterations = core.iterations;
  return sol;
}

// --- P-representability drivers ---------------------------------------

struct DecideResult {
  bool p_rep = false;
  std::optional<DeltaMixture> certificate;
  double residual = 0.0;  // phase-1 infeasibility at the final grid
  int grid_size = 0;
};

inline DeltaMixture mixture_from_weights(const VectorXd& w,
                                         const SphereGrid& grid,
                                         double weight_floor = 1e-12) {
  DeltaMixture mix;
  for (int i = 0; i < grid.size(); ++i)
    if (w(i) > weight_floor) mix.points.push_back({w(i), grid.points[i]});
  return mix;
}

// Feasibility of the decide-mode LP. A true verdict carries a certificate;
// a false verdict at a finite grid is only advisory (the grid
// under-approximates the coherent cone), so callers refine and corroborate
// with witnesses before claiming non-classicality.
inline DecideResult decide_prep(const MatrixXcd& rho, SpinLabel j,
                                const SphereGrid& grid, double tol = 1e-9) {
  const PCoeffs pc = p_coeffs_of_state(rho, j);
  const LPStandardForm lp = build_constraints(pc, grid, LPMode::kDecide);
  SimplexOptions opt;
  opt.feas_tol = tol;
  const LPSolution sol = simplex_solve(lp, opt);
  DecideResult out;
  out.grid_size = grid.size();
  out.residual = sol.infeasibility;
  if (sol.status == LPStatus::kOptimal) {
    out.p_rep = true;
    out.certificate = mixture_from_weights(sol.w, grid);
  }
  return out;
}

struct RefinementSchedule {
  std::vector<int> sizes = {250, 500, 1000, 2000};
  double rel_tol = 1e-4;
  // After the schedule converges, append small point caps around the
  // optimal support and re-solve. Still a nested refinement, so the
  // 1/kappa estimate can only improve.
  bool support_polish = true;
  int polish_rounds = 2;
};

struct BoundaryResult {
  double kappa_e = 0.0;
  DeltaMixture mixture;  // certificate for the boundary state rho_0 + kappa_e rho_hat
  int grid_size = 0;
  std::vector<double> inverse_kappa_history;
  bool converged = false;
  double residual = 0.0;  // |A w - b|_inf at the final optimum
};

namespace detail {

inline void append_cap(SphereGrid& grid, const Direction& center, double radius) {
  const Vector3d c = center.unit_vector();
  const Vector3d e1 = (std::abs(c.z()) < 0.9 ? Vector3d::UnitZ() : Vector3d::UnitX())
                          .cross(c)
                          .normalized();
  const Vector3d e2 = c.cross(e1);
  for (double r : {radius, 0.35 * radius}) {
    for (int k = 0; k < 6; ++k) {
      const double ang = kGoldenAngle * k + 7.0 * r;
      const Vector3d p =
          (c + r * (std::cos(ang) * e1 + std::sin(ang) * e2)).normalized();
      grid.points.push_back(Direction::from_unit_vector(p));
    }
  }
}

// Shared driver: minimize total weight subject to the boundary-mode
// constraints of a traceless direction. Optimum is 1/kappa_e.
struct InverseKappa {
  double value = 0.0;
  LPSolution solution;
  SphereGrid grid;
  std::vector<double> history;
  bool converged = false;
};

inline InverseKappa inverse_kappa_lp(const MatrixXcd& rho_hat, SpinLabel j,
                                     const RefinementSchedule& sched) {
  const MatrixXcd probe = maximally_mixed(j.dim()) + rho_hat;
  const PCoeffs pc = p_coeffs_of_state(probe, j);  // K=0 row dropped below

  InverseKappa out;
  SimplexOptions opt;
  LPSolution last;
  bool have = false;
  int level = 0;
  for (int target : sched.sizes) {
    if (out.grid.size() == 0)
      out.grid = fibonacci_grid(target);
    else
      grow_grid(out.grid, target, level);
    const LPStandardForm lp = build_constraints(pc, out.grid, LPMode::kBoundary);
    opt.initial_basis = have ? last.basis : std::vector<int>{};
    const LPSolution sol = simplex_solve(lp, opt);
    if (sol.status != LPStatus::kOptimal) {
      ++level;
      continue;  // cone may miss b at a coarse grid; refine
    }
    last = sol;
    have = true;
    out.history.push_back(sol.objective);
    const std::size_t h = out.history.size();
    if (h >= 2 && std::abs(out.history[h - 2] - sol.objective) <=
                      sched.rel_tol * std::max(std::abs(sol.objective), 1e-12))
      break;
    ++level;
  }
  if (!have)
    throw std::runtime_error(
        "inverse_kappa_lp: boundary LP infeasible at every grid size");

  if (sched.support_polish) {
    const double h = 2.4 / std::sqrt(static_cast<double>(out.grid.size()));
    for (int round = 0; round < sched.polish_rounds; ++round) {
      const double radius = h * std::pow(0.3, round);
      std::vector<int> support;
      for (int i = 0; i < out.grid.size(); ++i)
        if (last.w(i) > 1e-12) support.push_back(i);
      for (int idx : support) append_cap(out.grid, out.grid.points[idx], radius);
      const LPStandardForm lp =
          build_constraints(pc, out.grid, LPMode::kBoundary);
      opt.initial_basis = last.basis;
      const LPSolution sol = simplex_solve(lp, opt);
      if (sol.status == LPStatus::kOptimal) {
        last = sol;
        out.history.push_back(sol.objective);
      }
    }
  }

  out.value = last.objective;
  out.solution = last;
  // Converged when the last refinement (grid growth or support polish)
  // no longer moved the estimate.
  const std::size_t h = out.history.size();
  out.converged =
      h >= 2 && std::abs(out.history[h - 2] - out.history[h - 1]) <=
                    sched.rel_tol * std::max(std::abs(out.history[h - 1]), 1e-12);
  return out;
}

}  // namespace detail

// Boundary of the classical set along a scaled family, from below: nested
// grids give a non-increasing sequence of 1/kappa estimates, i.e. lower
// bounds on kappa_e.
inline BoundaryResult boundary_kappa(const ScaledFamily& family, SpinLabel j,
                                     const RefinementSchedule& sched = {}) {
  if (family.dim() != j.dim())
    throw std::invalid_argument("boundary_kappa: dimension mismatch");
  detail::InverseKappa ik = detail::inverse_kappa_lp(family.rho_hat, j, sched);

  BoundaryResult out;
  out.inverse_kappa_history = ik.history;
  out.converged = ik.converged;
  out.grid_size = ik.grid.size();
  if (ik.value < 1e-14) {
    out.kappa_e = std::numeric_limits<double>::infinity();
    return out;
  }
  out.kappa_e = 1.0 / ik.value;

  // Certificate for the boundary state: kappa_e * P_e has unit total weight.
  DeltaMixture mix = mixture_from_weights(ik.solution.w, ik.grid);
  for (auto& p : mix.points) p.weight *= out.kappa_e;
  out.mixture = mix;

  const PCoeffs pc =
      p_coeffs_of_state(maximally_mixed(j.dim()) + family.rho_hat, j);
  const LPStandardForm lp = build_constraints(pc, ik.grid, LPMode::kBoundary);
  out.residual = (lp.a * ik.solution.w - lp.b).cwiseAbs().maxCoeff();
  return out;
}

// Concavity probe for 1/kappa_e: along the unnormalized mixed direction
// c rho_I + (1-c) rho_II the optimal objective cannot exceed the convex
// combination of the endpoint objectives.
inline double concavity_check(const ScaledFamily& family_one,
                              const ScaledFamily& family_two, double c,
                              SpinLabel j,
                              const RefinementSchedule& sched = {}) {
  if (c <= 0.0 || c >= 1.0)
    throw std::invalid_argument("concavity_check: c in (0,1) required");
  const double inv_one =
      detail::inverse_kappa_lp(family_one.rho_hat, j, sched).value;
  const double inv_two =
      detail::inverse_kappa_lp(family_two.rho_hat, j, sched).value;
  const MatrixXcd mixed =
      c * family_one.rho_hat + (1.0 - c) * family_two.rho_hat;
  const double inv_mixed = detail::inverse_kappa_lp(mixed, j, sched).value;
  return c * inv_one + (1.0 - c) * inv_two - inv_mixed;
}

}  // namespace spinclass
