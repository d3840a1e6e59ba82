#pragma once

// Two-particle classicality: product coherent states, bipartite multipole
// and P-coefficient maps, the Peres-Horodecki partial-transpose check, the
// product-grid boundary LP, the partial-trace witness, and 2D boundary
// scans over a plane of traceless directions.

#include "spinclass/analytic.hpp"
#include "spinclass/lpsolve.hpp"

#include <atomic>
#include <mutex>
#include <cstdio>
#include <ostream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

namespace spinclass {

struct BipartiteLabel {
  SpinLabel a{1};
  SpinLabel b{1};

  BipartiteLabel() = default;
  BipartiteLabel(SpinLabel a_in, SpinLabel b_in) : a(a_in), b(b_in) {}
  int dim() const { return a.dim() * b.dim(); }
};

// A-major ordering throughout: joint index = i_a * dim_b + i_b.
inline MatrixXcd kron(const MatrixXcd& x, const MatrixXcd& y) {
  MatrixXcd out(x.rows() * y.rows(), x.cols() * y.cols());
  for (int r = 0; r < x.rows(); ++r)
    for (int c = 0; c < x.cols(); ++c)
      out.block(r * y.rows(), c * y.cols(), y.rows(), y.cols()) = x(r, c) * y;
  return out;
}

inline VectorXcd product_coherent(const BipartiteLabel& jj, const Direction& da,
                                  const Direction& db) {
  const VectorXcd ka = coherent_ket(jj.a, da);
  const VectorXcd kb = coherent_ket(jj.b, db);
  VectorXcd out(ka.size() * kb.size());
  for (int i = 0; i < ka.size(); ++i)
    out.segment(i * kb.size(), kb.size()) = ka(i) * kb;
  return out;
}

enum class Subsystem { kA, kB };

inline MatrixXcd partial_transpose(const MatrixXcd& rho,
                                   const BipartiteLabel& jj, Subsystem which) {
  const int da = jj.a.dim();
  const int db = jj.b.dim();
  if (rho.rows() != da * db || rho.cols() != da * db)
    throw std::invalid_argument("partial_transpose: dimension mismatch");
  MatrixXcd out(da * db, da * db);
  for (int ia = 0; ia < da; ++ia)
    for (int ib = 0; ib < db; ++ib)
      for (int ka = 0; ka < da; ++ka)
        for (int kb = 0; kb < db; ++kb) {
          const int r = ia * db + ib;
          const int c = ka * db + kb;
          const int rs = (which == Subsystem::kA) ? ka * db + ib : ia * db + kb;
          const int cs = (which == Subsystem::kA) ? ia * db + kb : ka * db + ib;
          out(r, c) = rho(rs, cs);
        }
  return out;
}

inline PsdReport ppt_check(const MatrixXcd& rho, const BipartiteLabel& jj,
                           double tol = 1e-10) {
  return psd_check(partial_transpose(rho, jj, Subsystem::kA), tol);
}

// Kappa at which the partial transpose of rho_0 + kappa rho_hat stops being
// PSD. The transpose of rho_0 is rho_0, so this is the same bisection as
// positivity_kappa run on the transposed direction.
inline double ppt_kappa(const ScaledFamily& family, const BipartiteLabel& jj,
                        double tol = 1e-10) {
  ScaledFamily pt;
  pt.rho_hat = partial_transpose(family.rho_hat, jj, Subsystem::kA);
  pt.norm = family.norm;
  return positivity_kappa(pt, tol);
}

// Coefficients over products of multipole operators, rho_{K_A Q_A, K_B Q_B}
// = tr rho (T^A ox T^B)^dag. Rows flat-index subsystem A, columns B.
struct BipartiteMultipole {
  BipartiteLabel jj;
  MatrixXcd coeff;

  explicit BipartiteMultipole(const BipartiteLabel& jj_in)
      : jj(jj_in),
        coeff(MatrixXcd::Zero((jj_in.a.twice_j + 1) * (jj_in.a.twice_j + 1),
                              (jj_in.b.twice_j + 1) * (jj_in.b.twice_j + 1))) {}

  Complex& at(int ka, int qa, int kb, int qb) {
    return coeff(MultipoleBasis::flat_index(ka, qa),
                 MultipoleBasis::flat_index(kb, qb));
  }
  const Complex& at(int ka, int qa, int kb, int qb) const {
    return coeff(MultipoleBasis::flat_index(ka, qa),
                 MultipoleBasis::flat_index(kb, qb));
  }
};

struct BipartitePCoeffs {
  BipartiteLabel jj;
  MatrixXcd coeff;  // same layout as BipartiteMultipole
};

inline BipartiteMultipole bipartite_multipole(const MatrixXcd& rho,
                                              const BipartiteLabel& jj) {
  if (rho.rows() != jj.dim())
    throw std::invalid_argument("bipartite_multipole: dimension mismatch");
  const MultipoleBasis ba(jj.a);
  const MultipoleBasis bb(jj.b);
  BipartiteMultipole out(jj);
  for (int fa = 0; fa < ba.size(); ++fa)
    for (int fb = 0; fb < bb.size(); ++fb) {
      const MatrixXcd op = kron(ba.ops[fa], bb.ops[fb]);
      out.coeff(fa, fb) = (op.adjoint() * rho).trace();
    }
  return out;
}

inline MatrixXcd bipartite_from_multipole(const BipartiteMultipole& mc) {
  const MultipoleBasis ba(mc.jj.a);
  const MultipoleBasis bb(mc.jj.b);
  MatrixXcd rho = MatrixXcd::Zero(mc.jj.dim(), mc.jj.dim());
  for (int fa = 0; fa < ba.size(); ++fa)
    for (int fb = 0; fb < bb.size(); ++fb)
      rho += mc.coeff(fa, fb) * kron(ba.ops[fa], bb.ops[fb]);
  return rho;
}

// The single-spin scale factor applies per subsystem (the two sqrt(4pi)
// factors combine into the joint 4pi).
inline BipartitePCoeffs bipartite_p_coeffs(const BipartiteMultipole& mc) {
  BipartitePCoeffs pc{mc.jj, mc.coeff};
  for (int ka = 0; ka <= mc.jj.a.twice_j; ++ka) {
    const double sa = p_to_rho_scale(mc.jj.a, ka);
    for (int qa = -ka; qa <= ka; ++qa) {
      const int fa = MultipoleBasis::flat_index(ka, qa);
      for (int kb = 0; kb <= mc.jj.b.twice_j; ++kb) {
        const double sb = p_to_rho_scale(mc.jj.b, kb);
        for (int qb = -kb; qb <= kb; ++qb) {
          const int fb = MultipoleBasis::flat_index(kb, qb);
          pc.coeff(fa, fb) = mc.coeff(fa, fb) / (sa * sb);
        }
      }
    }
  }
  return pc;
}

// Real-harmonic coefficients of the product expansion: the per-subsystem
// transform applied on each index. Joint Hermiticity makes the result real.
inline MatrixXd bipartite_real_coeffs(const BipartitePCoeffs& pc,
                                      double tol = 1e-9) {
  const int fa_n = static_cast<int>(pc.coeff.rows());
  const int fb_n = static_cast<int>(pc.coeff.cols());
  MatrixXcd tmp = pc.coeff;
  // transform the A index
  MatrixXcd ta = MatrixXcd::Zero(fa_n, fa_n);
  for (int ka = 0; ka <= pc.jj.a.twice_j; ++ka) {
    const MatrixXcd g = detail::real_harmonic_transform(ka);
    const int base = MultipoleBasis::flat_index(ka, -ka);
    ta.block(base, base, 2 * ka + 1, 2 * ka + 1) = g;
  }
  MatrixXcd tb = MatrixXcd::Zero(fb_n, fb_n);
  for (int kb = 0; kb <= pc.jj.b.twice_j; ++kb) {
    const MatrixXcd g = detail::real_harmonic_transform(kb);
    const int base = MultipoleBasis::flat_index(kb, -kb);
    tb.block(base, base, 2 * kb + 1, 2 * kb + 1) = g;
  }
  const MatrixXcd real_c = ta.transpose() * tmp * tb;
  if (real_c.imag().cwiseAbs().maxCoeff() > tol)
    throw std::invalid_argument(
        "bipartite_real_coeffs: coefficients do not describe a real function");
  return real_c.real();
}

// Discrete bipartite P-function: weights on pairs of sphere points.
struct ProductMixture {
  struct Term {
    double weight = 0.0;
    Direction point_a;
    Direction point_b;
  };
  std::vector<Term> terms;

  double total_weight() const {
    double s = 0.0;
    for (const auto& t : terms) s += t.weight;
    return s;
  }
};

inline MatrixXcd rho_from_product_mixture(const ProductMixture& mix,
                                          const BipartiteLabel& jj) {
  MatrixXcd rho = MatrixXcd::Zero(jj.dim(), jj.dim());
  for (const auto& t : mix.terms) {
    if (t.weight < 0.0)
      throw std::invalid_argument("rho_from_product_mixture: negative weight");
    const VectorXcd ket = product_coherent(jj, t.point_a, t.point_b);
    rho.noalias() += t.weight * (ket * ket.adjoint());
  }
  return rho;
}

// Column set for the product LP: the full cross product of two sphere grids
// plus optional targeted pairs appended by support polish.
struct ProductGrid {
  SphereGrid a;
  SphereGrid b;
  std::vector<std::pair<Direction, Direction>> extra;

  int size() const {
    return a.size() * b.size() + static_cast<int>(extra.size());
  }
  std::pair<Direction, Direction> pair_at(int col) const {
    const int cross = a.size() * b.size();
    if (col < cross) return {a.points[col / b.size()], b.points[col % b.size()]};
    return extra[col - cross];
  }
};

// Mirror image (phi -> -phi on subsystem A) of every column; with a
// mirror-closed grid the partial transpose of a representable state is
// representable on the same grid.
inline void mirror_close_a(ProductGrid& grid) {
  std::vector<Direction> mirrored;
  mirrored.reserve(grid.a.points.size());
  for (const Direction& d : grid.a.points) {
    Direction m;
    m.theta = d.theta;
    m.phi = (d.phi == 0.0) ? 0.0 : 2.0 * kPi - d.phi;
    if (std::abs(m.phi - d.phi) > 1e-12 &&
        std::abs(m.phi - d.phi) < 2.0 * kPi - 1e-12)
      mirrored.push_back(m);
  }
  grid.a.points.insert(grid.a.points.end(), mirrored.begin(), mirrored.end());
}

namespace detail {

inline LPStandardForm build_bipartite_constraints(const MatrixXd& real_coeffs,
                                                  const BipartiteLabel& jj,
                                                  const ProductGrid& grid,
                                                  LPMode mode) {
  const int fa_n = static_cast<int>(real_coeffs.rows());
  const int fb_n = static_cast<int>(real_coeffs.cols());
  const int full = fa_n * fb_n;
  const int row0 = (mode == LPMode::kBoundary) ? 1 : 0;
  const int n = grid.size();

  MatrixXd ra(fa_n, grid.a.size());
  for (int i = 0; i < grid.a.size(); ++i)
    ra.col(i) = real_harmonic_vector(jj.a.twice_j, grid.a.points[i]);
  MatrixXd rb(fb_n, grid.b.size());
  for (int i = 0; i < grid.b.size(); ++i)
    rb.col(i) = real_harmonic_vector(jj.b.twice_j, grid.b.points[i]);

  LPStandardForm lp;
  lp.a.resize(full - row0, n);
  for (int col = 0; col < n; ++col) {
    VectorXd va, vb;
    const int cross = grid.a.size() * grid.b.size();
    if (col < cross) {
      va = ra.col(col / grid.b.size());
      vb = rb.col(col % grid.b.size());
    } else {
      const auto& pr = grid.extra[col - cross];
      va = real_harmonic_vector(jj.a.twice_j, pr.first);
      vb = real_harmonic_vector(jj.b.twice_j, pr.second);
    }
    for (int fa = 0; fa < fa_n; ++fa)
      for (int fb = 0; fb < fb_n; ++fb) {
        const int row = fa * fb_n + fb;
        if (row < row0) continue;
        lp.a(row - row0, col) = va(fa) * vb(fb);
      }
  }
  lp.b.resize(full - row0);
  for (int fa = 0; fa < fa_n; ++fa)
    for (int fb = 0; fb < fb_n; ++fb) {
      const int row = fa * fb_n + fb;
      if (row >= row0) lp.b(row - row0) = real_coeffs(fa, fb);
    }
  lp.c = (mode == LPMode::kBoundary) ? VectorXd::Ones(n) : VectorXd::Zero(n);
  return lp;
}

}  // namespace detail

struct BipartiteSchedule {
  // (n_a, n_b) per refinement level; unequal sizes avoid accidental
  // alignment of the two spirals.
  std::vector<std::pair<int, int>> sizes = {{40, 42}, {80, 84}, {160, 168}};
  double rel_tol = 1e-4;
  bool support_polish = true;
  int polish_rounds = 2;
};

struct BipartiteBoundaryResult {
  double kappa_e = 0.0;
  ProductMixture mixture;
  int grid_a = 0;
  int grid_b = 0;
  std::vector<double> inverse_kappa_history;
  bool converged = false;
  double residual = 0.0;
};

struct BipartiteDecideResult {
  bool p_rep = false;
  std::optional<ProductMixture> certificate;
  double residual = 0.0;
  int grid_a = 0;
  int grid_b = 0;
};

inline ProductMixture product_mixture_from_weights(const VectorXd& w,
                                                   const ProductGrid& grid,
                                                   double floor = 1e-12) {
  ProductMixture mix;
  for (int i = 0; i < grid.size(); ++i)
    if (w(i) > floor) {
      const auto pr = grid.pair_at(i);
      mix.terms.push_back({w(i), pr.first, pr.second});
    }
  return mix;
}

namespace detail {

struct BipartiteInverseKappa {
  double value = 0.0;
  LPSolution solution;
  ProductGrid grid;
  std::vector<double> history;
  bool converged = false;
  double residual = 0.0;
};

inline BipartiteInverseKappa bipartite_inverse_kappa_lp(
    const MatrixXcd& rho_hat, const BipartiteLabel& jj,
    const BipartiteSchedule& sched) {
  const MatrixXcd probe = maximally_mixed(jj.dim()) + rho_hat;
  const MatrixXd rc = bipartite_real_coeffs(
      bipartite_p_coeffs(bipartite_multipole(probe, jj)));

  BipartiteInverseKappa out;
  SimplexOptions opt;
  LPSolution last;
  bool have = false;
  int level = 0;
  for (const auto& [na, nb] : sched.sizes) {
    if (out.grid.a.size() == 0) {
      out.grid.a = fibonacci_grid(na);
      out.grid.b = fibonacci_grid(nb);
    } else {
      grow_grid(out.grid.a, na, level);
      grow_grid(out.grid.b, nb, 7 + level);
    }
    // Warm starts do not carry across levels here: growing both factor
    // grids renumbers the cross-product columns.
    const LPStandardForm lp =
        detail::build_bipartite_constraints(rc, jj, out.grid, LPMode::kBoundary);
    opt.initial_basis.clear();
    const LPSolution sol = simplex_solve(lp, opt);
    ++level;
    if (sol.status != LPStatus::kOptimal) continue;
    last = sol;
    have = true;
    out.history.push_back(sol.objective);
    const std::size_t h = out.history.size();
    if (h >= 2 && std::abs(out.history[h - 2] - sol.objective) <=
                      sched.rel_tol * std::max(std::abs(sol.objective), 1e-12))
      break;
  }
  if (!have)
    throw std::runtime_error(
        "bipartite_inverse_kappa_lp: LP infeasible at every grid size");

  if (sched.support_polish) {
    const double ha = 2.4 / std::sqrt(static_cast<double>(out.grid.a.size()));
    const double hb = 2.4 / std::sqrt(static_cast<double>(out.grid.b.size()));
    for (int round = 0; round < sched.polish_rounds; ++round) {
      const double sa = ha * std::pow(0.3, round);
      const double sb = hb * std::pow(0.3, round);
      ProductMixture support = product_mixture_from_weights(last.w, out.grid);
      for (const auto& term : support.terms) {
        SphereGrid cap_a, cap_b;
        cap_a.points.push_back(term.point_a);
        cap_b.points.push_back(term.point_b);
        detail::append_cap(cap_a, term.point_a, sa);
        detail::append_cap(cap_b, term.point_b, sb);
        for (const Direction& pa : cap_a.points)
          for (const Direction& pb : cap_b.points)
            out.grid.extra.emplace_back(pa, pb);
      }
      const LPStandardForm lp = detail::build_bipartite_constraints(
          rc, jj, out.grid, LPMode::kBoundary);
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
  const std::size_t h = out.history.size();
  out.converged =
      h >= 2 && std::abs(out.history[h - 2] - out.history[h - 1]) <=
                    sched.rel_tol * std::max(std::abs(out.history[h - 1]), 1e-12);
  const LPStandardForm lp =
      detail::build_bipartite_constraints(rc, jj, out.grid, LPMode::kBoundary);
  out.residual = (lp.a * last.w - lp.b).cwiseAbs().maxCoeff();
  return out;
}

}  // namespace detail

inline BipartiteBoundaryResult bipartite_boundary_kappa(
    const ScaledFamily& family, const BipartiteLabel& jj,
    const BipartiteSchedule& sched = {}) {
  if (family.dim() != jj.dim())
    throw std::invalid_argument("bipartite_boundary_kappa: dimension mismatch");
  detail::BipartiteInverseKappa ik =
      detail::bipartite_inverse_kappa_lp(family.rho_hat, jj, sched);

  BipartiteBoundaryResult out;
  out.inverse_kappa_history = ik.history;
  out.converged = ik.converged;
  out.grid_a = ik.grid.a.size();
  out.grid_b = ik.grid.b.size();
  out.residual = ik.residual;
  if (ik.value < 1e-14) {
    out.kappa_e = std::numeric_limits<double>::infinity();
    return out;
  }
  out.kappa_e = 1.0 / ik.value;
  out.mixture = product_mixture_from_weights(ik.solution.w, ik.grid);
  for (auto& t : out.mixture.terms) t.weight *= out.kappa_e;
  return out;
}

inline BipartiteDecideResult bipartite_decide_prep(const MatrixXcd& rho,
                                                   const BipartiteLabel& jj,
                                                   const ProductGrid& grid,
                                                   double tol = 1e-9) {
  const MatrixXd rc =
      bipartite_real_coeffs(bipartite_p_coeffs(bipartite_multipole(rho, jj)));
  const LPStandardForm lp =
      detail::build_bipartite_constraints(rc, jj, grid, LPMode::kDecide);
  SimplexOptions opt;
  opt.feas_tol = tol;
  const LPSolution sol = simplex_solve(lp, opt);
  BipartiteDecideResult out;
  out.grid_a = grid.a.size();
  out.grid_b = grid.b.size();
  out.residual = sol.infeasibility;
  if (sol.status == LPStatus::kOptimal) {
    out.p_rep = true;
    out.certificate = product_mixture_from_weights(sol.w, grid);
  }
  return out;
}

// Conditional state rho_B = Tr_A(rho (V_A ox 1)) / tr, and the spin-1
// criterion on it when j_B = 1. A negative verdict certifies that rho
// itself is not a mixture of product coherent states.
struct PartialTraceWitness {
  MatrixXcd rho_b;
  std::optional<Spin1Verdict> verdict;
};

inline MatrixXcd partial_trace_a(const MatrixXcd& x, const BipartiteLabel& jj) {
  const int da = jj.a.dim();
  const int db = jj.b.dim();
  MatrixXcd out = MatrixXcd::Zero(db, db);
  for (int ib = 0; ib < db; ++ib)
    for (int kb = 0; kb < db; ++kb)
      for (int ia = 0; ia < da; ++ia)
        out(ib, kb) += x(ia * db + ib, ia * db + kb);
  return out;
}

inline PartialTraceWitness partial_trace_witness(const MatrixXcd& rho,
                                                 const BipartiteLabel& jj,
                                                 const MatrixXcd& v_a) {
  if (rho.rows() != jj.dim())
    throw std::invalid_argument("partial_trace_witness: dimension mismatch");
  if (v_a.rows() != jj.a.dim() || v_a.cols() != jj.a.dim())
    throw std::invalid_argument("partial_trace_witness: V_A dimension mismatch");
  if (!psd_check(v_a).positive)
    throw std::invalid_argument("partial_trace_witness: V_A must be PSD");
  const MatrixXcd weighted = rho * kron(v_a, MatrixXcd::Identity(jj.b.dim(), jj.b.dim()));
  const double norm = weighted.trace().real();
  if (norm <= 1e-12)
    throw std::invalid_argument("partial_trace_witness: tr(rho V_A) vanishes");
  PartialTraceWitness out;
  out.rho_b = partial_trace_a(weighted, jj) / norm;
  out.rho_b = 0.5 * (out.rho_b + out.rho_b.adjoint().eval());
  if (jj.b.twice_j == 2) out.verdict = spin1_is_prep(out.rho_b);
  return out;
}

// --- 2D boundary scan ---------------------------------------------------

struct RayResult {
  double angle = 0.0;
  double kappa_positivity = 0.0;
  double kappa_ppt = 0.0;
  double kappa_prep = 0.0;
  int grid_a = 0;
  int grid_b = 0;
  double residual = 0.0;
};

struct ScanResult {
  std::vector<RayResult> rays;
};

namespace detail {

template <typename Fn>
void parallel_for(int count, Fn&& fn, int threads) {
  if (threads <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < count && !failed.load();
           i = next.fetch_add(1)) {
        try {
          fn(i);
        } catch (...) {
          const std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          failed.store(true);
        }
      }
    });
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace detail

// Sweeps rays of the (kappa_1, kappa_2) plane spanned by two traceless
// directions; each ray is trace-norm normalized and reports its positivity,
// PPT and P-rep boundary values. Rays are independent tasks; results are
// merged by ray index, so the output does not depend on scheduling.
inline ScanResult scan2d(const BipartiteLabel& jj, const MatrixXcd& rho_hat1,
                         const MatrixXcd& rho_hat2, int ray_count,
                         const BipartiteSchedule& sched = {}, int threads = 0) {
  require_hermitian(rho_hat1, 1e-10);
  require_hermitian(rho_hat2, 1e-10);
  if (std::abs(rho_hat1.trace()) > 1e-10 || std::abs(rho_hat2.trace()) > 1e-10)
    throw std::invalid_argument("scan2d: directions must be traceless");
  const double n1 = rho_hat1.norm();
  const double n2 = rho_hat2.norm();
  const Complex overlap = (rho_hat1.adjoint() * rho_hat2).trace();
  if (n1 < 1e-12 || n2 < 1e-12 ||
      std::abs(std::abs(overlap) / (n1 * n2) - 1.0) < 1e-9)
    throw std::invalid_argument("scan2d: directions are linearly dependent");
  if (ray_count < 1) throw std::invalid_argument("scan2d: ray_count >= 1");

  ScanResult result;
  result.rays.resize(ray_count);
  if (threads <= 0)
    threads = static_cast<int>(std::thread::hardware_concurrency());
  threads = std::max(1, std::min(threads, ray_count));

  detail::parallel_for(
      ray_count,
      [&](int r) {
        const double angle = 2.0 * kPi * r / ray_count;
        const MatrixXcd dir =
            std::cos(angle) * rho_hat1 + std::sin(angle) * rho_hat2;
        const ScaledFamily family = make_scaled_family(dir, MatrixNorm::kTrace);
        RayResult ray;
        ray.angle = angle;
        ray.kappa_positivity = positivity_kappa(family);
        ray.kappa_ppt = ppt_kappa(family, jj);
        const BipartiteBoundaryResult b =
            bipartite_boundary_kappa(family, jj, sched);
        ray.kappa_prep = b.kappa_e;
        ray.grid_a = b.grid_a;
        ray.grid_b = b.grid_b;
        ray.residual = b.residual;
        result.rays[r] = ray;
      },
      threads);
  return result;
}

// Fixed CSV layout, one row per ray. %.12g rendering keeps the file
// bit-identical across runs with the same inputs and grids.
inline void write_scan_csv(const ScanResult& scan, std::ostream& os) {
  os << "angle,kappa_positivity,kappa_ppt,kappa_prep,grid_a,grid_b,residual\n";
  char buf[256];
  for (const RayResult& r : scan.rays) {
    std::snprintf(buf, sizeof(buf), "%.12g,%.12g,%.12g,%.12g,%d,%d,%.12g\n",
                  r.angle, r.kappa_positivity, r.kappa_ppt, r.kappa_prep,
                  r.grid_a, r.grid_b, r.residual);
    os << buf;
  }
}

}  // namespace spinclass
