#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "spinclass/lpsolve.hpp"

#include "support.hpp"

using namespace spinclass;
using testsupport::frob_diff;

TEST_CASE("fibonacci grid") {
  SUBCASE("n = 1 sits at a pole") {
    const SphereGrid g = fibonacci_grid(1);
    REQUIRE(g.size() == 1);
    CHECK(g.points[0].theta == doctest::Approx(0.0));
  }

  SUBCASE("deterministic and pairwise distinct") {
    const SphereGrid a = fibonacci_grid(400);
    const SphereGrid b = fibonacci_grid(400);
    for (int i = 0; i < a.size(); ++i) {
      CHECK(a.points[i].theta == b.points[i].theta);
      CHECK(a.points[i].phi == b.points[i].phi);
    }
    for (int i = 0; i < a.size(); ++i)
      for (int k = i + 1; k < a.size(); ++k)
        CHECK((a.points[i].unit_vector() - a.points[k].unit_vector()).norm() >
              1e-8);
  }

  SUBCASE("near-uniform nearest-neighbor spacing at n = 1000") {
    const SphereGrid g = fibonacci_grid(1000);
    std::vector<double> nn(g.size(), 1e300);
    for (int i = 0; i < g.size(); ++i) {
      const Vector3d vi = g.points[i].unit_vector();
      for (int k = 0; k < g.size(); ++k) {
        if (k == i) continue;
        nn[i] = std::min(nn[i], (vi - g.points[k].unit_vector()).norm());
      }
    }
    std::vector<double> sorted = nn;
    std::sort(sorted.begin(), sorted.end());
    const double med = sorted[sorted.size() / 2];
    int within = 0;
    for (double d : nn)
      if (d > med / 2.0 && d < med * 2.0) ++within;
    CHECK(within >= 990);
  }

  SUBCASE("centroid is near the origin") {
    for (int n : {500, 1000, 2000}) {
      const SphereGrid g = fibonacci_grid(n);
      Vector3d mean = Vector3d::Zero();
      for (const Direction& d : g.points) mean += d.unit_vector();
      CHECK((mean / n).norm() < 0.01);
    }
  }

  SUBCASE("grow_grid keeps existing points") {
    SphereGrid g = fibonacci_grid(100);
    const SphereGrid snapshot = g;
    grow_grid(g, 250, 1);
    REQUIRE(g.size() == 250);
    for (int i = 0; i < 100; ++i) {
      CHECK(g.points[i].theta == snapshot.points[i].theta);
      CHECK(g.points[i].phi == snapshot.points[i].phi);
    }
  }
}

TEST_CASE("real-harmonic coefficient transform") {
  // The per-K transform must be an exact change of basis: expansions in
  // complex Y and transformed real R agree pointwise for any coefficients.
  RandomStream rng(61);
  for (int K = 0; K <= 4; ++K) {
    const MatrixXcd g = detail::real_harmonic_transform(K);
    VectorXcd c(2 * K + 1);
    for (int i = 0; i < c.size(); ++i) c(i) = rng.complex_normal();
    VectorXcd r = VectorXcd::Zero(2 * K + 1);
    for (int Q = -K; Q <= K; ++Q)
      for (int q = -K; q <= K; ++q) r(Q + K) += g(q + K, Q + K) * c(q + K);
    for (int trial = 0; trial < 6; ++trial) {
      const Direction d = rng.direction();
      Complex lhs(0, 0), rhs(0, 0);
      for (int q = -K; q <= K; ++q) {
        lhs += c(q + K) * spherical_harmonic(K, q, d);
        rhs += r(q + K) * real_spherical_harmonic(K, q, d);
      }
      CHECK(std::abs(lhs - rhs) < 1e-12);
    }
  }
}

TEST_CASE("simplex engine") {
  SUBCASE("tiny equality problem") {
    LPStandardForm lp;
    lp.a.resize(1, 2);
    lp.a << 1.0, 1.0;
    lp.b.resize(1);
    lp.b << 1.0;
    lp.c = VectorXd::Ones(2);
    const LPSolution sol = simplex_solve(lp);
    REQUIRE(sol.status == LPStatus::kOptimal);
    CHECK(sol.objective == doctest::Approx(1.0));
    CHECK((lp.a * sol.w - lp.b).cwiseAbs().maxCoeff() < 1e-9);
  }

  SUBCASE("random feasible systems are solved to feasibility and support bound") {
    RandomStream rng(62);
    for (int trial = 0; trial < 30; ++trial) {
      const int m = 3 + static_cast<int>(rng.uniform() * 6);
      const int n = m + 5 + static_cast<int>(rng.uniform() * 40);
      LPStandardForm lp;
      lp.a.resize(m, n);
      for (int r = 0; r < m; ++r)
        for (int c = 0; c < n; ++c) lp.a(r, c) = rng.normal();
      VectorXd w0 = VectorXd::Zero(n);
      for (int k = 0; k < m; ++k)
        w0(static_cast<int>(rng.uniform() * n)) = rng.uniform();
      lp.b = lp.a * w0;
      lp.c = VectorXd::Ones(n);
      const LPSolution sol = simplex_solve(lp);
      REQUIRE(sol.status == LPStatus::kOptimal);
      CHECK((lp.a * sol.w - lp.b).cwiseAbs().maxCoeff() < 1e-9);
      CHECK(sol.w.minCoeff() > -1e-12);
      CHECK(sol.objective <= w0.sum() + 1e-9);
      int support = 0;
      for (int i = 0; i < n; ++i)
        if (sol.w(i) > 1e-12) ++support;
      CHECK(support <= m);
    }
  }

  SUBCASE("degenerate problem known to cycle under naive pivoting") {
    // Beale's example; anti-cycling must kick in and reach -1/20.
    LPStandardForm lp;
    lp.a.resize(3, 7);
    lp.a << 0.25, -60.0, -1.0 / 25.0, 9.0, 1, 0, 0,
            0.5, -90.0, -1.0 / 50.0, 3.0, 0, 1, 0,
            0.0, 0.0, 1.0, 0.0, 0, 0, 1;
    lp.b.resize(3);
    lp.b << 0.0, 0.0, 1.0;
    lp.c.resize(7);
    lp.c << -0.75, 150.0, -0.02, 6.0, 0, 0, 0;
    const LPSolution sol = simplex_solve(lp);
    REQUIRE(sol.status == LPStatus::kOptimal);
    CHECK(sol.objective == doctest::Approx(-0.05));
  }

  SUBCASE("infeasible system is reported") {
    LPStandardForm lp;
    lp.a.resize(2, 2);
    lp.a << 1.0, 1.0, -1.0, -1.0;
    lp.b.resize(2);
    lp.b << 1.0, 1.0;
    lp.c = VectorXd::Zero(2);
    const LPSolution sol = simplex_solve(lp);
    CHECK(sol.status == LPStatus::kInfeasible);
    CHECK(sol.infeasibility > 0.5);
  }

  SUBCASE("unbounded objective is reported") {
    LPStandardForm lp;
    lp.a.resize(1, 2);
    lp.a << 1.0, -1.0;
    lp.b.resize(1);
    lp.b << 0.0;
    lp.c.resize(2);
    lp.c << -1.0, 0.0;  // push w1 up forever along (1,1)
    const LPSolution sol = simplex_solve(lp);
    CHECK(sol.status == LPStatus::kUnbounded);
  }

  SUBCASE("warm start from the optimal basis is accepted") {
    LPStandardForm lp;
    lp.a.resize(2, 5);
    lp.a << 1, 0, 2, 1, -1, 0, 1, 1, 2, 1;
    lp.b.resize(2);
    lp.b << 3, 2;
    lp.c.resize(5);
    lp.c << 1, 2, 3, 1, 5;
    const LPSolution first = simplex_solve(lp);
    REQUIRE(first.status == LPStatus::kOptimal);
    SimplexOptions opt;
    opt.initial_basis = first.basis;
    const LPSolution second = simplex_solve(lp, opt);
    REQUIRE(second.status == LPStatus::kOptimal);
    CHECK(second.objective == doctest::Approx(first.objective));
    CHECK(second.iterations <= first.iterations);
  }
}

TEST_CASE("constraint assembly") {
  const SpinLabel j(2);
  const SphereGrid grid = fibonacci_grid(40);

  SUBCASE("row counts for spin-1") {
    const PCoeffs pc = p_coeffs_of_state(maximally_mixed(3), j);
    CHECK(build_constraints(pc, grid, LPMode::kBoundary).a.rows() == 8);
    CHECK(build_constraints(pc, grid, LPMode::kDecide).a.rows() == 9);
    CHECK(build_constraints(pc, grid, LPMode::kDecide).a.cols() == 40);
  }

  SUBCASE("permuting grid points permutes columns only") {
    RandomStream rng(69);
    const MatrixXcd rho = random_density_matrix(3, rng);
    const PCoeffs pc = p_coeffs_of_state(rho, j);
    SphereGrid reversed = grid;
    std::reverse(reversed.points.begin(), reversed.points.end());
    const LPStandardForm lp1 = build_constraints(pc, grid, LPMode::kDecide);
    const LPStandardForm lp2 = build_constraints(pc, reversed, LPMode::kDecide);
    CHECK((lp1.b - lp2.b).cwiseAbs().maxCoeff() == 0.0);
    for (int i = 0; i < grid.size(); ++i)
      CHECK((lp1.a.col(i) - lp2.a.col(grid.size() - 1 - i))
                .cwiseAbs()
                .maxCoeff() == 0.0);
  }

  SUBCASE("maximally mixed direction gives the zero boundary problem") {
    const PCoeffs pc = p_coeffs_of_state(maximally_mixed(3), j);
    const LPStandardForm lp = build_constraints(pc, grid, LPMode::kBoundary);
    CHECK(lp.b.cwiseAbs().maxCoeff() < 1e-13);
    const LPSolution sol = simplex_solve(lp);
    REQUIRE(sol.status == LPStatus::kOptimal);
    CHECK(sol.objective == doctest::Approx(0.0).epsilon(1e-12));
  }
}

TEST_CASE("decide_prep") {
  SUBCASE("random qubit states certify under refinement") {
    RandomStream rng(63);
    for (int trial = 0; trial < 25; ++trial) {
      const MatrixXcd rho = random_density_matrix(2, rng);
      bool certified = false;
      for (int n : {16, 64, 256}) {
        const DecideResult r = decide_prep(rho, SpinLabel(1), fibonacci_grid(n),
                                           1e-8);
        if (r.p_rep) {
          REQUIRE(r.certificate.has_value());
          CHECK(frob_diff(rho_from_mixture(*r.certificate, SpinLabel(1)), rho) <
                1e-6);
          CHECK(static_cast<int>(r.certificate->points.size()) <= 4);
          certified = true;
          break;
        }
      }
      CHECK(certified);
    }
  }

  SUBCASE("m = 0 spin-1 projector is never certified") {
    MatrixXcd rho = MatrixXcd::Zero(3, 3);
    rho(1, 1) = 1.0;
    for (int n : {50, 200, 800}) {
      const DecideResult r = decide_prep(rho, SpinLabel(2), fibonacci_grid(n));
      CHECK_FALSE(r.p_rep);
      CHECK(r.residual > 1e-3);
    }
    // and the witness certifies the refusal independently
    CHECK(witness_scan(rho, SpinLabel(2)).violated);
  }

  SUBCASE("off-grid coherent state: infeasibility shrinks with n") {
    const Direction a0(1.234567, 2.345678);
    const SpinLabel j(2);
    const VectorXcd ket = coherent_ket(j, a0);
    const MatrixXcd rho = ket * ket.adjoint();
    double prev = 1e300;
    for (int n : {100, 400, 1600}) {
      const DecideResult r = decide_prep(rho, j, fibonacci_grid(n), 1e-12);
      CHECK(r.residual < prev + 1e-12);
      prev = r.residual;
    }
    CHECK(prev < 1e-2);
    const DecideResult loose =
        decide_prep(rho, j, fibonacci_grid(1600), 2e-2);
    REQUIRE(loose.p_rep);
    CHECK(frob_diff(rho_from_mixture(*loose.certificate, j), rho) < 0.1);
  }

  SUBCASE("interior ball around the mixed state") {
    RandomStream rng(64);
    for (int tj : {1, 2, 3, 4}) {
      const SpinLabel j(tj);
      const ScaledFamily fam = random_family(j.dim(), rng);
      const MatrixXcd rho = scaled_state(fam, 0.05);
      const DecideResult r = decide_prep(rho, j, fibonacci_grid(400), 1e-8);
      CHECK(r.p_rep);
    }
  }
}

TEST_CASE("boundary_kappa") {
  RefinementSchedule quick;
  quick.sizes = {200, 400, 800};

  SUBCASE("spin-1 m = 0 direction approaches 1/3 from below") {
    MatrixXcd rho = MatrixXcd::Zero(3, 3);
    rho(1, 1) = 1.0;
    const ScaledFamily fam = make_scaled_family(rho - maximally_mixed(3));
    const BoundaryResult b = boundary_kappa(fam, SpinLabel(2), quick);
    CHECK(b.kappa_e <= 1.0 / 3.0 + 1e-9);
    CHECK(b.kappa_e == doctest::Approx(1.0 / 3.0).epsilon(0.01));
    CHECK(b.residual < 1e-9);
    // certificate reconstructs the boundary state
    const MatrixXcd boundary_state = scaled_state(fam, b.kappa_e);
    CHECK(std::abs(b.mixture.total_weight() - 1.0) < 1e-8);
    CHECK(frob_diff(rho_from_mixture(b.mixture, SpinLabel(2)), boundary_state) <
          1e-6);
    // nested refinement history is monotone non-increasing
    for (std::size_t i = 1; i < b.inverse_kappa_history.size(); ++i)
      CHECK(b.inverse_kappa_history[i] <=
            b.inverse_kappa_history[i - 1] + 1e-10);
  }

  SUBCASE("spin-1/2 boundary equals the positivity boundary") {
    RandomStream rng(65);
    for (int trial = 0; trial < 5; ++trial) {
      const ScaledFamily fam = random_family(2, rng);
      const BoundaryResult b = boundary_kappa(fam, SpinLabel(1), quick);
      const double pos = positivity_kappa(fam);
      CHECK(b.kappa_e == doctest::Approx(pos).epsilon(0.01));
    }
  }

  SUBCASE("spin-1 coherent direction reaches the positivity corner 4/3") {
    const VectorXcd ket = coherent_ket(SpinLabel(2), Direction(2.2, 4.0));
    const ScaledFamily fam =
        make_scaled_family(ket * ket.adjoint() - maximally_mixed(3));
    const BoundaryResult b = boundary_kappa(fam, SpinLabel(2), quick);
    CHECK(b.kappa_e == doctest::Approx(4.0 / 3.0).epsilon(0.01));
  }

  SUBCASE("spin-5/2 boundary: monotone, inside positivity, certified") {
    RandomStream rng(68);
    const SpinLabel j(5);
    const ScaledFamily fam = random_family(j.dim(), rng);
    const BoundaryResult b = boundary_kappa(fam, j, quick);
    for (std::size_t i = 1; i < b.inverse_kappa_history.size(); ++i)
      CHECK(b.inverse_kappa_history[i] <=
            b.inverse_kappa_history[i - 1] + 1e-10);
    CHECK(b.kappa_e > 0.05);  // interior ball
    CHECK(b.kappa_e <= positivity_kappa(fam) + 1e-6);
    CHECK(frob_diff(rho_from_mixture(b.mixture, j),
                    scaled_state(fam, b.kappa_e)) < 1e-6);
    CHECK(static_cast<int>(b.mixture.points.size()) <= j.dim() * j.dim() - 1);
  }

  SUBCASE("random spin-1 directions agree with the analytic boundary") {
    RandomStream rng(66);
    for (int trial = 0; trial < 8; ++trial) {
      const ScaledFamily fam = random_family(3, rng);
      const double analytic = spin1_kappa_e(fam).kappa_e;
      const BoundaryResult b = boundary_kappa(fam, SpinLabel(2), quick);
      CHECK(b.kappa_e <= analytic * (1.0 + 1e-6));
      CHECK(b.kappa_e == doctest::Approx(analytic).epsilon(0.01));
    }
  }
}

TEST_CASE("concavity of the inverse boundary") {
  RefinementSchedule quick;
  quick.sizes = {200, 400};

  SUBCASE("identical directions give zero slack") {
    MatrixXcd rho = MatrixXcd::Zero(3, 3);
    rho(1, 1) = 1.0;
    const ScaledFamily fam = make_scaled_family(rho - maximally_mixed(3));
    CHECK(std::abs(concavity_check(fam, fam, 0.5, SpinLabel(2), quick)) <
          1e-8);
  }

  SUBCASE("orthogonal diagonal directions give strictly positive slack") {
    MatrixXcd d1 = MatrixXcd::Zero(3, 3);
    d1(0, 0) = 0.5;
    d1(1, 1) = -1.0;
    d1(2, 2) = 0.5;
    MatrixXcd d2 = MatrixXcd::Zero(3, 3);
    d2(0, 0) = 0.5;
    d2(2, 2) = -0.5;
    CHECK(std::abs((d1.adjoint() * d2).trace()) < 1e-14);
    const ScaledFamily f1 = make_scaled_family(d1);
    const ScaledFamily f2 = make_scaled_family(d2);
    const double a1 = 1.0 / spin1_kappa_for_direction(f1.rho_hat);
    const double a2 = 1.0 / spin1_kappa_for_direction(f2.rho_hat);
    const double am = 1.0 / spin1_kappa_for_direction(
                                0.5 * f1.rho_hat + 0.5 * f2.rho_hat);
    CHECK(0.5 * a1 + 0.5 * a2 - am > 0.01);
    CHECK(concavity_check(f1, f2, 0.5, SpinLabel(2), quick) > 0.01);
  }

  SUBCASE("random pairs have non-negative slack, matching analytic values") {
    RandomStream rng(67);
    for (int trial = 0; trial < 6; ++trial) {
      const ScaledFamily f1 = random_family(3, rng);
      const ScaledFamily f2 = random_family(3, rng);
      const double slack = concavity_check(f1, f2, 0.5, SpinLabel(2), quick);
      CHECK(slack > -1e-4);
      const double a1 = 1.0 / spin1_kappa_for_direction(f1.rho_hat);
      const double a2 = 1.0 / spin1_kappa_for_direction(f2.rho_hat);
      const double am = 1.0 / spin1_kappa_for_direction(
                                  0.5 * f1.rho_hat + 0.5 * f2.rho_hat);
      CHECK(0.5 * a1 + 0.5 * a2 - am >= -1e-10);
    }
  }
}
