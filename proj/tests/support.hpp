#pragma once

// Shared helpers for the test suites: independent oracles kept deliberately
// separate from the library code paths they check.

#include "spinclass/angular.hpp"
#include "spinclass/bipartite.hpp"
#include "spinclass/density.hpp"
#include "spinclass/random.hpp"

#include <cmath>
#include <map>
#include <tuple>
#include <vector>

namespace testsupport {

using namespace spinclass;

// Independent Clebsch-Gordan oracle: couple two spins explicitly, restrict
// total J^2 to the magnetization-M subspace, take the eigenvector with
// eigenvalue J(J+1), and fix the Condon-Shortley sign (largest-m1 component
// positive at M = J, then lower with J_-). No Racah sum involved.
class CouplingOracle {
 public:
  CouplingOracle(SpinLabel j1, SpinLabel j2) : j1_(j1), j2_(j2) {
    const SpinOperators a = angular_momentum_ops(j1);
    const SpinOperators b = angular_momentum_ops(j2);
    const int d1 = j1.dim(), d2 = j2.dim();
    const MatrixXcd id1 = MatrixXcd::Identity(d1, d1);
    const MatrixXcd id2 = MatrixXcd::Identity(d2, d2);
    jx_ = kron(a.jx, id2) + kron(id1, b.jx);
    jy_ = kron(a.jy, id2) + kron(id1, b.jy);
    jz_ = kron(a.jz, id2) + kron(id1, b.jz);
    j2tot_ = jx_ * jx_ + jy_ * jy_ + jz_ * jz_;
  }

  // <j1 m1 j2 m2 | J M>, all doubled ints.
  double coefficient(int tm1, int tm2, int tJ, int tM) {
    if (tm1 + tm2 != tM) return 0.0;
    const VectorXcd state = coupled_state(tJ, tM);
    const int i1 = (j1_.twice_j - tm1) / 2;
    const int i2 = (j2_.twice_j - tm2) / 2;
    const Complex c = state(i1 * j2_.dim() + i2);
    return c.real();
  }

 private:
  VectorXcd coupled_state(int tJ, int tM) {
    const auto key = std::make_pair(tJ, tM);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;

    VectorXcd state;
    if (tM == tJ) {
      // basis of the M = J subspace
      std::vector<int> members;
      const int dim = j1_.dim() * j2_.dim();
      for (int i = 0; i < dim; ++i) {
        const int tm1 = j1_.twice_j - 2 * (i / j2_.dim());
        const int tm2 = j2_.twice_j - 2 * (i % j2_.dim());
        if (tm1 + tm2 == tJ) members.push_back(i);
      }
      MatrixXcd sub(members.size(), members.size());
      for (std::size_t r = 0; r < members.size(); ++r)
        for (std::size_t c = 0; c < members.size(); ++c)
          sub(r, c) = j2tot_(members[r], members[c]);
      Eigen::SelfAdjointEigenSolver<MatrixXcd> es(sub);
      const double target = 0.25 * tJ * (tJ + 2.0);
      int pick = 0;
      double best = 1e300;
      for (int k = 0; k < es.eigenvalues().size(); ++k) {
        const double d = std::abs(es.eigenvalues()(k) - target);
        if (d < best) {
          best = d;
          pick = k;
        }
      }
      state = VectorXcd::Zero(j1_.dim() * j2_.dim());
      for (std::size_t r = 0; r < members.size(); ++r)
        state(members[r]) = es.eigenvectors()(r, pick);
      // Condon-Shortley: the largest-m1 component of |J, J> is positive.
      for (std::size_t r = 0; r < members.size(); ++r) {
        if (std::abs(state(members[r])) > 1e-12) {
          // members are ordered with m1 descending already (i / d2 ascending)
          if (state(members[r]).real() < 0) state = -state;
          break;
        }
      }
    } else {
      const VectorXcd above = coupled_state(tJ, tM + 2);
      const MatrixXcd jminus = jx_ - Complex(0, 1) * jy_;
      const double jj = 0.5 * tJ, mm = 0.5 * (tM + 2);
      state = (jminus * above) / std::sqrt(jj * (jj + 1) - mm * (mm - 1));
    }
    cache_[key] = state;
    return state;
  }

  SpinLabel j1_, j2_;
  MatrixXcd jx_, jy_, jz_, j2tot_;
  std::map<std::pair<int, int>, VectorXcd> cache_;
};

// Quadrature inner product of two sphere functions.
template <typename F, typename G>
Complex sphere_inner(F&& f, G&& g, int order) {
  const SphereQuadrature q = sphere_quadrature(order);
  Complex acc(0.0, 0.0);
  for (std::size_t i = 0; i < q.points.size(); ++i)
    acc += q.weights[i] * f(q.points[i]) * std::conj(g(q.points[i]));
  return acc;
}

inline double frob_diff(const MatrixXcd& a, const MatrixXcd& b) {
  return (a - b).norm();
}

// Mixture of random coherent projectors restricted to spin-1 states with
// Z >= 0 by construction.
inline MatrixXcd random_prep_spin1(RandomStream& rng, int points = 5) {
  const DeltaMixture mix = random_mixture(points, rng);
  return rho_from_mixture(mix, SpinLabel(2));
}

}  // namespace testsupport
