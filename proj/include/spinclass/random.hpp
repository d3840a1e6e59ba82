#pragma once

// Seeded sampling helpers for tests and the gen command. Gaussians come
// from an explicit Box-Muller over the raw engine output, so a seed fully
// determines the bytes of every generated state on every platform.

#include "spinclass/density.hpp"

#include <algorithm>
#include <cstdint>
#include <random>

namespace spinclass {

class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  double uniform() {  // (0, 1]
    const std::uint64_t bits = engine_() >> 11;
    return (static_cast<double>(bits) + 1.0) * 0x1p-53;
  }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * kPi * u2);
    have_spare_ = true;
    return r * std::cos(2.0 * kPi * u2);
  }

  Complex complex_normal() { return Complex(normal(), normal()); }

  Direction direction() {
    const double z = 2.0 * uniform() - 1.0;
    const double phi = 2.0 * kPi * uniform();
    Direction d;
    d.theta = std::acos(std::clamp(z, -1.0, 1.0));
    d.phi = phi;
    return d;
  }

  Vector3d unit_vector() { return direction().unit_vector(); }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

// Ginibre construction: G G^dag normalized; full rank almost surely.
inline MatrixXcd random_density_matrix(int dim, RandomStream& rng) {
  MatrixXcd g(dim, dim);
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c) g(r, c) = rng.complex_normal();
  MatrixXcd rho = g * g.adjoint();
  rho /= rho.trace().real();
  rho = 0.5 * (rho + rho.adjoint().eval());
  return rho;
}

inline MatrixXcd random_traceless_hermitian(int dim, RandomStream& rng) {
  MatrixXcd h(dim, dim);
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c) h(r, c) = rng.complex_normal();
  h = 0.5 * (h + h.adjoint().eval());
  h -= (h.trace() / static_cast<double>(dim)) * MatrixXcd::Identity(dim, dim);
  return h;
}

inline ScaledFamily random_family(int dim, RandomStream& rng,
                                  MatrixNorm norm = MatrixNorm::kTrace) {
  return make_scaled_family(random_traceless_hermitian(dim, rng), norm);
}

// Random finite mixture of coherent states; optionally enforce a minimum
// pairwise angle so multi-point mixtures stay far from single peaks.
inline DeltaMixture random_mixture(int points, RandomStream& rng,
                                   double min_separation = 0.0,
                                   double min_weight = 0.0) {
  DeltaMixture mix;
  while (static_cast<int>(mix.points.size()) < points) {
    const Direction cand = rng.direction();
    bool ok = true;
    if (min_separation > 0.0) {
      const Vector3d v = cand.unit_vector();
      for (const auto& p : mix.points)
        if (std::acos(std::clamp(v.dot(p.point.unit_vector()), -1.0, 1.0)) <
            min_separation)
          ok = false;
    }
    if (ok) mix.points.push_back({0.0, cand});
  }
  double total = 0.0;
  for (auto& p : mix.points) {
    p.weight = min_weight + rng.uniform();
    total += p.weight;
  }
  for (auto& p : mix.points) p.weight /= total;
  return mix;
}

}  // namespace spinclass
