#pragma once

// Seeded test fields shared by the unit suites.

#include "gptw/field.hpp"

#include <random>

namespace gptw::testing {

inline ComplexField random_field(const TorusGrid& grid, std::uint64_t seed, double scale = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Eigen::VectorXcd v(grid.node_count());
  for (auto& z : v) z = scale * Complex(normal(rng), normal(rng));
  return ComplexField(grid, std::move(v));
}

/// Random field with only modes |k_a| <= band, so spectral derivatives are
/// well resolved. Normalized to root-mean-square `scale`.
inline ComplexField smooth_random_field(const TorusGrid& grid, std::uint64_t seed, int band,
                                        double scale = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Eigen::VectorXcd hat = Eigen::VectorXcd::Zero(grid.node_count());
  for (Eigen::Index j = 0; j < hat.size(); ++j) {
    auto idx = grid.unflatten(j);
    bool inside = true;
    for (int a = 0; a < grid.dim(); ++a) inside = inside && std::abs(grid.wavenumber(a, idx[a])) <= band;
    if (inside) hat[j] = Complex(normal(rng), normal(rng));
  }
  hat /= hat.norm();
  return scale * transform_inverse(ComplexField(grid, hat, Representation::Spectral));
}

}  // namespace gptw::testing
