#pragma once

#include "spin1/grid.hpp"
#include "spin1/model.hpp"
#include "spin1/solver.hpp"

#include <cmath>
#include <random>

namespace spin1::test {

inline ModelParams harmonic_params(const Grid& grid, double c_n, double c_s, double N, double M) {
  ModelParams p;
  p.c_n = c_n;
  p.c_s = c_s;
  p.N = N;
  p.M = M;
  p.V = RealField::Zero(grid.size());
  for (int a = 0; a < grid.dim(); ++a) p.V += grid.coordinates(a).cwiseAbs2();
  return p;
}

inline ModelParams flat_params(const Grid& grid, double c_n, double c_s, double N, double M) {
  ModelParams p = harmonic_params(grid, c_n, c_s, N, M);
  p.V.setZero();
  return p;
}

/// Smooth random positive field: a few random bumps, zero on pinned nodes.
inline RealField random_field(const Grid& grid, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  RealField f = RealField::Constant(grid.size(), 0.05 * unit(rng));
  for (int b = 0; b < 3; ++b) {
    const double amp = unit(rng);
    RealField r2 = RealField::Zero(grid.size());
    for (int a = 0; a < grid.dim(); ++a) {
      const auto& ax = grid.axis(a);
      const double c = ax.lo + (ax.hi - ax.lo) * unit(rng);
      const double s = 0.1 * (ax.hi - ax.lo) * (0.5 + unit(rng));
      r2 += ((grid.coordinates(a).array() - c) / s).square().matrix();
    }
    f += amp * (-r2.array()).exp().matrix();
  }
  return f.cwiseProduct(grid.free_mask());
}

/// Random nonnegative triple rescaled onto the constraint set of `p`.
inline StateTriple random_admissible(const Grid& grid, const ModelParams& p, std::mt19937_64& rng) {
  StateTriple u{random_field(grid, rng), random_field(grid, rng), random_field(grid, rng)};
  return project_constraints(grid, u, p);
}

inline double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace spin1::test
