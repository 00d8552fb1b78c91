#include "spin1/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

namespace spin1 {

namespace {

class ReducedEnergy {
 public:
  ReducedEnergy(const Grid& grid, const ModelParams& p) : grid_(grid), p_(p) {
    for (Eigen::Index i = 0; i < grid.size(); ++i) {
      if (grid.free_mask()[i] != 0.0) free_.push_back(i);
    }
  }

  int free_nodes() const { return static_cast<int>(free_.size()); }
  int dimension() const { return 1 + 3 * free_nodes(); }

  /// x = (phi, shape(u1), shape(u0), shape(u-1)); the u0 mass share is
  /// (N - |M|) sin^2 phi and the +/-1 masses follow from the constraints.
  StateTriple state(const Eigen::VectorXd& x) const {
    const double n0 = (p_.N - std::abs(p_.M)) * std::pow(std::sin(x[0]), 2);
    const std::array<double, 3> mass{0.5 * (p_.N - n0 + p_.M), n0, 0.5 * (p_.N - n0 - p_.M)};
    StateTriple u = StateTriple::Zero(grid_.size());
    const int n = free_nodes();
    for (int j = 0; j < 3; ++j) {
      for (int k = 0; k < n; ++k) u[j][free_[k]] = std::abs(x[1 + j * n + k]);
      const double norm2 = integrate(grid_, u[j].cwiseAbs2());
      if (norm2 <= 0.0) {
        if (mass[j] > 0.0) return {};
        continue;
      }
      u[j] *= std::sqrt(mass[j] / norm2);
    }
    return u;
  }

  double operator()(const Eigen::VectorXd& x) const {
    const StateTriple u = state(x);
    if (u.u1.size() == 0) return std::numeric_limits<double>::infinity();
    return amplitude_energy(grid_, u, p_).total;
  }

 private:
  const Grid& grid_;
  const ModelParams& p_;
  std::vector<Eigen::Index> free_;
};

Eigen::VectorXd fd_gradient(const ReducedEnergy& f, const Eigen::VectorXd& x) {
  Eigen::VectorXd g(x.size());
  Eigen::VectorXd xp = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double h = 1e-6 * std::max(1.0, std::abs(x[i]));
    xp[i] = x[i] + h;
    const double fp = f(xp);
    xp[i] = x[i] - h;
    const double fm = f(xp);
    xp[i] = x[i];
    g[i] = (fp - fm) / (2.0 * h);
  }
  return g;
}

/// BFGS with Armijo backtracking.
Eigen::VectorXd bfgs(const ReducedEnergy& f, Eigen::VectorXd x, int max_iterations) {
  const Eigen::Index n = x.size();
  Eigen::MatrixXd H = Eigen::MatrixXd::Identity(n, n);
  double fx = f(x);
  Eigen::VectorXd g = fd_gradient(f, x);
  for (int it = 0; it < max_iterations; ++it) {
    if (g.norm() < 1e-11) break;
    Eigen::VectorXd d = -H * g;
    if (d.dot(g) >= 0.0) {
      H.setIdentity();
      d = -g;
    }
    double step = 1.0;
    double fn = f(x + step * d);
    while (!(fn <= fx + 1e-4 * step * d.dot(g)) && step > 1e-16) {
      step *= 0.5;
      fn = f(x + step * d);
    }
    if (!(fn <= fx)) break;
    const Eigen::VectorXd s = step * d;
    x += s;
    const Eigen::VectorXd gn = fd_gradient(f, x);
    const Eigen::VectorXd y = gn - g;
    const double sy = s.dot(y);
    if (sy > 1e-300) {
      const double rho = 1.0 / sy;
      const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
      H = (I - rho * s * y.transpose()) * H * (I - rho * y * s.transpose()) + rho * s * s.transpose();
    }
    const bool stalled = std::abs(fx - fn) <= 1e-16 * std::max(1.0, std::abs(fx));
    fx = fn;
    g = gn;
    if (stalled && g.norm() < 1e-7) break;
  }
  return x;
}

}  // namespace

StateTriple brute_force_ground_state(const Grid& grid, const ModelParams& p,
                                     const BruteForceOptions& opts) {
  p.validate(grid);
  if (grid.dim() != 1) throw SolverError("brute-force oracle needs a 1D grid");
  ReducedEnergy energy(grid, p);
  if (energy.free_nodes() > 9 || energy.free_nodes() < 1) {
    throw SolverError("brute-force oracle supports 1 to 9 free nodes");
  }
  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> shape(0.1, 1.0);
  std::uniform_real_distribution<double> angle(0.05, 0.5 * std::numbers::pi - 0.05);

  Eigen::VectorXd best;
  double best_energy = std::numeric_limits<double>::infinity();
  for (int s = 0; s < std::max(1, opts.starts); ++s) {
    Eigen::VectorXd x(energy.dimension());
    x[0] = angle(rng);
    for (Eigen::Index i = 1; i < x.size(); ++i) x[i] = shape(rng);
    x = bfgs(energy, x, opts.max_iterations);
    const double e = energy(x);
    if (e < best_energy) {
      best_energy = e;
      best = x;
    }
  }
  return energy.state(best);
}

}  // namespace spin1
