#include "spin1/solver.hpp"

#include "spin1/redistribute.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <random>

namespace spin1 {

namespace {

/// Solves (I + dt (-Delta + a)) x = b on free nodes, x = 0 on pinned
/// Dirichlet nodes. The system is symmetrized by the quadrature weights so
/// a sparse LDL^T factorization applies.
class Preconditioner {
 public:
  explicit Preconditioner(const Grid& grid) : grid_(grid) {
    const auto& w = grid.weights();
    const auto& free = grid.free_mask();
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(static_cast<std::size_t>(grid.size()) * (1 + 2 * grid.dim()));
    for (Eigen::Index i = 0; i < grid.size(); ++i) {
      if (free[i] == 0.0) {
        t.emplace_back(i, i, 0.0);
        continue;
      }
      double diag = 0.0;
      for (int a = 0; a < grid.dim(); ++a) {
        const Eigen::Index s = grid.stride(a);
        const int n = grid.axis(a).points;
        const int k = grid.index_along(i, a);
        const double c = w[i] / (grid.axis(a).h * grid.axis(a).h);
        diag += 2.0 * c;
        // Mirrored ghosts fold onto the inner neighbour on Neumann ends.
        const Eigen::Index left = k > 0 ? i - s : i + s;
        const Eigen::Index right = k < n - 1 ? i + s : i - s;
        if (free[left] != 0.0) t.emplace_back(i, left, -c);
        if (free[right] != 0.0) t.emplace_back(i, right, -c);
      }
      t.emplace_back(i, i, diag);
    }
    stiffness_.resize(grid.size(), grid.size());
    stiffness_.setFromTriplets(t.begin(), t.end());
    stiffness_.makeCompressed();
    diag_pos_.resize(grid.size());
    for (Eigen::Index col = 0; col < stiffness_.outerSize(); ++col) {
      for (auto p = stiffness_.outerIndexPtr()[col]; p < stiffness_.outerIndexPtr()[col + 1]; ++p) {
        if (stiffness_.innerIndexPtr()[p] == col) diag_pos_[col] = p;
      }
    }
    system_ = stiffness_;
    ldlt_.analyzePattern(system_);
  }

  void factorize(const Eigen::ArrayXd& a, double dt) {
    const auto& w = grid_.weights();
    const auto& free = grid_.free_mask();
    double* values = system_.valuePtr();
    const double* base = stiffness_.valuePtr();
    for (Eigen::Index p = 0; p < stiffness_.nonZeros(); ++p) values[p] = dt * base[p];
    for (Eigen::Index i = 0; i < grid_.size(); ++i) {
      values[diag_pos_[i]] += free[i] != 0.0 ? w[i] * (1.0 + dt * a[i]) : 1.0;
    }
    ldlt_.factorize(system_);
    if (ldlt_.info() != Eigen::Success) throw DivergenceError("preconditioner factorization failed");
  }

  RealField solve(const RealField& b) const {
    const RealField rhs = (grid_.weights().array() * grid_.free_mask().array() * b.array()).matrix();
    return ldlt_.solve(rhs);
  }

 private:
  const Grid& grid_;
  Eigen::SparseMatrix<double> stiffness_;
  Eigen::SparseMatrix<double> system_;
  std::vector<Eigen::Index> diag_pos_;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt_;
};

double inner(const Grid& grid, const StateTriple& a, const StateTriple& b) {
  double s = 0.0;
  for (int j = 0; j < 3; ++j) s += integrate(grid, a[j].cwiseProduct(b[j]));
  return s;
}

/// Pointwise shift making the preconditioner dominate the Hessian of the
/// quartic terms: 6 (max(c_n, 0) + |c_s|) |u|^2 plus V - min V.
Eigen::ArrayXd preconditioner_shift(const RealField& V, const RealField& rho, double quartic) {
  return (V.array() - V.minCoeff()) + 6.0 * quartic * rho.array();
}

StateTriple tangent_step(const Grid& grid, Preconditioner& pre, const StateTriple& u,
                         const StateTriple& G, const ModelParams& p, double dt) {
  const double quartic = std::max(p.c_n, 0.0) + std::abs(p.c_s);
  pre.factorize(preconditioner_shift(p.V, total_density(u), quartic), dt);

  StateTriple z, y;
  for (int j = 0; j < 3; ++j) {
    z[j] = pre.solve(G[j]);
    y[j] = pre.solve(u[j]);
  }
  const RealField zero = RealField::Zero(grid.size());
  const StateTriple e2{u.u1, zero, -u.um1};
  const StateTriple y2{y.u1, zero, -y.um1};

  // Multipliers making the preconditioned direction tangent to both
  // constraint surfaces.
  Eigen::Matrix2d B;
  B << inner(grid, y, u), inner(grid, y2, u), inner(grid, y, e2), inner(grid, y2, e2);
  const Eigen::Vector2d rhs(inner(grid, z, u), inner(grid, z, e2));
  const Eigen::Vector2d ml = B.completeOrthogonalDecomposition().solve(rhs);

  StateTriple v;
  for (int j = 0; j < 3; ++j) {
    const RealField d = z[j] - ml[0] * y[j] - ml[1] * y2[j];
    v[j] = ((u[j] - dt * d).cwiseMax(0.0).array() * grid.free_mask().array()).matrix();
    if (!v[j].allFinite()) throw DivergenceError("flow step produced non-finite values; reduce dt");
  }
  return project_constraints(grid, v, p);
}

Multipliers fit_multipliers(const Grid& grid, const StateTriple& u, const StateTriple& G,
                            const ModelParams& p) {
  Eigen::MatrixXd A(3, 2);
  Eigen::VectorXd b(3);
  int rows = 0;
  for (int j = 0; j < 3; ++j) {
    const double m = integrate(grid, u[j].cwiseAbs2());
    if (m < 1e-12 * p.N) continue;
    A(rows, 0) = 1.0;
    A(rows, 1) = 1 - j;
    b[rows] = integrate(grid, u[j].cwiseProduct(G[j])) / m;
    ++rows;
  }
  if (rows == 0) throw SolverError("lagrange multipliers undefined: every component is empty");
  const Eigen::Vector2d x =
      A.topRows(rows).completeOrthogonalDecomposition().solve(b.head(rows));
  return {x[0], x[1]};
}

double residual_from(const Grid& grid, const StateTriple& u, const StateTriple& G,
                     const Multipliers& m, double N) {
  double s = 0.0;
  for (int j = 0; j < 3; ++j) {
    s += integrate(grid, (G[j] - m.coefficient(j) * u[j]).cwiseAbs2());
  }
  return std::sqrt(std::max(s, 0.0)) / std::sqrt(N);
}

std::array<double, 2> constraint_errors(const Grid& grid, const StateTriple& u,
                                        const ModelParams& p) {
  const auto c = constraint_values(grid, u);
  return {std::abs(c.mass - p.N) / p.N, std::abs(c.magnetization - p.M) / p.N};
}

/// Largest fraction of the total mass carried by a single grid cell.
double peak_cell_fraction(const Grid& grid, const RealField& rho, double N) {
  return (grid.weights().array() * rho.array()).maxCoeff() / N;
}

RealField random_bumps(const Grid& grid, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  RealField f = RealField::Zero(grid.size());
  for (int b = 0; b < 3; ++b) {
    std::array<double, 2> centre{}, width{};
    for (int a = 0; a < grid.dim(); ++a) {
      const auto& ax = grid.axis(a);
      const double len = ax.hi - ax.lo;
      centre[a] = ax.lo + len * (0.2 + 0.6 * unit(rng));
      width[a] = len * (0.06 + 0.12 * unit(rng));
    }
    const double amp = 0.2 + unit(rng);
    for (Eigen::Index i = 0; i < grid.size(); ++i) {
      double r2 = 0.0;
      for (int a = 0; a < grid.dim(); ++a) {
        const double d = (grid.coordinate(i, a) - centre[a]) / width[a];
        r2 += d * d;
      }
      f[i] += amp * std::exp(-0.5 * r2);
    }
  }
  // Keep the tails strictly positive.
  const RealField envelope = gaussian_profile(grid, 1.0);
  f += 0.05 * envelope / envelope.maxCoeff();
  return (f.array() * grid.free_mask().array()).matrix();
}

SolveReport run_single_start(const Grid& grid, const ModelParams& p, const SolverOptions& opts,
                             InitKind kind, std::uint64_t seed) {
  SolveReport rep;
  rep.seed = seed;
  StateTriple u = initial_state(grid, p, kind, seed, opts.custom_state);
  double E = amplitude_energy(grid, u, p).total;
  double dt = opts.dt;
  double last_change = 0.0;
  int streak = 0;
  Preconditioner pre(grid);
  if (opts.record_history) {
    const auto ce = constraint_errors(grid, u, p);
    rep.history.push_back({E, ce[0], ce[1], 0.0});
  }

  for (int iter = 0; iter < opts.max_steps; ++iter) {
    const StateTriple G = energy_gradient(grid, u, p);
    const Multipliers m = fit_multipliers(grid, u, G, p);
    const double res = residual_from(grid, u, G, m, p.N);
    if (res <= opts.residual_tol && last_change <= opts.energy_tol) {
      rep.converged = true;
      break;
    }
    StateTriple v;
    double Ev = std::numeric_limits<double>::infinity();
    try {
      v = tangent_step(grid, pre, u, G, p, dt);
      Ev = amplitude_energy(grid, v, p).total;
    } catch (const DivergenceError&) {
      Ev = std::numeric_limits<double>::infinity();
    }
    // Below a few ulps of E the energy cannot rank two states.
    const double slack = std::max(opts.monotone_slack, 8.0 * std::numeric_limits<double>::epsilon() * std::abs(E));
    if (std::isfinite(Ev) && Ev <= E + slack) {
      last_change = std::abs(E - Ev) / std::max(std::abs(E), 1e-300);
      u = std::move(v);
      E = Ev;
      ++rep.steps;
      if (opts.record_history) {
        const auto ce = constraint_errors(grid, u, p);
        rep.history.push_back({E, ce[0], ce[1], dt});
      }
      if (++streak >= 4) {
        dt = std::min(2.0 * dt, opts.dt);
        streak = 0;
      }
    } else {
      dt *= 0.5;
      streak = 0;
      if (dt < opts.dt_min) {
        rep.diagnostics = "step size fell below dt_min without reaching stationarity";
        if (!std::isfinite(Ev) && !std::isfinite(E)) rep.diverged = true;
        break;
      }
    }
  }
  if (!rep.converged && rep.diagnostics.empty()) rep.diagnostics = "max_steps reached";

  rep.state = std::move(u);
  rep.energy = amplitude_energy(grid, rep.state, p);
  const StateTriple G = energy_gradient(grid, rep.state, p);
  rep.multipliers = fit_multipliers(grid, rep.state, G, p);
  rep.el_residual = residual_from(grid, rep.state, G, rep.multipliers, p.N);
  rep.constraint_error = constraint_errors(grid, rep.state, p);
  if (!std::isfinite(rep.energy.total)) rep.diverged = true;
  if (p.c_n + std::min(p.c_s, 0.0) < 0.0 &&
      peak_cell_fraction(grid, total_density(rep.state), p.N) > 0.5) {
    rep.diverged = true;
    rep.diagnostics = "attractive coupling: state collapsed onto a single grid cell";
  }
  if (rep.diverged) rep.converged = false;
  return rep;
}

}  // namespace

InitKind default_init(double c_s) {
  return c_s > 0.0 ? InitKind::TwoComponentGaussian : InitKind::GammaStarGaussian;
}

std::array<double, 3> projection_scales(double m1, double m0, double mm1, double N, double M) {
  if (m1 < 0.0 || m0 < 0.0 || mm1 < 0.0) throw InfeasibleProjection("negative component mass");
  if (!(N > 0.0) || !(std::abs(M) < N)) throw InfeasibleProjection("need N > 0 and |M| < N");

  if (m0 == 0.0) {
    if (m1 == 0.0 || mm1 == 0.0) {
      throw InfeasibleProjection(
          "u0 vanishes and one of u1, u-1 is empty: the constraints need both +/-1 components");
    }
    return {std::sqrt((N + M) / (2.0 * m1)), 1.0, std::sqrt((N - M) / (2.0 * mm1))};
  }
  if (m1 == 0.0 && mm1 == 0.0) {
    if (M != 0.0) {
      throw InfeasibleProjection("only u0 is populated but M != 0 requires a +/-1 component");
    }
    return {1.0, std::sqrt(N / m0), 1.0};
  }
  if (m1 == 0.0) {
    if (M > 0.0) throw InfeasibleProjection("u1 is empty but M > 0");
    return {1.0, std::sqrt((N + M) / m0), std::sqrt(-M / mm1)};
  }
  if (mm1 == 0.0) {
    if (M < 0.0) throw InfeasibleProjection("u-1 is empty but M < 0");
    return {std::sqrt(M / m1), std::sqrt((N - M) / m0), 1.0};
  }

  // With a = s1^2, b = s-1^2: a = (M + b m-1) / m1 and the mass equation
  // M + 2 b m-1 + m0 sqrt(a b) = N is increasing in b.
  const auto phi = [&](double b) {
    const double a = std::max(0.0, (M + b * mm1) / m1);
    return 2.0 * b * mm1 + m0 * std::sqrt(a * b) - (N - M);
  };
  double lo = std::max(0.0, -M / mm1);
  double hi = (N - M) / (2.0 * mm1);
  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (phi(mid) < 0.0 ? lo : hi) = mid;
  }
  const double b = std::abs(phi(lo)) <= std::abs(phi(hi)) ? lo : hi;
  const double a = std::max(0.0, (M + b * mm1) / m1);
  return {std::sqrt(a), std::pow(a * b, 0.25), std::sqrt(b)};
}

StateTriple project_constraints(const Grid& grid, const StateTriple& v, const ModelParams& p) {
  check_state(grid, v);
  const auto s = projection_scales(integrate(grid, v.u1.cwiseAbs2()), integrate(grid, v.u0.cwiseAbs2()),
                                   integrate(grid, v.um1.cwiseAbs2()), p.N, p.M);
  return {s[0] * v.u1, s[1] * v.u0, s[2] * v.um1};
}

StateTriple flow_step(const Grid& grid, const StateTriple& u, const ModelParams& p, double dt) {
  if (!(dt > 0.0)) throw SolverError("dt must be positive");
  p.validate(grid);
  Preconditioner pre(grid);
  return tangent_step(grid, pre, u, energy_gradient(grid, u, p), p, dt);
}

Multipliers lagrange_multipliers(const Grid& grid, const StateTriple& u, const ModelParams& p) {
  return fit_multipliers(grid, u, energy_gradient(grid, u, p), p);
}

double el_residual(const Grid& grid, const StateTriple& u, const ModelParams& p,
                   const Multipliers& m) {
  return residual_from(grid, u, energy_gradient(grid, u, p), m, p.N);
}

RealField gaussian_profile(const Grid& grid, double mass) {
  RealField f(grid.size());
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    double r2 = 0.0;
    for (int a = 0; a < grid.dim(); ++a) {
      const auto& ax = grid.axis(a);
      const double sigma = (ax.hi - ax.lo) / 8.0;
      const double d = (grid.coordinate(i, a) - 0.5 * (ax.lo + ax.hi)) / sigma;
      r2 += d * d;
    }
    f[i] = std::exp(-0.5 * r2) * grid.free_mask()[i];
  }
  return f * std::sqrt(mass / integrate(grid, f.cwiseAbs2()));
}

StateTriple initial_state(const Grid& grid, const ModelParams& p, InitKind kind,
                          std::uint64_t seed, const std::optional<StateTriple>& custom) {
  p.validate(grid);
  const double m = p.magnetization_ratio();
  switch (kind) {
    case InitKind::GammaStarGaussian: {
      const RealField f = gaussian_profile(grid, p.N);
      const GammaTriple g = gamma_star(p);
      return {g.g1 * f, g.g0 * f, g.gm1 * f};
    }
    case InitKind::TwoComponentGaussian: {
      const RealField f = gaussian_profile(grid, p.N);
      return {std::sqrt(0.5 * (1.0 + m)) * f, RealField::Zero(grid.size()),
              std::sqrt(0.5 * (1.0 - m)) * f};
    }
    case InitKind::RandomPositive: {
      std::mt19937_64 rng(seed);
      StateTriple u;
      for (int j = 0; j < 3; ++j) u[j] = random_bumps(grid, rng);
      return project_constraints(grid, u, p);
    }
    case InitKind::Custom: {
      if (!custom) throw SolverError("custom initial state requested but none supplied");
      check_state(grid, *custom);
      StateTriple u = *custom;
      for (int j = 0; j < 3; ++j) {
        u[j] = (u[j].cwiseMax(0.0).array() * grid.free_mask().array()).matrix();
      }
      return project_constraints(grid, u, p);
    }
  }
  throw SolverError("unknown initial state kind");
}

SolveReport solve_ground_state(const Grid& grid, const ModelParams& p, const SolverOptions& opts) {
  p.validate(grid);
  if (!(opts.dt > 0.0) || !(opts.residual_tol > 0.0) || !(opts.energy_tol > 0.0)) {
    throw SolverError("dt and tolerances must be positive");
  }
  const InitKind first = opts.init.value_or(default_init(p.c_s));
  const int starts = std::max(1, opts.starts);
  if (starts == 1) return run_single_start(grid, p, opts, first, opts.seed);

  std::vector<std::future<SolveReport>> runs;
  for (int k = 0; k < starts; ++k) {
    const InitKind kind = k == 0 ? first : InitKind::RandomPositive;
    runs.push_back(std::async(std::launch::async, run_single_start, std::cref(grid), std::cref(p),
                              std::cref(opts), kind, opts.seed + static_cast<std::uint64_t>(k)));
  }
  std::vector<SolveReport> reports;
  for (auto& r : runs) reports.push_back(r.get());
  // Lowest energy wins; near-ties go to the lowest seed.
  std::size_t best = 0;
  for (std::size_t k = 1; k < reports.size(); ++k) {
    const double eb = reports[best].energy.total;
    const double ek = reports[k].energy.total;
    const bool tie = std::abs(ek - eb) <= 1e-12 * std::max(1.0, std::abs(eb));
    if (reports[k].diverged) continue;
    if (reports[best].diverged || (!tie && ek < eb) || (tie && reports[k].seed < reports[best].seed)) {
      best = k;
    }
  }
  return std::move(reports[best]);
}

SingleModeResult solve_single_mode(const Grid& grid, const ModelParams& p, const SolverOptions& opts,
                                   SingleModeCoupling coupling) {
  p.validate(grid);
  const double g = coupling == SingleModeCoupling::CnPlusCs ? p.c_n + p.c_s : p.c_n;
  const auto energy = [&](const RealField& f) { return single_mode_energy_with(grid, f, p.V, g); };
  const auto grad = [&](const RealField& f) -> RealField {
    return (grid.free_mask().array() *
            (-laplacian(grid, f).array() + p.V.array() * f.array() + 2.0 * g * f.array().cube()))
        .matrix();
  };

  SingleModeResult out;
  RealField f = gaussian_profile(grid, p.N);
  double E = energy(f);
  double dt = opts.dt;
  double last_change = 0.0;
  int streak = 0;
  Preconditioner pre(grid);
  const auto mu_of = [&](const RealField& ff, const RealField& G) {
    return integrate(grid, ff.cwiseProduct(G)) / integrate(grid, ff.cwiseAbs2());
  };
  const auto residual_of = [&](const RealField& ff, const RealField& G, double mu) {
    return std::sqrt(integrate(grid, (G - mu * ff).cwiseAbs2())) / std::sqrt(p.N);
  };
  if (opts.record_history) out.history.push_back({E, 0.0, 0.0, 0.0});

  for (int iter = 0; iter < opts.max_steps; ++iter) {
    const RealField G = grad(f);
    const double res = residual_of(f, G, mu_of(f, G));
    if (res <= opts.residual_tol && last_change <= opts.energy_tol) {
      out.converged = true;
      break;
    }
    RealField next;
    double En = std::numeric_limits<double>::infinity();
    pre.factorize(preconditioner_shift(p.V, f.cwiseAbs2(), std::max(g, 0.0)), dt);
    const RealField z = pre.solve(G);
    const RealField y = pre.solve(f);
    const double shift = integrate(grid, z.cwiseProduct(f)) / integrate(grid, y.cwiseProduct(f));
    next = ((f - dt * (z - shift * y)).cwiseMax(0.0).array() * grid.free_mask().array()).matrix();
    const double mass = integrate(grid, next.cwiseAbs2());
    if (mass > 0.0 && next.allFinite()) {
      next *= std::sqrt(p.N / mass);
      En = energy(next);
    }
    const double slack = std::max(opts.monotone_slack, 8.0 * std::numeric_limits<double>::epsilon() * std::abs(E));
    if (std::isfinite(En) && En <= E + slack) {
      last_change = std::abs(E - En) / std::max(std::abs(E), 1e-300);
      f = std::move(next);
      E = En;
      ++out.steps;
      if (opts.record_history) {
        out.history.push_back({E, std::abs(integrate(grid, f.cwiseAbs2()) - p.N) / p.N, 0.0, dt});
      }
      if (++streak >= 4) {
        dt = std::min(2.0 * dt, opts.dt);
        streak = 0;
      }
    } else {
      dt *= 0.5;
      streak = 0;
      if (dt < opts.dt_min) break;
    }
  }
  const RealField G = grad(f);
  out.mu = mu_of(f, G);
  out.residual = residual_of(f, G, out.mu);
  out.energy = energy(f);
  out.f = std::move(f);
  return out;
}

}  // namespace spin1
