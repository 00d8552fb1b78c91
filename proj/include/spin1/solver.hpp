#pragma once

// Ground states by a preconditioned, normalized gradient flow. A step
// follows the constraint-tangent part of the energy gradient, then clips
// to nonnegative amplitudes and rescales back onto the constraints.

#include "spin1/grid.hpp"
#include "spin1/model.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace spin1 {

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The constraints cannot be met by rescaling (e.g. u1 = 0 but M > 0).
class InfeasibleProjection : public SolverError {
 public:
  using SolverError::SolverError;
};

/// A flow step produced non-finite values.
class DivergenceError : public SolverError {
 public:
  using SolverError::SolverError;
};

enum class InitKind { GammaStarGaussian, TwoComponentGaussian, RandomPositive, Custom };

/// GammaStarGaussian for c_s <= 0, TwoComponentGaussian for c_s > 0.
InitKind default_init(double c_s);

struct SolverOptions {
  /// Initial (and largest) flow step.
  double dt = 10.0;
  int max_steps = 400000;
  /// Relative energy change of the last accepted step required for convergence.
  double energy_tol = 1e-12;
  /// Stationarity threshold on el_residual.
  double residual_tol = 1e-9;
  std::uint64_t seed = 1;
  /// Empty selects default_init(c_s).
  std::optional<InitKind> init;
  std::optional<StateTriple> custom_state;
  /// Number of independent starts; start k > 0 is RandomPositive with seed + k.
  int starts = 1;
  bool record_history = false;
  /// Steps shrink by half on an energy increase; below this the run stops.
  double dt_min = 1e-10;
  /// Absolute slack allowed in the energy-decrease acceptance test; raised
  /// to 8 ulps of the current energy when that is larger.
  double monotone_slack = 1e-13;
};

struct Multipliers {
  double mu = 0.0;
  double lambda = 0.0;

  /// Coefficient of u_j in the Euler-Lagrange system: mu + lambda, mu, mu - lambda.
  double coefficient(int j) const { return mu + (1 - j) * lambda; }
};

struct FlowRecord {
  double energy = 0.0;
  double mass_error = 0.0;           // |mass - N| / N
  double magnetization_error = 0.0;  // |magnetization - M| / N
  double dt = 0.0;
};

struct SolveReport {
  StateTriple state;
  EnergyBreakdown energy;
  Multipliers multipliers;
  double el_residual = 0.0;
  std::array<double, 2> constraint_error{0.0, 0.0};
  int steps = 0;
  bool converged = false;
  bool diverged = false;
  std::uint64_t seed = 0;
  std::string diagnostics;
  std::vector<FlowRecord> history;
};

/// Nonnegative scales (s1, s0, s-1) with s1^2 m1 + s0^2 m0 + s-1^2 m-1 = N,
/// s1^2 m1 - s-1^2 m-1 = M and, when m0 > 0, s0^2 = s1 s-1.
std::array<double, 3> projection_scales(double m1, double m0, double mm1, double N, double M);

StateTriple project_constraints(const Grid& grid, const StateTriple& v, const ModelParams& p);

/// One preconditioned flow step of size dt (no step-size control).
/// Throws DivergenceError on non-finite output.
StateTriple flow_step(const Grid& grid, const StateTriple& u, const ModelParams& p, double dt);

/// Least-squares fit of (mu, lambda) to <u_j, G_j> = c_j(mu, lambda) <u_j, u_j>,
/// skipping components with mass below 1e-12 N. The minimum-norm solution
/// is returned when only one component is present.
Multipliers lagrange_multipliers(const Grid& grid, const StateTriple& u, const ModelParams& p);

/// sqrt(sum_j int |G_j - c_j u_j|^2) / sqrt(N).
double el_residual(const Grid& grid, const StateTriple& u, const ModelParams& p,
                   const Multipliers& m);

StateTriple initial_state(const Grid& grid, const ModelParams& p, InitKind kind,
                          std::uint64_t seed, const std::optional<StateTriple>& custom = {});

/// Normalized Gaussian centred in the box with sigma = extent / 8 per
/// axis, vanishing on pinned Dirichlet nodes.
RealField gaussian_profile(const Grid& grid, double mass);

SolveReport solve_ground_state(const Grid& grid, const ModelParams& p, const SolverOptions& opts);

enum class SingleModeCoupling { CnPlusCs, CnOnly };

struct SingleModeResult {
  RealField f;
  double energy = 0.0;
  double mu = 0.0;
  double residual = 0.0;
  int steps = 0;
  bool converged = false;
  std::vector<FlowRecord> history;
};

/// Minimizer of int |grad f|^2 + V f^2 + g f^4 over f >= 0, int f^2 = N,
/// with g = c_n + c_s or g = c_n.
SingleModeResult solve_single_mode(const Grid& grid, const ModelParams& p, const SolverOptions& opts,
                                   SingleModeCoupling coupling);

struct BruteForceOptions {
  int starts = 50;
  std::uint64_t seed = 2024;
  int max_iterations = 4000;
};

/// Direct minimization of the discrete reduced energy over all nodal
/// values of a desk-scale 1D grid (at most 9 free nodes). Constraints are
/// eliminated by parameterizing the u0 mass share and the three normalized
/// component shapes; each start runs BFGS on finite-difference gradients.
StateTriple brute_force_ground_state(const Grid& grid, const ModelParams& p,
                                     const BruteForceOptions& opts = {});

}  // namespace spin1
