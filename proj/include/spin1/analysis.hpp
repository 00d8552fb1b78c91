#pragma once

// Checks of computed ground states against their exact structure, which
// depends on the sign of c_s and on whether M vanishes.

#include "spin1/grid.hpp"
#include "spin1/model.hpp"
#include "spin1/solver.hpp"

#include <array>
#include <string>

namespace spin1 {

enum class Regime { FerroSMA, AntiferroVanishing, Degenerate };

Regime classify_regime(const ModelParams& p);
std::string to_string(Regime r);

enum class ComponentClass { Zero, Positive, Mixed };
std::string to_string(ComponentClass c);

struct SmaDeviation {
  /// sum_{j<k} int |u_j grad u_k - u_k grad u_j|^2 / N^2
  double wronskian = 0.0;
  /// max_j ||u_j - gamma*_j |u|||_2 / sqrt(N)
  double gamma_error = 0.0;
  /// int (u0^2 - 2 u1 u-1)^2 / N^2
  double pairing_error = 0.0;
};

SmaDeviation sma_deviation(const Grid& grid, const StateTriple& u, const ModelParams& p);

/// Zero when max u_j <= threshold sqrt(N/|D|), Positive when the minimum
/// over non-pinned nodes exceeds it, Mixed otherwise.
std::array<ComponentClass, 3> component_classification(const Grid& grid, const StateTriple& u,
                                                        double N, double threshold = 1e-6);

/// (t, sqrt(1 - 2t^2), t) f for M = 0 and 0 <= t <= 1/sqrt(2).
StateTriple degenerate_family(const Grid& grid, const RealField& f, double t, const ModelParams& p);

struct TwoComponentReport {
  double kappa = 0.0;  // ||u-1|| / ||u1||
  double mu = 0.0;
  double lambda = 0.0;
  double predicted_u1 = 0.0;  // sqrt(lambda / (2 c_s (1 - kappa^2)))
  double measured_u1 = 0.0;   // mean of u1 over free nodes
  double prediction_error = 0.0;
  double predicted_V = 0.0;   // mu - c_n (1 + kappa^2) lambda / (c_s (1 - kappa^2))
  double u1_variation = 0.0;  // coefficients of variation over free nodes
  double um1_variation = 0.0;
  double V_variation = 0.0;
  bool constant_state = false;  // all three variations <= 1e-6
  double gamma_error = 0.0;
};

/// A two-component ground state can only be single-mode when it is
/// constant. Requires c_s > 0, M != 0 and u0 classified Zero; throws
/// ModelError otherwise.
TwoComponentReport two_component_diagnostic(const Grid& grid, const StateTriple& u,
                                            const ModelParams& p, const Multipliers& m);

struct VerificationThresholds {
  double gamma_error = 1e-6;
  double u0_mass_fraction = 1e-8;
  double degenerate_energy = 1e-8;
  double classification = 1e-6;
};

struct VerificationReport {
  Regime regime = Regime::Degenerate;
  SmaDeviation sma;
  double u0_mass_fraction = 0.0;
  std::array<ComponentClass, 3> component_class{};
  bool dichotomy_consistent = true;  // no Mixed component
  double energy = 0.0;
  /// Degenerate regime only: energy of the spin-free single-mode minimizer.
  double reference_energy = 0.0;
  double reference_gap = 0.0;
  bool verdict = false;
  std::string criterion;
};

/// Regime-dependent verdict. The Degenerate regime runs a single-mode
/// reference solve with `reference` options.
VerificationReport verify(const Grid& grid, const StateTriple& u, const ModelParams& p,
                          const SolverOptions& reference = {},
                          const VerificationThresholds& thresholds = {});

}  // namespace spin1
