#include "spin1/analysis.hpp"

#include "spin1/redistribute.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace spin1 {

Regime classify_regime(const ModelParams& p) {
  if (p.c_s < 0.0) return Regime::FerroSMA;
  if (p.c_s > 0.0 && p.M != 0.0) return Regime::AntiferroVanishing;
  return Regime::Degenerate;
}

std::string to_string(Regime r) {
  switch (r) {
    case Regime::FerroSMA: return "FerroSMA";
    case Regime::AntiferroVanishing: return "AntiferroVanishing";
    case Regime::Degenerate: return "Degenerate";
  }
  return "?";
}

std::string to_string(ComponentClass c) {
  switch (c) {
    case ComponentClass::Zero: return "Zero";
    case ComponentClass::Positive: return "Positive";
    case ComponentClass::Mixed: return "Mixed";
  }
  return "?";
}

SmaDeviation sma_deviation(const Grid& grid, const StateTriple& u, const ModelParams& p) {
  check_state(grid, u);
  SmaDeviation out;
  for (int a = 0; a < grid.dim(); ++a) {
    const StateTriple d{gradient(grid, u.u1, a), gradient(grid, u.u0, a), gradient(grid, u.um1, a)};
    for (int j = 0; j < 3; ++j) {
      for (int k = j + 1; k < 3; ++k) {
        const RealField w = u[j].cwiseProduct(d[k]) - u[k].cwiseProduct(d[j]);
        out.wronskian += integrate(grid, w.cwiseAbs2());
      }
    }
  }
  out.wronskian /= p.N * p.N;

  const GammaTriple g = gamma_star(p);
  const RealField mod = amplitude(u);
  for (int j = 0; j < 3; ++j) {
    const double e = std::sqrt(integrate(grid, (u[j] - g[j] * mod).cwiseAbs2()) / p.N);
    out.gamma_error = std::max(out.gamma_error, e);
  }
  const RealField pairing =
      u.u0.cwiseAbs2() - 2.0 * u.u1.cwiseProduct(u.um1);
  out.pairing_error = integrate(grid, pairing.cwiseAbs2()) / (p.N * p.N);
  return out;
}

std::array<ComponentClass, 3> component_classification(const Grid& grid, const StateTriple& u,
                                                        double N, double threshold) {
  check_state(grid, u);
  const double level = threshold * std::sqrt(N / grid.volume());
  std::array<ComponentClass, 3> out{};
  for (int j = 0; j < 3; ++j) {
    if (u[j].maxCoeff() <= level) {
      out[j] = ComponentClass::Zero;
      continue;
    }
    double lowest = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < grid.size(); ++i) {
      if (grid.free_mask()[i] != 0.0) lowest = std::min(lowest, u[j][i]);
    }
    out[j] = lowest > level ? ComponentClass::Positive : ComponentClass::Mixed;
  }
  return out;
}

StateTriple degenerate_family(const Grid& grid, const RealField& f, double t, const ModelParams& p) {
  if (p.M != 0.0) throw ModelError("degenerate family requires M = 0");
  if (!(t >= 0.0) || !(t <= 1.0 / std::numbers::sqrt2)) {
    throw ModelError("degenerate family parameter must lie in [0, 1/sqrt(2)]");
  }
  check_field(grid, f);
  const double mass = integrate(grid, f.cwiseAbs2());
  if (std::abs(mass - p.N) > 1e-8 * p.N) throw ModelError("profile must satisfy int f^2 = N");
  const double mid = std::sqrt(std::max(0.0, 1.0 - 2.0 * t * t));
  return {t * f, mid * f, t * f};
}

namespace {

double variation(const Grid& grid, const RealField& f) {
  double sum = 0.0, sq = 0.0;
  int n = 0;
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    if (grid.free_mask()[i] == 0.0) continue;
    sum += f[i];
    sq += f[i] * f[i];
    ++n;
  }
  const double mean = sum / n;
  const double sd = std::sqrt(std::max(0.0, sq / n - mean * mean));
  if (sd == 0.0) return 0.0;
  return sd / std::abs(mean);
}

double free_mean(const Grid& grid, const RealField& f) {
  double sum = 0.0;
  int n = 0;
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    if (grid.free_mask()[i] == 0.0) continue;
    sum += f[i];
    ++n;
  }
  return sum / n;
}

}  // namespace

TwoComponentReport two_component_diagnostic(const Grid& grid, const StateTriple& u,
                                            const ModelParams& p, const Multipliers& m) {
  if (!(p.c_s > 0.0) || p.M == 0.0) throw ModelError("diagnostic requires c_s > 0 and M != 0");
  if (component_classification(grid, u, p.N)[1] != ComponentClass::Zero) {
    throw ModelError("diagnostic requires a vanishing u0 component");
  }
  TwoComponentReport r;
  r.mu = m.mu;
  r.lambda = m.lambda;
  const double n1 = std::sqrt(integrate(grid, u.u1.cwiseAbs2()));
  const double nm1 = std::sqrt(integrate(grid, u.um1.cwiseAbs2()));
  r.kappa = nm1 / n1;
  const double k2 = r.kappa * r.kappa;
  r.predicted_u1 = std::sqrt(m.lambda / (2.0 * p.c_s * (1.0 - k2)));
  r.measured_u1 = free_mean(grid, u.u1);
  r.prediction_error = std::abs(r.predicted_u1 - r.measured_u1) / r.measured_u1;
  r.predicted_V = m.mu - p.c_n * (1.0 + k2) * m.lambda / (p.c_s * (1.0 - k2));
  r.u1_variation = variation(grid, u.u1);
  r.um1_variation = variation(grid, u.um1);
  r.V_variation = variation(grid, p.V);
  r.constant_state = r.u1_variation <= 1e-6 && r.um1_variation <= 1e-6 && r.V_variation <= 1e-6;
  r.gamma_error = sma_deviation(grid, u, p).gamma_error;
  return r;
}

VerificationReport verify(const Grid& grid, const StateTriple& u, const ModelParams& p,
                          const SolverOptions& reference, const VerificationThresholds& thresholds) {
  p.validate(grid);
  VerificationReport r;
  r.regime = classify_regime(p);
  r.sma = sma_deviation(grid, u, p);
  r.u0_mass_fraction = integrate(grid, u.u0.cwiseAbs2()) / p.N;
  r.component_class = component_classification(grid, u, p.N, thresholds.classification);
  r.dichotomy_consistent = std::none_of(r.component_class.begin(), r.component_class.end(),
                                     [](ComponentClass c) { return c == ComponentClass::Mixed; });
  r.energy = amplitude_energy(grid, u, p).total;
  switch (r.regime) {
    case Regime::FerroSMA:
      r.verdict = r.sma.gamma_error <= thresholds.gamma_error;
      r.criterion = "gamma_error <= " + std::to_string(thresholds.gamma_error);
      break;
    case Regime::AntiferroVanishing:
      r.verdict = r.u0_mass_fraction <= thresholds.u0_mass_fraction;
      r.criterion = "u0_mass_fraction <= " + std::to_string(thresholds.u0_mass_fraction);
      break;
    case Regime::Degenerate: {
      const auto ref = solve_single_mode(grid, p, reference, SingleModeCoupling::CnOnly);
      r.reference_energy = ref.energy;
      r.reference_gap = std::abs(r.energy - ref.energy) / std::abs(ref.energy);
      r.verdict = r.reference_gap <= thresholds.degenerate_energy;
      r.criterion = "relative gap to spin-free single-mode energy <= " +
                    std::to_string(thresholds.degenerate_energy);
      break;
    }
  }
  return r;
}

}  // namespace spin1
