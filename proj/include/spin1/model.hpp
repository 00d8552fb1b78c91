#pragma once

// Energy functionals of the spin-1 condensate in dimensionless form. The
// complex energy E[Psi] reduces to an energy of nonnegative amplitude
// triples, which is what the solver minimizes.

#include "spin1/grid.hpp"

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace spin1 {

class ModelError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Three components ordered (m_F = 1, 0, -1).
template <typename Scalar>
struct Triple {
  Field<Scalar> u1;
  Field<Scalar> u0;
  Field<Scalar> um1;

  Field<Scalar>& operator[](int j) { return j == 0 ? u1 : (j == 1 ? u0 : um1); }
  const Field<Scalar>& operator[](int j) const { return j == 0 ? u1 : (j == 1 ? u0 : um1); }

  static Triple Zero(Eigen::Index n) {
    return {Field<Scalar>::Zero(n), Field<Scalar>::Zero(n), Field<Scalar>::Zero(n)};
  }
};

/// Amplitude triple (u1, u0, u-1); nonnegative by contract.
using StateTriple = Triple<double>;
/// Complex spinor (psi1, psi0, psi-1).
using WaveFunction = Triple<std::complex<double>>;

struct ModelParams {
  double c_n = 0.0;
  double c_s = 0.0;
  RealField V;
  double N = 1.0;
  double M = 0.0;

  double magnetization_ratio() const { return M / N; }
  /// Throws ModelError unless N > 0, |M| < N and V is finite on `grid`.
  void validate(const Grid& grid) const;
};

inline void ModelParams::validate(const Grid& grid) const {
  if (!(N > 0.0)) throw ModelError("total mass N must be positive");
  if (!(std::abs(M) < N)) throw ModelError("magnetization must satisfy |M| < N");
  if (!std::isfinite(c_n) || !std::isfinite(c_s)) throw ModelError("couplings must be finite");
  if (V.size() != grid.size()) throw ModelError("potential does not match grid");
  if (!V.allFinite()) throw ModelError("potential contains non-finite values");
}

/// Sign in front of u-1 in the reduced spin term: +1 for c_s <= 0
/// (ferromagnetic, and by convention c_s = 0), -1 for c_s > 0.
struct SignConvention {
  int sign = 1;
  static SignConvention for_coupling(double c_s) { return {c_s > 0.0 ? -1 : 1}; }
};

struct EnergyBreakdown {
  double kinetic = 0.0;
  double potential = 0.0;
  double density_interaction = 0.0;
  double spin_interaction = 0.0;
  double total = 0.0;
};

struct PhaseTriple {
  double theta1 = 0.0;
  double theta0 = 0.0;
  double thetam1 = 0.0;
};

inline void check_state(const Grid& grid, const StateTriple& u, double tol = 1e-12) {
  for (int j = 0; j < 3; ++j) {
    check_field(grid, u[j]);
    if (u[j].size() > 0 && u[j].minCoeff() < -tol) {
      throw ModelError("component " + std::to_string(1 - j) + " has negative values");
    }
  }
}

/// Pointwise spin integrand 2 u0^2 (u1 +/- u-1)^2 + (u1^2 - u-1^2)^2.
inline RealField spin_density(const StateTriple& u, SignConvention sc) {
  const auto u1 = u.u1.array();
  const auto u0 = u.u0.array();
  const auto um1 = u.um1.array();
  return (2.0 * u0.square() * (u1 + sc.sign * um1).square() +
          (u1.square() - um1.square()).square())
      .matrix();
}

inline RealField total_density(const StateTriple& u) {
  return (u.u1.array().square() + u.u0.array().square() + u.um1.array().square()).matrix();
}

/// Reduced energy over amplitude triples.
inline EnergyBreakdown amplitude_energy(const Grid& grid, const StateTriple& u,
                                        const ModelParams& p) {
  check_state(grid, u);
  const auto sc = SignConvention::for_coupling(p.c_s);
  const RealField rho = total_density(u);
  EnergyBreakdown e;
  e.kinetic = kinetic_energy(grid, u.u1) + kinetic_energy(grid, u.u0) + kinetic_energy(grid, u.um1);
  e.potential = integrate(grid, (p.V.array() * rho.array()).matrix());
  e.density_interaction = p.c_n * integrate(grid, rho.cwiseAbs2());
  e.spin_interaction = p.c_s * integrate(grid, spin_density(u, sc));
  e.total = e.kinetic + e.potential + e.density_interaction + e.spin_interaction;
  return e;
}

/// Right-hand sides of the coupled Euler-Lagrange system, i.e. the fields
/// G_j with d/de E[u + e w] = 2 sum_j <G_j, w_j>. Rows of pinned Dirichlet
/// nodes are zero.
inline StateTriple energy_gradient(const Grid& grid, const StateTriple& u, const ModelParams& p) {
  check_state(grid, u);
  const double s = SignConvention::for_coupling(p.c_s).sign;
  const auto u1 = u.u1.array();
  const auto u0 = u.u0.array();
  const auto um1 = u.um1.array();
  const Eigen::ArrayXd rho = u1.square() + u0.square() + um1.square();
  const Eigen::ArrayXd linear = p.V.array() + 2.0 * p.c_n * rho;
  const Eigen::ArrayXd mask = grid.free_mask().array();

  StateTriple g;
  g.u1 = (mask * (-laplacian(grid, u.u1).array() + linear * u1 +
                  2.0 * p.c_s * (u0.square() * (u1 + s * um1) + u1 * (u1.square() - um1.square()))))
             .matrix();
  g.u0 = (mask * (-laplacian(grid, u.u0).array() + linear * u0 +
                  2.0 * p.c_s * u0 * (u1 + s * um1).square()))
             .matrix();
  g.um1 = (mask * (-laplacian(grid, u.um1).array() + linear * um1 +
                   2.0 * p.c_s * (u0.square() * (um1 + s * u1) + um1 * (um1.square() - u1.square()))))
              .matrix();
  return g;
}

namespace detail {
inline void check_single_mode(const Grid& grid, const RealField& f, double N) {
  check_field(grid, f);
  if (f.minCoeff() < -1e-12) throw ModelError("single-mode profile must be nonnegative");
  const double mass = integrate(grid, f.cwiseAbs2());
  if (std::abs(mass - N) > 1e-8 * N) {
    throw ModelError("single-mode profile violates the mass constraint: integral of f^2 = " +
                     std::to_string(mass) + ", expected " + std::to_string(N));
  }
}
}  // namespace detail

/// One-component energy with quartic coefficient `quartic`.
inline double single_mode_energy_with(const Grid& grid, const RealField& f, const RealField& V,
                                      double quartic) {
  const RealField f2 = f.cwiseAbs2();
  return kinetic_energy(grid, f) + integrate(grid, (V.array() * f2.array()).matrix()) +
         quartic * integrate(grid, f2.cwiseAbs2());
}

/// Single-mode energy, quartic coefficient c_n + c_s.
inline double single_mode_energy(const Grid& grid, const RealField& f, const ModelParams& p) {
  detail::check_single_mode(grid, f, p.N);
  return single_mode_energy_with(grid, f, p.V, p.c_n + p.c_s);
}

/// Spin-free single-mode energy, quartic coefficient c_n.
inline double degenerate_energy(const Grid& grid, const RealField& f, const ModelParams& p) {
  detail::check_single_mode(grid, f, p.N);
  return single_mode_energy_with(grid, f, p.V, p.c_n);
}

/// True when cos(theta1 - 2 theta0 + theta-1) equals the value required by
/// the sign of c_s (either +1 or -1 when c_s = 0).
inline bool phases_admissible(const PhaseTriple& th, double c_s, double tol = 1e-10) {
  const double c = std::cos(th.theta1 - 2.0 * th.theta0 + th.thetam1);
  if (c_s < 0.0) return std::abs(c - 1.0) <= tol;
  if (c_s > 0.0) return std::abs(c + 1.0) <= tol;
  return std::abs(std::abs(c) - 1.0) <= tol;
}

inline WaveFunction assemble_wavefunction(const StateTriple& u, const PhaseTriple& th, double c_s) {
  if (!phases_admissible(th, c_s)) {
    throw ModelError("phases violate cos(theta1 - 2 theta0 + theta-1) = " +
                     std::string(c_s < 0.0 ? "+1" : (c_s > 0.0 ? "-1" : "+/-1")));
  }
  const std::array<double, 3> theta{th.theta1, th.theta0, th.thetam1};
  WaveFunction psi;
  for (int j = 0; j < 3; ++j) {
    psi[j] = u[j].cast<std::complex<double>>() * std::polar(1.0, theta[j]);
  }
  return psi;
}

/// Spin-1 matrices S_x, S_y, S_z in the (1, 0, -1) basis.
inline std::array<Eigen::Matrix3cd, 3> spin_matrices() {
  using C = std::complex<double>;
  const double r = 1.0 / std::numbers::sqrt2;
  const C i(0.0, 1.0);
  Eigen::Matrix3cd sx, sy, sz;
  sx << 0, r, 0, r, 0, r, 0, r, 0;
  sy << C(0), -i * r, C(0), i * r, C(0), -i * r, C(0), i * r, C(0);
  sz << 1, 0, 0, 0, 0, 0, 0, 0, -1;
  return {sx, sy, sz};
}

/// Full energy of a complex spinor with the spin density |Psi^* S Psi|^2
/// evaluated from the explicit spin matrices.
inline double complex_energy(const Grid& grid, const WaveFunction& psi, const ModelParams& p) {
  for (int j = 0; j < 3; ++j) check_field(grid, psi[j]);
  const auto S = spin_matrices();
  RealField rho(grid.size()), spin(grid.size());
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    const Eigen::Vector3cd v(psi.u1[i], psi.u0[i], psi.um1[i]);
    rho[i] = v.squaredNorm();
    double s2 = 0.0;
    for (const auto& Sa : S) s2 += std::norm(v.dot(Sa * v));
    spin[i] = s2;
  }
  double kinetic = 0.0;
  for (int j = 0; j < 3; ++j) kinetic += kinetic_energy(grid, psi[j]);
  return kinetic + integrate(grid, (p.V.array() * rho.array()).matrix()) +
         p.c_n * integrate(grid, rho.cwiseAbs2()) + p.c_s * integrate(grid, spin);
}

struct ConstraintValues {
  double mass = 0.0;
  double magnetization = 0.0;
};

template <typename Scalar>
ConstraintValues constraint_values(const Grid& grid, const Triple<Scalar>& u) {
  const RealField a1 = u.u1.cwiseAbs2();
  const RealField a0 = u.u0.cwiseAbs2();
  const RealField am1 = u.um1.cwiseAbs2();
  const double m1 = integrate(grid, a1);
  const double m0 = integrate(grid, a0);
  const double mm1 = integrate(grid, am1);
  return {m1 + m0 + mm1, m1 - mm1};
}

}  // namespace spin1
