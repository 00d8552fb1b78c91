#include "spin1/model.hpp"
#include "spin1/redistribute.hpp"
#include "support.hpp"

#include <doctest.h>

#include <numbers>
#include <random>
#include <vector>

using namespace spin1;
using spin1::test::rel;

namespace {

// Plain-loop evaluation of the reduced energy on a 1D grid, written out
// term by term with its own trapezoid weights.
double energy_oracle(double lo, double hi, int n, const StateTriple& u,
                     const std::vector<double>& V, double c_n, double c_s) {
  const double h = (hi - lo) / (n - 1);
  double kin = 0.0, rest = 0.0;
  for (int i = 0; i + 1 < n; ++i) {
    for (int j = 0; j < 3; ++j) kin += std::pow(u[j][i + 1] - u[j][i], 2) / h;
  }
  for (int i = 0; i < n; ++i) {
    const double w = (i == 0 || i == n - 1) ? h / 2 : h;
    const double a = u.u1[i], b = u.u0[i], c = u.um1[i];
    const double rho = a * a + b * b + c * c;
    const double cross = c_s > 0 ? (a - c) * (a - c) : (a + c) * (a + c);
    const double spin = 2 * b * b * cross + std::pow(a * a - c * c, 2);
    rest += w * (V[i] * rho + c_n * rho * rho + c_s * spin);
  }
  return kin + rest;
}

}  // namespace

TEST_SUITE("model") {

TEST_CASE("zero state has zero energy and gradient") {
  const Grid g = build_grid_1d(-4, 4, 33, Boundary::Dirichlet);
  const auto p = test::harmonic_params(g, 3.0, -1.0, 1.0, 0.2);
  const auto e = amplitude_energy(g, StateTriple::Zero(g.size()), p);
  CHECK(e.total == 0.0);
  CHECK(e.kinetic == 0.0);
  const auto G = energy_gradient(g, StateTriple::Zero(g.size()), p);
  for (int j = 0; j < 3; ++j) CHECK(G[j].cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("constant gamma* state on a flat box") {
  const Grid g = build_grid_1d(0, 1, 17, Boundary::Neumann);
  const auto p = test::flat_params(g, 2.0, -1.0, 1.0, 0.0);
  const auto gs = gamma_star(p);
  StateTriple u;
  for (int j = 0; j < 3; ++j) u[j] = RealField::Constant(g.size(), gs[j]);
  const auto e = amplitude_energy(g, u, p);
  CHECK(e.total == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(e.kinetic == 0.0);
  CHECK(rel(e.kinetic + e.potential + e.density_interaction + e.spin_interaction, e.total) < 1e-12);
}

TEST_CASE("amplitude energy matches an independent integrand") {
  std::mt19937_64 rng(5);
  for (double c_s : {-0.7, 1.3}) {
    for (auto bc : {Boundary::Dirichlet, Boundary::Neumann}) {
      const Grid g = build_grid_1d(-3, 3, 64, bc);
      const auto p = test::harmonic_params(g, 5.0, c_s, 1.0, 0.25);
      const auto u = test::random_admissible(g, p, rng);
      const std::vector<double> V(p.V.data(), p.V.data() + p.V.size());
      const double want = energy_oracle(-3, 3, 64, u, V, p.c_n, p.c_s);
      CHECK(rel(amplitude_energy(g, u, p).total, want) < 1e-12);
    }
  }
}

TEST_CASE("spin term sign follows the coupling") {
  const Grid g = build_grid_1d(0, 1, 9, Boundary::Neumann);
  StateTriple u;
  u.u1 = RealField::Constant(g.size(), 0.6);
  u.u0 = RealField::Constant(g.size(), 0.5);
  u.um1 = RealField::Constant(g.size(), 0.3);
  const double plus = 2 * 0.25 * 0.81 + std::pow(0.36 - 0.09, 2);
  const double minus = 2 * 0.25 * 0.09 + std::pow(0.36 - 0.09, 2);
  CHECK(spin_density(u, SignConvention::for_coupling(-1))[0] == doctest::Approx(plus));
  CHECK(spin_density(u, SignConvention::for_coupling(1))[0] == doctest::Approx(minus));
  CHECK(SignConvention::for_coupling(0).sign == 1);
}

TEST_CASE("negative amplitudes are rejected") {
  const Grid g = build_grid_1d(0, 1, 9, Boundary::Neumann);
  const auto p = test::flat_params(g, 1.0, 1.0, 1.0, 0.0);
  StateTriple u = StateTriple::Zero(g.size());
  u.u0[3] = -1e-11;
  CHECK_THROWS_AS(amplitude_energy(g, u, p), ModelError);
  u.u0[3] = -1e-13;
  CHECK_NOTHROW(amplitude_energy(g, u, p));
}

TEST_CASE("gradient matches central finite differences") {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> n;
  for (double c_s : {-1.0, 0.0, 2.0}) {
    for (auto bc : {Boundary::Dirichlet, Boundary::Neumann}) {
      const Grid g = build_grid_1d(-4, 4, 48, bc);
      const auto p = test::harmonic_params(g, 10.0, c_s, 1.0, 0.3);
      const auto u = test::random_admissible(g, p, rng);
      StateTriple w;
      for (int j = 0; j < 3; ++j) {
        w[j] = RealField::NullaryExpr(g.size(), [&] { return n(rng); }).cwiseProduct(g.free_mask());
      }
      const double eps = 1e-5;
      auto shifted = [&](double s) {
        StateTriple v;
        for (int j = 0; j < 3; ++j) v[j] = u[j] + s * w[j];
        // Directional derivatives only need the formula, not admissibility.
        ModelParams q = p;
        const auto sc = SignConvention::for_coupling(q.c_s);
        const RealField rho = total_density(v);
        double e = 0.0;
        for (int j = 0; j < 3; ++j) e += kinetic_energy(g, v[j]);
        e += integrate(g, (q.V.array() * rho.array()).matrix().eval());
        e += q.c_n * integrate(g, rho.cwiseAbs2().eval()) + q.c_s * integrate(g, spin_density(v, sc));
        return e;
      };
      const double fd = (shifted(eps) - shifted(-eps)) / (2 * eps);
      const auto G = energy_gradient(g, u, p);
      double exact = 0.0;
      for (int j = 0; j < 3; ++j) exact += 2.0 * integrate(g, G[j].cwiseProduct(w[j]).eval());
      CHECK(rel(fd, exact) < 1e-6);
    }
  }
}

TEST_CASE("spin-free single component gradient decouples") {
  const Grid g = build_grid_1d(-4, 4, 40, Boundary::Dirichlet);
  const auto p = test::harmonic_params(g, 4.0, 0.0, 1.0, 0.0);
  std::mt19937_64 rng(2);
  StateTriple u = StateTriple::Zero(g.size());
  u.u1 = test::random_field(g, rng);
  const auto G = energy_gradient(g, u, p);
  const RealField L = (-laplacian(g, u.u1).array() + p.V.array() * u.u1.array() +
                       2.0 * p.c_n * u.u1.array().cube())
                          .matrix()
                          .cwiseProduct(g.free_mask());
  CHECK((G.u1 - L).cwiseAbs().maxCoeff() < 1e-12 * L.cwiseAbs().maxCoeff());
  CHECK(G.u0.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("single-mode energies") {
  const Grid g = build_grid_1d(0, 1, 21, Boundary::Neumann);
  const auto p = test::flat_params(g, 3.0, -1.0, 1.0, 0.0);
  const RealField f = RealField::Ones(g.size());
  CHECK(single_mode_energy(g, f, p) == doctest::Approx(2.0));
  CHECK(degenerate_energy(g, f, p) == doctest::Approx(3.0));
  CHECK_THROWS_AS(single_mode_energy(g, (1.1 * f).eval(), p), ModelError);

  std::mt19937_64 rng(9);
  const Grid gh = build_grid_1d(-5, 5, 101, Boundary::Dirichlet);
  for (double M : {0.0, 0.4, -0.7}) {
    const auto q = test::harmonic_params(gh, 20.0, -2.0, 1.0, M);
    RealField h = test::random_field(gh, rng);
    h *= std::sqrt(q.N / integrate(gh, h.cwiseAbs2().eval()));
    const auto gs = gamma_star(q);
    const StateTriple u{gs.g1 * h, gs.g0 * h, gs.gm1 * h};
    CHECK(rel(amplitude_energy(gh, u, q).total, single_mode_energy(gh, h, q)) < 1e-12);
    ModelParams free = q;
    free.c_s = 0.0;
    CHECK(degenerate_energy(gh, h, q) == doctest::Approx(single_mode_energy(gh, h, free)).epsilon(1e-14));
  }
}

TEST_CASE("degenerate family energy is t-independent") {
  std::mt19937_64 rng(4);
  const Grid g = build_grid_1d(-5, 5, 101, Boundary::Dirichlet);
  const auto p = test::harmonic_params(g, 20.0, 1.5, 1.0, 0.0);
  RealField f = test::random_field(g, rng);
  f *= std::sqrt(p.N / integrate(g, f.cwiseAbs2().eval()));
  for (double t : {0.0, 0.2, 0.5, 1.0 / std::numbers::sqrt2}) {
    const double m = std::sqrt(std::max(0.0, 1 - 2 * t * t));
    const StateTriple u{t * f, m * f, t * f};
    CHECK(rel(amplitude_energy(g, u, p).total, degenerate_energy(g, f, p)) < 1e-12);
  }
}

TEST_CASE("phase admissibility") {
  const Grid g = build_grid_1d(0, 1, 9, Boundary::Neumann);
  const StateTriple u{RealField::Ones(9), RealField::Ones(9), RealField::Ones(9)};
  CHECK_NOTHROW(assemble_wavefunction(u, {0, 0, 0}, -1.0));
  CHECK_NOTHROW(assemble_wavefunction(u, {std::numbers::pi, 0, 0}, 1.0));
  CHECK_THROWS_AS(assemble_wavefunction(u, {std::numbers::pi / 2, 0, 0}, -1.0), ModelError);
  CHECK_THROWS_AS(assemble_wavefunction(u, {0, 0, 0}, 1.0), ModelError);
  CHECK_NOTHROW(assemble_wavefunction(u, {0, 0, 0}, 0.0));
  CHECK_NOTHROW(assemble_wavefunction(u, {std::numbers::pi, 0, 0}, 0.0));
}

TEST_CASE("complex energy equals the amplitude energy for admissible phases") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> ang(-3.0, 3.0);
  const Grid g = build_grid_1d(-4, 4, 50, Boundary::Dirichlet);
  for (double c_s : {-1.0, 1.0}) {
    const auto p = test::harmonic_params(g, 10.0, c_s, 1.0, 0.1);
    for (int k = 0; k < 10; ++k) {
      const auto u = test::random_admissible(g, p, rng);
      PhaseTriple th{ang(rng), ang(rng), 0.0};
      th.thetam1 = 2 * th.theta0 - th.theta1 + (c_s > 0 ? std::numbers::pi : 0.0);
      const auto psi = assemble_wavefunction(u, th, c_s);
      CHECK(rel(complex_energy(g, psi, p), amplitude_energy(g, u, p).total) < 1e-10);
    }
  }
}

TEST_CASE("complex energy special cases") {
  const Grid g = build_grid_1d(-2, 2, 30, Boundary::Dirichlet);
  auto p = test::harmonic_params(g, 0.0, 1.7, 1.0, 0.0);
  p.V.setZero();
  std::mt19937_64 rng(1);
  const RealField f = test::random_field(g, rng);
  WaveFunction psi = WaveFunction::Zero(g.size());
  CHECK(complex_energy(g, psi, p) == 0.0);
  psi.u1 = f.cast<std::complex<double>>();
  const double want = kinetic_energy(g, f) + 1.7 * integrate(g, f.array().pow(4).matrix().eval());
  CHECK(rel(complex_energy(g, psi, p), want) < 1e-13);
}

TEST_CASE("constraint values") {
  const Grid g = build_grid_1d(-5, 5, 101, Boundary::Dirichlet);
  const auto p = test::harmonic_params(g, 1.0, -1.0, 2.0, 0.6);
  std::mt19937_64 rng(8);
  RealField f = test::random_field(g, rng);
  f *= std::sqrt(p.N / integrate(g, f.cwiseAbs2().eval()));
  const auto gs = gamma_star(p);
  const StateTriple u{gs.g1 * f, gs.g0 * f, gs.gm1 * f};
  const auto cv = constraint_values(g, u);
  CHECK(std::abs(cv.mass - 2.0) < 1e-10);
  CHECK(std::abs(cv.magnetization - 0.6) < 1e-10);
  CHECK(constraint_values(g, StateTriple::Zero(g.size())).mass == 0.0);

  const StateTriple r{test::random_field(g, rng), test::random_field(g, rng), test::random_field(g, rng)};
  double m = 0.0, mag = 0.0;
  const double h = g.axis(0).h;
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    const double w = (i == 0 || i == g.size() - 1) ? h / 2 : h;
    m += w * (r.u1[i] * r.u1[i] + r.u0[i] * r.u0[i] + r.um1[i] * r.um1[i]);
    mag += w * (r.u1[i] * r.u1[i] - r.um1[i] * r.um1[i]);
  }
  CHECK(rel(constraint_values(g, r).mass, m) < 1e-13);
  CHECK(std::abs(constraint_values(g, r).magnetization - mag) < 1e-13);
}

TEST_CASE("gamma-star comparison identity for ferromagnetic coupling") {
  std::mt19937_64 rng(13);
  const Grid g = build_grid_1d(-4, 4, 80, Boundary::Dirichlet);
  for (double M : {0.0, 0.35}) {
    const auto p = test::harmonic_params(g, 10.0, -1.5, 1.0, M);
    for (int k = 0; k < 5; ++k) {
      const auto u = test::random_admissible(g, p, rng);
      const RealField mod = amplitude(u);
      const double lhs = amplitude_energy(g, u, p).total - amplitude_energy(g, sma_redistribute(u, p), p).total;
      double kin = -kinetic_energy(g, mod);
      for (int j = 0; j < 3; ++j) kin += kinetic_energy(g, u[j]);
      const RealField pair = u.u0.cwiseAbs2() - 2.0 * u.u1.cwiseProduct(u.um1);
      const double rhs = kin - p.c_s * integrate(g, pair.cwiseAbs2().eval());
      CHECK(std::abs(lhs - rhs) <= 1e-8 * std::abs(amplitude_energy(g, u, p).total));
      CHECK(lhs >= -1e-10);
    }
  }
}

}  // TEST_SUITE
