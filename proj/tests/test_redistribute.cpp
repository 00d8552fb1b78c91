#include "spin1/redistribute.hpp"
#include "support.hpp"

#include <doctest.h>

#include <numbers>
#include <random>

using namespace spin1;
using spin1::test::rel;

namespace {

constexpr double pi = std::numbers::pi;

ModelParams params_with(double N, double M) {
  ModelParams p;
  p.N = N;
  p.M = M;
  return p;
}

}  // namespace

TEST_SUITE("redistribute") {

TEST_CASE("matrix validation") {
  Eigen::MatrixXd a(2, 2);
  a << 0.5, 1.0, 0.5, 0.0;
  CHECK_NOTHROW(RedistributionMatrix{a});
  a(0, 0) = 0.6;
  CHECK_THROWS_AS(RedistributionMatrix{a}, ModelError);
  a << 1.2, 1.0, -0.2, 0.0;
  CHECK_THROWS_AS(RedistributionMatrix{a}, ModelError);
}

TEST_CASE("collapse and identity") {
  const Grid g = build_grid_1d(0, 1, 33, Boundary::Dirichlet);
  std::mt19937_64 rng(1);
  const std::vector<RealField> f{test::random_field(g, rng), test::random_field(g, rng),
                                 test::random_field(g, rng)};
  const auto one = redistribute(f, RedistributionMatrix::collapse(3));
  REQUIRE(one.size() == 1);
  const RealField mod = (f[0].cwiseAbs2() + f[1].cwiseAbs2() + f[2].cwiseAbs2()).cwiseSqrt();
  CHECK((one[0] - mod).cwiseAbs().maxCoeff() < 1e-15);
  const auto same = redistribute(f, RedistributionMatrix::identity(3));
  for (int k = 0; k < 3; ++k) CHECK((same[k] - f[k]).cwiseAbs().maxCoeff() == 0.0);
  CHECK(kinetic_defect(g, f, RedistributionMatrix::identity(3)) == 0.0);
}

TEST_CASE("sine and cosine collapse to a constant") {
  const Grid g = build_grid_1d(0, 1, 401, Boundary::Neumann);
  const RealField s = g.coordinates(0).unaryExpr([](double x) { return std::abs(std::sin(pi * x)); });
  const RealField c = g.coordinates(0).unaryExpr([](double x) { return std::abs(std::cos(pi * x)); });
  const std::vector<RealField> f{s, c};
  const auto out = redistribute(f, RedistributionMatrix::collapse(2));
  CHECK((out[0].array() - 1.0).abs().maxCoeff() < 1e-14);
  CHECK(std::abs(kinetic_defect(g, f, RedistributionMatrix::collapse(2)) - pi * pi) < 1e-2);
}

TEST_CASE("proportional tuples have no defect") {
  const Grid g = build_grid_1d(-2, 2, 64, Boundary::Dirichlet);
  std::mt19937_64 rng(2);
  const RealField phi = test::random_field(g, rng);
  const std::vector<RealField> f{0.3 * phi, 1.7 * phi, 0.9 * phi};
  Eigen::MatrixXd a(2, 3);
  a << 0.2, 0.5, 1.0, 0.8, 0.5, 0.0;
  CHECK(std::abs(kinetic_defect(g, f, RedistributionMatrix{a})) < 1e-10);
}

TEST_CASE("gamma star closed form") {
  const auto g0 = gamma_star(params_with(1.0, 0.0));
  CHECK(g0.g1 == doctest::Approx(0.5));
  CHECK(g0.g0 == doctest::Approx(std::sqrt(0.5)));
  CHECK(g0.gm1 == doctest::Approx(0.5));

  const auto p = params_with(2.0, 1.0);
  const auto g = gamma_star(p);
  CHECK(g.g1 == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(g.g0 == doctest::Approx(0.6123724357).epsilon(1e-10));
  CHECK(g.gm1 == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(std::abs(g.g1 * g.g1 + g.g0 * g.g0 + g.gm1 * g.gm1 - 1.0) < 1e-15);
  CHECK(std::abs(g.g1 * g.g1 - g.gm1 * g.gm1 - 0.5) < 1e-15);
  CHECK(gamma_residual(g, p) < 1e-15);

  for (double m : {-0.9, -0.3, 0.0, 0.5, 0.99}) {
    CHECK(spin_weight(gamma_star(params_with(1.0, m)), params_with(1.0, m)) == doctest::Approx(1.0).epsilon(1e-14));
  }
  CHECK_THROWS_AS(gamma_star(params_with(1.0, 1.0)), ModelError);
}

TEST_CASE("spin weight values") {
  const double m = 0.4;
  const auto p = params_with(1.0, m);
  const GammaTriple two{std::sqrt((1 + m) / 2), 0.0, std::sqrt((1 - m) / 2)};
  CHECK(spin_weight(two, p) == doctest::Approx(m * m).epsilon(1e-14));
  const auto p0 = params_with(1.0, 0.0);
  for (double t : {0.1, 0.3, 0.5, 0.7}) {
    const GammaTriple fam{t, std::sqrt(1 - 2 * t * t), t};
    CHECK(spin_weight(fam, p0) == doctest::Approx(8 * t * t * (1 - 2 * t * t)).epsilon(1e-14));
  }
  CHECK_THROWS_AS(spin_weight(GammaTriple{0.5, 0.5, 0.5}, p0), ModelError);
}

TEST_CASE("gamma family covers the admissible set") {
  const auto p = params_with(1.0, 0.3);
  const auto star = gamma_star(p);
  const auto at = gamma_family((1 - 0.09) / 2, p);
  CHECK(at.g1 == doctest::Approx(star.g1).epsilon(1e-14));
  CHECK(at.g0 == doctest::Approx(star.g0).epsilon(1e-14));
  CHECK(at.gm1 == doctest::Approx(star.gm1).epsilon(1e-14));
  CHECK(gamma_family(0.0, p).g0 == 0.0);
  CHECK_THROWS_AS(gamma_family(0.8, p), ModelError);

  const auto p0 = params_with(1.0, 0.0);
  const auto fam = gamma_family(1 - 2 * 0.3 * 0.3, p0);
  CHECK(fam.g1 == doctest::Approx(0.3));
  CHECK(fam.gm1 == doctest::Approx(0.3));

  int best = -1;
  double best_weight = -1.0;
  const int n = 10000;
  for (int k = 0; k <= n; ++k) {
    const double w = 0.7 * k / n;
    const double s = spin_weight(gamma_family(w, p), p);
    if (s > best_weight) {
      best_weight = s;
      best = k;
    }
  }
  CHECK(std::abs(0.7 * best / n - 0.455) <= 0.7 / n);
}

TEST_CASE("sma redistribution") {
  const Grid g = build_grid_1d(-4, 4, 90, Boundary::Dirichlet);
  const auto p = test::harmonic_params(g, 10, -1, 1, 0.35);
  std::mt19937_64 rng(5);
  RealField f = test::random_field(g, rng);
  f *= std::sqrt(p.N / integrate(g, f.cwiseAbs2().eval()));
  const auto gs = gamma_star(p);
  const StateTriple u{gs.g1 * f, gs.g0 * f, gs.gm1 * f};
  const auto same = sma_redistribute(u, p);
  for (int j = 0; j < 3; ++j) CHECK((same[j] - u[j]).cwiseAbs().maxCoeff() < 1e-12);

  for (int k = 0; k < 10; ++k) {
    const auto v = test::random_admissible(g, p, rng);
    const auto r = sma_redistribute(v, p);
    const auto a = constraint_values(g, v), b = constraint_values(g, r);
    CHECK(std::abs(a.mass - b.mass) < 1e-10);
    CHECK(std::abs(a.magnetization - b.magnetization) < 1e-10);
    CHECK(amplitude_energy(g, r, p).total <= amplitude_energy(g, v, p).total + 1e-10);
  }
}

TEST_CASE("antiferromagnetic redistribution") {
  const Grid g = build_grid_1d(0, 1, 9, Boundary::Neumann);
  StateTriple u;
  u.u1 = RealField::Constant(9, 0.6);
  u.u0 = RealField::Constant(9, 0.8);
  u.um1 = RealField::Zero(9);
  const auto t = antiferro_redistribute(u);
  CHECK(t.u1[4] == doctest::Approx(0.82462).epsilon(1e-5));
  CHECK(t.u0[4] == 0.0);
  CHECK(t.um1[4] == doctest::Approx(0.56569).epsilon(1e-5));

  const Grid gh = build_grid_1d(-4, 4, 90, Boundary::Dirichlet);
  const auto p = test::harmonic_params(gh, 10, 1.5, 1, -0.2);
  std::mt19937_64 rng(6);
  for (int k = 0; k < 10; ++k) {
    const auto v = test::random_admissible(gh, p, rng);
    const auto r = antiferro_redistribute(v);
    CHECK((amplitude(r) - amplitude(v)).cwiseAbs().maxCoeff() < 1e-14);
    const RealField sz = v.u1.cwiseAbs2() - v.um1.cwiseAbs2();
    CHECK((r.u1.cwiseAbs2() - r.um1.cwiseAbs2() - sz).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(std::abs(constraint_values(gh, r).magnetization - p.M) < 1e-12);
    CHECK(amplitude_energy(gh, r, p).total <= amplitude_energy(gh, v, p).total + 1e-10);
  }
  StateTriple w = test::random_admissible(gh, p, rng);
  w.u0.setZero();
  const auto id = antiferro_redistribute(w);
  CHECK((id.u1 - w.u1).cwiseAbs().maxCoeff() < 1e-15);
  CHECK((id.um1 - w.um1).cwiseAbs().maxCoeff() < 1e-15);
}

}  // TEST_SUITE
