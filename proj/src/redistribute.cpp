#include "spin1/redistribute.hpp"

#include <algorithm>
#include <cmath>

namespace spin1 {

RedistributionMatrix::RedistributionMatrix(Eigen::MatrixXd a) : a_(std::move(a)) {
  if (a_.rows() == 0 || a_.cols() == 0) throw ModelError("redistribution matrix is empty");
  if (a_.minCoeff() < 0.0) throw ModelError("redistribution coefficients must be nonnegative");
  for (Eigen::Index k = 0; k < a_.cols(); ++k) {
    if (std::abs(a_.col(k).sum() - 1.0) > 1e-12) {
      throw ModelError("redistribution column " + std::to_string(k) + " does not sum to 1");
    }
  }
}

std::vector<RealField> redistribute(const std::vector<RealField>& f, const RedistributionMatrix& A) {
  if (static_cast<Eigen::Index>(f.size()) != A.cols()) {
    throw ModelError("redistribution expects " + std::to_string(A.cols()) + " fields, got " +
                     std::to_string(f.size()));
  }
  const Eigen::Index n = f.empty() ? 0 : f.front().size();
  for (const auto& fk : f) {
    if (fk.size() != n) throw ModelError("redistributed fields differ in length");
    if (n > 0 && fk.minCoeff() < -1e-12) throw ModelError("redistributed fields must be nonnegative");
  }
  std::vector<RealField> g(A.rows(), RealField::Zero(n));
  for (Eigen::Index l = 0; l < A.rows(); ++l) {
    for (Eigen::Index k = 0; k < A.cols(); ++k) {
      const double a = A.coefficients()(l, k);
      if (a != 0.0) g[l].array() += a * f[k].array().square();
    }
    g[l] = g[l].cwiseSqrt();
  }
  return g;
}

double kinetic_defect(const Grid& grid, const std::vector<RealField>& f,
                      const RedistributionMatrix& A) {
  const auto g = redistribute(f, A);
  double before = 0.0, after = 0.0;
  for (const auto& fk : f) before += kinetic_energy(grid, fk);
  for (const auto& gl : g) after += kinetic_energy(grid, gl);
  return before - after;
}

double gamma_residual(const GammaTriple& g, const ModelParams& p) {
  const double unit = g.g1 * g.g1 + g.g0 * g.g0 + g.gm1 * g.gm1 - 1.0;
  const double mag = g.g1 * g.g1 - g.gm1 * g.gm1 - p.magnetization_ratio();
  double r = std::max(std::abs(unit), std::abs(mag));
  if (g.g1 < 0.0 || g.g0 < 0.0 || g.gm1 < 0.0) r = std::max(r, 1.0);
  return r;
}

GammaTriple gamma_star(const ModelParams& p) {
  if (!(p.N > 0.0) || !(std::abs(p.M) < p.N)) {
    throw ModelError("gamma* requires N > 0 and |M| < N");
  }
  const double m = p.magnetization_ratio();
  return {0.5 * (1.0 + m), std::sqrt(0.5 * (1.0 - m * m)), 0.5 * (1.0 - m)};
}

double spin_weight(const GammaTriple& g, const ModelParams& p) {
  if (gamma_residual(g, p) > 1e-10) throw ModelError("gamma triple is not admissible");
  const double m = p.magnetization_ratio();
  const double s = g.g1 + g.gm1;
  return 2.0 * g.g0 * g.g0 * s * s + m * m;
}

GammaTriple gamma_family(double w, const ModelParams& p) {
  const double m = p.magnetization_ratio();
  if (!(w >= 0.0) || !(w <= 1.0 - std::abs(m))) {
    throw ModelError("gamma family parameter must lie in [0, 1 - |M|/N]");
  }
  return {std::sqrt(std::max(0.0, 0.5 * (1.0 - w + m))), std::sqrt(w),
          std::sqrt(std::max(0.0, 0.5 * (1.0 - w - m)))};
}

RealField amplitude(const StateTriple& u) { return total_density(u).cwiseSqrt(); }

StateTriple sma_redistribute(const StateTriple& u, const ModelParams& p) {
  const GammaTriple g = gamma_star(p);
  const RealField a = amplitude(u);
  return {g.g1 * a, g.g0 * a, g.gm1 * a};
}

StateTriple antiferro_redistribute(const StateTriple& u) {
  const Eigen::ArrayXd half0 = 0.5 * u.u0.array().square();
  return {(u.u1.array().square() + half0).sqrt().matrix(), RealField::Zero(u.u0.size()),
          (u.um1.array().square() + half0).sqrt().matrix()};
}

}  // namespace spin1
