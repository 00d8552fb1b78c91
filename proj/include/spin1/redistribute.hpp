#pragma once

// Mass redistributions g_l = sqrt(sum_k a_lk f_k^2) with nonnegative,
// column-stochastic coefficients, and the two closed-form redistributions
// of amplitude triples: gamma* |u| and the two-component u-tilde.

#include "spin1/grid.hpp"
#include "spin1/model.hpp"

#include <Eigen/Dense>

#include <vector>

namespace spin1 {

class RedistributionMatrix {
 public:
  /// Throws ModelError on a negative entry or a column sum off by > 1e-12.
  explicit RedistributionMatrix(Eigen::MatrixXd a);

  static RedistributionMatrix identity(int n) {
    return RedistributionMatrix(Eigen::MatrixXd::Identity(n, n));
  }
  /// The single-row matrix [1 ... 1], which maps f to |f|.
  static RedistributionMatrix collapse(int n) {
    return RedistributionMatrix(Eigen::MatrixXd::Ones(1, n));
  }

  const Eigen::MatrixXd& coefficients() const { return a_; }
  Eigen::Index rows() const { return a_.rows(); }
  Eigen::Index cols() const { return a_.cols(); }

 private:
  Eigen::MatrixXd a_;
};

std::vector<RealField> redistribute(const std::vector<RealField>& f, const RedistributionMatrix& A);

/// sum_k K[f_k] - sum_l K[g_l] with K the grid's kinetic energy; computed
/// as a difference of integrals so it is defined where g_l vanishes.
double kinetic_defect(const Grid& grid, const std::vector<RealField>& f,
                      const RedistributionMatrix& A);

struct GammaTriple {
  double g1 = 0.0;
  double g0 = 0.0;
  double gm1 = 0.0;

  double operator[](int j) const { return j == 0 ? g1 : (j == 1 ? g0 : gm1); }
};

/// Residual of the two defining equations of the admissible set, max norm.
double gamma_residual(const GammaTriple& g, const ModelParams& p);

/// The unique maximizer of the spin weight over the admissible set.
GammaTriple gamma_star(const ModelParams& p);

/// 2 g0^2 (g1 + g-1)^2 + (M/N)^2. Throws ModelError when g is not
/// admissible to 1e-10.
double spin_weight(const GammaTriple& g, const ModelParams& p);

/// The admissible triple with g0^2 = w, for 0 <= w <= 1 - |M|/N.
GammaTriple gamma_family(double w, const ModelParams& p);

/// |u| pointwise.
RealField amplitude(const StateTriple& u);

/// gamma* |u|.
StateTriple sma_redistribute(const StateTriple& u, const ModelParams& p);

/// (sqrt(u1^2 + u0^2/2), 0, sqrt(u-1^2 + u0^2/2)).
StateTriple antiferro_redistribute(const StateTriple& u);

}  // namespace spin1
