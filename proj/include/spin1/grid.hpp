#pragma once

// Uniform tensor-product grids on axis-aligned boxes in one or two
// dimensions, with second-order difference operators and trapezoidal
// quadrature. Fields are plain Eigen column vectors indexed row-major
// (the last axis varies fastest).

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <complex>
#include <span>
#include <stdexcept>
#include <string>
#include <type_traits>

namespace spin1 {

template <typename Scalar>
using Field = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
using RealField = Field<double>;

enum class Boundary { Dirichlet, Neumann };

struct Axis {
  double lo = 0.0;
  double hi = 1.0;
  int points = 0;
  double h = 0.0;
};

class GridError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class Grid {
 public:
  static constexpr int kMinPoints = 8;

  Grid() = default;

  int dim() const { return dim_; }
  Boundary boundary() const { return boundary_; }
  const Axis& axis(int a) const { return axes_[a]; }
  Eigen::Index size() const { return size_; }
  Eigen::Index stride(int a) const { return strides_[a]; }

  /// Index of point `idx` along axis `a`.
  int index_along(Eigen::Index idx, int a) const {
    return static_cast<int>((idx / strides_[a]) % axes_[a].points);
  }
  double coordinate(Eigen::Index idx, int a) const {
    return axes_[a].lo + axes_[a].h * index_along(idx, a);
  }
  RealField coordinates(int a) const;

  bool on_boundary(Eigen::Index idx) const;
  /// 1 on points carrying degrees of freedom, 0 on pinned Dirichlet nodes.
  /// All ones for Neumann grids.
  const RealField& free_mask() const { return free_mask_; }
  /// Trapezoidal quadrature weights (product rule in 2D).
  const RealField& weights() const { return weights_; }
  double volume() const;

  bool same_shape(const Grid& other) const;

  friend Grid build_grid(int dim, std::span<const std::array<double, 2>> extents,
                         std::span<const int> points, Boundary boundary);
  friend Grid build_oracle_grid(double lo, double hi, int points, Boundary boundary);

 private:
  static Grid make(int dim, std::span<const std::array<double, 2>> extents,
                   std::span<const int> points, Boundary boundary, int min_points);

  int dim_ = 0;
  Boundary boundary_ = Boundary::Dirichlet;
  std::array<Axis, 2> axes_{};
  std::array<Eigen::Index, 2> strides_{1, 1};
  Eigen::Index size_ = 0;
  RealField weights_;
  RealField free_mask_;
};

/// Throws GridError for points < 8 or hi <= lo on any axis.
Grid build_grid(int dim, std::span<const std::array<double, 2>> extents,
                std::span<const int> points, Boundary boundary);

inline Grid build_grid_1d(double lo, double hi, int points, Boundary boundary) {
  const std::array<std::array<double, 2>, 1> ext{{{lo, hi}}};
  const std::array<int, 1> pts{points};
  return build_grid(1, ext, pts, boundary);
}

/// Desk-scale 1D grid for brute-force cross-checks. Accepts as few as
/// three nodes, below the regular minimum.
Grid build_oracle_grid(double lo, double hi, int points, Boundary boundary);

/// Throws GridError when the field length does not match or a value is
/// not finite.
template <typename Derived>
void check_field(const Grid& grid, const Eigen::MatrixBase<Derived>& f) {
  if (f.size() != grid.size()) {
    throw GridError("field has " + std::to_string(f.size()) + " values, grid has " +
                    std::to_string(grid.size()));
  }
  if (!f.allFinite()) throw GridError("field contains non-finite values");
}

template <typename Derived>
typename Derived::Scalar integrate(const Grid& grid, const Eigen::MatrixBase<Derived>& f) {
  using Scalar = typename Derived::Scalar;
  check_field(grid, f);
  return (grid.weights().template cast<Scalar>().array() * f.derived().array()).sum();
}

/// Second-order central Laplacian. Dirichlet rows use zero ghost values,
/// Neumann rows mirror the first interior neighbour.
template <typename Derived>
Field<typename Derived::Scalar> laplacian(const Grid& grid, const Eigen::MatrixBase<Derived>& f) {
  using Scalar = typename Derived::Scalar;
  check_field(grid, f);
  const Field<Scalar>& v = f.derived();
  Field<Scalar> out = Field<Scalar>::Zero(grid.size());
  const bool neumann = grid.boundary() == Boundary::Neumann;
  for (int a = 0; a < grid.dim(); ++a) {
    const Eigen::Index s = grid.stride(a);
    const int n = grid.axis(a).points;
    const double inv_h2 = 1.0 / (grid.axis(a).h * grid.axis(a).h);
    for (Eigen::Index idx = 0; idx < grid.size(); ++idx) {
      const int k = grid.index_along(idx, a);
      Scalar left = k > 0 ? v[idx - s] : (neumann ? v[idx + s] : Scalar(0));
      Scalar right = k < n - 1 ? v[idx + s] : (neumann ? v[idx - s] : Scalar(0));
      out[idx] += (left - Scalar(2) * v[idx] + right) * inv_h2;
    }
  }
  return out;
}

/// Partial derivative along `axis`: central differences inside, first-order
/// one-sided differences on the two end nodes.
template <typename Derived>
Field<typename Derived::Scalar> gradient(const Grid& grid, const Eigen::MatrixBase<Derived>& f,
                                         int axis) {
  using Scalar = typename Derived::Scalar;
  check_field(grid, f);
  const Field<Scalar>& v = f.derived();
  Field<Scalar> out(grid.size());
  const Eigen::Index s = grid.stride(axis);
  const int n = grid.axis(axis).points;
  const double h = grid.axis(axis).h;
  for (Eigen::Index idx = 0; idx < grid.size(); ++idx) {
    const int k = grid.index_along(idx, axis);
    if (k == 0) {
      out[idx] = (v[idx + s] - v[idx]) / h;
    } else if (k == n - 1) {
      out[idx] = (v[idx] - v[idx - s]) / h;
    } else {
      out[idx] = (v[idx + s] - v[idx - s]) / (2.0 * h);
    }
  }
  return out;
}

/// Pointwise |grad f|^2, nonnegative.
template <typename Derived>
RealField kinetic_density(const Grid& grid, const Eigen::MatrixBase<Derived>& f) {
  RealField out = RealField::Zero(grid.size());
  for (int a = 0; a < grid.dim(); ++a) out += gradient(grid, f, a).cwiseAbs2();
  return out;
}

/// Discrete Dirichlet form sum over grid edges of |f(x+h) - f(x)|^2 / h^2,
/// weighted by the transverse trapezoid weights. Its gradient with respect
/// to the quadrature inner product is exactly -2 * laplacian(f) for fields
/// that vanish on pinned Dirichlet nodes (and for all Neumann fields).
template <typename Derived>
double kinetic_energy(const Grid& grid, const Eigen::MatrixBase<Derived>& f) {
  check_field(grid, f);
  const auto& v = f.derived();
  double total = 0.0;
  for (int a = 0; a < grid.dim(); ++a) {
    const Eigen::Index s = grid.stride(a);
    const int n = grid.axis(a).points;
    const double h = grid.axis(a).h;
    for (Eigen::Index idx = 0; idx < grid.size(); ++idx) {
      if (grid.index_along(idx, a) == n - 1) continue;
      // Weight of the edge: its length times the quadrature weight of the
      // remaining axes, which is the point weight divided by the weight
      // along `a`.
      const int k = grid.index_along(idx, a);
      const double along = (k == 0) ? 0.5 * h : h;
      const double transverse = grid.weights()[idx] / along;
      total += transverse * std::norm(std::complex<double>(v[idx + s] - v[idx])) / h;
    }
  }
  return total;
}

}  // namespace spin1
