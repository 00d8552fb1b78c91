#include "spin1/grid.hpp"

namespace spin1 {

Grid Grid::make(int dim, std::span<const std::array<double, 2>> extents,
                std::span<const int> points, Boundary boundary, int min_points) {
  if (dim != 1 && dim != 2) throw GridError("grid dimension must be 1 or 2");
  if (static_cast<int>(extents.size()) != dim || static_cast<int>(points.size()) != dim) {
    throw GridError("expected one extent and one point count per axis");
  }
  Grid g;
  g.dim_ = dim;
  g.boundary_ = boundary;
  for (int a = 0; a < dim; ++a) {
    const auto [lo, hi] = extents[a];
    if (!(hi > lo)) {
      throw GridError("axis " + std::to_string(a) + ": hi must exceed lo");
    }
    if (points[a] < min_points) {
      throw GridError("axis " + std::to_string(a) + ": need at least " +
                      std::to_string(min_points) + " points, got " + std::to_string(points[a]));
    }
    g.axes_[a] = Axis{lo, hi, points[a], (hi - lo) / (points[a] - 1)};
  }
  if (dim == 1) {
    g.axes_[1] = Axis{0.0, 0.0, 1, 1.0};
    g.strides_ = {1, 1};
  } else {
    g.strides_ = {g.axes_[1].points, 1};
  }
  g.size_ = static_cast<Eigen::Index>(g.axes_[0].points) * g.axes_[1].points;

  g.weights_.resize(g.size_);
  g.free_mask_.resize(g.size_);
  for (Eigen::Index idx = 0; idx < g.size_; ++idx) {
    double w = 1.0;
    for (int a = 0; a < dim; ++a) {
      const int k = g.index_along(idx, a);
      const bool end = (k == 0 || k == g.axes_[a].points - 1);
      w *= end ? 0.5 * g.axes_[a].h : g.axes_[a].h;
    }
    g.weights_[idx] = w;
    g.free_mask_[idx] = (boundary == Boundary::Dirichlet && g.on_boundary(idx)) ? 0.0 : 1.0;
  }
  return g;
}

Grid build_grid(int dim, std::span<const std::array<double, 2>> extents,
                std::span<const int> points, Boundary boundary) {
  return Grid::make(dim, extents, points, boundary, Grid::kMinPoints);
}

Grid build_oracle_grid(double lo, double hi, int points, Boundary boundary) {
  const std::array<std::array<double, 2>, 1> ext{{{lo, hi}}};
  const std::array<int, 1> pts{points};
  return Grid::make(1, ext, pts, boundary, 3);
}

RealField Grid::coordinates(int a) const {
  RealField x(size_);
  for (Eigen::Index idx = 0; idx < size_; ++idx) x[idx] = coordinate(idx, a);
  return x;
}

bool Grid::on_boundary(Eigen::Index idx) const {
  for (int a = 0; a < dim_; ++a) {
    const int k = index_along(idx, a);
    if (k == 0 || k == axes_[a].points - 1) return true;
  }
  return false;
}

double Grid::volume() const {
  double v = 1.0;
  for (int a = 0; a < dim_; ++a) v *= axes_[a].hi - axes_[a].lo;
  return v;
}

bool Grid::same_shape(const Grid& other) const {
  if (dim_ != other.dim_ || boundary_ != other.boundary_) return false;
  for (int a = 0; a < dim_; ++a) {
    if (axes_[a].points != other.axes_[a].points || axes_[a].lo != other.axes_[a].lo ||
        axes_[a].hi != other.axes_[a].hi) {
      return false;
    }
  }
  return true;
}

}  // namespace spin1
