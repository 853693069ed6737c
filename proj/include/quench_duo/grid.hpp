#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Core>

#include "quench_duo/errors.hpp"

namespace quench_duo {

/// Uniform symmetric grid on [-half_width, half_width], used for both particles.
struct Grid2D {
  double half_width = 6.0;
  int n_points = 400;
  double dx = 0.0;
  std::vector<double> points;

  /// Trapezoidal weights (dx inside, dx/2 at the two ends).
  std::vector<double> trapezoid_weights() const {
    std::vector<double> w(points.size(), dx);
    w.front() *= 0.5;
    w.back() *= 0.5;
    return w;
  }

  /// Factor applied to diagonal samples (x1 == x2) of a field whose relative
  /// part has the contact cusp psi'(0+) = g psi(0). It adds the h^2/12 jump
  /// term of the trapezoidal rule that the kink along the diagonal produces.
  double cusp_factor(double contact_coupling) const {
    return 1.0 + dx * std::sqrt(2.0) * contact_coupling / 12.0;
  }
};

inline Grid2D make_grid(double half_width, int n_points) {
  if (!(half_width > 0.0) || !std::isfinite(half_width))
    throw DomainError("make_grid: half_width must be positive");
  if (n_points < 2) throw DomainError("make_grid: n_points must be >= 2");
  Grid2D g;
  g.half_width = half_width;
  g.n_points = n_points;
  g.dx = 2.0 * half_width / (n_points - 1);
  g.points.resize(static_cast<std::size_t>(n_points));
  for (int i = 0; i < n_points; ++i) g.points[i] = -half_width + i * g.dx;
  for (int i = 0; i < n_points / 2; ++i) g.points[n_points - 1 - i] = -g.points[i];
  if (n_points % 2 == 1) g.points[n_points / 2] = 0.0;
  return g;
}

/// Complex two-body field psi(x1_i, x2_j) on grid x grid.
struct GridField {
  Grid2D grid;
  Eigen::MatrixXcd values;
  double contact_coupling = 0.0;  // coupling that fixes the diagonal cusp
};

}  // namespace quench_duo
