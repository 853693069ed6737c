#pragma once

// Quadrature rules shared by the overlap and normalization checks.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include <Eigen/Eigenvalues>

#include "quench_duo/errors.hpp"
#include "quench_duo/specfun.hpp"

namespace quench_duo::quadrature {

struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [-1, 1] by Newton iteration on P_n.
inline Rule gauss_legendre(int n) {
  if (n < 1) throw DomainError("gauss_legendre: n must be >= 1");
  Rule r{std::vector<double>(n), std::vector<double>(n)};
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(specfun::kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    double w = 2.0 / ((1.0 - x * x) * dp * dp);
    r.nodes[i] = -x;
    r.nodes[n - 1 - i] = x;
    r.weights[i] = w;
    r.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) r.nodes[n / 2] = 0.0;
  return r;
}

/// Composite Gauss-Legendre rule on [0, length] with `panels` equal panels.
inline Rule half_line_rule(double length, int panels, int order) {
  if (!(length > 0.0) || panels < 1) throw DomainError("half_line_rule: bad arguments");
  Rule base = gauss_legendre(order);
  Rule r;
  double h = length / panels;
  for (int p = 0; p < panels; ++p) {
    double mid = (p + 0.5) * h;
    for (int i = 0; i < order; ++i) {
      r.nodes.push_back(mid + 0.5 * h * base.nodes[i]);
      r.weights.push_back(0.5 * h * base.weights[i]);
    }
  }
  return r;
}

/// Half-line rule sized for even functions whose oscillatory content is bounded
/// by oscillator energy e_max: integrate 2 * int_0^L with L = sqrt(2 e_max) + 10.
inline Rule even_function_rule(double e_max, int panels_per_unit = 4, int order = 16) {
  double length = std::sqrt(2.0 * std::max(e_max, 0.5)) + 10.0;
  int panels = static_cast<int>(std::ceil(length * panels_per_unit));
  Rule r = half_line_rule(length, panels, order);
  for (double& w : r.weights) w *= 2.0;
  return r;
}

/// Gauss-Hermite rule (weight e^{-x^2}). `weights` holds the plain weights and
/// `scaled_weights` the products w_i e^{x_i^2}, which stay finite for large n.
struct HermiteRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  std::vector<double> scaled_weights;
};

inline HermiteRule gauss_hermite(int n) {
  if (n < 1) throw DomainError("gauss_hermite: n must be >= 1");
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd sub(std::max(n - 1, 0));
  for (int k = 1; k < n; ++k) sub[k - 1] = std::sqrt(0.5 * k);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  HermiteRule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  r.scaled_weights.resize(n);
  std::vector<double> phi(static_cast<std::size_t>(n) + 1);
  for (int i = 0; i < n; ++i) {
    double x = solver.eigenvalues()[i];
    // Newton polish on phi_n, using phi_n' = sqrt(2n) phi_{n-1} - x phi_n.
    for (int iter = 0; iter < 3; ++iter) {
      specfun::ho_values_into(x, phi);
      double d = std::sqrt(2.0 * n) * phi[n - 1] - x * phi[n];
      if (d == 0.0) break;
      x -= phi[n] / d;
    }
    specfun::ho_values_into(x, std::span<double>(phi.data(), n));
    double sum = 0.0;
    for (int k = 0; k < n; ++k) sum += phi[k] * phi[k];
    // Christoffel weight; sum carries the e^{-x^2} factor from the basis.
    r.nodes[i] = x;
    r.weights[i] = std::exp(-x * x) / sum;
    r.scaled_weights[i] = 1.0 / sum;
  }
  // Enforce exact symmetry.
  for (int i = 0; i < n / 2; ++i) {
    int j = n - 1 - i;
    double x = 0.5 * (r.nodes[j] - r.nodes[i]);
    double ws = 0.5 * (r.scaled_weights[i] + r.scaled_weights[j]);
    double w = 0.5 * (r.weights[i] + r.weights[j]);
    r.nodes[i] = -x;
    r.nodes[j] = x;
    r.scaled_weights[i] = r.scaled_weights[j] = ws;
    r.weights[i] = r.weights[j] = w;
  }
  if (n % 2 == 1) r.nodes[n / 2] = 0.0;
  return r;
}

}  // namespace quench_duo::quadrature
