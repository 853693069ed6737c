#pragma once

// Reduced density matrices, natural orbitals, momentum distributions and
// two-body densities for stationary and quenched states on a uniform grid.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numeric>
#include <span>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include "quench_duo/eigenstates.hpp"
#include "quench_duo/errors.hpp"
#include "quench_duo/grid.hpp"
#include "quench_duo/parallel.hpp"
#include "quench_duo/quench.hpp"
#include "quench_duo/specfun.hpp"

namespace quench_duo::observables {

using Complex = std::complex<double>;
using eigenstates::RelEigenstate;

// ---------------------------------------------------------------------------
// One-body density matrix

struct OneBodyDM {
  Grid2D grid;
  Eigen::MatrixXcd matrix;      // rho(x_i, x_j)
  std::vector<double> weights;  // quadrature weights on the grid

  double trace() const {
    double t = 0.0;
    for (int i = 0; i < matrix.rows(); ++i) t += weights[static_cast<std::size_t>(i)] * matrix(i, i).real();
    return t;
  }

  double hermiticity_defect() const { return (matrix - matrix.adjoint()).cwiseAbs().maxCoeff(); }

  /// rho(x_i, -x_i), the anti-diagonal of the matrix.
  std::vector<Complex> anti_diagonal() const {
    std::vector<Complex> a(static_cast<std::size_t>(matrix.rows()));
    const int n = static_cast<int>(matrix.rows());
    for (int i = 0; i < n; ++i) a[static_cast<std::size_t>(i)] = matrix(i, n - 1 - i);
    return a;
  }
};

namespace detail {

// Field with its diagonal samples scaled by the cusp factor of the grid rule.
inline Eigen::MatrixXcd cusp_weighted(const GridField& field) {
  Eigen::MatrixXcd v = field.values;
  double c = field.grid.cusp_factor(field.contact_coupling);
  for (int i = 0; i < v.rows(); ++i) v(i, i) *= c;
  return v;
}

}  // namespace detail

/// rho(x, x') = sum_j w_j psi(x, x_j) psi*(x', x_j), made exactly Hermitian.
inline OneBodyDM rho1_from_field(const GridField& field) {
  OneBodyDM dm;
  dm.grid = field.grid;
  dm.weights = field.grid.trapezoid_weights();
  Eigen::MatrixXcd v = detail::cusp_weighted(field);
  Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(dm.weights.data(), static_cast<Eigen::Index>(dm.weights.size()));
  Eigen::MatrixXcd vw = v * w.cast<Complex>().asDiagonal();
  Eigen::MatrixXcd rho = vw * v.adjoint();
  dm.matrix = 0.5 * (rho + rho.adjoint());
  return dm;
}

/// One-body density rho(x_i, x_i) without forming the full matrix.
inline std::vector<double> one_body_density(const GridField& field) {
  std::vector<double> w = field.grid.trapezoid_weights();
  Eigen::MatrixXcd v = detail::cusp_weighted(field);
  std::vector<double> n(static_cast<std::size_t>(v.rows()), 0.0);
  for (int i = 0; i < v.rows(); ++i)
    for (int j = 0; j < v.cols(); ++j) n[static_cast<std::size_t>(i)] += w[static_cast<std::size_t>(j)] * std::norm(v(i, j));
  return n;
}

// ---------------------------------------------------------------------------
// Natural orbitals

struct NaturalDecomposition {
  Grid2D grid;
  std::vector<double> weights;
  std::vector<double> populations;  // lambda_k
  Eigen::MatrixXcd orbitals;        // column k holds beta_k on the grid

  double population_sum() const { return std::accumulate(populations.begin(), populations.end(), 0.0); }

  /// Gram matrix of the orbitals under the grid quadrature.
  Eigen::MatrixXcd gram() const {
    Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(weights.data(), static_cast<Eigen::Index>(weights.size()));
    return orbitals.adjoint() * w.cast<Complex>().asDiagonal() * orbitals;
  }

  double orthonormality_defect() const {
    Eigen::MatrixXcd g = gram();
    return (g - Eigen::MatrixXcd::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff();
  }
};

namespace detail {

// Multiplies each column by a phase making it real-positive at its largest-|.| sample.
inline void fix_phases(Eigen::MatrixXcd& orbitals) {
  for (int k = 0; k < orbitals.cols(); ++k) {
    Eigen::Index imax = 0;
    orbitals.col(k).cwiseAbs().maxCoeff(&imax);
    Complex z = orbitals(imax, k);
    if (std::abs(z) == 0.0) continue;
    orbitals.col(k) *= std::conj(z) / std::abs(z);
    orbitals(imax, k) = std::abs(orbitals(imax, k));
  }
}

}  // namespace detail

/// Eigenpairs of the weighted kernel sqrt(w) rho sqrt(w), in descending order.
/// Orbitals are orthonormal under the grid weights.
inline NaturalDecomposition natural_decomposition(const OneBodyDM& dm) {
  const Eigen::Index n = dm.matrix.rows();
  Eigen::VectorXd sw(n);
  for (Eigen::Index i = 0; i < n; ++i) sw[i] = std::sqrt(dm.weights[static_cast<std::size_t>(i)]);
  Eigen::MatrixXcd kernel = sw.cast<Complex>().asDiagonal() * dm.matrix * sw.cast<Complex>().asDiagonal();
  kernel = 0.5 * (kernel + kernel.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(kernel);
  if (solver.info() != Eigen::Success) throw InvariantError("natural_decomposition: eigensolver failed");
  NaturalDecomposition d;
  d.grid = dm.grid;
  d.weights = dm.weights;
  d.populations.resize(static_cast<std::size_t>(n));
  d.orbitals.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    Eigen::Index src = n - 1 - k;
    d.populations[static_cast<std::size_t>(k)] = solver.eigenvalues()[src];
    d.orbitals.col(k) = solver.eigenvectors().col(src).cwiseQuotient(sw.cast<Complex>());
  }
  detail::fix_phases(d.orbitals);
  return d;
}

// ---------------------------------------------------------------------------
// Series-form natural orbitals from the oscillator-series coefficients.
//
// Writing phi_0(X) phi_{2n}(x) = sum_k (-1)^k b_{nk} phi_{2n-k}(x1) phi_k(x2) with
// b_{nk} = sqrt(C(2n, k) / 4^n) gives Psi = sum_k (-1)^k phi_k(x2) u_k(x1) and
// rho = sum_k u_k u_k^T exactly. lambda_k = |u_k|^2 are oscillator occupations of
// the second particle, and beta_k = u_k / sqrt(lambda_k) need not be orthogonal.

namespace detail {

inline double binomial_amplitude(int n, int k) {
  // sqrt(C(2n, k) / 4^n)
  double log_c = std::lgamma(2.0 * n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(2.0 * n - k + 1.0);
  return std::exp(0.5 * log_c - n * std::log(2.0));
}

// lambda_k and u_k evaluated at the given points (oscillator values supplied
// row-wise in phi, one row per point, columns m = 0 .. 2N - 1).
inline void series_components(const std::vector<double>& coeffs, int k_max, const Eigen::MatrixXd& phi,
                             std::vector<double>& lambda, Eigen::MatrixXd& u, bool alternate_sign) {
  const int nb = static_cast<int>(coeffs.size());
  lambda.assign(static_cast<std::size_t>(k_max) + 1, 0.0);
  u = Eigen::MatrixXd::Zero(phi.rows(), k_max + 1);
  for (int k = 0; k <= k_max; ++k) {
    for (int n = (k + 1) / 2; n < nb; ++n) {
      double b = binomial_amplitude(n, k);
      double a = coeffs[static_cast<std::size_t>(n)] * b;
      lambda[static_cast<std::size_t>(k)] += a * a;
      if (a == 0.0) continue;
      if (alternate_sign && (n % 2 == 1)) a = -a;
      u.col(k) += a * phi.col(2 * n - k);
    }
  }
}

inline Eigen::MatrixXd oscillator_table(std::span<const double> xs, int m_max) {
  Eigen::MatrixXd phi(static_cast<Eigen::Index>(xs.size()), m_max + 1);
  parallel_for(xs.size(), [&](std::size_t i) {
    std::vector<double> row(static_cast<std::size_t>(m_max) + 1);
    specfun::ho_values_into(xs[i], row);
    for (int m = 0; m <= m_max; ++m) phi(static_cast<Eigen::Index>(i), m) = row[static_cast<std::size_t>(m)];
  });
  return phi;
}

}  // namespace detail

/// Series-form populations lambda_k = sum_n 4^{-n} C(2n, k) c_n^2 and orbitals
/// for k = 0 .. k_max, in k order (not sorted).
inline NaturalDecomposition natural_orbitals_series(const RelEigenstate& state, int k_max, const Grid2D& grid) {
  if (k_max < 0) throw DomainError("natural_orbitals_series: k_max must be >= 0");
  if (state.coeffs.empty()) throw DomainError("natural_orbitals_series: state has no series coefficients");
  Eigen::MatrixXd phi = detail::oscillator_table(grid.points, 2 * static_cast<int>(state.coeffs.size()) - 1);
  std::vector<double> lambda;
  Eigen::MatrixXd u;
  detail::series_components(state.coeffs, k_max, phi, lambda, u, false);
  NaturalDecomposition d;
  d.grid = grid;
  d.weights = grid.trapezoid_weights();
  d.populations = lambda;
  d.orbitals = Eigen::MatrixXcd::Zero(u.rows(), u.cols());
  for (int k = 0; k <= k_max; ++k)
    if (lambda[static_cast<std::size_t>(k)] > 0.0)
      d.orbitals.col(k) = (u.col(k) / std::sqrt(lambda[static_cast<std::size_t>(k)])).cast<Complex>();
  detail::fix_phases(d.orbitals);
  return d;
}

struct MomentumDistribution {
  std::vector<double> p_points;
  std::vector<double> values;
};

/// Series-form momentum distribution sum_k lambda_k |beta_k(p)|^2. The Fourier
/// transform maps phi_m to (-i)^m phi_m; the k-dependent part of the phase is
/// global per orbital and drops out.
inline MomentumDistribution momentum_series(const RelEigenstate& state, int k_max, std::span<const double> p_points) {
  Eigen::MatrixXd phi = detail::oscillator_table(p_points, 2 * static_cast<int>(state.coeffs.size()) - 1);
  std::vector<double> lambda;
  Eigen::MatrixXd u;
  detail::series_components(state.coeffs, k_max, phi, lambda, u, true);
  MomentumDistribution m;
  m.p_points.assign(p_points.begin(), p_points.end());
  m.values.resize(p_points.size());
  for (std::size_t i = 0; i < p_points.size(); ++i) m.values[i] = u.row(static_cast<Eigen::Index>(i)).squaredNorm();
  return m;
}

/// Time-dependent series form: lambda_k = (sum_f sqrt(lambda_k^f))^2 and
/// beta_k(t) = sum_f e^{-i E_f t} C_f beta_k^f, taken as written. The
/// resulting orbitals are in general neither normalized nor orthogonal.
inline NaturalDecomposition natural_orbitals_series_t(const quench::OverlapTable& table, int k_max,
                                                     int basis_size, const Grid2D& grid, double t) {
  if (k_max < 0) throw DomainError("natural_orbitals_series_t: k_max must be >= 0");
  Eigen::MatrixXd phi = detail::oscillator_table(grid.points, 2 * basis_size - 1);
  NaturalDecomposition d;
  d.grid = grid;
  d.weights = grid.trapezoid_weights();
  d.populations.assign(static_cast<std::size_t>(k_max) + 1, 0.0);
  d.orbitals = Eigen::MatrixXcd::Zero(grid.n_points, k_max + 1);
  std::vector<double> root_sum(static_cast<std::size_t>(k_max) + 1, 0.0);
  for (int f = 0; f < table.n_f(); ++f) {
    double c = table.coeffs[static_cast<std::size_t>(f)];
    if (c == 0.0) continue;
    RelEigenstate sf = eigenstates::build_rel_eigenstate(table.scenario.g_f, f, basis_size);
    std::vector<double> lambda;
    Eigen::MatrixXd u;
    detail::series_components(sf.coeffs, k_max, phi, lambda, u, false);
    Complex phase = std::polar(c, -table.energies[static_cast<std::size_t>(f)] * t);
    for (int k = 0; k <= k_max; ++k) {
      double lk = lambda[static_cast<std::size_t>(k)];
      if (lk <= 0.0) continue;
      root_sum[static_cast<std::size_t>(k)] += std::sqrt(lk);
      d.orbitals.col(k) += phase * (u.col(k) / std::sqrt(lk)).cast<Complex>();
    }
  }
  for (int k = 0; k <= k_max; ++k) d.populations[static_cast<std::size_t>(k)] = root_sum[static_cast<std::size_t>(k)] * root_sum[static_cast<std::size_t>(k)];
  return d;
}

/// sum_k lambda_k beta_k beta_k^dagger on the grid.
inline Eigen::MatrixXcd reconstruct_rho(const NaturalDecomposition& d) {
  Eigen::VectorXd lam = Eigen::Map<const Eigen::VectorXd>(d.populations.data(), static_cast<Eigen::Index>(d.populations.size()));
  return d.orbitals * lam.cast<Complex>().asDiagonal() * d.orbitals.adjoint();
}

/// Side-by-side account of the series-form backend against grid diagonalization.
struct NaturalComparison {
  std::vector<double> grid_populations;   // descending
  std::vector<double> series_populations;  // descending
  double max_population_difference = 0.0;
  double series_orthonormality_defect = 0.0;
  double rho_relative_distance = 0.0;  // |rho_series - rho_grid|_F / |rho_grid|_F
  bool populations_agree = false;      // max difference <= 1e-3
};

inline NaturalComparison compare_natural(const NaturalDecomposition& grid_backend,
                                         const NaturalDecomposition& series_backend, const OneBodyDM& dm,
                                         std::size_t ranks = 10) {
  NaturalComparison c;
  c.grid_populations = grid_backend.populations;
  c.series_populations = series_backend.populations;
  std::sort(c.grid_populations.begin(), c.grid_populations.end(), std::greater<>());
  std::sort(c.series_populations.begin(), c.series_populations.end(), std::greater<>());
  ranks = std::min({ranks, c.grid_populations.size(), c.series_populations.size()});
  c.grid_populations.resize(ranks);
  c.series_populations.resize(ranks);
  for (std::size_t k = 0; k < ranks; ++k)
    c.max_population_difference =
        std::max(c.max_population_difference, std::abs(c.grid_populations[k] - c.series_populations[k]));
  c.series_orthonormality_defect = series_backend.orthonormality_defect();
  Eigen::MatrixXcd diff = reconstruct_rho(series_backend) - dm.matrix;
  c.rho_relative_distance = diff.norm() / dm.matrix.norm();
  c.populations_agree = c.max_population_difference <= 1e-3;
  return c;
}

// ---------------------------------------------------------------------------
// Momentum distribution

/// Default momentum grid: 241 points on [-6, 6].
inline std::vector<double> default_momentum_points() {
  std::vector<double> p(241);
  for (int k = 0; k < 241; ++k) p[static_cast<std::size_t>(k)] = -6.0 + 0.05 * k;
  p[120] = 0.0;
  return p;
}

/// `count` points spanning one period [-pi/dx, pi/dx) of the grid transform.
inline std::vector<double> nyquist_momentum_points(const Grid2D& grid, int count) {
  std::vector<double> p(static_cast<std::size_t>(count));
  double band = specfun::kPi / grid.dx;
  for (int k = 0; k < count; ++k) p[static_cast<std::size_t>(k)] = -band + 2.0 * band * k / count;
  return p;
}

/// n(p) = sum_k lambda_k |beta_k(p)|^2 with beta_k(p) = (2 pi)^{-1/2} sum_i w_i e^{-i p x_i} beta_k(x_i).
inline MomentumDistribution momentum_distribution(const NaturalDecomposition& d, std::span<const double> p_points) {
  const Eigen::Index np = static_cast<Eigen::Index>(p_points.size());
  const Eigen::Index nx = static_cast<Eigen::Index>(d.grid.points.size());
  Eigen::MatrixXcd kernel(np, nx);
  const double norm = 1.0 / std::sqrt(2.0 * specfun::kPi);
  for (Eigen::Index a = 0; a < np; ++a)
    for (Eigen::Index i = 0; i < nx; ++i)
      kernel(a, i) = std::polar(norm * d.weights[static_cast<std::size_t>(i)],
                                -p_points[static_cast<std::size_t>(a)] * d.grid.points[static_cast<std::size_t>(i)]);
  Eigen::MatrixXcd bp = kernel * d.orbitals;
  MomentumDistribution m;
  m.p_points.assign(p_points.begin(), p_points.end());
  m.values.assign(p_points.size(), 0.0);
  for (Eigen::Index a = 0; a < np; ++a) {
    double s = 0.0;
    for (Eigen::Index k = 0; k < bp.cols(); ++k) s += d.populations[static_cast<std::size_t>(k)] * std::norm(bp(a, k));
    m.values[static_cast<std::size_t>(a)] = s;
  }
  return m;
}

/// Same quantity straight from rho: n(p) = (2 pi)^{-1} sum_d e^{-i p d dx} D_d with
/// D_d = sum_{i - j = d} w_i w_j rho_ij, the weighted diagonal sums of rho.
inline MomentumDistribution momentum_from_dm(const OneBodyDM& dm, std::span<const double> p_points) {
  const int n = static_cast<int>(dm.matrix.rows());
  std::vector<Complex> diag_sums(2 * static_cast<std::size_t>(n) - 1, Complex{});
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      diag_sums[static_cast<std::size_t>(i - j + n - 1)] +=
          dm.weights[static_cast<std::size_t>(i)] * dm.weights[static_cast<std::size_t>(j)] * dm.matrix(i, j);
  MomentumDistribution m;
  m.p_points.assign(p_points.begin(), p_points.end());
  m.values.resize(p_points.size());
  parallel_for(p_points.size(), [&](std::size_t a) {
    double p = p_points[a];
    // D_{-d} = conj(D_d) makes the sum real: D_0 + 2 Re sum_{d > 0} e^{-i p d dx} D_d.
    double s = diag_sums[static_cast<std::size_t>(n - 1)].real();
    for (int d = 1; d < n; ++d)
      s += 2.0 * (std::polar(1.0, -p * d * dm.grid.dx) * diag_sums[static_cast<std::size_t>(d + n - 1)]).real();
    m.values[a] = s / (2.0 * specfun::kPi);
  });
  return m;
}

/// Integral of n(p) over one full period sampled by nyquist_momentum_points
/// (the periodic trapezoid rule, exact for the grid transform).
inline double nyquist_integral(const MomentumDistribution& m, const Grid2D& grid) {
  double step = 2.0 * specfun::kPi / (grid.dx * static_cast<double>(m.values.size()));
  return step * std::accumulate(m.values.begin(), m.values.end(), 0.0);
}

// ---------------------------------------------------------------------------
// Two-body density

struct TwoBodyDensity {
  Grid2D grid;
  Eigen::MatrixXd values;  // |psi(x1_i, x2_j)|^2
  double contact_coupling = 0.0;

  /// Double integral with trapezoidal weights and the diagonal cusp correction.
  double integral() const {
    std::vector<double> w = grid.trapezoid_weights();
    double c = grid.cusp_factor(contact_coupling);
    double s = 0.0;
    for (int j = 0; j < values.cols(); ++j)
      for (int i = 0; i < values.rows(); ++i) {
        double v = w[static_cast<std::size_t>(i)] * w[static_cast<std::size_t>(j)] * values(i, j);
        s += i == j ? c * c * v : v;
      }
    return s;
  }

  std::vector<double> anti_diagonal() const {
    const int n = static_cast<int>(values.rows());
    std::vector<double> a(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) a[static_cast<std::size_t>(i)] = values(i, n - 1 - i);
    return a;
  }
};

inline TwoBodyDensity rho2_from_field(const GridField& field) {
  return {field.grid, field.values.cwiseAbs2(), field.contact_coupling};
}

// ---------------------------------------------------------------------------
// Breathing diagnostic

/// <x^2>(t) of the one-body density (not renormalized by S).
inline std::vector<double> breathing_series(const quench::QuenchScenario& scenario, const quench::OverlapTable& table,
                                            const Grid2D& grid, std::span<const double> times) {
  if (!quench::same_coupling(table.scenario.g_f, scenario.g_f))
    throw DomainError("breathing_series: table built for a different scenario");
  quench::QuenchPropagator prop(table, grid);
  std::vector<double> w = grid.trapezoid_weights();
  std::vector<double> out(times.size());
  for (std::size_t k = 0; k < times.size(); ++k) {
    std::vector<double> dens = one_body_density(prop.field(times[k]));
    double s = 0.0;
    for (std::size_t i = 0; i < dens.size(); ++i) s += w[i] * grid.points[i] * grid.points[i] * dens[i];
    out[k] = s;
  }
  return out;
}

}  // namespace quench_duo::observables
