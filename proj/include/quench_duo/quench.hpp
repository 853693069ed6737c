#pragma once

// Interaction quench g_i -> g_f: overlaps, time propagation and fidelity.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "quench_duo/eigenstates.hpp"
#include "quench_duo/errors.hpp"
#include "quench_duo/grid.hpp"
#include "quench_duo/parallel.hpp"
#include "quench_duo/quadrature.hpp"
#include "quench_duo/specfun.hpp"
#include "quench_duo/spectrum.hpp"

namespace quench_duo::quench {

using eigenstates::RelEigenstate;
using spectrum::EvenLevel;
using Complex = std::complex<double>;

/// Energy gap below which the closed-form overlap is considered degenerate.
inline constexpr double kDegenerateGap = 1e-8;

struct QuenchScenario {
  double g_i = 0.0;
  int nu_i = 0;
  double g_f = 0.0;
  int n_f = 100;
  int basis_size = 1000;

  void validate() const {
    if (!std::isfinite(g_i) || !std::isfinite(g_f)) throw DomainError("scenario: non-finite coupling");
    if (nu_i < 0) throw DomainError("scenario: nu_i must be >= 0");
    if (n_f < 1) throw DomainError("scenario: n_f must be >= 1");
    if (basis_size < 1) throw DomainError("scenario: basis_size must be >= 1");
  }
};

inline bool same_coupling(double a, double b) { return spectrum::is_noninteracting(a - b); }

/// State carrying only level and normalization, enough for closed-form evaluation.
inline RelEigenstate closed_state(const EvenLevel& level) {
  RelEigenstate s;
  s.level = level;
  if (!spectrum::is_noninteracting(level.g)) s.norm_a = eigenstates::normalization_constant(level);
  return s;
}

namespace detail {

inline double closed_overlap(double a_i, double e_i, double g_i, double a_f, double e_f, double g_f) {
  if (spectrum::is_noninteracting(g_i) || spectrum::is_noninteracting(g_f))
    throw DegenerateError("overlap_closed: zero coupling, use the oscillator-state overlap");
  if (std::abs(e_i - e_f) < kDegenerateGap)
    throw DegenerateError("overlap_closed: near-degenerate energies");
  return a_i * a_f / (g_i * g_f) * (g_i - g_f) / (e_i - e_f);
}

}  // namespace detail

/// C = A_i A_f (g_i - g_f) / (g_i g_f (E_i - E_f)); exactly 1 or 0 for equal couplings.
inline double overlap_closed(const RelEigenstate& si, const RelEigenstate& sf) {
  if (same_coupling(si.level.g, sf.level.g)) return si.level.nu == sf.level.nu ? 1.0 : 0.0;
  return detail::closed_overlap(si.norm_a, si.energy(), si.level.g, sf.norm_a, sf.energy(),
                                sf.level.g);
}

/// Coefficient-space overlap sum_n c_n^i c_n^f over the common basis.
inline double overlap_series(const RelEigenstate& si, const RelEigenstate& sf) {
  std::size_t n = std::min(si.coeffs.size(), sf.coeffs.size());
  double sum = 0.0;
  for (std::size_t k = 0; k < n; ++k) sum += si.coeffs[k] * sf.coeffs[k];
  return sum;
}

/// <psi_f|psi_i> by direct quadrature of the closed-form states. Both states are
/// even with their cusp at the origin, so the integral is folded onto the half
/// line and done with composite 16-point Gauss-Legendre panels (about `points`
/// nodes over [0, sqrt(2 E_max) + 10]).
inline double overlap_quadrature(const RelEigenstate& si, const RelEigenstate& sf, int points = 400) {
  if (points < 100) throw DomainError("overlap_quadrature: points must be >= 100");
  constexpr int kOrder = 16;
  double e_max = std::max({si.energy(), sf.energy(), 0.5});
  double length = std::sqrt(2.0 * e_max) + 10.0;
  int panels = std::max(1, (points + kOrder - 1) / kOrder);
  quadrature::Rule rule = quadrature::half_line_rule(length, panels, kOrder);
  std::vector<double> vi = eigenstates::eval_rel(si, rule.nodes);
  std::vector<double> vf = eigenstates::eval_rel(sf, rule.nodes);
  double sum = 0.0;
  for (std::size_t k = 0; k < rule.nodes.size(); ++k) sum += rule.weights[k] * vi[k] * vf[k];
  return 2.0 * sum;
}

struct OverlapTable {
  QuenchScenario scenario;
  double initial_energy = 0.0;
  std::vector<double> coeffs;    // C_{2 nu_f; 2 nu_i}, nu_f = 0 .. n_f - 1
  std::vector<double> energies;  // E_{2 nu_f}
  double norm_sum = 0.0;         // S = sum |C|^2
  double mean_energy = 0.0;      // sum E_f |C|^2 (relative energy)

  int n_f() const { return static_cast<int>(coeffs.size()); }
  double truncation_deficit() const { return 1.0 - norm_sum; }
};

inline void finalize_sums(OverlapTable& t) {
  t.norm_sum = 0.0;
  t.mean_energy = 0.0;
  for (std::size_t f = 0; f < t.coeffs.size(); ++f) {
    double w = t.coeffs[f] * t.coeffs[f];
    t.norm_sum += w;
    t.mean_energy += t.energies[f] * w;
  }
  if (t.norm_sum > 1.0 + 1e-10)
    throw InvariantError("overlap_table: truncated norm exceeds one (S = " +
                         std::to_string(t.norm_sum) + ")");
}

/// First n_f rows of a table, with sums recomputed.
inline OverlapTable truncate(const OverlapTable& t, int n_f) {
  if (n_f < 1 || n_f > t.n_f()) throw DomainError("truncate: n_f out of range");
  OverlapTable r = t;
  r.scenario.n_f = n_f;
  r.coeffs.resize(static_cast<std::size_t>(n_f));
  r.energies.resize(static_cast<std::size_t>(n_f));
  finalize_sums(r);
  return r;
}

inline OverlapTable overlap_table(const QuenchScenario& sc) {
  sc.validate();
  OverlapTable t;
  t.scenario = sc;
  EvenLevel level_i = spectrum::solve_even_energy(sc.g_i, sc.nu_i);
  t.initial_energy = level_i.energy;
  std::vector<EvenLevel> levels_f = spectrum::solve_even_energies(sc.g_f, sc.n_f);
  t.energies.resize(levels_f.size());
  for (std::size_t f = 0; f < levels_f.size(); ++f) t.energies[f] = levels_f[f].energy;
  t.coeffs.assign(levels_f.size(), 0.0);

  if (same_coupling(sc.g_i, sc.g_f)) {
    if (sc.nu_i < sc.n_f) t.coeffs[static_cast<std::size_t>(sc.nu_i)] = 1.0;
    finalize_sums(t);
    return t;
  }

  const bool free_i = spectrum::is_noninteracting(sc.g_i);
  const bool free_f = spectrum::is_noninteracting(sc.g_f);
  const double a_i = free_i ? 0.0 : eigenstates::normalization_constant(level_i);
  std::vector<double> origin = specfun::ho_at_origin(2 * std::max(sc.n_f, sc.nu_i + 1));
  RelEigenstate state_i = closed_state(level_i);

  parallel_for(levels_f.size(), [&](std::size_t f) {
    const EvenLevel& lf = levels_f[f];
    if (free_f) {
      // <phi_{2 nu_f}|psi_i> is the series coefficient of the initial state.
      t.coeffs[f] = a_i * origin[f] / (2.0 * f + 0.5 - level_i.energy);
      return;
    }
    double a_f = eigenstates::normalization_constant(lf);
    if (free_i) {
      t.coeffs[f] = a_f * origin[static_cast<std::size_t>(sc.nu_i)] / (2.0 * sc.nu_i + 0.5 - lf.energy);
      return;
    }
    if (std::abs(level_i.energy - lf.energy) < kDegenerateGap) {
      RelEigenstate state_f = closed_state(lf);
      t.coeffs[f] = overlap_quadrature(state_i, state_f, 800);
      return;
    }
    t.coeffs[f] = detail::closed_overlap(a_i, level_i.energy, sc.g_i, a_f, lf.energy, sc.g_f);
  });
  finalize_sums(t);
  return t;
}

// ---------------------------------------------------------------------------
// Fidelity

struct FidelitySeries {
  std::vector<double> times;
  std::vector<double> values;
};

/// F(t) = |sum_f |C_f|^2 e^{-i E_f t}|; the center-of-mass phase cancels.
inline FidelitySeries fidelity_series(const OverlapTable& table, std::span<const double> times) {
  FidelitySeries s;
  s.times.assign(times.begin(), times.end());
  s.values.resize(times.size());
  parallel_for(times.size(), [&](std::size_t k) {
    double t = times[k];
    if (!std::isfinite(t)) throw DomainError("fidelity_series: non-finite time");
    double re = 0.0, im = 0.0;
    for (std::size_t f = 0; f < table.coeffs.size(); ++f) {
      double w = table.coeffs[f] * table.coeffs[f];
      re += w * std::cos(table.energies[f] * t);
      im -= w * std::sin(table.energies[f] * t);
    }
    s.values[k] = std::hypot(re, im);
  });
  return s;
}

struct FidelityLine {
  double omega = 0.0;
  double weight = 0.0;
  int nu_f = -1;  // -1 labels the merged omega = 0 line
  int nu_h = -1;
};

struct FidelitySpectrum {
  std::vector<FidelityLine> lines;  // sorted by omega, then labels
};

/// Exact line spectrum of |F(t)|^2: omega = E_f - E_h with weight |C_f|^2 |C_h|^2.
/// All diagonal pairs collapse into one omega = 0 line; lines below `prune` are dropped.
inline FidelitySpectrum fidelity_spectrum(const OverlapTable& table, double prune = 1e-8) {
  FidelitySpectrum s;
  std::size_t n = table.coeffs.size();
  std::vector<double> w(n);
  for (std::size_t f = 0; f < n; ++f) w[f] = table.coeffs[f] * table.coeffs[f];
  double diagonal = 0.0;
  for (std::size_t f = 0; f < n; ++f) diagonal += w[f] * w[f];
  if (diagonal >= prune) s.lines.push_back({0.0, diagonal, -1, -1});
  for (std::size_t f = 0; f < n; ++f) {
    for (std::size_t h = 0; h < n; ++h) {
      if (h == f) continue;
      double weight = w[f] * w[h];
      if (weight < prune) continue;
      s.lines.push_back({table.energies[f] - table.energies[h], weight, static_cast<int>(f),
                         static_cast<int>(h)});
    }
  }
  std::sort(s.lines.begin(), s.lines.end(), [](const FidelityLine& a, const FidelityLine& b) {
    if (a.omega != b.omega) return a.omega < b.omega;
    if (a.nu_f != b.nu_f) return a.nu_f < b.nu_f;
    return a.nu_h < b.nu_h;
  });
  return s;
}

/// Positive-frequency peaks as seen at finite resolution. Lines are visited by
/// descending weight; a line within `resolution` of an already accepted peak is
/// absorbed into it (weight added), otherwise it opens a new peak. Sorted by
/// weight, descending.
inline std::vector<FidelityLine> merge_peaks(const FidelitySpectrum& spectrum, double resolution) {
  std::vector<FidelityLine> positive;
  for (const auto& l : spectrum.lines)
    if (l.omega > 0.0) positive.push_back(l);
  std::stable_sort(positive.begin(), positive.end(),
                   [](const FidelityLine& a, const FidelityLine& b) { return a.weight > b.weight; });
  std::vector<FidelityLine> peaks;
  for (const auto& line : positive) {
    auto host = std::find_if(peaks.begin(), peaks.end(), [&](const FidelityLine& p) {
      return std::abs(p.omega - line.omega) < resolution;
    });
    if (host == peaks.end())
      peaks.push_back(line);
    else
      host->weight += line.weight;
  }
  std::stable_sort(peaks.begin(), peaks.end(),
                   [](const FidelityLine& a, const FidelityLine& b) { return a.weight > b.weight; });
  return peaks;
}

// ---------------------------------------------------------------------------
// Time evolution on a grid

namespace detail {

// Relative coordinate |x1 - x2| / sqrt(2) takes only the values k dx / sqrt(2).
inline std::vector<double> relative_distances(const Grid2D& grid) {
  std::vector<double> d(static_cast<std::size_t>(grid.n_points));
  for (int k = 0; k < grid.n_points; ++k) d[k] = k * grid.dx / std::sqrt(2.0);
  return d;
}

// Center-of-mass ground state at X = (x_i + x_j)/sqrt(2), indexed by i + j.
inline std::vector<double> cm_profile(const Grid2D& grid) {
  std::vector<double> cm(2 * static_cast<std::size_t>(grid.n_points) - 1);
  for (std::size_t s = 0; s < cm.size(); ++s) {
    double X = (-2.0 * grid.half_width + s * grid.dx) / std::sqrt(2.0);
    cm[s] = eigenstates::cm_ground(X);
  }
  return cm;
}

inline GridField assemble(const Grid2D& grid, const std::vector<double>& cm,
                          const Eigen::VectorXcd& rel, double contact_coupling) {
  GridField field{grid, Eigen::MatrixXcd(grid.n_points, grid.n_points), contact_coupling};
  const int n = grid.n_points;
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t j) {
    for (int i = 0; i < n; ++i) {
      int jj = static_cast<int>(j);
      field.values(i, jj) = cm[static_cast<std::size_t>(i + jj)] * rel[std::abs(i - jj)];
    }
  });
  return field;
}

}  // namespace detail

/// Two-body field of a stationary eigenstate (closed form, or oscillator state at g = 0).
inline GridField stationary_field(const RelEigenstate& state, const Grid2D& grid) {
  std::vector<double> d = detail::relative_distances(grid);
  std::vector<double> rel = eigenstates::eval_rel(state, d);
  Eigen::VectorXcd r(grid.n_points);
  for (int k = 0; k < grid.n_points; ++k) r[k] = rel[static_cast<std::size_t>(k)];
  return detail::assemble(grid, detail::cm_profile(grid), r, state.level.g);
}

/// Evaluates psi(x1, x2; t) = sum_f e^{-i t (E_f + 1/2)} C_f Psi_f(x1, x2) on a grid.
/// Postquench relative states are sampled once at the grid's distinct relative
/// distances; each time step is then a matrix-vector product plus assembly.
class QuenchPropagator {
 public:
  QuenchPropagator(const OverlapTable& table, const Grid2D& grid)
      : grid_(grid), table_(table), cm_(detail::cm_profile(grid)) {
    std::vector<double> d = detail::relative_distances(grid);
    std::vector<EvenLevel> levels = spectrum::solve_even_energies(table.scenario.g_f, table.n_f());
    rel_.resize(grid.n_points, table.n_f());
    rel_.setZero();
    parallel_for(levels.size(), [&](std::size_t f) {
      if (table.coeffs[f] == 0.0) return;
      std::vector<double> v = eigenstates::eval_rel(closed_state(levels[f]), d);
      for (int k = 0; k < grid.n_points; ++k)
        rel_(k, static_cast<Eigen::Index>(f)) = v[static_cast<std::size_t>(k)];
    });
  }

  const Grid2D& grid() const { return grid_; }
  const OverlapTable& table() const { return table_; }

  /// Relative-coordinate amplitude at the distances k dx / sqrt(2).
  Eigen::VectorXcd relative_amplitude(double t) const {
    if (!std::isfinite(t)) throw DomainError("wavefunction_t: non-finite time");
    Eigen::VectorXcd a(table_.n_f());
    for (int f = 0; f < table_.n_f(); ++f)
      a[f] = std::polar(table_.coeffs[static_cast<std::size_t>(f)],
                        -t * (table_.energies[static_cast<std::size_t>(f)] + 0.5));
    return rel_.cast<Complex>() * a;
  }

  GridField field(double t) const {
    return detail::assemble(grid_, cm_, relative_amplitude(t), table_.scenario.g_f);
  }

 private:
  Grid2D grid_;
  OverlapTable table_;
  std::vector<double> cm_;
  Eigen::MatrixXd rel_;  // (distance index, postquench state)
};

inline GridField wavefunction_t(const QuenchScenario& scenario, const OverlapTable& table,
                                const Grid2D& grid, double t) {
  if (table.scenario.g_f != scenario.g_f)
    throw DomainError("wavefunction_t: table built for a different scenario");
  return QuenchPropagator(table, grid).field(t);
}

// ---------------------------------------------------------------------------
// Truncation convergence

struct ConvergenceRow {
  int n_f = 0;
  double norm_sum = 0.0;
  double mean_energy = 0.0;
  double fidelity_deviation = 0.0;  // max_t |F_{n_f}(t) - F_{n_max}(t)|
};

/// Reference window t in [0, 4 pi] with 801 uniform samples.
inline std::vector<double> reference_times() {
  std::vector<double> t(801);
  for (std::size_t k = 0; k < t.size(); ++k) t[k] = 4.0 * specfun::kPi * k / 800.0;
  return t;
}

/// Per truncation: S, <E> and fidelity deviation against the largest n_f in the
/// list. The scenario's own n_f is ignored.
inline std::vector<ConvergenceRow> convergence_report(const QuenchScenario& scenario,
                                                      const std::vector<int>& n_f_list) {
  if (n_f_list.empty()) throw DomainError("convergence_report: empty n_f list");
  for (std::size_t k = 1; k < n_f_list.size(); ++k)
    if (n_f_list[k] <= n_f_list[k - 1])
      throw DomainError("convergence_report: n_f list must be increasing");
  QuenchScenario sc = scenario;
  sc.n_f = n_f_list.back();
  OverlapTable full = overlap_table(sc);
  std::vector<double> times = reference_times();
  FidelitySeries reference = fidelity_series(full, times);
  std::vector<ConvergenceRow> rows;
  for (int n : n_f_list) {
    OverlapTable part = truncate(full, n);
    FidelitySeries fs = fidelity_series(part, times);
    double dev = 0.0;
    for (std::size_t k = 0; k < times.size(); ++k)
      dev = std::max(dev, std::abs(fs.values[k] - reference.values[k]));
    rows.push_back({n, part.norm_sum, part.mean_energy, dev});
  }
  return rows;
}

}  // namespace quench_duo::quench
