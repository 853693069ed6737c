#pragma once

// Even relative-motion levels of the trapped contact-interaction pair.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "quench_duo/errors.hpp"
#include "quench_duo/parallel.hpp"
#include "quench_duo/specfun.hpp"

namespace quench_duo::spectrum {

/// Couplings with |g| below this are treated as exactly non-interacting.
inline constexpr double kZeroCoupling = 1e-10;

inline bool is_noninteracting(double g) { return std::abs(g) < kZeroCoupling; }

struct EvenLevel {
  double g = 0.0;
  int nu = 0;
  double energy = 0.5;
  double epsilon = 0.0;  // energy / 2 - 1/4
  // Final root bracket; the residual changes sign on [bracket_lo, bracket_hi].
  double bracket_lo = 0.5;
  double bracket_hi = 0.5;
};

/// Gamma(-E/2 + 3/4) / Gamma(-E/2 + 1/4) + g/2. Returns a signed infinity
/// at the numerator poles E = 3/2 + 2m.
inline double busch_residual(double energy, double g) {
  return specfun::gamma_ratio(-0.5 * energy + 0.75, -0.5 * energy + 0.25) + 0.5 * g;
}

namespace detail {

inline int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

// Root of busch_residual on [lo, hi] given opposite (possibly infinite) signs
// at the ends. Illinois false position, falling back to bisection whenever the
// interpolant is unusable or the bracket fails to halve.
inline EvenLevel solve_bracketed(double g, int nu, double lo, double hi) {
  // At a pole end the marker's sign depends on the side of approach; from
  // inside a bracket the residual always diverges with sign -sign(g).
  auto inside = [g](double e) {
    double f = busch_residual(e, g);
    return std::isfinite(f) ? f : -sign_of(g) * std::numeric_limits<double>::infinity();
  };
  double f_lo = inside(lo);
  double f_hi = inside(hi);
  if (sign_of(f_lo) * sign_of(f_hi) > 0)
    throw ConvergenceError("solve_even_energy: no sign change on bracket");
  int side = 0;
  for (int iter = 0; iter < 400; ++iter) {
    double width = hi - lo;
    if (width <= 1e-12 * std::max(1.0, std::abs(0.5 * (lo + hi)))) break;
    double x = 0.5 * (lo + hi);
    if (std::isfinite(f_lo) && std::isfinite(f_hi) && iter % 3 != 2) {
      double cand = lo - f_lo * (hi - lo) / (f_hi - f_lo);
      if (cand > lo && cand < hi) x = cand;
    }
    double fx = inside(x);
    if (fx == 0.0) {
      lo = hi = x;
      break;
    }
    if (sign_of(fx) == sign_of(f_lo)) {
      lo = x;
      f_lo = fx;
      if (side == -1 && std::isfinite(f_hi)) f_hi *= 0.5;
      side = -1;
    } else {
      hi = x;
      f_hi = fx;
      if (side == 1 && std::isfinite(f_lo)) f_lo *= 0.5;
      side = 1;
    }
  }
  // Restore the true residual values at the ends for the final choice.
  f_lo = inside(lo);
  f_hi = inside(hi);
  double e = std::abs(f_lo) <= std::abs(f_hi) ? lo : hi;
  if (!std::isfinite(inside(e))) e = 0.5 * (lo + hi);
  return {g, nu, e, 0.5 * e - 0.25, lo, hi};
}

}  // namespace detail

/// E_{2 nu}(g). Brackets follow from the pole/zero structure of the gamma ratio:
/// (2nu+1/2, 2nu+3/2) for g > 0, (2nu-1/2, 2nu+1/2) for g < 0 and nu >= 1, and
/// an expanding bound-state bracket below 1/2 for g < 0, nu = 0.
inline EvenLevel solve_even_energy(double g, int nu) {
  if (nu < 0) throw DomainError("solve_even_energy: nu must be >= 0");
  if (!std::isfinite(g)) throw DomainError("solve_even_energy: non-finite coupling");
  double zero_end = 2.0 * nu + 0.5;
  if (is_noninteracting(g)) return {g, nu, zero_end, nu * 1.0, zero_end, zero_end};
  if (g > 0.0) return detail::solve_bracketed(g, nu, zero_end, zero_end + 1.0);
  if (nu >= 1) return detail::solve_bracketed(g, nu, zero_end - 1.0, zero_end);
  double lo = std::min(-g * g, -1.0);
  for (int i = 0; i < 60 && !(busch_residual(lo, g) > 0.0); ++i) lo *= 2.0;
  if (!(busch_residual(lo, g) > 0.0))
    throw ConvergenceError("solve_even_energy: bound-state bracket not found");
  return detail::solve_bracketed(g, 0, lo, zero_end);
}

/// Levels nu = 0 .. count-1 at coupling g.
inline std::vector<EvenLevel> solve_even_energies(double g, int count) {
  if (count < 1) throw DomainError("solve_even_energies: count must be >= 1");
  std::vector<EvenLevel> levels(static_cast<std::size_t>(count));
  parallel_for(levels.size(), [&](std::size_t nu) {
    try {
      levels[nu] = solve_even_energy(g, static_cast<int>(nu));
    } catch (const ConvergenceError& e) {
      throw ConvergenceError("nu = " + std::to_string(nu) + ": " + e.what());
    }
  });
  for (std::size_t nu = 1; nu < levels.size(); ++nu)
    if (!(levels[nu].energy > levels[nu - 1].energy))
      throw InvariantError("solve_even_energies: levels not increasing at nu = " +
                           std::to_string(nu));
  return levels;
}

struct SpectrumTable {
  std::vector<double> g_values;
  Eigen::MatrixXd even_levels;     // (g index, nu)
  std::vector<double> odd_levels;  // E_{2 nu + 1} = 2 nu + 3/2
};

inline SpectrumTable spectrum_scan(double g_min, double g_max, int steps, int levels) {
  if (!(g_min < g_max) || steps < 2 || levels < 1)
    throw DomainError("spectrum_scan: need g_min < g_max, steps >= 2, levels >= 1");
  SpectrumTable t;
  t.g_values.resize(static_cast<std::size_t>(steps));
  for (int j = 0; j < steps; ++j)
    t.g_values[j] = g_min + (g_max - g_min) * j / (steps - 1.0);
  t.g_values.back() = g_max;
  t.even_levels.resize(steps, levels);
  parallel_for(t.g_values.size(), [&](std::size_t j) {
    for (int nu = 0; nu < levels; ++nu)
      t.even_levels(static_cast<Eigen::Index>(j), nu) = solve_even_energy(t.g_values[j], nu).energy;
  });
  for (int nu = 0; nu < levels; ++nu) t.odd_levels.push_back(2.0 * nu + 1.5);
  return t;
}

struct SumIdentity {
  double partial_sum = 0.0;
  double closed_form = 0.0;
  // Upper bound on the omitted terms n >= n_terms; infinite when a pole
  // 2n + 1/2 = E lies beyond the cut.
  double tail_bound = 0.0;
};

/// Compares sum_{n < n_terms} phi_{2n}(0)^2 / (2n + 1/2 - E) with
/// Gamma(-E/2 + 1/4) / (2 Gamma(-E/2 + 3/4)).
inline SumIdentity sum_identity_check(double energy, long n_terms) {
  if (n_terms < 1) throw DomainError("sum_identity_check: n_terms must be >= 1");
  SumIdentity r;
  double phi2 = 1.0 / std::sqrt(specfun::kPi);
  double sum = 0.0, comp = 0.0;
  for (long n = 0; n < n_terms; ++n) {
    if (n > 0) phi2 *= (2.0 * n - 1.0) / (2.0 * n);
    double term = phi2 / (2.0 * n + 0.5 - energy) - comp;
    double next = sum + term;
    comp = (next - sum) - term;
    sum = next;
  }
  r.partial_sum = sum;
  r.closed_form = 0.5 * specfun::gamma_ratio(-0.5 * energy + 0.25, -0.5 * energy + 0.75);
  // phi_{2n}(0)^2 <= 1/(pi sqrt(n)) and 2n + 1/2 - E >= 2n (1 - delta) for n >= N,
  // so the tail is below (1/(pi sqrt N) + 1/(2 pi N^{3/2})) / (1 - delta).
  const double big_n = static_cast<double>(n_terms);
  const double delta = std::max(0.0, energy - 0.5) / (2.0 * big_n);
  r.tail_bound = delta < 1.0 ? (1.0 / std::sqrt(big_n) + 0.5 / (big_n * std::sqrt(big_n))) /
                                   (specfun::kPi * (1.0 - delta))
                             : std::numeric_limits<double>::infinity();
  return r;
}

}  // namespace quench_duo::spectrum
