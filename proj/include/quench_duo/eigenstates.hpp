#pragma once

// Interacting relative eigenstates: oscillator-series and closed-form evaluation,
// plus the two-body wavefunction with the center-of-mass ground state.
//
// Phase convention: A > 0 and c_n = A phi_{2n}(0) / (E_{2n} - E), so that
// psi(0) = -A / g. Overlaps then follow the closed form without extra signs.

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "quench_duo/errors.hpp"
#include "quench_duo/specfun.hpp"
#include "quench_duo/spectrum.hpp"

namespace quench_duo::eigenstates {

using spectrum::EvenLevel;

struct RelEigenstate {
  EvenLevel level;
  double norm_a = 0.0;  // A; zero for the non-interacting oscillator state
  int basis_size = 0;
  std::vector<double> coeffs;
  double tail_estimate = 0.0;  // estimate of sum_{n >= basis_size} c_n^2

  bool noninteracting() const { return spectrum::is_noninteracting(level.g); }
  double energy() const { return level.energy; }
};

/// A from A^2 = 4 Gamma(1/2 - eps) / (Gamma(-eps) [psi(1/2 - eps) - psi(-eps)]).
inline double normalization_constant(const EvenLevel& level) {
  if (spectrum::is_noninteracting(level.g))
    throw DegenerateError("normalization_constant: zero coupling, use the oscillator state");
  double eps = level.epsilon;
  double d = specfun::digamma(0.5 - eps) - specfun::digamma(-eps);
  double a2 = 4.0 * specfun::gamma_ratio(0.5 - eps, -eps) / d;
  if (!(a2 > 0.0) || !std::isfinite(a2))
    throw InvariantError("normalization_constant: A^2 not positive");
  return std::sqrt(a2);
}

/// Leading-order estimate of sum_{n >= n0} c_n^2 from c_n^2 ~ A^2 / (4 pi n^{5/2}).
inline double coefficient_tail(double norm_a, int n0) {
  if (n0 < 1) return 1.0;
  return norm_a * norm_a / (6.0 * specfun::kPi) * std::pow(n0 - 0.5, -1.5);
}

inline RelEigenstate build_rel_eigenstate(double g, int nu, int basis_size) {
  if (basis_size < 1) throw DomainError("build_rel_eigenstate: basis_size must be >= 1");
  RelEigenstate s;
  s.level = spectrum::solve_even_energy(g, nu);
  s.basis_size = basis_size;
  s.coeffs.assign(static_cast<std::size_t>(basis_size), 0.0);
  if (s.noninteracting()) {
    if (nu >= basis_size)
      throw DomainError("build_rel_eigenstate: basis_size must exceed nu at zero coupling");
    s.coeffs[static_cast<std::size_t>(nu)] = 1.0;
    return s;
  }
  s.norm_a = normalization_constant(s.level);
  std::vector<double> origin = specfun::ho_at_origin(2 * (basis_size - 1));
  for (int n = 0; n < basis_size; ++n)
    s.coeffs[n] = s.norm_a * origin[n] / (2.0 * n + 0.5 - s.level.energy);
  s.tail_estimate = coefficient_tail(s.norm_a, basis_size);
  return s;
}

struct SeriesValue {
  double value = 0.0;
  bool low_accuracy = false;  // |x| < 0.1: series converges slowly near the cusp
};

inline SeriesValue eval_rel_series(const RelEigenstate& s, double x) {
  double ax = std::abs(x);
  std::vector<double> phi(2 * s.coeffs.size() - 1);
  specfun::ho_values_into(ax, phi);
  double sum = 0.0;
  for (std::size_t n = 0; n < s.coeffs.size(); ++n) sum += s.coeffs[n] * phi[2 * n];
  return {sum, ax < 0.1};
}

/// (A / (2 sqrt(pi))) Gamma(-eps) U(-eps, 1/2, x^2) e^{-x^2/2} at each x.
/// Evaluated through the decaying parabolic-cylinder solution anchored to
/// psi(0) = (A/2) Gamma(-eps)/Gamma(1/2 - eps) and psi'(0+) = -A.
inline std::vector<double> eval_rel_closed(const RelEigenstate& s, std::span<const double> xs) {
  if (s.noninteracting())
    throw DegenerateError("eval_rel_closed: zero coupling, use the series path");
  std::vector<double> ax(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) ax[i] = std::abs(xs[i]);
  specfun::DecayingSolution sol = specfun::decaying_parabolic(s.level.energy, ax);
  double eps = s.level.epsilon;
  double value0 = 0.5 * s.norm_a * specfun::gamma_ratio(-eps, 0.5 - eps);
  double slope0 = -s.norm_a;
  double scale = (value0 * sol.value0 + slope0 * sol.slope0) /
                 (sol.value0 * sol.value0 + sol.slope0 * sol.slope0);
  for (double& v : sol.values) v *= scale;
  return sol.values;
}

inline double eval_rel_closed(const RelEigenstate& s, double x) {
  return eval_rel_closed(s, std::span<const double>(&x, 1))[0];
}

/// Closed form when interacting, phi_{2 nu} at zero coupling.
inline std::vector<double> eval_rel(const RelEigenstate& s, std::span<const double> xs) {
  if (!s.noninteracting()) return eval_rel_closed(s, xs);
  std::vector<double> out(xs.size());
  std::vector<double> phi(2 * static_cast<std::size_t>(s.level.nu) + 1);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    specfun::ho_values_into(std::abs(xs[i]), phi);
    out[i] = phi.back();
  }
  return out;
}

inline double eval_rel(const RelEigenstate& s, double x) {
  return eval_rel(s, std::span<const double>(&x, 1))[0];
}

/// Relative state times the center-of-mass ground state pi^{-1/4} e^{-X^2/2}.
struct TwoBodyState {
  RelEigenstate rel;

  double total_energy() const { return rel.energy() + 0.5; }
};

enum class Evaluator { series, closed };

inline double cm_ground(double X) { return std::pow(specfun::kPi, -0.25) * std::exp(-0.5 * X * X); }

inline double eval_total(const TwoBodyState& state, double x1, double x2, Evaluator evaluator) {
  const double r = 1.0 / std::sqrt(2.0);
  double X = (x1 + x2) * r;
  double x = std::abs(x1 - x2) * r;
  double rel = evaluator == Evaluator::series || state.rel.noninteracting()
                   ? eval_rel_series(state.rel, x).value
                   : eval_rel_closed(state.rel, x);
  return cm_ground(X) * rel;
}

}  // namespace quench_duo::eigenstates
