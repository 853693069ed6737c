#pragma once

// Real-argument special functions and harmonic-oscillator basis evaluation.
//
// Units: lengths in oscillator lengths, energies in units of hbar*omega
// (m = hbar = omega = 1).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "quench_duo/errors.hpp"

namespace quench_duo::specfun {

inline constexpr double kPi = std::numbers::pi;

/// Distance to a non-positive integer below which an argument counts as a pole.
inline constexpr double kPoleTolerance = 1e-12;

/// A real number stored as sign * exp(log_abs); sign == 0 encodes exact zero.
struct SignedLogValue {
  double log_abs = -std::numeric_limits<double>::infinity();
  int sign = 0;

  double value() const { return sign == 0 ? 0.0 : sign * std::exp(log_abs); }
};

inline bool near_nonpositive_integer(double x, double tolerance = kPoleTolerance) {
  double n = std::round(x);
  return n <= 0.0 && std::abs(x - n) < tolerance;
}

/// sin(pi x) with exact reduction of the argument to [-1/2, 1/2].
inline double sin_pi(double x) {
  double n = std::round(x);
  double s = std::sin(kPi * (x - n));
  return std::fmod(n, 2.0) == 0.0 ? s : -s;
}

/// cot(pi x) with exact reduction of the argument.
inline double cot_pi(double x) {
  double r = x - std::round(x);
  return std::cos(kPi * r) / std::sin(kPi * r);
}

namespace detail {

// Lanczos approximation, g = 7, nine terms; valid for x >= 1/2.
inline long double lanczos_log_gamma(long double x) {
  static constexpr long double kG = 7.0L;
  static constexpr long double kCoeff[9] = {
      0.99999999999980993227684700473478L,  676.520368121885098567009190444019L,
      -1259.13921672240287047156078755283L, 771.3234287776530788486528258894L,
      -176.61502916214059906584551354L,     12.507343278686904814458936853L,
      -0.13857109526572011689554707L,       9.984369578019570859563e-6L,
      1.50563273514931155834e-7L};
  static const long double kHalfLogTwoPi = 0.5L * std::log(2.0L * std::numbers::pi_v<long double>);
  x -= 1.0L;
  long double sum = kCoeff[0];
  for (int i = 1; i < 9; ++i) sum += kCoeff[i] / (x + i);
  long double t = x + kG + 0.5L;
  return kHalfLogTwoPi + (x + 0.5L) * std::log(t) - t + std::log(sum);
}

struct LongSignedLog {
  long double log_abs;
  int sign;
};

inline LongSignedLog ln_gamma_extended(double x) {
  if (!std::isfinite(x)) throw DomainError("ln_gamma: non-finite argument");
  if (near_nonpositive_integer(x))
    throw PoleError("ln_gamma: pole at x = " + std::to_string(x));
  if (x >= 0.5) return {lanczos_log_gamma(x), 1};
  // Reflection: Gamma(x) Gamma(1 - x) = pi / sin(pi x).
  double s = sin_pi(x);
  long double log_abs = std::log(std::numbers::pi_v<long double>) -
                        std::log(std::abs(static_cast<long double>(s))) -
                        lanczos_log_gamma(1.0L - static_cast<long double>(x));
  return {log_abs, s > 0 ? 1 : -1};
}

}  // namespace detail

/// ln|Gamma(x)| and sign(Gamma(x)); throws PoleError at non-positive integers.
inline SignedLogValue ln_gamma_signed(double x) {
  auto r = detail::ln_gamma_extended(x);
  return {static_cast<double>(r.log_abs), r.sign};
}

/// 1 / Gamma(x), exactly zero at the poles of Gamma.
inline double reciprocal_gamma(double x) {
  if (near_nonpositive_integer(x)) return 0.0;
  auto r = detail::ln_gamma_extended(x);
  return r.sign * static_cast<double>(std::exp(-r.log_abs));
}

/// Gamma(a) / Gamma(b) evaluated in signed-log form.
/// Vanishes when b sits on a pole; returns a signed infinity when only a does.
inline double gamma_ratio(double a, double b) {
  bool a_pole = near_nonpositive_integer(a);
  bool b_pole = near_nonpositive_integer(b);
  if (a_pole && b_pole) throw PoleError("gamma_ratio: both arguments on poles");
  if (b_pole) return 0.0;
  if (a_pole) {
    return detail::ln_gamma_extended(b).sign * std::numeric_limits<double>::infinity();
  }
  auto la = detail::ln_gamma_extended(a);
  auto lb = detail::ln_gamma_extended(b);
  return la.sign * lb.sign * static_cast<double>(std::exp(la.log_abs - lb.log_abs));
}

/// Digamma function psi(x) = d/dx ln Gamma(x).
inline double digamma(double x) {
  if (!std::isfinite(x)) throw DomainError("digamma: non-finite argument");
  if (near_nonpositive_integer(x))
    throw PoleError("digamma: pole at x = " + std::to_string(x));
  if (x < 0.0) return digamma(1.0 - x) - kPi * cot_pi(x);
  double shift = 0.0;
  while (x < 6.0) {
    shift -= 1.0 / x;
    x += 1.0;
  }
  // Asymptotic series with Bernoulli numbers B_2 .. B_14.
  double inv2 = 1.0 / (x * x);
  double tail =
      inv2 * (1.0 / 12 -
              inv2 * (1.0 / 120 -
                      inv2 * (1.0 / 252 -
                              inv2 * (1.0 / 240 -
                                      inv2 * (1.0 / 132 - inv2 * (691.0 / 32760 - inv2 / 12))))));
  return shift + std::log(x) - 0.5 / x - tail;
}

// ---------------------------------------------------------------------------
// Harmonic-oscillator eigenfunctions

/// phi_0 .. phi_{n_max} at a single point x.
struct HoBasisSlice {
  int n_max = 0;
  double x = 0.0;
  std::vector<double> values;
};

/// Fills out[n] = phi_n(x) for n < out.size() with the normalized three-term
/// recurrence. A running power-of-ten rescale keeps the iteration finite for
/// arguments where phi_0 itself underflows.
inline void ho_values_into(double x, std::span<double> out) {
  if (out.empty()) return;
  constexpr double kRescale = 1e150;
  const double kLogRescale = std::log(kRescale);
  double scale_log = -0.5 * x * x - 0.25 * std::log(kPi);
  double factor = std::exp(scale_log);
  auto emit = [&](double v) {
    if (scale_log > -700.0 || v == 0.0) return v * factor;
    double mag = std::exp(scale_log + std::log(std::abs(v)));
    return v < 0.0 ? -mag : mag;
  };
  double prev = 0.0;
  double cur = 1.0;
  out[0] = emit(cur);
  for (std::size_t n = 0; n + 1 < out.size(); ++n) {
    double up = std::sqrt(2.0 / static_cast<double>(n + 1));
    double down = std::sqrt(static_cast<double>(n) / static_cast<double>(n + 1));
    double next = x * up * cur - down * prev;
    prev = cur;
    cur = next;
    if (std::abs(cur) > kRescale) {
      cur /= kRescale;
      prev /= kRescale;
      scale_log += kLogRescale;
      factor = std::exp(scale_log);
    }
    out[n + 1] = emit(cur);
  }
}

inline HoBasisSlice ho_values(int n_max, double x) {
  if (n_max < 0) throw DomainError("ho_values: n_max must be >= 0");
  HoBasisSlice slice{n_max, x, std::vector<double>(static_cast<std::size_t>(n_max) + 1)};
  ho_values_into(x, slice.values);
  return slice;
}

/// phi_{2n}(0) for 2n <= n_max, indexed by n (odd modes vanish at the origin).
inline std::vector<double> ho_at_origin(int n_max) {
  if (n_max < 0) throw DomainError("ho_at_origin: n_max must be >= 0");
  std::vector<double> v(static_cast<std::size_t>(n_max / 2) + 1);
  v[0] = std::pow(kPi, -0.25);
  for (std::size_t n = 1; n < v.size(); ++n) {
    double m = static_cast<double>(n);
    v[n] = -std::sqrt((2.0 * m - 1.0) / (2.0 * m)) * v[n - 1];
  }
  return v;
}

// ---------------------------------------------------------------------------
// Confluent hypergeometric functions

struct KummerSum {
  double value = 0.0;
  double largest_term = 0.0;
};

/// Kummer series M(a, b, z); the largest term magnitude measures cancellation.
inline KummerSum kummer_m(double a, double b, double z) {
  constexpr int kMaxTerms = 10000;
  double term = 1.0;
  KummerSum s{1.0, 1.0};
  for (int k = 0; k < kMaxTerms; ++k) {
    term *= (a + k) / (b + k) * z / (k + 1);
    s.value += term;
    s.largest_term = std::max(s.largest_term, std::abs(term));
    if (term == 0.0 || std::abs(term) < 1e-16 * std::abs(s.value)) return s;
  }
  throw ConvergenceError("kummer_m: series did not converge within 10000 terms");
}

/// Values of the solution of w'' = (x^2 - 2E) w that decays as x -> infinity,
/// sampled at non-negative points. Integrated inward from beyond the turning
/// point with local Taylor steps, where the decaying branch is the dominant one.
/// Overall scale is arbitrary: value0/slope0 are w(0), w'(0+) in the same scale
/// as `values`, normalized so that max(|value0|, |slope0|) = 1.
struct DecayingSolution {
  std::vector<double> values;
  double value0 = 0.0;
  double slope0 = 0.0;
};

namespace detail {

struct TaylorState {
  double w;
  double dw;
};

// One Taylor step of w'' = (x^2 - 2E) w from x0 to x0 + h.
inline TaylorState taylor_step(double x0, TaylorState s, double h, double energy) {
  const double q0h2 = (x0 * x0 - 2.0 * energy) * h * h;
  const double q1h3 = 2.0 * x0 * h * h * h;
  const double q2h4 = h * h * h * h;
  // d_j = c_j h^j; d_{j+2} follows from d_j, d_{j-1}, d_{j-2}.
  double dm2 = 0.0, dm1 = 0.0;
  double dj = s.w;
  double dj1 = s.dw * h;
  double value = dj + dj1;
  double deriv = dj1;  // sum of j d_j, divided by h at the end
  for (int j = 0; j < 200; ++j) {
    double next = (q0h2 * dj + q1h3 * dm1 + q2h4 * dm2) / ((j + 2.0) * (j + 1.0));
    value += next;
    deriv += (j + 2.0) * next;
    dm2 = dm1;
    dm1 = dj;
    dj = dj1;
    dj1 = next;
    if (j > 4) {
      double scale = std::abs(value) + std::abs(deriv);
      if (std::abs(dj1) + std::abs(dj) + std::abs(dm1) <= 1e-18 * scale) break;
    }
  }
  return {value, deriv / h};
}

}  // namespace detail

inline DecayingSolution decaying_parabolic(double energy, std::span<const double> xs) {
  std::vector<std::size_t> order(xs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](auto i, auto j) { return xs[i] > xs[j]; });
  double x_max = 0.0;
  for (double x : xs) {
    if (!(x >= 0.0) || !std::isfinite(x))
      throw DomainError("decaying_parabolic: sample points must be finite and >= 0");
    x_max = std::max(x_max, x);
  }

  auto kappa = [energy](double x) { return std::sqrt(std::max(x * x - 2.0 * energy, 0.0)); };
  double x = std::max(x_max, std::sqrt(std::max(2.0 * energy, 0.0)));
  for (double action = 0.0; action < 30.0 || kappa(x) < 1.0;) {
    action += 0.05 * kappa(x + 0.025);
    x += 0.05;
  }

  double k0 = kappa(x);
  detail::TaylorState state{1.0, -(k0 + x / (2.0 * k0 * k0))};
  double scale_log = 0.0;
  constexpr double kRescale = 1e100;
  const double kLogRescale = std::log(kRescale);

  std::vector<double> raw(xs.size());
  std::vector<double> raw_log(xs.size());
  auto advance_to = [&](double target) {
    while (x > target) {
      double qa = std::abs(x * x - 2.0 * energy);
      double xb = std::max(target, x - 0.25);
      double qb = std::abs(xb * xb - 2.0 * energy);
      double h_max = std::min(0.25, 1.0 / std::sqrt(1.0 + std::max(qa, qb)));
      double h = std::max(target - x, -h_max);
      state = detail::taylor_step(x, state, h, energy);
      x = (h == target - x) ? target : x + h;
      if (std::abs(state.w) > kRescale || std::abs(state.dw) > kRescale) {
        state.w /= kRescale;
        state.dw /= kRescale;
        scale_log += kLogRescale;
      }
    }
  };
  for (std::size_t idx : order) {
    advance_to(xs[idx]);
    raw[idx] = state.w;
    raw_log[idx] = scale_log;
  }
  advance_to(0.0);

  DecayingSolution sol;
  double norm0 = std::max(std::abs(state.w), std::abs(state.dw));
  sol.value0 = state.w / norm0;
  sol.slope0 = state.dw / norm0;
  sol.values.resize(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i)
    sol.values[i] = raw[i] / norm0 * std::exp(raw_log[i] - scale_log);
  return sol;
}

/// U(a, 1/2, x^2) * exp(-x^2 / 2) at non-negative points x.
/// Uses the inward-integrated decaying solution, anchored at the origin to
/// U(a, 1/2, 0) = sqrt(pi)/Gamma(a + 1/2) and d/dx at 0+ = -2 sqrt(pi)/Gamma(a).
inline std::vector<double> tricomi_u_half_gaussian(double a, std::span<const double> xs) {
  DecayingSolution sol = decaying_parabolic(0.5 - 2.0 * a, xs);
  const double root_pi = std::sqrt(kPi);
  double target0 = root_pi * reciprocal_gamma(a + 0.5);
  double slope0 = -2.0 * root_pi * reciprocal_gamma(a);
  double scale = (target0 * sol.value0 + slope0 * sol.slope0) /
                 (sol.value0 * sol.value0 + sol.slope0 * sol.slope0);
  for (double& v : sol.values) v *= scale;
  return sol.values;
}

/// Tricomi confluent hypergeometric function U(a, 1/2, z) for 0 <= z <= 200.
/// Polynomial case (a near a non-positive integer) uses the contiguous
/// recurrence of the Laguerre form; otherwise the two-Kummer connection formula
/// when it is free of cancellation, else the inward ODE route.
inline double tricomi_u_half(double a, double z) {
  if (!std::isfinite(a) || !std::isfinite(z) || z < 0.0 || z > 200.0)
    throw DomainError("tricomi_u_half: requires finite a and 0 <= z <= 200");
  const double root_pi = std::sqrt(kPi);
  if (near_nonpositive_integer(a, 1e-9)) {
    // U(-k-1) = (z - 1/2 - 2k) U(-k) - k (k - 1/2) U(-k+1)
    int m = static_cast<int>(-std::round(a));
    double prev = 1.0, cur = z - 0.5;
    if (m == 0) return 1.0;
    for (int k = 1; k < m; ++k) {
      double next = (z - 0.5 - 2.0 * k) * cur - k * (k - 0.5) * prev;
      prev = cur;
      cur = next;
    }
    return cur;
  }
  double c1 = root_pi * reciprocal_gamma(a + 0.5);
  if (z == 0.0) return c1;
  double c2 = -2.0 * root_pi * reciprocal_gamma(a) * std::sqrt(z);
  KummerSum m1 = kummer_m(a, 0.5, z);
  KummerSum m2 = kummer_m(a + 0.5, 1.5, z);
  double result = c1 * m1.value + c2 * m2.value;
  double bound = std::abs(c1) * m1.largest_term + std::abs(c2) * m2.largest_term;
  if (bound <= 1e4 * std::abs(result)) return result;
  double x = std::sqrt(z);
  return tricomi_u_half_gaussian(a, std::span<const double>(&x, 1))[0] * std::exp(0.5 * z);
}

}  // namespace quench_duo::specfun
