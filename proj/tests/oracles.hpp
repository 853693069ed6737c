#pragma once

// Test-side reference implementations. They are deliberately naive (direct
// formulas, std:: special functions, brute-force quadrature) and share no code
// with the library. Frozen high-precision constants were produced with mpmath
// at 30 significant digits.

#include <cmath>
#include <functional>
#include <utility>
#include <numbers>
#include <vector>

namespace oracle {

inline constexpr double pi = std::numbers::pi;

// Hermite function via the physicists' polynomial, long double; fine for n <= 40, |x| <= 8.
inline double hermite_function(int n, double x) {
  long double h0 = 1.0L, h1 = 2.0L * x;
  if (n == 0) h1 = h0;
  for (int k = 1; k < n; ++k) {
    long double h2 = 2.0L * x * h1 - 2.0L * k * h0;
    h0 = h1;
    h1 = h2;
  }
  long double norm = std::sqrt(std::pow(2.0L, n) * std::tgamma(n + 1.0L) * std::sqrt(std::numbers::pi_v<long double>));
  return static_cast<double>(h1 * std::exp(-0.5L * x * x) / norm);
}

// Gamma(-E/2 + 3/4) / Gamma(-E/2 + 1/4) + g/2 with std::tgamma.
inline double busch_residual(double e, double g) {
  return std::tgamma(-0.5 * e + 0.75) / std::tgamma(-0.5 * e + 0.25) + 0.5 * g;
}

// Plain bisection of busch_residual on [lo, hi].
inline double busch_root(double g, double lo, double hi) {
  double flo = busch_residual(lo, g);
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    double fm = busch_residual(mid, g);
    if ((fm > 0) == (flo > 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Composite Simpson on [a, b] with n (even) panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n) {
  double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

// Unnormalized even relative eigenfunction from its oscillator series,
// truncated at n_terms; coefficients phi_{2n}(0) / (2n + 1/2 - E).
inline double series_unnormalized(double e, double x, int n_terms) {
  double s = 0.0;
  for (int n = 0; n < n_terms; ++n) s += hermite_function(2 * n, 0.0) * hermite_function(2 * n, x) / (2.0 * n + 0.5 - e);
  return s;
}

// mpmath reference values.
namespace frozen {

struct LnGamma { double x, value; int sign; };
inline const std::vector<LnGamma> ln_gamma = {
    {170.0, 701.43726380873708535, 1},       {25.3, 55.746181183584592334, 1},
    {1e-5, 11.512919692895825626, 1},        {-3.5, -1.3090066849930420464, 1},
    {-20.7, -43.105133189536223951, -1},     {-0.999, 6.9081793857174363282, -1},
    {7.25, 7.0521854507385394449, 1}};

struct Ratio { double a, b, value; };
inline const std::vector<Ratio> gamma_ratio = {
    {0.75, 0.25, 0.3379891200336423645},          {-0.25, 0.25, -1.351956480134569458},
    {-1000.25, -999.75, -0.031614873377445243067}, {-40.3, -39.8, -0.11409365287864137827},
    {120.5, 120.0, 10.943046237578228906}};

struct Point { double x, value; };
inline const std::vector<Point> digamma = {
    {0.001, -1000.5755719318102797}, {-0.001, 999.42113819789133376}, {-49.5, 3.9120396709283919846},
    {-12.3, 4.8321998818114560266},  {0.3, -3.5025242222001331249},   {3.7, 1.1671535393615114409},
    {49.9, 3.8999674969533732438},   {6.0, 1.7061176684318004727},    {-2.75, -1.9590552649779970098},
    {17.2, 2.8155580276466973377}};

struct Hermite { int n; double x, value; };
inline const std::vector<Hermite> hermite = {
    {2000, 1.0, 0.091651034991683314392},   {10, 0.7, 0.37423314183846925072},
    {7, -1.3, -0.40609866425190536303},     {4000, 3.0, -0.025868392919806793222},
    {100, 12.0, -0.17506129306937828173},   {50, 40.0, 4.5551293637797303228e-293},
    {200, 0.0, 0.17830093916124465452},     {800, 0.0, 0.12613691567322990665}};

struct Tricomi { double a, z, value; };
inline const std::vector<Tricomi> tricomi = {
    {-0.3, 2.0, 1.2628905707076774256},        {0.7, 0.01, 1.6823142724483963733},
    {3.9, 5.0, 0.00024046142644212585368},     {-7.6, 30.0, 1.3649826670972867091e10},
    {-19.5, 80.0, 1.675795695659367736e34},    {-19.999999, 100.0, 6.2775018338816249672e37},
    {-12.25, 64.0, 7.7347172265895311629e20},  {4.2, 100.0, 3.2975039100530342266e-9},
    {-2.5, 0.5, 1.0606601717798212866},        {1.0, 1.0, 0.48425568771737578791},
    {-5.0, 3.0, -14.34375},                    {0.25, 40.0, 0.39581996928827022183},
    {-15.3, 10.0, 1.6241544876295280906e13},   {-0.999, 50.0, 49.308228750662757038}};

// Busch levels and normalization constants A^2.
struct Level { double g; int nu; double energy, a_squared; };
inline const std::vector<Level> levels = {
    {2.0, 0, 1.08389812227631, 0.546953116229104},
    {-2.0, 0, -1.94235869898475, 8.20112350356653}};

}  // namespace frozen
}  // namespace oracle

namespace oracle::frozen {

// Quench tables from the ground state, n_f = 100; mpmath at 30 digits.
struct QuenchCase {
  double g_i, g_f, initial_energy;
  std::vector<double> coeffs;  // first five overlaps
  double norm_sum, mean_energy;
  std::vector<std::pair<double, double>> fidelity;  // (t, F)
};
inline const std::vector<QuenchCase> quench = {
    {2.0, -2.0, 1.0838981222763127,
     {-0.69985157647773317, 0.66636960632107777, 0.19202571361441082, 0.10872435804792097, 0.074345817743731563},
     0.99988337971980426, 0.46718601825241022,
     {{0.5, 0.48634198084056765}, {0.78539816339744831, 0.058428839020079865}, {3.0, 0.92549452387710505}}},
    {-2.0, 2.0, -1.94235869898475,
     {-0.69985157647773317, -0.45214487927136971, -0.31534688995270144, -0.23640235475014295, -0.18647923645968278},
     0.99828444624240986, 5.2235826526794032,
     {{0.5, 0.57170972503812973}, {0.78539816339744831, 0.46525056406477994}, {3.0, 0.6785234929902233}}},
    {1.0, 3.0, 0.89274404530895262,
     {0.98092518167096672, 0.14931475629391765, 0.080417987287453653, 0.05411896295438073, 0.040271478771862974},
     0.99994439343242243, 1.3860413486428146,
     {{0.5, 0.97046494442601714}, {0.78539816339744831, 0.95904547620066259}, {3.0, 0.97927284241069857}}}};

}  // namespace oracle::frozen
