// Acceptance checks. `acceptance --criterion N` runs one criterion; with no
// argument all of them run. One PASS/FAIL line per check; exit status 1 if
// any check failed.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <numbers>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <CLI11.hpp>

#include "quench_duo/appio/config.hpp"
#include "quench_duo/appio/run.hpp"
#include "quench_duo/quench_duo.hpp"

using namespace quench_duo;
namespace fs = std::filesystem;
constexpr double kPi = std::numbers::pi;

namespace {

template <class... Args>
std::string fmt(const char* f, Args... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

class Report {
 public:
  explicit Report(int criterion) : criterion_(criterion), start_(std::chrono::steady_clock::now()) {}

  void check(const std::string& name, bool ok, const std::string& detail) {
    std::printf("[%s] criterion %d: %s -- %s\n", ok ? "PASS" : "FAIL", criterion_, name.c_str(), detail.c_str());
    std::fflush(stdout);
    failed_ = failed_ || !ok;
  }

  void info(const std::string& text) {
    std::printf("[INFO] criterion %d: %s\n", criterion_, text.c_str());
    std::fflush(stdout);
  }

  void runtime_below(double budget_s) {
    double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    check("runtime", s < budget_s, fmt("%.2f s (budget %.0f s)", s, budget_s));
  }

  bool failed() const { return failed_; }

 private:
  int criterion_;
  std::chrono::steady_clock::time_point start_;
  bool failed_ = false;
};

double level(double g, int nu) { return spectrum::solve_even_energy(g, nu).energy; }

// Top `count` merged positive-frequency peaks, sorted by frequency.
std::vector<double> top_peaks(const quench::OverlapTable& t, std::size_t count) {
  auto peaks = quench::merge_peaks(quench::fidelity_spectrum(t), 0.15);
  std::vector<double> out;
  for (std::size_t k = 0; k < count && k < peaks.size(); ++k) out.push_back(peaks[k].omega);
  std::sort(out.begin(), out.end());
  return out;
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (double x : v) s += (s.empty() ? "" : ", ") + fmt("%.4f", x);
  return "{" + s + "}";
}

// ---------------------------------------------------------------------------

void criterion_1(Report& r) {
  struct Row {
    double g_f;
    std::vector<double> expected;
  };
  // Differences E_a - E_b of postquench levels, labelled by 2 nu.
  const std::vector<std::pair<int, int>> labels = {{2, 0}, {4, 0}, {6, 0}, {4, 2}, {6, 2}, {8, 2}, {8, 0}};
  const std::vector<Row> rows = {{-2.0, {3.95, 6.06, 8.11, 2.11, 4.17, 6.20, 10.15}},
                                 {2.0, {1.85, 3.78, 5.73, 1.93, 3.88, 5.85, 7.70}}};
  for (const auto& row : rows) {
    auto lv = spectrum::solve_even_energies(row.g_f, 5);
    for (std::size_t k = 0; k < labels.size(); ++k) {
      auto [a, b] = labels[k];
      double d = lv[a / 2].energy - lv[b / 2].energy;
      r.check(fmt("g_f=%+.0f  dE_{%d;%d}", row.g_f, a, b), std::abs(d - row.expected[k]) <= 0.01,
              fmt("%.4f vs %.2f (tol 0.01)", d, row.expected[k]));
    }
  }
  r.runtime_below(1.0);
}

void criterion_2(Report& r) {
  auto lv = spectrum::solve_even_energies(0.0, 10);
  double worst = 0.0;
  for (int nu = 0; nu < 10; ++nu) worst = std::max(worst, std::abs(lv[nu].energy - (2.0 * nu + 0.5)));
  r.check("E_{2nu}(0) = 2nu + 1/2, nu < 10", worst <= std::numeric_limits<double>::epsilon() * 18.5,
          fmt("max deviation %.1e", worst));
  double e = level(500.0, 0);
  r.check("doublet E_0(500) near 3/2", std::abs(e - 1.5) <= 0.02, fmt("%.6f (tol 0.02)", e));
  r.runtime_below(1.0);
}

void criterion_3(Report& r) {
  struct Case {
    double g_i, g_f;
    std::vector<double> expected;
  };
  const std::vector<Case> cases = {{2.0, -2.0, {2.11, 3.95, 4.17, 6.06, 8.11}}, {-2.0, 2.0, {1.85, 3.78, 5.73, 7.7, 9.68}}};
  for (const auto& c : cases) {
    auto t = quench::overlap_table({c.g_i, 0, c.g_f, 100, 1000});
    auto top = top_peaks(t, 5);
    double worst = 0.0;
    for (std::size_t k = 0; k < 5; ++k) worst = std::max(worst, std::abs(top[k] - c.expected[k]));
    r.check(fmt("g %+.0f -> %+.0f top five lines", c.g_i, c.g_f), top.size() == 5 && worst <= 0.02,
            join(top) + " vs " + join(c.expected) + fmt(", max dev %.4f (tol 0.02)", worst));
    if (c.g_i > 0) {
      auto sp = quench::fidelity_spectrum(t);
      const quench::FidelityLine* best = nullptr;
      for (const auto& l : sp.lines)
        if (l.nu_f >= 0 && l.nu_f != l.nu_h && (!best || l.weight > best->weight)) best = &l;
      bool ok = best && ((best->nu_f == 1 && best->nu_h == 0) || (best->nu_f == 0 && best->nu_h == 1));
      r.check("dominant pairwise line is omega_{2;0}", ok,
              fmt("largest distinct-level line (nu_f=%d, nu_h=%d), |omega| = %.4f, weight %.4f", best->nu_f,
                  best->nu_h, std::abs(best->omega), best->weight));
    }
  }
  r.runtime_below(5.0);
}

void criterion_4(Report& r) {
  auto rows = quench::convergence_report({-2.0, 0, 2.0, 1, 1000}, {15, 30, 500, 1000});
  const auto& r15 = rows[0];
  const auto& r30 = rows[1];
  const auto& r500 = rows[2];
  const auto& r1000 = rows[3];
  r.check("S(N_f=30) >= 0.999", r30.norm_sum >= 0.999, fmt("S(30) = %.6f", r30.norm_sum));
  double rel = std::abs(r500.mean_energy - r1000.mean_energy) / std::abs(r1000.mean_energy);
  r.check("|<E>(500) - <E>(1000)| / |<E>(1000)| < 1e-3", rel < 1e-3,
          fmt("<E>(500) = %.5f, <E>(1000) = %.5f, relative change %.2e", r500.mean_energy, r1000.mean_energy, rel));
  r.check("max_t |F_15 - F_1000| < 5e-3 on [0, 4 pi]", r15.fidelity_deviation < 5e-3,
          fmt("%.3e", r15.fidelity_deviation));
  r.info(fmt("S(1000) = %.7f, deficit %.2e", r1000.norm_sum, 1.0 - r1000.norm_sum));
  r.runtime_below(60.0);
}

void criterion_5(Report& r) {
  std::vector<double> crossings;
  double prev_g = 0.0, prev_d = 0.0;
  const int steps = 141;  // g_f in [-4, -0.5], step 0.025
  for (int k = 0; k < steps; ++k) {
    double g_f = -4.0 + 3.5 * k / (steps - 1.0);
    auto t = quench::overlap_table({2.0, 0, g_f, 2, 10});
    double d = t.coeffs[0] * t.coeffs[0] - t.coeffs[1] * t.coeffs[1];
    if (k > 0 && (d > 0) != (prev_d > 0)) crossings.push_back(prev_g - prev_d * (g_f - prev_g) / (d - prev_d));
    prev_g = g_f;
    prev_d = d;
  }
  bool ok = !crossings.empty();
  for (double c : crossings) ok = ok && c >= -2.5 && c <= -1.5;
  r.check("|C_{0;0}|^2 - |C_{2;0}|^2 changes sign within g_f in [-2.5, -1.5]", ok,
          fmt("%zu sign change(s), ", crossings.size()) + "at " + join(crossings));
  r.runtime_below(10.0);
}

void criterion_6(Report& r) {
  auto t = quench::overlap_table({2.0, 0, -2.0, 100, 1000});
  auto grid = make_grid(6.0, 400);
  quench::QuenchPropagator prop(t, grid);
  auto dm = observables::rho1_from_field(prop.field(kPi / 4));
  std::vector<double> p;
  for (int k = -800; k <= 800; ++k) p.push_back(0.005 * k);
  auto m = observables::momentum_from_dm(dm, p);
  auto it = std::max_element(m.values.begin(), m.values.end());
  double p_max = std::abs(p[static_cast<std::size_t>(it - m.values.begin())]);
  r.check("global maximum of n(p; pi/4) at |p| = 1.2 +- 0.15", std::abs(p_max - 1.2) <= 0.15,
          fmt("|p| = %.3f, n = %.4f, n(0) = %.4f", p_max, *it, m.values[800]));
  r.runtime_below(30.0);
}

void criterion_7(Report& r) {
  // Overlaps: closed form against direct quadrature.
  const std::vector<std::pair<double, double>> pairs = {{2.0, -2.0}, {-2.0, 2.0}, {0.5, 4.0}, {-1.0, -3.0}};
  for (auto [gi, gf] : pairs) {
    double worst = 0.0;
    for (int ni = 0; ni < 5; ++ni)
      for (int nf = 0; nf < 5; ++nf) {
        auto si = eigenstates::build_rel_eigenstate(gi, ni, 1), sf = eigenstates::build_rel_eigenstate(gf, nf, 1);
        worst = std::max(worst, std::abs(quench::overlap_closed(si, sf) - quench::overlap_quadrature(si, sf)));
      }
    r.check(fmt("overlap closed vs quadrature, g %+.1f -> %+.1f, 5x5 block", gi, gf), worst <= 1e-6,
            fmt("max |diff| %.2e (tol 1e-6)", worst));
  }

  // Series (basis 2000) against closed form, L2 distance by quadrature on the half line.
  quadrature::Rule rule = quadrature::half_line_rule(14.0, 1400, 16);
  for (double g : {-2.0, 2.0})
    for (int nu = 0; nu < 3; ++nu) {
      auto s = eigenstates::build_rel_eigenstate(g, nu, 2000);
      std::vector<double> closed = eigenstates::eval_rel_closed(s, rule.nodes);
      std::vector<double> diff2(rule.nodes.size());
      parallel_for(rule.nodes.size(), [&](std::size_t k) {
        double d = eigenstates::eval_rel_series(s, rule.nodes[k]).value - closed[k];
        diff2[k] = rule.weights[k] * d * d;
      });
      double l2 = std::sqrt(2.0 * std::accumulate(diff2.begin(), diff2.end(), 0.0));
      double norm = 0.0;
      for (double c : s.coeffs) norm += c * c;
      r.check(fmt("series vs closed L2, g %+.0f nu %d, basis 2000", g, nu), l2 <= 1e-3,
              fmt("%.2e (tol 1e-3; projection identity sqrt(1 - sum c^2) = %.2e, E = %.4f)", l2,
                  std::sqrt(std::max(0.0, 1.0 - norm)), s.energy()));
    }

  // Oscillator-sum identity.
  for (double e : {-1.9424, 0.1, 1.0839, 2.9, 5.7})
    for (long n : {100L, 10000L}) {
      auto id = spectrum::sum_identity_check(e, n);
      double d = std::abs(id.partial_sum - id.closed_form);
      r.check(fmt("sum identity E=%.4f, %ld terms", e, n), d <= id.tail_bound,
              fmt("|diff| %.4e, tail bound %.4e", d, id.tail_bound));
    }
  r.runtime_below(60.0);
}

void density_checks(Report& r, const std::string& tag, const GridField& field, double s) {
  auto dm = observables::rho1_from_field(field);
  auto nd = observables::natural_decomposition(dm);
  auto r2 = observables::rho2_from_field(field);
  const int np = 2 * field.grid.n_points;
  auto m = observables::momentum_from_dm(dm, observables::nyquist_momentum_points(field.grid, np));
  double asym = 0.0;
  for (int k = 1; k < np; ++k) asym = std::max(asym, std::abs(m.values[k] - m.values[np - k]));
  double pars = observables::nyquist_integral(m, field.grid);
  double min_ev = *std::min_element(nd.populations.begin(), nd.populations.end());
  bool ok = dm.hermiticity_defect() <= 1e-12 && std::abs(dm.trace() - s) <= 1e-4 && min_ev >= -1e-10 &&
            std::abs(r2.integral() - s) <= 1e-4 && asym <= 1e-10 && std::abs(pars - s) <= 1e-4;
  r.check(tag, ok,
          fmt("herm %.1e, tr-S %.1e, min eig %.1e, int rho2-S %.1e, n(p) asym %.1e, int n-S %.1e", dm.hermiticity_defect(),
              dm.trace() - s, min_ev, r2.integral() - s, asym, pars - s));
}

void criterion_8(Report& r) {
  auto grid = make_grid(6.0, 400);
  for (double g : {-2.0, 0.0, 2.0}) {
    auto s = eigenstates::build_rel_eigenstate(g, 0, 1);
    density_checks(r, fmt("stationary g=%+.0f (L=6, 400 pts)", g), quench::stationary_field(s, grid), 1.0);
  }
  auto wide = make_grid(10.0, 400);
  for (auto [gi, gf] : std::vector<std::pair<double, double>>{{2.0, -2.0}, {-2.0, 2.0}}) {
    auto t = quench::overlap_table({gi, 0, gf, 30, 1000});
    quench::QuenchPropagator prop(t, wide);
    for (double time : {0.0, kPi / 8, kPi / 4, kPi / 2, kPi})
      density_checks(r, fmt("g %+.0f -> %+.0f, t=%.4f (L=10, 400 pts, N_f=30, S=%.6f)", gi, gf, time, t.norm_sum),
                     prop.field(time), t.norm_sum);
  }
  r.runtime_below(120.0);
}

void criterion_9(Report& r) {
  {
    auto t = quench::overlap_table({2.0, 0, -2.0, 100, 1000});
    auto grid = make_grid(6.0, 401);
    auto dm = observables::rho1_from_field(quench::QuenchPropagator(t, grid).field(kPi / 4));
    auto ad = dm.anti_diagonal();
    std::vector<double> a(ad.size());
    for (std::size_t i = 0; i < ad.size(); ++i) a[i] = std::abs(ad[i]);
    // The anti-diagonal crosses the center at x = 0; the humps are the largest
    // off-center local maxima of |rho(x, -x)|, mirrored, with a dip between them and the center.
    const std::size_t mid = a.size() / 2;
    std::size_t hump = 0;
    for (std::size_t i = mid + 1; i + 1 < a.size(); ++i)
      if (a[i] > a[i - 1] && a[i] > a[i + 1] && (hump == 0 || a[i] > a[hump])) hump = i;
    bool ok = hump != 0;
    double dip = 0.0;
    std::size_t mirror = 0;
    if (ok) {
      mirror = a.size() - 1 - hump;
      dip = *std::min_element(a.begin() + static_cast<long>(mid), a.begin() + static_cast<long>(hump));
      ok = a[mirror] > a[mirror - 1] && a[mirror] > a[mirror + 1] &&
           std::abs(a[mirror] - a[hump]) <= 1e-12 * a[hump] && dip < a[hump];
    }
    r.check("rho1(x, -x) at t=pi/4 (2 -> -2) has two symmetric humps", ok,
            fmt("humps at x = %+.3f and %+.3f with |rho| = %.4f, dip %.4f between them and the center (|rho(0,0)| = %.4f)",
                grid.points[hump], grid.points[mirror], a[hump], dip, a[mid]));
  }
  auto grid = make_grid(6.0, 401);  // odd count: the origin is a grid point
  const int c = grid.n_points / 2;
  {
    auto r2 = observables::rho2_from_field(quench::stationary_field(eigenstates::build_rel_eigenstate(2.0, 0, 1), grid));
    auto anti = r2.anti_diagonal();
    double amax = *std::max_element(anti.begin(), anti.end());
    r.check("stationary g=2: correlation hole", r2.values(c, c) < amax,
            fmt("rho2(0,0) = %.4f < anti-diagonal max %.4f", r2.values(c, c), amax));
  }
  {
    auto r2 = observables::rho2_from_field(quench::stationary_field(eigenstates::build_rel_eigenstate(-2.0, 0, 1), grid));
    Eigen::Index i, j;
    double v = r2.values.maxCoeff(&i, &j);
    r.check("stationary g=-2: rho2 global maximum at the origin", i == c && j == c,
            fmt("max %.4f at (%.3f, %.3f)", v, grid.points[i], grid.points[j]));
  }
  r.runtime_below(30.0);
}

void criterion_10(Report& r) {
  fs::path root = fs::temp_directory_path() / "quench_duo_acceptance_snapshots";
  fs::remove_all(root);
  const std::string times = "t_start = 0\nt_stop = 3.141592653589793\nt_count = 5\n";
  struct Job {
    std::string dir, text;
    std::vector<std::string> expect;
  };
  std::vector<Job> jobs;
  for (auto [gi, gf, tag] : {std::tuple{2.0, -2.0, "rep_to_att"}, std::tuple{-2.0, 2.0, "att_to_rep"}}) {
    std::vector<std::string> expect;
    for (const char* stamp : {"t0p0000", "t0p7854", "t1p5708", "t3p1416"})
      for (const char* kind : {"rho1_", "rho2_", "momentum_", "natural_populations_"}) expect.push_back(kind + std::string(stamp));
    expect.push_back("breathing");
    jobs.push_back({tag, fmt("mode = evolve\ng_i = %g\ng_f = %g\nn_f = 30\nn_points = 120\n", gi, gf) + times, expect});
  }
  for (double g : {-2.0, 2.0})
    jobs.push_back({fmt("state_g%+.0f", g), fmt("mode = state\ng_i = %g\nn_points = 120\n", g),
                    {"relative_state", "rho1_t0p0000", "rho2_t0p0000", "momentum_t0p0000", "natural_populations"}});
  jobs.push_back({"converge", "mode = converge\ng_i = -2\ng_f = 2\n", {"convergence"}});
  jobs.push_back({"spectrum", "mode = spectrum\n", {"spectrum"}});
  for (const auto& job : jobs) {
    fs::path dir = root / job.dir;
    std::size_t missing = 0;
    std::string first_missing;
    try {
      appio::run(appio::parse_config(job.text + "formats = csv,plotscript\noutput_dir = " + dir.string() + "\n"));
      for (const auto& name : job.expect)
        for (const char* ext : {".csv", ".py"})
          if (!fs::exists(dir / (name + ext)) || fs::file_size(dir / (name + ext)) == 0) {
            if (!missing++) first_missing = name + ext;
          }
    } catch (const std::exception& e) {
      missing = job.expect.size() * 2;
      first_missing = e.what();
    }
    r.check("datasets and plot scripts: " + job.dir, missing == 0,
            missing ? fmt("%zu missing, first: ", missing) + first_missing
                    : fmt("%zu datasets with scripts in ", job.expect.size()) + dir.string());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"quench_duo acceptance checks"};
  int only = 0;
  app.add_option("--criterion", only, "run a single criterion (1-10)")->check(CLI::Range(1, 10));
  CLI11_PARSE(app, argc, argv);

  const std::map<int, std::function<void(Report&)>> criteria = {
      {1, criterion_1}, {2, criterion_2}, {3, criterion_3}, {4, criterion_4},  {5, criterion_5},
      {6, criterion_6}, {7, criterion_7}, {8, criterion_8}, {9, criterion_9}, {10, criterion_10}};
  bool failed = false;
  for (const auto& [n, body] : criteria) {
    if (only && n != only) continue;
    Report r(n);
    try {
      body(r);
    } catch (const std::exception& e) {
      r.check("completed without error", false, e.what());
    }
    failed = failed || r.failed();
  }
  return failed ? 1 : 0;
}
