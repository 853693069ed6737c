// Repulsive-to-attractive quench g = 2 -> -2 from the relative ground state:
// prints the dominant overlaps and the strongest fidelity frequencies.

#include <cstdio>
#include <numbers>

#include "quench_duo/quench_duo.hpp"

int main() {
  using namespace quench_duo;
  quench::QuenchScenario sc{2.0, 0, -2.0, 100, 1000};
  quench::OverlapTable t = quench::overlap_table(sc);

  std::printf("E_i = %.6f   S = %.8f   <E> = %.6f\n", t.initial_energy, t.norm_sum, t.mean_energy);
  for (int f = 0; f < 5; ++f)
    std::printf("  nu_f = %d  E_f = %9.5f  |C|^2 = %.5f\n", f, t.energies[f], t.coeffs[f] * t.coeffs[f]);

  auto peaks = quench::merge_peaks(quench::fidelity_spectrum(t), 0.15);
  std::printf("fidelity peaks (omega, weight):\n");
  for (std::size_t k = 0; k < peaks.size() && k < 5; ++k)
    std::printf("  %7.4f  %.5f\n", peaks[k].omega, peaks[k].weight);

  std::vector<double> times{0.0, std::numbers::pi / 4, std::numbers::pi / 2};
  auto fs = quench::fidelity_series(t, times);
  for (std::size_t k = 0; k < times.size(); ++k) std::printf("F(%.4f) = %.6f\n", times[k], fs.values[k]);
}
