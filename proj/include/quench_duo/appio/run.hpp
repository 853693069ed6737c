#pragma once

// Mode orchestration: compute datasets for a RunConfig and write them out.

#include <cmath>
#include <filesystem>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include "quench_duo/appio/config.hpp"
#include "quench_duo/appio/dataset.hpp"
#include "quench_duo/appio/plot_script.hpp"
#include "quench_duo/quench_duo.hpp"

namespace quench_duo::appio {

/// Process exit codes of the command-line tool.
enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitNumerical = 3, kExitInternal = 4 };

/// Maps the exception currently being handled to an exit code.
inline int exit_code_for_current_exception() {
  try {
    throw;
  } catch (const ConfigError&) {
    return kExitConfig;
  } catch (const ConvergenceError&) {
    return kExitNumerical;
  } catch (const PoleError&) {
    return kExitNumerical;
  } catch (const DegenerateError&) {
    return kExitNumerical;
  } catch (...) {
    return kExitInternal;
  }
}

namespace detail {

inline void add_config_meta(Dataset& ds, const RunConfig& c) {
  ds.add_meta("library_version", kVersion);
  std::istringstream in(serialize(c));
  std::string line, section;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line.front() == '[') {
      section = line.substr(1, line.size() - 2);
      continue;
    }
    auto eq = line.find(" = ");
    ds.add_meta("config." + section + "." + line.substr(0, eq), line.substr(eq + 3));
  }
}

inline void add_table_meta(Dataset& ds, const quench::OverlapTable& t) {
  ds.add_meta("norm_sum_S", format_number(t.norm_sum));
  ds.add_meta("truncation_deficit", format_number(t.truncation_deficit()));
  ds.add_meta("mean_energy", format_number(t.mean_energy));
  ds.add_meta("initial_energy", format_number(t.initial_energy));
}

inline quench::QuenchScenario scenario_of(const RunConfig& c) {
  return {c.g_i, c.nu_i, c.g_f, c.n_f, c.basis_size};
}

inline Dataset rho1_dataset(const std::string& name, const observables::OneBodyDM& dm) {
  Dataset ds{name, {"x", "x_prime", "re", "im"}, {}, {}, PlotKind::heatmap, "x", "x_prime", {"re", "im"}};
  const auto& p = dm.grid.points;
  ds.rows.reserve(p.size() * p.size());
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = 0; j < p.size(); ++j) {
      auto z = dm.matrix(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      ds.rows.push_back({p[i], p[j], z.real(), z.imag()});
    }
  ds.add_meta("trace", format_number(dm.trace()));
  return ds;
}

inline Dataset rho2_dataset(const std::string& name, const observables::TwoBodyDensity& r2) {
  Dataset ds{name, {"x1", "x2", "value"}, {}, {}, PlotKind::heatmap, "x1", "x2", {"value"}};
  const auto& p = r2.grid.points;
  ds.rows.reserve(p.size() * p.size());
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = 0; j < p.size(); ++j)
      ds.rows.push_back({p[i], p[j], r2.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))});
  ds.add_meta("integral", format_number(r2.integral()));
  return ds;
}

inline Dataset momentum_dataset(const std::string& name, const observables::MomentumDistribution& m) {
  Dataset ds{name, {"p", "n"}, {}, {}, PlotKind::line, "p", "n", {}};
  for (std::size_t k = 0; k < m.p_points.size(); ++k) ds.rows.push_back({m.p_points[k], m.values[k]});
  return ds;
}

inline Dataset populations_dataset(const std::string& name, const std::vector<double>& grid_pop,
                                   const std::vector<double>* series_pop, std::size_t count) {
  Dataset ds{name, {"k", "grid_population"}, {}, {}, PlotKind::stem, "k", "grid_population", {}};
  if (series_pop) ds.columns.push_back("series_population");
  count = std::min(count, grid_pop.size());
  if (series_pop) count = std::min(count, series_pop->size());
  for (std::size_t k = 0; k < count; ++k) {
    std::vector<double> row{static_cast<double>(k), grid_pop[k]};
    if (series_pop) row.push_back((*series_pop)[k]);
    ds.rows.push_back(row);
  }
  return ds;
}

inline std::vector<Dataset> run_spectrum(const RunConfig& c) {
  spectrum::SpectrumTable t = spectrum::spectrum_scan(c.g_min, c.g_max, c.g_steps, c.levels);
  Dataset ds{"spectrum", {"g", "nu", "parity", "energy"}, {}, {}, PlotKind::series, "g", "energy", {"nu", "parity"}};
  for (std::size_t j = 0; j < t.g_values.size(); ++j)
    for (int nu = 0; nu < c.levels; ++nu) {
      ds.rows.push_back({t.g_values[j], static_cast<double>(nu), 1.0, t.even_levels(static_cast<Eigen::Index>(j), nu)});
      ds.rows.push_back({t.g_values[j], static_cast<double>(nu), -1.0, t.odd_levels[static_cast<std::size_t>(nu)]});
    }
  ds.add_meta("parity", "+1 even level E_{2nu}(g), -1 odd level E_{2nu+1} = 2nu + 3/2");
  return {ds};
}

inline std::vector<Dataset> run_state(const RunConfig& c) {
  eigenstates::RelEigenstate s = eigenstates::build_rel_eigenstate(c.g_i, c.nu_i, c.basis_size);
  Grid2D grid = make_grid(c.half_width, c.n_points);
  std::vector<Dataset> out;

  Dataset rel{"relative_state", {"x", "psi", "psi_series"}, {}, {}, PlotKind::line, "x", "psi", {}};
  std::vector<double> closed = eigenstates::eval_rel(s, grid.points);
  for (std::size_t i = 0; i < grid.points.size(); ++i)
    rel.rows.push_back({grid.points[i], closed[i], eigenstates::eval_rel_series(s, grid.points[i]).value});
  rel.add_meta("energy", format_number(s.energy()));
  rel.add_meta("norm_A", format_number(s.norm_a));
  rel.add_meta("basis_tail_estimate", format_number(s.tail_estimate));
  out.push_back(std::move(rel));

  GridField field = quench::stationary_field(s, grid);
  observables::OneBodyDM dm = observables::rho1_from_field(field);
  observables::NaturalDecomposition nd = observables::natural_decomposition(dm);
  std::string stamp = time_stamp(0.0);
  out.push_back(rho1_dataset("rho1_" + stamp, dm));
  out.push_back(rho2_dataset("rho2_" + stamp, observables::rho2_from_field(field)));
  out.push_back(momentum_dataset("momentum_" + stamp,
                                 observables::momentum_distribution(nd, observables::default_momentum_points())));
  observables::NaturalDecomposition series_nd = observables::natural_orbitals_series(s, 40, grid);
  observables::NaturalComparison cmp = observables::compare_natural(nd, series_nd, dm);
  Dataset pops = populations_dataset("natural_populations", cmp.grid_populations, &cmp.series_populations, 10);
  pops.add_meta("max_population_difference", format_number(cmp.max_population_difference));
  pops.add_meta("series_orthonormality_defect", format_number(cmp.series_orthonormality_defect));
  pops.add_meta("series_rho_relative_distance", format_number(cmp.rho_relative_distance));
  out.push_back(std::move(pops));
  return out;
}

inline std::vector<Dataset> run_quench(const RunConfig& c) {
  quench::OverlapTable t = quench::overlap_table(scenario_of(c));
  std::vector<Dataset> out;
  Dataset ov{"overlaps", {"nu_f", "energy", "C", "C_squared"}, {}, {}, PlotKind::stem, "energy", "C_squared", {}};
  for (int f = 0; f < t.n_f(); ++f) {
    double cf = t.coeffs[static_cast<std::size_t>(f)];
    ov.rows.push_back({static_cast<double>(f), t.energies[static_cast<std::size_t>(f)], cf, cf * cf});
  }
  out.push_back(std::move(ov));
  std::vector<double> times = c.times();
  quench::FidelitySeries fs = quench::fidelity_series(t, times);
  Dataset fd{"fidelity", {"t", "F"}, {}, {}, PlotKind::line, "t", "F", {}};
  for (std::size_t k = 0; k < times.size(); ++k) fd.rows.push_back({times[k], fs.values[k]});
  out.push_back(std::move(fd));
  quench::FidelitySpectrum sp = quench::fidelity_spectrum(t);
  Dataset sd{"fidelity_spectrum", {"omega", "weight", "nu_f", "nu_h"}, {}, {}, PlotKind::stem, "omega", "weight", {}};
  for (const auto& l : sp.lines)
    sd.rows.push_back({l.omega, l.weight, static_cast<double>(l.nu_f), static_cast<double>(l.nu_h)});
  sd.add_meta("labels", "nu_f = nu_h = -1 marks the merged omega = 0 line");
  out.push_back(std::move(sd));
  for (auto& ds : out) add_table_meta(ds, t);
  return out;
}

inline std::vector<Dataset> run_evolve(const RunConfig& c) {
  quench::OverlapTable t = quench::overlap_table(scenario_of(c));
  Grid2D grid = make_grid(c.half_width, c.n_points);
  quench::QuenchPropagator prop(t, grid);
  std::vector<double> p_points = observables::default_momentum_points();
  std::vector<double> weights = grid.trapezoid_weights();
  std::vector<Dataset> out;
  Dataset br{"breathing", {"t", "x2_mean"}, {}, {}, PlotKind::line, "t", "x2_mean", {}};
  for (double time : c.times()) {
    GridField field = prop.field(time);
    observables::OneBodyDM dm = observables::rho1_from_field(field);
    observables::NaturalDecomposition nd = observables::natural_decomposition(dm);
    std::string stamp = time_stamp(time);
    out.push_back(rho1_dataset("rho1_" + stamp, dm));
    out.push_back(rho2_dataset("rho2_" + stamp, observables::rho2_from_field(field)));
    out.push_back(momentum_dataset("momentum_" + stamp, observables::momentum_distribution(nd, p_points)));
    out.push_back(populations_dataset("natural_populations_" + stamp, nd.populations, nullptr, 10));
    double x2 = 0.0;
    for (int i = 0; i < grid.n_points; ++i)
      x2 += weights[static_cast<std::size_t>(i)] * grid.points[static_cast<std::size_t>(i)] *
            grid.points[static_cast<std::size_t>(i)] * dm.matrix(i, i).real();
    br.rows.push_back({time, x2});
  }
  out.push_back(std::move(br));
  for (auto& ds : out) add_table_meta(ds, t);
  return out;
}

inline std::vector<Dataset> run_converge(const RunConfig& c) {
  std::vector<quench::ConvergenceRow> rows = quench::convergence_report(scenario_of(c), c.n_f_list);
  Dataset ds{"convergence", {"n_f", "S", "mean_energy", "fidelity_deviation"}, {}, {}, PlotKind::line, "n_f", "S", {}};
  for (const auto& r : rows)
    ds.rows.push_back({static_cast<double>(r.n_f), r.norm_sum, r.mean_energy, r.fidelity_deviation});
  ds.add_meta("norm_sum_S", format_number(rows.back().norm_sum));
  ds.add_meta("fidelity_window", "t in [0, 4 pi], 801 samples, deviation against the largest n_f");
  return {ds};
}

}  // namespace detail

/// Computes the datasets of a mode without touching the filesystem.
inline std::vector<Dataset> compute(const RunConfig& c) {
  std::vector<Dataset> out;
  switch (c.mode) {
    case Mode::spectrum: out = detail::run_spectrum(c); break;
    case Mode::state: out = detail::run_state(c); break;
    case Mode::quench: out = detail::run_quench(c); break;
    case Mode::evolve: out = detail::run_evolve(c); break;
    case Mode::converge: out = detail::run_converge(c); break;
  }
  for (auto& ds : out) detail::add_config_meta(ds, c);
  return out;
}

/// Runs a mode and writes every dataset in the requested formats. On failure
/// all files written by this call are removed before the error propagates.
inline std::vector<std::filesystem::path> run(const RunConfig& c) {
  validate(c);
  namespace fs = std::filesystem;
  std::vector<fs::path> written;
  try {
    std::vector<Dataset> datasets = compute(c);
    fs::path dir(c.output_dir);
    fs::create_directories(dir);
    auto emit = [&](const fs::path& path, const std::string& text) {
      if (fs::exists(path) && !fs::is_regular_file(path))
        throw Error("output path " + path.string() + " exists and is not a regular file");
      written.push_back(path);
      write_text(path, text);
    };
    for (const auto& ds : datasets) {
      if (c.wants("csv")) emit(dir / (ds.name + ".csv"), to_csv(ds));
      if (c.wants("json")) emit(dir / (ds.name + ".json"), to_json(ds).dump(1) + "\n");
      if (c.wants("plotscript")) emit(dir / (ds.name + ".py"), emit_plot_script(ds));
    }
  } catch (...) {
    for (const auto& p : written) {
      std::error_code ec;
      fs::remove(p, ec);
    }
    throw;
  }
  return written;
}

}  // namespace quench_duo::appio
