// quench-duo: command-line front end for the quench_duo library.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "quench_duo/appio/config.hpp"
#include "quench_duo/appio/run.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw quench_duo::ConfigError("config", "cannot read config file '" + path + "'");
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

}  // namespace

int main(int argc, char** argv) {
  using namespace quench_duo;
  CLI::App app{"Interaction quenches of two bosons in a harmonic trap"};
  app.set_version_flag("--version", std::string(kVersion));

  std::string mode, config_path;
  app.add_option("mode", mode, "spectrum | state | quench | evolve | converge")->required();
  app.add_option("--config", config_path, "key = value file with [section] headers");

  // Flag name -> config key. Flags win over the config file.
  const std::vector<std::pair<std::string, std::string>> flags = {
      {"--g-i", "g_i"},           {"--g-f", "g_f"},           {"--nu-i", "nu_i"},
      {"--n-f", "n_f"},           {"--n-f-list", "n_f_list"}, {"--basis", "basis_size"},
      {"--grid-points", "n_points"}, {"--grid-half-width", "half_width"},
      {"--t-start", "t_start"},   {"--t-stop", "t_stop"},     {"--t-count", "t_count"},
      {"--out", "output_dir"},    {"--format", "formats"},    {"--g-min", "g_min"},
      {"--g-max", "g_max"},       {"--g-steps", "g_steps"},   {"--levels", "levels"}};
  std::vector<std::string> values(flags.size());
  for (std::size_t k = 0; k < flags.size(); ++k)
    app.add_option(flags[k].first, values[k], "overrides '" + flags[k].second + "'")->allow_extra_args(false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? appio::kExitOk : appio::kExitConfig;
  }

  try {
    appio::ConfigBuilder builder;
    if (!config_path.empty()) builder.load_text(read_file(config_path));
    builder.set("mode", mode);
    for (std::size_t k = 0; k < flags.size(); ++k)
      if (app.count(flags[k].first) > 0) builder.set(flags[k].second, values[k]);
    appio::RunConfig config = builder.build();
    for (const auto& path : appio::run(config)) std::cout << path.string() << "\n";
    return appio::kExitOk;
  } catch (const ConfigError& e) {
    std::cerr << "quench-duo: config error: " << e.what() << "\n";
    return appio::kExitConfig;
  } catch (const std::exception& e) {
    int rc = appio::exit_code_for_current_exception();
    std::cerr << "quench-duo " << mode << ": " << e.what() << "\n";
    return rc;
  }
}
