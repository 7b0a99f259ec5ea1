#pragma once

// Command line front end. Kept apart from cli.hpp so that library users and
// most tests do not pay for the flag-parser include.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"

namespace nqed {

// Exit codes: 0 success, 2 invalid configuration or usage, 3 numerical or
// runtime failure.
inline int run_cli(int argc, const char* const* argv) {
  CLI::App app{"dressed-state spectra and photon-blockade maps for a driven "
               "cavity coupled to N-configuration atoms"};
  app.set_version_flag("--version", std::string(k_tool_name) + " " +
                                        std::string(k_tool_version));
  app.require_subcommand(1);

  std::string config_path;
  bool absolute_mhz = false;
  bool heatmap = false;
  unsigned threads = 0;
  int figure = 0;
  std::vector<ConfigOverride> overrides;

  CLI::App* sub_spectrum =
      app.add_subcommand("spectrum", "eigenvalue curves along grid_x");
  CLI::App* sub_rho =
      app.add_subcommand("rho", "blockade metrics at one parameter point");
  CLI::App* sub_scan = app.add_subcommand("scan", "metric over grid_x x grid_y");
  CLI::App* sub_figure =
      app.add_subcommand("figure", "canned figure reproductions (2..7)");
  CLI::App* sub_selectivity = app.add_subcommand(
      "selectivity", "rho_exc_1 versus atom number at fixed drive offset");

  sub_figure->add_option("id,--figure", figure, "figure number (2..7)");

  for (CLI::App* sub : {sub_spectrum, sub_rho, sub_scan, sub_figure,
                        sub_selectivity}) {
    sub->add_option("--config", config_path, "configuration file path");
    sub->add_flag("--absolute-mhz", absolute_mhz,
                  "read rates/detunings as absolute 2pi-MHz values");
    sub->add_flag("--heatmap", heatmap, "also write PPM heatmaps of grids");
    sub->add_option("--threads", threads,
                    "worker threads for scans (0 = hardware)");

    auto add_kv = [sub, &overrides](const std::string& flag,
                                    const std::string& key,
                                    const std::string& desc) {
      sub->add_option_function<std::string>(
          flag,
          [&overrides, key](const std::string& v) {
            overrides.push_back(ConfigOverride{key, v});
          },
          desc);
    };
    add_kv("--omega-mhz", "omega_mhz", "coupling Rabi frequency, 2pi MHz");
    add_kv("--g-over-omega", "g_over_omega", "both cavity couplings / omega");
    add_kv("--g-ac-over-omega", "g_ac_over_omega", "a-c coupling / omega");
    add_kv("--g-bd-over-omega", "g_bd_over_omega", "b-d coupling / omega");
    add_kv("--delta-over-omega", "delta_over_omega", "detuning / omega");
    add_kv("--delta-omega-over-omega", "delta_omega_over_omega",
           "transition mismatch / omega");
    add_kv("--gamma-c-over-omega", "gamma_c_over_omega", "c decay / omega");
    add_kv("--gamma-d-over-omega", "gamma_d_over_omega", "d decay / omega");
    add_kv("--gamma-cav-over-omega", "gamma_cav_over_omega",
           "cavity decay / omega");
    add_kv("--beta-over-omega", "beta_over_omega", "probe drive / omega");
    add_kv("--drive-offset-over-omega", "drive_offset_over_omega",
           "probe detuning from cavity / omega");
    add_kv("--atoms", "n_atoms", "number of atoms");
    add_kv("--quanta", "quanta", "manifold quanta");
    add_kv("--grid-x", "grid_x", "x axis: [param:]start:stop:count");
    add_kv("--grid-y", "grid_y", "y axis: [param:]start:stop:count");
    add_kv("--metric", "metric",
           "rho_exc_1 | rho_exc_2 | min_abs_real_energy");
    add_kv("--out", "out", "output path stem");
  }

  try {
    app.parse(argc, argv);

    std::string text;
    if (!config_path.empty()) {
      std::ifstream stream(config_path);
      if (!stream)
        throw ConfigError("cannot read config file '" + config_path + "'");
      std::ostringstream buffer;
      buffer << stream.rdbuf();
      text = buffer.str();
    }

    JobConfig cfg = parse_config(text, overrides, absolute_mhz);
    cfg.heatmap = heatmap;
    cfg.threads = threads;

    std::vector<std::string> files;
    if (sub_spectrum->parsed()) {
      cfg.command = Subcommand::spectrum;
      files = run_spectrum(cfg);
    } else if (sub_rho->parsed()) {
      cfg.command = Subcommand::rho;
      const BlockadeReport report = run_rho(cfg, &files);
      std::cout << "rho_exc_1 = " << format_double(report.rho_exc_1) << "\n"
                << "rho_exc_2 = " << format_double(report.rho_exc_2) << "\n";
    } else if (sub_scan->parsed()) {
      cfg.command = Subcommand::scan;
      files = run_scan(cfg);
    } else if (sub_figure->parsed()) {
      cfg.command = Subcommand::figure;
      if (figure == 0)
        throw ConfigError("figure id required (2..7)");
      cfg.figure = figure;
      files = run_figure(cfg);
    } else if (sub_selectivity->parsed()) {
      cfg.command = Subcommand::selectivity;
      files = run_selectivity(cfg);
    }

    for (const std::string& f : files) std::cout << "wrote " << f << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const EigensolveError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 3;
  } catch (const ScanError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace nqed
