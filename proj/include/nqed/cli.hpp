#pragma once

// Configuration files, deterministic text output (CSV / PPM / meta
// sidecars), canned figure jobs and the command line front end.

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <set>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "blockade.hpp"
#include "hamiltonian.hpp"
#include "manifold.hpp"
#include "spectra.hpp"
#include "sweep.hpp"

namespace nqed {

inline constexpr std::string_view k_tool_name = "nqed";
inline constexpr std::string_view k_tool_version = "0.1.0";

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Number formatting: shortest decimal form that parses back to the same bits.

inline std::string format_double(double v) {
  std::array<char, 40> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc{})
    throw std::runtime_error("format_double: conversion failed");
  return std::string(buf.data(), end);
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string_view::npos) return {};
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

inline double parse_double_strict(std::string_view s,
                                  const std::string& where) {
  std::string_view body = s;
  if (!body.empty() && body.front() == '+') body.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] =
      std::from_chars(body.data(), body.data() + body.size(), value);
  if (ec != std::errc{} || ptr != body.data() + body.size())
    throw ConfigError(where + ": cannot parse number '" + std::string(s) +
                      "'");
  return value;
}

inline int parse_int_strict(std::string_view s, const std::string& where) {
  std::string_view body = s;
  if (!body.empty() && body.front() == '+') body.remove_prefix(1);
  int value = 0;
  const auto [ptr, ec] =
      std::from_chars(body.data(), body.data() + body.size(), value);
  if (ec != std::errc{} || ptr != body.data() + body.size())
    throw ConfigError(where + ": cannot parse integer '" + std::string(s) +
                      "'");
  return value;
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t next = s.find(sep, pos);
    if (next == std::string_view::npos) {
      out.push_back(s.substr(pos));
      return out;
    }
    out.push_back(s.substr(pos, next - pos));
    pos = next + 1;
  }
}

}  // namespace detail

// Axis spec value: "start:stop:count" (parameter implied by the slot) or
// "param:start:stop:count" to sweep a different parameter.
inline Axis parse_axis_spec(std::string_view value, AxisParam default_param,
                            const std::string& where) {
  const auto fields = detail::split(value, ':');
  Axis axis;
  std::size_t first = 0;
  if (fields.size() == 4) {
    try {
      axis.param = axis_param_from_string(detail::trim(fields[0]));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(where + ": " + e.what());
    }
    first = 1;
  } else if (fields.size() == 3) {
    axis.param = default_param;
  } else {
    throw ConfigError(where +
                      ": expected start:stop:count or param:start:stop:count, "
                      "got '" +
                      std::string(value) + "'");
  }
  axis.start = detail::parse_double_strict(detail::trim(fields[first]), where);
  axis.stop =
      detail::parse_double_strict(detail::trim(fields[first + 1]), where);
  axis.count =
      detail::parse_int_strict(detail::trim(fields[first + 2]), where);
  try {
    axis.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(where + ": " + e.what());
  }
  if (axis.count > 100000)
    throw ConfigError(where + ": axis count too large");
  return axis;
}

enum class Subcommand { spectrum, rho, scan, figure, selectivity };

constexpr std::string_view to_string(Subcommand c) noexcept {
  switch (c) {
    case Subcommand::spectrum: return "spectrum";
    case Subcommand::rho: return "rho";
    case Subcommand::scan: return "scan";
    case Subcommand::figure: return "figure";
    case Subcommand::selectivity: return "selectivity";
  }
  return "?";
}

// A fully validated job description. Rates are stored exactly as the
// omega-scaled ratios that were parsed; absolute model parameters are
// derived on demand so that parse(render(config)) round-trips bit-exactly.
struct JobConfig {
  Subcommand command = Subcommand::rho;

  double omega_mhz = 0.0;  // required: the frequency unit, 2pi MHz
  double g_over_omega = 1.0;
  std::optional<double> g_ac_over_omega;  // per-transition override
  std::optional<double> g_bd_over_omega;
  double delta_over_omega = 0.0;
  double delta_omega_over_omega = 0.0;
  double gamma_c_over_omega = 0.0;
  double gamma_d_over_omega = 0.0;
  double gamma_cav_over_omega = 0.0;
  double beta_over_omega = 1.0;
  double drive_offset_over_omega = 0.0;
  int n_atoms = 1;
  int quanta = 2;
  Axis grid_x{AxisParam::delta_over_omega, -10.0, 10.0, 201};
  Axis grid_y{AxisParam::g_over_omega, 0.1, 10.0, 201};
  Metric metric = Metric::rho_exc_2;
  std::string out;

  // Flag-only state, not part of the config-file projection.
  int figure = 0;
  bool heatmap = false;
  unsigned threads = 0;  // 0 = hardware concurrency
  std::set<std::string, std::less<>> provided;

  bool has(std::string_view key) const {
    return provided.find(key) != provided.end();
  }

  double effective_g_ac() const {
    return g_ac_over_omega.value_or(g_over_omega);
  }
  double effective_g_bd() const {
    return g_bd_over_omega.value_or(g_over_omega);
  }

  ModelParams model_params() const {
    ModelParams p;
    p.omega = omega_mhz;
    p.g_ac = effective_g_ac() * omega_mhz;
    p.g_bd = effective_g_bd() * omega_mhz;
    p.delta = delta_over_omega * omega_mhz;
    p.delta_omega = delta_omega_over_omega * omega_mhz;
    p.gamma_c = gamma_c_over_omega * omega_mhz;
    p.gamma_d = gamma_d_over_omega * omega_mhz;
    p.gamma_cav = gamma_cav_over_omega * omega_mhz;
    p.beta = beta_over_omega * omega_mhz;
    p.drive_offset = drive_offset_over_omega * omega_mhz;
    return p;
  }

  // Equality over the config-file projection (the 17 persistable keys);
  // flag-only state and provenance bookkeeping are excluded.
  friend bool operator==(const JobConfig& x, const JobConfig& y) {
    auto axis_eq = [](const Axis& a, const Axis& b) {
      return a.param == b.param && a.start == b.start && a.stop == b.stop &&
             a.count == b.count;
    };
    return x.omega_mhz == y.omega_mhz && x.g_over_omega == y.g_over_omega &&
           x.g_ac_over_omega == y.g_ac_over_omega &&
           x.g_bd_over_omega == y.g_bd_over_omega &&
           x.delta_over_omega == y.delta_over_omega &&
           x.delta_omega_over_omega == y.delta_omega_over_omega &&
           x.gamma_c_over_omega == y.gamma_c_over_omega &&
           x.gamma_d_over_omega == y.gamma_d_over_omega &&
           x.gamma_cav_over_omega == y.gamma_cav_over_omega &&
           x.beta_over_omega == y.beta_over_omega &&
           x.drive_offset_over_omega == y.drive_offset_over_omega &&
           x.n_atoms == y.n_atoms && x.quanta == y.quanta &&
           axis_eq(x.grid_x, y.grid_x) && axis_eq(x.grid_y, y.grid_y) &&
           x.metric == y.metric && x.out == y.out;
  }
};

struct ConfigOverride {
  std::string key;
  std::string value;
};

// Parses a line-oriented "key = value" configuration ('#' starts a
// comment), then applies flag overrides on top. With absolute_mhz the rate
// and detuning values are read as absolute 2pi-MHz quantities and
// normalized by omega_mhz at parse time.
inline JobConfig parse_config(std::string_view text,
                              std::span<const ConfigOverride> overrides = {},
                              bool absolute_mhz = false) {
  struct Entry {
    std::string key;
    std::string value;
    std::string where;
  };
  std::vector<Entry> entries;

  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    std::string_view line = text.substr(
        pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;

    if (const auto hash = line.find('#'); hash != std::string_view::npos)
      line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;

    const std::string where = "line " + std::to_string(line_no);
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError(where + ": expected key = value, got '" +
                        std::string(line) + "'");
    const std::string key{detail::trim(line.substr(0, eq))};
    const std::string value{detail::trim(line.substr(eq + 1))};
    if (key.empty()) throw ConfigError(where + ": missing key");
    entries.push_back({key, value, where});
  }
  for (const ConfigOverride& o : overrides)
    entries.push_back({o.key, o.value, "option --" + o.key});

  JobConfig cfg;

  // The unit must be known first so absolute-mode values can be normalized.
  for (const Entry& e : entries) {
    if (e.key == "omega_mhz") {
      cfg.omega_mhz = detail::parse_double_strict(e.value, e.where);
      cfg.provided.insert(e.key);
    }
  }
  if (!cfg.has("omega_mhz"))
    throw ConfigError("missing required key omega_mhz");
  if (!(cfg.omega_mhz > 0.0) || !std::isfinite(cfg.omega_mhz))
    throw ConfigError("omega_mhz must be a positive finite number");

  auto rate = [&](const Entry& e) {
    const double v = detail::parse_double_strict(e.value, e.where);
    return absolute_mhz ? v / cfg.omega_mhz : v;
  };

  for (const Entry& e : entries) {
    const std::string& k = e.key;
    if (k == "omega_mhz") {
      // already handled
    } else if (k == "g_over_omega") {
      cfg.g_over_omega = rate(e);
    } else if (k == "g_ac_over_omega") {
      cfg.g_ac_over_omega = rate(e);
    } else if (k == "g_bd_over_omega") {
      cfg.g_bd_over_omega = rate(e);
    } else if (k == "delta_over_omega") {
      cfg.delta_over_omega = rate(e);
    } else if (k == "delta_omega_over_omega") {
      cfg.delta_omega_over_omega = rate(e);
    } else if (k == "gamma_c_over_omega") {
      cfg.gamma_c_over_omega = rate(e);
    } else if (k == "gamma_d_over_omega") {
      cfg.gamma_d_over_omega = rate(e);
    } else if (k == "gamma_cav_over_omega") {
      cfg.gamma_cav_over_omega = rate(e);
    } else if (k == "beta_over_omega") {
      cfg.beta_over_omega = rate(e);
    } else if (k == "drive_offset_over_omega") {
      cfg.drive_offset_over_omega = rate(e);
    } else if (k == "n_atoms") {
      cfg.n_atoms = detail::parse_int_strict(e.value, e.where);
    } else if (k == "quanta") {
      cfg.quanta = detail::parse_int_strict(e.value, e.where);
    } else if (k == "grid_x") {
      cfg.grid_x =
          parse_axis_spec(e.value, AxisParam::delta_over_omega, e.where);
    } else if (k == "grid_y") {
      cfg.grid_y = parse_axis_spec(e.value, AxisParam::g_over_omega, e.where);
    } else if (k == "metric") {
      try {
        cfg.metric = metric_from_string(e.value);
      } catch (const std::invalid_argument& err) {
        throw ConfigError(e.where + ": " + err.what());
      }
    } else if (k == "out") {
      cfg.out = e.value;
    } else {
      throw ConfigError(e.where + ": unknown key '" + k + "'");
    }
    cfg.provided.insert(k);
  }

  auto require = [](bool ok, const std::string& message) {
    if (!ok) throw ConfigError(message);
  };
  ManifoldLimits limits;
  require(cfg.n_atoms >= 1 && cfg.n_atoms <= limits.max_atoms,
          "n_atoms must be in [1, " + std::to_string(limits.max_atoms) + "]");
  require(cfg.quanta >= 0 && cfg.quanta <= limits.max_quanta,
          "quanta must be in [0, " + std::to_string(limits.max_quanta) + "]");
  require(cfg.g_over_omega >= 0.0, "g_over_omega must be >= 0");
  require(!cfg.g_ac_over_omega || *cfg.g_ac_over_omega >= 0.0,
          "g_ac_over_omega must be >= 0");
  require(!cfg.g_bd_over_omega || *cfg.g_bd_over_omega >= 0.0,
          "g_bd_over_omega must be >= 0");
  require(cfg.gamma_c_over_omega >= 0.0, "gamma_c_over_omega must be >= 0");
  require(cfg.gamma_d_over_omega >= 0.0, "gamma_d_over_omega must be >= 0");
  require(cfg.gamma_cav_over_omega >= 0.0,
          "gamma_cav_over_omega must be >= 0");
  require(cfg.beta_over_omega >= 0.0, "beta_over_omega must be >= 0");
  require(cfg.grid_x.param != cfg.grid_y.param,
          "grid_x and grid_y must sweep distinct parameters");
  return cfg;
}

// Inverse of parse_config for the persistable keys, in a fixed order with
// shortest round-trip number formatting.
inline std::string render_config(const JobConfig& cfg) {
  std::string out;
  auto line = [&out](std::string_view key, const std::string& value) {
    out += key;
    out += " = ";
    out += value;
    out += "\n";
  };
  auto axis_value = [](const Axis& axis, AxisParam default_param) {
    std::string v;
    if (axis.param != default_param) {
      v += to_string(axis.param);
      v += ":";
    }
    v += format_double(axis.start) + ":" + format_double(axis.stop) + ":" +
         std::to_string(axis.count);
    return v;
  };

  line("omega_mhz", format_double(cfg.omega_mhz));
  line("g_over_omega", format_double(cfg.g_over_omega));
  if (cfg.g_ac_over_omega)
    line("g_ac_over_omega", format_double(*cfg.g_ac_over_omega));
  if (cfg.g_bd_over_omega)
    line("g_bd_over_omega", format_double(*cfg.g_bd_over_omega));
  line("delta_over_omega", format_double(cfg.delta_over_omega));
  line("delta_omega_over_omega", format_double(cfg.delta_omega_over_omega));
  line("gamma_c_over_omega", format_double(cfg.gamma_c_over_omega));
  line("gamma_d_over_omega", format_double(cfg.gamma_d_over_omega));
  line("gamma_cav_over_omega", format_double(cfg.gamma_cav_over_omega));
  line("beta_over_omega", format_double(cfg.beta_over_omega));
  line("drive_offset_over_omega", format_double(cfg.drive_offset_over_omega));
  line("n_atoms", std::to_string(cfg.n_atoms));
  line("quanta", std::to_string(cfg.quanta));
  line("grid_x", axis_value(cfg.grid_x, AxisParam::delta_over_omega));
  line("grid_y", axis_value(cfg.grid_y, AxisParam::g_over_omega));
  line("metric", std::string(to_string(cfg.metric)));
  if (!cfg.out.empty()) line("out", cfg.out);
  return out;
}

// ---------------------------------------------------------------------------
// Output files. All writes are atomic: content goes to a temporary in the
// same directory and is renamed into place.

namespace io {

inline void atomic_write_file(const std::filesystem::path& path,
                              std::string_view bytes) {
  const std::filesystem::path dir = path.parent_path();
  if (!dir.empty()) std::filesystem::create_directories(dir);
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream stream(tmp, std::ios::binary | std::ios::trunc);
    if (!stream)
      throw std::runtime_error("cannot open '" + tmp.string() +
                               "' for writing");
    stream.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!stream)
      throw std::runtime_error("short write to '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace io

// Grid CSV: one row per cell, x varying fastest, header naming the two axis
// parameters (delta_over_omega,g_over_omega for the standard axes).
inline std::string grid_csv_text(const Grid& grid) {
  std::string out;
  out += to_string(grid.x.param);
  out += ",";
  out += to_string(grid.y.param);
  out += ",n_atoms,metric,value\n";
  const std::string n = std::to_string(grid.n_atoms);
  const std::string metric{to_string(grid.metric)};
  for (int iy = 0; iy < grid.y.count; ++iy) {
    const std::string ys = format_double(grid.y.value(iy));
    for (int ix = 0; ix < grid.x.count; ++ix) {
      out += format_double(grid.x.value(ix));
      out += ",";
      out += ys;
      out += ",";
      out += n;
      out += ",";
      out += metric;
      out += ",";
      out += format_double(grid.at(ix, iy));
      out += "\n";
    }
  }
  return out;
}

inline void write_grid_csv(const std::filesystem::path& path,
                           const Grid& grid) {
  io::atomic_write_file(path, grid_csv_text(grid));
}

struct GridCsvRow {
  double x = 0.0;
  double y = 0.0;
  int n_atoms = 0;
  std::string metric;
  double value = 0.0;
};

struct GridCsv {
  std::string header;
  std::vector<GridCsvRow> rows;
};

inline GridCsv read_grid_csv(const std::filesystem::path& path) {
  std::ifstream stream(path);
  if (!stream)
    throw std::runtime_error("cannot open '" + path.string() + "'");
  GridCsv csv;
  std::string line;
  if (!std::getline(stream, line))
    throw std::runtime_error("empty CSV '" + path.string() + "'");
  csv.header = line;
  int line_no = 1;
  while (std::getline(stream, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    const auto fields = detail::split(line, ',');
    if (fields.size() != 5)
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                               ": expected 5 fields");
    const std::string where =
        path.string() + ":" + std::to_string(line_no);
    GridCsvRow row;
    row.x = detail::parse_double_strict(fields[0], where);
    row.y = detail::parse_double_strict(fields[1], where);
    row.n_atoms = detail::parse_int_strict(fields[2], where);
    row.metric = std::string(fields[3]);
    row.value = detail::parse_double_strict(fields[4], where);
    csv.rows.push_back(std::move(row));
  }
  return csv;
}

// Eigenvalue CSV: one row per dressed state per axis node.
struct CurveRow {
  double x = 0.0;
  double re_energy = 0.0;  // units of omega
  double im_energy = 0.0;
  int branch = 0;          // index within the sorted spectrum at this node
  bool active = false;
};

inline std::string curve_csv_text(std::span<const CurveRow> rows) {
  std::string out = "x,re_energy_over_omega,im_energy_over_omega,branch,active\n";
  for (const CurveRow& r : rows) {
    out += format_double(r.x);
    out += ",";
    out += format_double(r.re_energy);
    out += ",";
    out += format_double(r.im_energy);
    out += ",";
    out += std::to_string(r.branch);
    out += ",";
    out += r.active ? "1" : "0";
    out += "\n";
  }
  return out;
}

inline void write_curve_csv(const std::filesystem::path& path,
                            std::span<const CurveRow> rows) {
  io::atomic_write_file(path, curve_csv_text(rows));
}

// Binary PPM heatmap: blue at 0 through red at 0.5 (values clamped), rows
// top to bottom in decreasing y.
inline std::string heatmap_ppm_bytes(const Grid& grid) {
  std::string out =
      "P6\n" + std::to_string(grid.x.count) + " " +
      std::to_string(grid.y.count) + "\n255\n";
  out.reserve(out.size() +
              static_cast<std::size_t>(grid.x.count) *
                  static_cast<std::size_t>(grid.y.count) * 3);
  for (int iy = grid.y.count - 1; iy >= 0; --iy) {
    for (int ix = 0; ix < grid.x.count; ++ix) {
      const double t = std::clamp(grid.at(ix, iy) / 0.5, 0.0, 1.0);
      out += static_cast<char>(static_cast<unsigned char>(
          std::lround(255.0 * t)));
      out += static_cast<char>(0);
      out += static_cast<char>(static_cast<unsigned char>(
          std::lround(255.0 * (1.0 - t))));
    }
  }
  return out;
}

inline void write_heatmap_ppm(const std::filesystem::path& path,
                              const Grid& grid) {
  io::atomic_write_file(path, heatmap_ppm_bytes(grid));
}

// Meta sidecar: tool version, command, and the full parameter set.
inline std::string meta_text(const JobConfig& cfg,
                             std::span<const std::string> files) {
  std::string out;
  out += "tool = " + std::string(k_tool_name) + " " +
         std::string(k_tool_version) + "\n";
  out += "command = " + std::string(to_string(cfg.command)) + "\n";
  if (cfg.command == Subcommand::figure)
    out += "figure = " + std::to_string(cfg.figure) + "\n";
  for (const std::string& f : files) out += "output = " + f + "\n";
  out += render_config(cfg);
  return out;
}

// ---------------------------------------------------------------------------
// Jobs.

namespace detail {

// Eigenvalues along one axis with per-node activity classification.
// `apply` mutates the parameter set for the node value; activity is
// classified against |a...a,0> for one quantum and against G1 for two.
inline std::vector<CurveRow> eigencurve(
    const ModelParams& base, int n_atoms, int quanta, const Axis& axis,
    const std::function<void(ModelParams&, double)>& apply,
    bool active_only = false) {
  if (quanta < 1)
    throw std::invalid_argument("eigencurve: quanta must be >= 1");
  std::vector<CurveRow> rows;
  const Manifold upper = build_manifold(n_atoms, quanta);
  const Manifold lower = build_manifold(n_atoms, quanta - 1);
  const AnnihilationMap a_map = annihilation_map(upper, lower);

  for (int i = 0; i < axis.count; ++i) {
    const double x = axis.value(i);
    ModelParams p = base;
    apply(p, x);
    Spectrum s = diagonalize(build_block(p, upper));
    if (quanta == 1) {
      const Eigen::VectorXcd ground = Eigen::VectorXcd::Ones(1);
      s = classify_active(std::move(s), ground, a_map);
    } else if (quanta == 2) {
      const Rho1Result r1 = rho_exc_1(p, n_atoms);
      s = classify_active(std::move(s), r1.g1.vector, a_map);
    } else {
      for (DressedState& st : s.states) st.active = true;
    }
    for (std::size_t k = 0; k < s.size(); ++k) {
      const DressedState& st = s.states[k];
      if (active_only && !st.active) continue;
      rows.push_back(CurveRow{x, st.energy.real() / p.omega,
                              st.energy.imag() / p.omega, static_cast<int>(k),
                              st.active});
    }
  }
  return rows;
}

inline std::string with_suffix(const std::string& stem,
                               const std::string& suffix,
                               const std::string& ext) {
  return stem + suffix + ext;
}

inline void require_out(const JobConfig& cfg) {
  if (cfg.out.empty())
    throw ConfigError("missing required key out (output path stem)");
}

}  // namespace detail

// spectrum: eigenvalue curves of the (n_atoms, quanta) manifold along
// grid_x. Writes <out>.csv and <out>.meta.
inline std::vector<std::string> run_spectrum(const JobConfig& cfg) {
  detail::require_out(cfg);
  if (cfg.quanta < 1)
    throw ConfigError("spectrum requires quanta >= 1");
  const ModelParams base = cfg.model_params();
  const Axis axis = cfg.grid_x;
  const auto rows = detail::eigencurve(
      base, cfg.n_atoms, cfg.quanta, axis,
      [&axis](ModelParams& p, double x) { apply_axis(p, axis.param, x); });

  std::vector<std::string> files;
  const std::string csv = cfg.out + ".csv";
  write_curve_csv(csv, rows);
  files.push_back(csv);
  const std::string meta = cfg.out + ".meta";
  io::atomic_write_file(meta, meta_text(cfg, files));
  files.push_back(meta);
  return files;
}

// rho: both blockade metrics at the configured point. Returns the report;
// the CLI prints it. If out is set a text copy and meta are written.
inline BlockadeReport run_rho(const JobConfig& cfg,
                              std::vector<std::string>* files = nullptr) {
  const BlockadeReport report = blockade_report(cfg.model_params(),
                                                cfg.n_atoms);
  if (!cfg.out.empty()) {
    std::string text;
    text += "rho_exc_1 = " + format_double(report.rho_exc_1) + "\n";
    text += "rho_exc_2 = " + format_double(report.rho_exc_2) + "\n";
    text += "g1_index = " + std::to_string(report.g1_index) + "\n";
    text += "step1_omega_e = " + format_double(report.step1.omega_e) + "\n";
    text += "step1_delta_e = " + format_double(report.step1.delta_e) + "\n";
    text += "step1_gamma_u = " + format_double(report.step1.gamma_u) + "\n";
    text += "step2_omega_e = " + format_double(report.step2.omega_e) + "\n";
    text += "step2_delta_e = " + format_double(report.step2.delta_e) + "\n";
    text += "step2_gamma_u = " + format_double(report.step2.gamma_u) + "\n";
    const std::string txt = cfg.out + ".txt";
    io::atomic_write_file(txt, text);
    if (files) files->push_back(txt);
    const std::string meta = cfg.out + ".meta";
    std::vector<std::string> written{txt};
    io::atomic_write_file(meta, meta_text(cfg, written));
    if (files) files->push_back(meta);
  }
  return report;
}

// scan: metric over grid_x x grid_y. Writes <out>.csv, optional <out>.ppm,
// and <out>.meta.
inline std::vector<std::string> run_scan(const JobConfig& cfg) {
  detail::require_out(cfg);
  const Grid grid = scan(cfg.model_params(), cfg.grid_x, cfg.grid_y,
                         cfg.metric, cfg.n_atoms, cfg.quanta, cfg.threads);
  std::vector<std::string> files;
  const std::string csv = cfg.out + ".csv";
  write_grid_csv(csv, grid);
  files.push_back(csv);
  if (cfg.heatmap) {
    const std::string ppm = cfg.out + ".ppm";
    write_heatmap_ppm(ppm, grid);
    files.push_back(ppm);
  }
  const std::string meta = cfg.out + ".meta";
  io::atomic_write_file(meta, meta_text(cfg, files));
  files.push_back(meta);
  return files;
}

// selectivity: rho_exc_1 versus atom number (0..n_atoms) at the configured
// drive offset. Writes <out>.csv with header n_atoms,rho_exc_1.
inline std::vector<std::string> run_selectivity(const JobConfig& cfg) {
  detail::require_out(cfg);
  std::vector<int> range(static_cast<std::size_t>(cfg.n_atoms) + 1);
  for (int n = 0; n <= cfg.n_atoms; ++n)
    range[static_cast<std::size_t>(n)] = n;
  const ModelParams p = cfg.model_params();
  const auto table = atom_number_selectivity(p, p.drive_offset, range);

  std::string text = "n_atoms,rho_exc_1\n";
  for (const auto& [n, value] : table)
    text += std::to_string(n) + "," + format_double(value) + "\n";

  std::vector<std::string> files;
  const std::string csv = cfg.out + ".csv";
  io::atomic_write_file(csv, text);
  files.push_back(csv);
  const std::string meta = cfg.out + ".meta";
  io::atomic_write_file(meta, meta_text(cfg, files));
  files.push_back(meta);
  return files;
}

namespace detail {

// Parameter presets for the canned figures; only keys the user did not set
// explicitly are overwritten.
inline void apply_preset_key(JobConfig& cfg, std::string_view key,
                             double value) {
  if (cfg.has(key)) return;
  if (key == "g_over_omega") cfg.g_over_omega = value;
  else if (key == "delta_over_omega") cfg.delta_over_omega = value;
  else if (key == "delta_omega_over_omega") cfg.delta_omega_over_omega = value;
  else if (key == "gamma_c_over_omega") cfg.gamma_c_over_omega = value;
  else if (key == "gamma_d_over_omega") cfg.gamma_d_over_omega = value;
  else if (key == "gamma_cav_over_omega") cfg.gamma_cav_over_omega = value;
  else if (key == "beta_over_omega") cfg.beta_over_omega = value;
  else if (key == "drive_offset_over_omega")
    cfg.drive_offset_over_omega = value;
}

// Weak-decay illustration set used by the low-figure plots and the first
// blockade map.
inline void apply_ideal_preset(JobConfig& cfg) {
  apply_preset_key(cfg, "g_over_omega", 1.0);
  apply_preset_key(cfg, "delta_over_omega", 0.0);
  apply_preset_key(cfg, "delta_omega_over_omega", 0.0);
  apply_preset_key(cfg, "gamma_c_over_omega", 0.1);
  apply_preset_key(cfg, "gamma_d_over_omega", 0.1);
  apply_preset_key(cfg, "gamma_cav_over_omega", 0.01);
  apply_preset_key(cfg, "beta_over_omega", 1.0);
  apply_preset_key(cfg, "drive_offset_over_omega", 0.0);
}

// Rubidium-like set: strong coupling, fast decay, large upper-transition
// mismatch.
inline void apply_rb_preset(JobConfig& cfg) {
  apply_preset_key(cfg, "g_over_omega", 12.0);
  apply_preset_key(cfg, "delta_over_omega", 0.0);
  apply_preset_key(cfg, "delta_omega_over_omega", 660.0);
  apply_preset_key(cfg, "gamma_c_over_omega", 1.78);
  apply_preset_key(cfg, "gamma_d_over_omega", 1.78);
  apply_preset_key(cfg, "gamma_cav_over_omega", 4.0);
  apply_preset_key(cfg, "beta_over_omega", 0.3);
  apply_preset_key(cfg, "drive_offset_over_omega", 0.0);
}

inline Axis default_axis(AxisParam param, double start, double stop,
                         int count) {
  return Axis{param, start, stop, count};
}

}  // namespace detail

// figure: canned reproductions.
//   2 - one-quantum eigenvalues vs delta (N = 1 and N = 2, active branches)
//   3 - two-quanta eigenvalues, N = 1: (a) vs delta at fixed total
//       detuning 2 omega, (b) vs g_bd at delta = 0
//   4 - two-quanta eigenvalues, N = 2, vs g_bd at delta/omega = 0 and 0.5
//   5 - blockade maps (ideal set), delta in [-10, 10], g in [0.1, 10]
//   6 - blockade maps (Rb set), delta in [-50, 50], g in [0.1, 20]
//   7 - blockade maps (Rb set), delta in [-680, -640], g in [0.1, 20]
// Figures 5-7 write _rho1/_rho2 grid pairs; --heatmap adds PPM renders.
inline std::vector<std::string> run_figure(JobConfig cfg) {
  detail::require_out(cfg);
  std::vector<std::string> files;

  auto emit_curves = [&files, &cfg](const std::vector<CurveRow>& rows,
                                    const std::string& suffix) {
    const std::string path =
        detail::with_suffix(cfg.out, suffix, ".csv");
    write_curve_csv(path, rows);
    files.push_back(path);
  };
  auto emit_grid = [&files, &cfg](const Grid& grid,
                                  const std::string& suffix) {
    const std::string path = detail::with_suffix(cfg.out, suffix, ".csv");
    write_grid_csv(path, grid);
    files.push_back(path);
    if (cfg.heatmap) {
      const std::string ppm = detail::with_suffix(cfg.out, suffix, ".ppm");
      write_heatmap_ppm(ppm, grid);
      files.push_back(ppm);
    }
  };

  switch (cfg.figure) {
    case 2: {
      detail::apply_ideal_preset(cfg);
      const Axis axis =
          detail::default_axis(AxisParam::delta_over_omega, -10.0, 10.0, 401);
      const ModelParams base = cfg.model_params();
      for (int n : {1, 2}) {
        const auto rows = detail::eigencurve(
            base, n, 1, axis,
            [](ModelParams& p, double x) {
              apply_axis(p, AxisParam::delta_over_omega, x);
            },
            /*active_only=*/true);
        emit_curves(rows, "_n" + std::to_string(n));
      }
      break;
    }
    case 3: {
      detail::apply_ideal_preset(cfg);
      const ModelParams base = cfg.model_params();
      // (a) sweep delta holding the total upper detuning at 2 omega.
      const Axis axis_a =
          detail::default_axis(AxisParam::delta_over_omega, -10.0, 10.0, 401);
      const auto rows_a = detail::eigencurve(
          base, 1, 2, axis_a, [](ModelParams& p, double x) {
            p.delta = x * p.omega;
            p.delta_omega = (2.0 - x) * p.omega;
          });
      emit_curves(rows_a, "_a");
      // (b) sweep g_bd at delta = 0 with the same total detuning.
      const Axis axis_b =
          detail::default_axis(AxisParam::g_bd_over_omega, 0.0, 10.0, 401);
      const auto rows_b = detail::eigencurve(
          base, 1, 2, axis_b, [](ModelParams& p, double x) {
            p.delta = 0.0;
            p.delta_omega = 2.0 * p.omega;
            apply_axis(p, AxisParam::g_bd_over_omega, x);
          });
      emit_curves(rows_b, "_b");
      break;
    }
    case 4: {
      detail::apply_ideal_preset(cfg);
      const ModelParams base = cfg.model_params();
      const Axis axis =
          detail::default_axis(AxisParam::g_bd_over_omega, 0.0, 10.0, 401);
      const struct { double delta; const char* suffix; } cases[] = {
          {0.0, "_d0"}, {0.5, "_d05"}};
      for (const auto& c : cases) {
        const double delta = c.delta;
        const auto rows = detail::eigencurve(
            base, 2, 2, axis, [delta](ModelParams& p, double x) {
              p.delta = delta * p.omega;
              p.delta_omega = (2.0 - delta) * p.omega;
              apply_axis(p, AxisParam::g_bd_over_omega, x);
            });
        emit_curves(rows, c.suffix);
      }
      break;
    }
    case 5:
    case 6:
    case 7: {
      if (cfg.figure == 5) {
        detail::apply_ideal_preset(cfg);
      } else {
        detail::apply_rb_preset(cfg);
      }
      Axis x = cfg.has("grid_x")
                   ? cfg.grid_x
                   : (cfg.figure == 5
                          ? detail::default_axis(AxisParam::delta_over_omega,
                                                 -10.0, 10.0, 201)
                          : cfg.figure == 6
                                ? detail::default_axis(
                                      AxisParam::delta_over_omega, -50.0, 50.0,
                                      201)
                                : detail::default_axis(
                                      AxisParam::delta_over_omega, -680.0,
                                      -640.0, 201));
      Axis y = cfg.has("grid_y")
                   ? cfg.grid_y
                   : (cfg.figure == 5
                          ? detail::default_axis(AxisParam::g_over_omega, 0.1,
                                                 10.0, 201)
                          : detail::default_axis(AxisParam::g_over_omega, 0.1,
                                                 20.0, 201));
      const ModelParams base = cfg.model_params();
      const Grid rho1 = scan(base, x, y, Metric::rho_exc_1, cfg.n_atoms,
                             cfg.quanta, cfg.threads);
      emit_grid(rho1, "_rho1");
      const Grid rho2 = scan(base, x, y, Metric::rho_exc_2, cfg.n_atoms,
                             cfg.quanta, cfg.threads);
      emit_grid(rho2, "_rho2");
      break;
    }
    default:
      throw ConfigError("figure must be one of 2..7, got " +
                        std::to_string(cfg.figure));
  }

  const std::string meta = cfg.out + ".meta";
  io::atomic_write_file(meta, meta_text(cfg, files));
  files.push_back(meta);
  return files;
}

}  // namespace nqed
