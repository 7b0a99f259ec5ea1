#pragma once

// Deterministic 2-D parameter sweeps of scalar blockade/spectrum metrics.
// Cells are evaluated independently (any thread count, any order) and
// written into a preallocated row-major buffer by index, so the result is
// bit-identical regardless of scheduling.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <exception>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "blockade.hpp"
#include "hamiltonian.hpp"
#include "spectra.hpp"

namespace nqed {

class ScanError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Parameters a sweep axis may vary, always expressed in units of omega.
// g_over_omega moves both cavity couplings together.
enum class AxisParam {
  delta_over_omega,
  g_over_omega,
  g_bd_over_omega,
  drive_offset_over_omega,
};

enum class Metric {
  rho_exc_1,
  rho_exc_2,
  min_abs_real_energy,
};

constexpr std::string_view to_string(AxisParam p) noexcept {
  switch (p) {
    case AxisParam::delta_over_omega: return "delta_over_omega";
    case AxisParam::g_over_omega: return "g_over_omega";
    case AxisParam::g_bd_over_omega: return "g_bd_over_omega";
    case AxisParam::drive_offset_over_omega: return "drive_offset_over_omega";
  }
  return "?";
}

constexpr std::string_view to_string(Metric m) noexcept {
  switch (m) {
    case Metric::rho_exc_1: return "rho_exc_1";
    case Metric::rho_exc_2: return "rho_exc_2";
    case Metric::min_abs_real_energy: return "min_abs_real_energy";
  }
  return "?";
}

inline AxisParam axis_param_from_string(std::string_view name) {
  if (name == "delta_over_omega") return AxisParam::delta_over_omega;
  if (name == "g_over_omega") return AxisParam::g_over_omega;
  if (name == "g_bd_over_omega") return AxisParam::g_bd_over_omega;
  if (name == "drive_offset_over_omega")
    return AxisParam::drive_offset_over_omega;
  throw std::invalid_argument("unknown axis parameter '" + std::string(name) +
                              "'");
}

inline Metric metric_from_string(std::string_view name) {
  if (name == "rho_exc_1") return Metric::rho_exc_1;
  if (name == "rho_exc_2") return Metric::rho_exc_2;
  if (name == "min_abs_real_energy") return Metric::min_abs_real_energy;
  throw std::invalid_argument("unknown metric '" + std::string(name) + "'");
}

// Uniform closed-interval grid axis. Endpoints are reproduced exactly;
// count == 1 collapses to the start value.
struct Axis {
  AxisParam param = AxisParam::delta_over_omega;
  double start = 0.0;
  double stop = 0.0;
  int count = 1;

  void validate() const {
    if (count < 1)
      throw std::invalid_argument("Axis: count must be >= 1");
    if (!std::isfinite(start) || !std::isfinite(stop) || start > stop)
      throw std::invalid_argument("Axis: need finite start <= stop");
  }

  double value(int i) const {
    if (i < 0 || i >= count)
      throw std::out_of_range("Axis::value: index out of range");
    if (i == 0) return start;
    if (i == count - 1) return stop;
    return start + (stop - start) *
                       (static_cast<double>(i) / static_cast<double>(count - 1));
  }
};

// Overwrites the swept parameter with value * omega.
inline void apply_axis(ModelParams& p, AxisParam param, double value) {
  switch (param) {
    case AxisParam::delta_over_omega:
      p.delta = value * p.omega;
      return;
    case AxisParam::g_over_omega:
      p.g_ac = value * p.omega;
      p.g_bd = value * p.omega;
      return;
    case AxisParam::g_bd_over_omega:
      p.g_bd = value * p.omega;
      return;
    case AxisParam::drive_offset_over_omega:
      p.drive_offset = value * p.omega;
      return;
  }
}

// Single-point metric evaluation. `quanta` selects the manifold for
// min_abs_real_energy (the blockade metrics always use manifolds 0-2).
// Results are dimensionless; energies are scaled by omega.
inline double evaluate_metric(const ModelParams& p, Metric metric,
                              int n_atoms, int quanta = 2,
                              ManifoldLimits limits = {}) {
  switch (metric) {
    case Metric::rho_exc_1:
      return rho_exc_1(p, n_atoms, limits).value;
    case Metric::rho_exc_2: {
      const Rho1Result r1 = rho_exc_1(p, n_atoms, limits);
      return rho_exc_2(p, n_atoms, r1.g1, limits).value;
    }
    case Metric::min_abs_real_energy: {
      const Spectrum s =
          diagonalize(build_block(p, build_manifold(n_atoms, quanta, limits)));
      double best = std::numeric_limits<double>::infinity();
      for (const DressedState& st : s.states)
        best = std::min(best, std::abs(st.energy.real()));
      return best / p.omega;
    }
  }
  throw std::invalid_argument("evaluate_metric: unknown metric");
}

// Row-major sweep result; x varies fastest.
struct Grid {
  Axis x;
  Axis y;
  int n_atoms = 1;
  int quanta = 2;
  Metric metric = Metric::rho_exc_2;
  ModelParams params;  // template the axes were applied to
  std::vector<double> values;

  double at(int ix, int iy) const {
    if (ix < 0 || ix >= x.count || iy < 0 || iy >= y.count)
      throw std::out_of_range("Grid::at: index out of range");
    return values[static_cast<std::size_t>(iy) *
                      static_cast<std::size_t>(x.count) +
                  static_cast<std::size_t>(ix)];
  }
};

struct Extrema {
  double min_value = 0.0;
  int min_ix = 0, min_iy = 0;
  double max_value = 0.0;
  int max_ix = 0, max_iy = 0;
};

// First occurrence in row-major order wins ties.
inline Extrema extrema(const Grid& grid) {
  if (grid.values.empty())
    throw std::invalid_argument("extrema: empty grid");
  Extrema e;
  e.min_value = e.max_value = grid.values[0];
  for (std::size_t k = 1; k < grid.values.size(); ++k) {
    const double v = grid.values[k];
    const int ix = static_cast<int>(k % static_cast<std::size_t>(grid.x.count));
    const int iy = static_cast<int>(k / static_cast<std::size_t>(grid.x.count));
    if (v < e.min_value) {
      e.min_value = v;
      e.min_ix = ix;
      e.min_iy = iy;
    }
    if (v > e.max_value) {
      e.max_value = v;
      e.max_ix = ix;
      e.max_iy = iy;
    }
  }
  return e;
}

// Evaluates `metric` over the cross product of the two axes. `threads` = 0
// uses the hardware concurrency. A non-finite cell aborts the scan with the
// offending coordinates in the error message.
inline Grid scan(const ModelParams& params, const Axis& x, const Axis& y,
                 Metric metric, int n_atoms, int quanta = 2,
                 unsigned threads = 0, ManifoldLimits limits = {}) {
  params.validate();
  x.validate();
  y.validate();
  if (x.param == y.param)
    throw std::invalid_argument("scan: axes must sweep distinct parameters");

  Grid grid;
  grid.x = x;
  grid.y = y;
  grid.n_atoms = n_atoms;
  grid.quanta = quanta;
  grid.metric = metric;
  grid.params = params;
  const std::size_t total =
      static_cast<std::size_t>(x.count) * static_cast<std::size_t>(y.count);
  grid.values.assign(total, 0.0);

  unsigned n_threads = threads != 0 ? threads
                                    : std::max(1u, std::thread::hardware_concurrency());
  n_threads = static_cast<unsigned>(
      std::min<std::size_t>(n_threads, total));

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&]() {
    try {
      for (std::size_t k = next.fetch_add(1); k < total;
           k = next.fetch_add(1)) {
        const int ix = static_cast<int>(k % static_cast<std::size_t>(x.count));
        const int iy = static_cast<int>(k / static_cast<std::size_t>(x.count));
        ModelParams cell = params;
        apply_axis(cell, x.param, x.value(ix));
        apply_axis(cell, y.param, y.value(iy));
        const double v = evaluate_metric(cell, metric, n_atoms, quanta, limits);
        if (!std::isfinite(v))
          throw ScanError("scan: non-finite value at cell (" +
                          std::to_string(ix) + ", " + std::to_string(iy) +
                          "), " + std::string(to_string(x.param)) + " = " +
                          std::to_string(x.value(ix)) + ", " +
                          std::string(to_string(y.param)) + " = " +
                          std::to_string(y.value(iy)));
        grid.values[k] = v;
      }
    } catch (...) {
      std::scoped_lock lock(failure_mutex);
      if (!failure) failure = std::current_exception();
      next.store(total);  // drain remaining work
    }
  };

  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  return grid;
}

}  // namespace nqed
