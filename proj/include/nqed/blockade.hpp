#pragma once

// Photon-blockade figure of merit: steady-state upper-level population of an
// effective two-state system driven through the cavity, maximized over the
// dressed states reachable from a given lower state.

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "hamiltonian.hpp"
#include "manifold.hpp"
#include "spectra.hpp"

namespace nqed {

// Saturation population rho = Oe^2 / (2 Oe^2 + De^2 + Gu^2) of a two-state
// system with effective Rabi frequency Oe, detuning De and upper-state width
// Gu. Bounded by 1/2; an undriven transition gives exactly 0.
inline double two_state_population(double omega_e, double delta_e,
                                   double gamma_u) {
  if (omega_e == 0.0) return 0.0;
  const double oe2 = omega_e * omega_e;
  return oe2 / (2.0 * oe2 + delta_e * delta_e + gamma_u * gamma_u);
}

// Effective drive strength beta |<L| a |U>| between dressed states of
// adjacent manifolds connected by the annihilation map.
inline double effective_rabi(double beta, const Eigen::VectorXcd& lower,
                             const Eigen::VectorXcd& upper,
                             const AnnihilationMap& a_map) {
  if (a_map.rows() != lower.size() || a_map.cols() != upper.size())
    throw std::invalid_argument(
        "effective_rabi: annihilation map does not match state dimensions");
  return beta * std::abs(lower.dot(a_map * upper));
}

// One excitation step: the two-state population maximized over the upper
// manifold, with the parameters of the winning transition.
struct TransitionMetrics {
  double omega_e = 0.0;
  double delta_e = 0.0;
  double gamma_u = 0.0;
  double rho = 0.0;
};

struct Rho1Result {
  double value = 0.0;
  std::size_t g1_index = 0;  // index into the sorted one-quantum spectrum
  DressedState g1;           // the winning one-quantum state
  TransitionMetrics metrics;
};

struct Rho2Result {
  double value = 0.0;
  std::size_t upper_index = 0;  // index into the sorted two-quanta spectrum
  TransitionMetrics metrics;
};

namespace detail {

struct StepChoice {
  std::size_t index = 0;
  TransitionMetrics metrics;
};

// Maximize the two-state population over the upper spectrum. Ties in rho
// (within 1e-12) resolve toward the smaller |Re E| of the upper state.
inline StepChoice best_transition(const Spectrum& upper,
                                  const Eigen::VectorXcd& lower_vector,
                                  double lower_energy_re,
                                  const AnnihilationMap& a_map, double beta,
                                  double drive_offset) {
  StepChoice best;
  bool first = true;
  double best_abs_re = 0.0;
  for (std::size_t k = 0; k < upper.size(); ++k) {
    const DressedState& u = upper.states[k];
    TransitionMetrics m;
    m.omega_e = effective_rabi(beta, lower_vector, u.vector, a_map);
    m.delta_e = u.energy.real() - lower_energy_re - drive_offset;
    m.gamma_u = -u.energy.imag();
    m.rho = two_state_population(m.omega_e, m.delta_e, m.gamma_u);
    const double abs_re = std::abs(u.energy.real());
    const bool wins = first || m.rho > best.metrics.rho + 1e-12 ||
                      (std::abs(m.rho - best.metrics.rho) <= 1e-12 &&
                       abs_re < best_abs_re);
    if (wins) {
      best.index = k;
      best.metrics = m;
      best_abs_re = abs_re;
      first = false;
    }
  }
  return best;
}

}  // namespace detail

// First-photon excitation: drive from |a...a, 0> into the one-quantum
// manifold; returns the maximal two-state population and the state G1 that
// attains it.
inline Rho1Result rho_exc_1(const ModelParams& p, int n_atoms,
                            ManifoldLimits limits = {}) {
  p.validate();
  const Manifold m0 = build_manifold(n_atoms, 0, limits);
  const Manifold m1 = build_manifold(n_atoms, 1, limits);
  const Spectrum s1 = diagonalize(build_block(p, m1));
  const AnnihilationMap a10 = annihilation_map(m1, m0);

  const Eigen::VectorXcd ground = Eigen::VectorXcd::Ones(1);
  const auto choice =
      detail::best_transition(s1, ground, 0.0, a10, p.beta, p.drive_offset);

  Rho1Result out;
  out.value = choice.metrics.rho;
  out.g1_index = choice.index;
  out.g1 = s1.states[choice.index];
  out.metrics = choice.metrics;
  return out;
}

// Second-photon excitation: drive from the given one-quantum state G1 into
// the two-quanta manifold at the same probe frequency, so the effective
// detuning is Re E_U - Re E_G1 - drive_offset.
inline Rho2Result rho_exc_2(const ModelParams& p, int n_atoms,
                            const DressedState& g1,
                            ManifoldLimits limits = {}) {
  p.validate();
  const Manifold m1 = build_manifold(n_atoms, 1, limits);
  const Manifold m2 = build_manifold(n_atoms, 2, limits);
  if (g1.vector.size() != static_cast<Eigen::Index>(m1.size()))
    throw std::invalid_argument(
        "rho_exc_2: g1 does not live in the one-quantum manifold");
  const Spectrum s2 = diagonalize(build_block(p, m2));
  const AnnihilationMap a21 = annihilation_map(m2, m1);

  const auto choice = detail::best_transition(
      s2, g1.vector, g1.energy.real(), a21, p.beta, p.drive_offset);

  Rho2Result out;
  out.value = choice.metrics.rho;
  out.upper_index = choice.index;
  out.metrics = choice.metrics;
  return out;
}

// Both steps at once; the blockade is strong when rho_exc_1 is large while
// rho_exc_2 stays small.
struct BlockadeReport {
  double rho_exc_1 = 0.0;
  std::size_t g1_index = 0;
  TransitionMetrics step1;
  double rho_exc_2 = 0.0;
  std::size_t upper_index = 0;
  TransitionMetrics step2;
};

inline BlockadeReport blockade_report(const ModelParams& p, int n_atoms,
                                      ManifoldLimits limits = {}) {
  BlockadeReport report;
  const Rho1Result r1 = rho_exc_1(p, n_atoms, limits);
  report.rho_exc_1 = r1.value;
  report.g1_index = r1.g1_index;
  report.step1 = r1.metrics;
  const Rho2Result r2 = rho_exc_2(p, n_atoms, r1.g1, limits);
  report.rho_exc_2 = r2.value;
  report.upper_index = r2.upper_index;
  report.step2 = r2.metrics;
  return report;
}

// First-photon response versus atom number at a fixed probe detuning.
// N = 0 is the empty cavity: a bare resonance of width gamma_cav driven at
// strength beta, population two_state_population(beta, -offset, gamma_cav).
inline std::vector<std::pair<int, double>> atom_number_selectivity(
    ModelParams p, double drive_offset, std::span<const int> n_range,
    ManifoldLimits limits = {}) {
  if (!std::isfinite(drive_offset))
    throw std::invalid_argument(
        "atom_number_selectivity: drive_offset must be finite");
  p.drive_offset = drive_offset;
  p.validate();

  std::vector<std::pair<int, double>> out;
  out.reserve(n_range.size());
  for (int n : n_range) {
    if (n < 0)
      throw std::invalid_argument(
          "atom_number_selectivity: atom numbers must be >= 0");
    if (n == 0) {
      out.emplace_back(
          0, two_state_population(p.beta, -drive_offset, p.gamma_cav));
    } else {
      out.emplace_back(n, rho_exc_1(p, n, limits).value);
    }
  }
  return out;
}

}  // namespace nqed
