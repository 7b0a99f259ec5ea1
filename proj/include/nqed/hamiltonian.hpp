#pragma once

// Effective non-Hermitian Hamiltonian blocks for N four-level atoms in the
// N-type configuration coupled to a driven cavity, written in the frame
// where each excitation manifold decouples. Complex symmetric; decay enters
// through the imaginary parts of the diagonal.

#include <Eigen/Core>

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "manifold.hpp"

namespace nqed {

using Complex = std::complex<double>;

// All rates, detunings and couplings share one angular-frequency unit (the
// same unit as omega); every reported quantity depends only on ratios.
struct ModelParams {
  double omega = 1.0;         // b-c coupling-field Rabi frequency, the scale
  double g_ac = 0.0;          // cavity coupling on a-c
  double g_bd = 0.0;          // cavity coupling on b-d
  double delta = 0.0;         // shared two-photon detuning
  double delta_omega = 0.0;   // a-c / b-d transition-frequency mismatch
  double gamma_c = 0.0;       // level-c amplitude decay
  double gamma_d = 0.0;       // level-d amplitude decay
  double gamma_cav = 0.0;     // cavity field decay
  double beta = 0.0;          // external probe drive amplitude
  double drive_offset = 0.0;  // probe detuning from the cavity resonance

  // Detuning on the upper transition: Delta = delta + delta_omega.
  double delta_total() const noexcept { return delta + delta_omega; }

  // Complex decay-detuning combinations entering the diagonal.
  Complex gamma_c_tilde() const noexcept { return {gamma_c, delta}; }
  Complex gamma_d_tilde() const noexcept { return {gamma_d, delta_total()}; }

  void validate() const {
    auto require = [](bool ok, const char* what) {
      if (!ok) throw std::invalid_argument(std::string("ModelParams: ") + what);
    };
    require(std::isfinite(omega) && omega > 0.0, "omega must be > 0");
    require(std::isfinite(g_ac) && g_ac >= 0.0, "g_ac must be >= 0");
    require(std::isfinite(g_bd) && g_bd >= 0.0, "g_bd must be >= 0");
    require(std::isfinite(delta), "delta must be finite");
    require(std::isfinite(delta_omega), "delta_omega must be finite");
    require(std::isfinite(gamma_c) && gamma_c >= 0.0, "gamma_c must be >= 0");
    require(std::isfinite(gamma_d) && gamma_d >= 0.0, "gamma_d must be >= 0");
    require(std::isfinite(gamma_cav) && gamma_cav >= 0.0,
            "gamma_cav must be >= 0");
    require(std::isfinite(beta) && beta >= 0.0, "beta must be >= 0");
    require(std::isfinite(drive_offset), "drive_offset must be finite");
  }
};

inline constexpr double k_hbar = 1.054571817e-34;       // J s
inline constexpr double k_epsilon0 = 8.8541878128e-12;  // F / m

// Laboratory quantities from which the model couplings derive. SI units.
struct PhysicalParams {
  double power = 0.0;          // drive power incident on the input mirror, W
  double transmittance = 0.0;  // input-mirror amplitude transmittance
  double cavity_volume = 0.0;  // mode volume, m^3
  double mu_ac = 0.0;          // a-c transition dipole moment, C m
  double mu_bd = 0.0;          // b-d transition dipole moment, C m
  double omega_ca = 0.0;       // a-c transition angular frequency, rad/s
  double omega_db = 0.0;       // b-d transition angular frequency, rad/s
  double omega_cav = 0.0;      // cavity resonance angular frequency, rad/s
};

// Vacuum Rabi couplings g = mu * sqrt(omega / (2 hbar epsilon0 V)) for the
// two cavity-coupled transitions, in rad/s. Returns {g_ac, g_bd}.
inline std::pair<double, double> coupling_from_physical(
    const PhysicalParams& p) {
  if (!(p.cavity_volume > 0.0))
    throw std::invalid_argument("coupling_from_physical: volume must be > 0");
  if (!(p.omega_ca > 0.0) || !(p.omega_db > 0.0))
    throw std::invalid_argument(
        "coupling_from_physical: transition frequencies must be > 0");
  const double denom = 2.0 * k_hbar * k_epsilon0 * p.cavity_volume;
  return {p.mu_ac * std::sqrt(p.omega_ca / denom),
          p.mu_bd * std::sqrt(p.omega_db / denom)};
}

// Probe drive amplitude beta = sqrt(P gamma_cav T^2 / (4 hbar omega_cav)),
// rad/s, for a drive of power P entering through a mirror of transmittance T.
inline double beta_from_physical(const PhysicalParams& p, double gamma_cav) {
  if (!(p.omega_cav > 0.0))
    throw std::invalid_argument(
        "beta_from_physical: cavity frequency must be > 0");
  if (gamma_cav < 0.0 || p.power < 0.0)
    throw std::invalid_argument(
        "beta_from_physical: power and gamma_cav must be >= 0");
  return std::sqrt(p.power * gamma_cav * p.transmittance * p.transmittance /
                   (4.0 * k_hbar * p.omega_cav));
}

struct BlockMatrix {
  Manifold manifold;
  Eigen::MatrixXcd matrix;  // complex symmetric, manifold.size() square
};

namespace detail {

// Diagonal element for one product state:
//   -i (gamma_c_tilde * n_c + gamma_d_tilde * n_d + n_photons * gamma_cav).
inline Complex diagonal_term(const ModelParams& p, const ProductState& s) {
  int nc = 0, nd = 0;
  for (AtomLevel l : s.atoms) {
    nc += (l == AtomLevel::c);
    nd += (l == AtomLevel::d);
  }
  const Complex sum = p.gamma_c_tilde() * static_cast<double>(nc) +
                      p.gamma_d_tilde() * static_cast<double>(nd) +
                      Complex(s.photons * p.gamma_cav, 0.0);
  return Complex(0.0, -1.0) * sum;
}

// Coupling between two distinct product states. Nonzero only when exactly
// one atom changes level:
//   b <-> c with equal photon number        -> omega
//   a <-> c absorbing/emitting one photon   -> g_ac sqrt(n_high)
//   b <-> d absorbing/emitting one photon   -> g_bd sqrt(n_high)
// where n_high is the photon number of the photon-richer state.
inline double coupling_term(const ModelParams& p, const ProductState& x,
                            const ProductState& y) {
  int mismatch = -1;
  for (std::size_t k = 0; k < x.atoms.size(); ++k) {
    if (x.atoms[k] != y.atoms[k]) {
      if (mismatch >= 0) return 0.0;  // more than one atom changed
      mismatch = static_cast<int>(k);
    }
  }
  if (mismatch < 0) return 0.0;  // same atom tuple; photons differ

  const AtomLevel lx = x.atoms[static_cast<std::size_t>(mismatch)];
  const AtomLevel ly = y.atoms[static_cast<std::size_t>(mismatch)];

  if (x.photons == y.photons) {
    const bool bc = (lx == AtomLevel::b && ly == AtomLevel::c) ||
                    (lx == AtomLevel::c && ly == AtomLevel::b);
    return bc ? p.omega : 0.0;
  }

  if (std::abs(x.photons - y.photons) == 1) {
    const bool x_high = x.photons > y.photons;
    const AtomLevel hi = x_high ? lx : ly;  // level in the photon-richer state
    const AtomLevel lo = x_high ? ly : lx;
    const double root_n =
        std::sqrt(static_cast<double>(x_high ? x.photons : y.photons));
    if (hi == AtomLevel::a && lo == AtomLevel::c) return p.g_ac * root_n;
    if (hi == AtomLevel::b && lo == AtomLevel::d) return p.g_bd * root_n;
  }
  return 0.0;
}

}  // namespace detail

// Assembles the manifold's Hamiltonian block in the canonical basis order.
// The result is complex symmetric (not Hermitian): decay rates appear as
// negative imaginary parts on the diagonal, couplings are real.
inline BlockMatrix build_block(const ModelParams& p, const Manifold& m) {
  p.validate();
  if (m.size() == 0)
    throw std::invalid_argument("build_block: empty manifold");

  const auto dim = static_cast<Eigen::Index>(m.size());
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    const ProductState& si = m.basis[static_cast<std::size_t>(i)];
    h(i, i) = detail::diagonal_term(p, si);
    for (Eigen::Index j = i + 1; j < dim; ++j) {
      const ProductState& sj = m.basis[static_cast<std::size_t>(j)];
      const double v = detail::coupling_term(p, si, sj);
      if (v != 0.0) {
        h(i, j) = v;
        h(j, i) = v;
      }
    }
  }
  return BlockMatrix{m, std::move(h)};
}

// Closed-form one-quantum eigenvalues for N identical atoms with a lossless
// cavity (gamma_cav must be 0). Writing G = gamma_c_tilde, the 2N+1 states
// split into
//   E_{+-2} = (-i G +- sqrt(-G^2 + 4 (omega^2 + N g_ac^2))) / 2   (once each)
//   E_0     = 0                                                    (once)
//   E_{+-1} = (-i G +- sqrt(-G^2 + 4 omega^2)) / 2         (N - 1 times each)
// using the principal square root. Returned in the order E_{+2}, E_{+1},
// E_0, E_{-1}, E_{-2} with multiplicities attached; the E_{+-1} pair is
// absent for N = 1.
inline std::vector<std::pair<Complex, int>> analytic_one_quantum(
    const ModelParams& p, int n_atoms) {
  p.validate();
  if (n_atoms < 1)
    throw std::invalid_argument("analytic_one_quantum: n_atoms must be >= 1");
  if (p.gamma_cav != 0.0)
    throw std::invalid_argument(
        "analytic_one_quantum: closed form requires gamma_cav == 0");

  const Complex g = p.gamma_c_tilde();
  const Complex minus_ig = Complex(0.0, -1.0) * g;
  const double n = static_cast<double>(n_atoms);

  const Complex root_bright =
      std::sqrt(-g * g + 4.0 * (p.omega * p.omega + n * p.g_ac * p.g_ac));
  const Complex root_pair = std::sqrt(-g * g + 4.0 * p.omega * p.omega);

  std::vector<std::pair<Complex, int>> out;
  out.emplace_back(0.5 * (minus_ig + root_bright), 1);
  if (n_atoms > 1) out.emplace_back(0.5 * (minus_ig + root_pair), n_atoms - 1);
  out.emplace_back(Complex(0.0, 0.0), 1);
  if (n_atoms > 1) out.emplace_back(0.5 * (minus_ig - root_pair), n_atoms - 1);
  out.emplace_back(0.5 * (minus_ig - root_bright), 1);
  return out;
}

}  // namespace nqed
