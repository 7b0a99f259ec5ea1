#pragma once

// Dressed-state spectra: numerical diagonalization of manifold blocks,
// optical activity classification, and a few closed-form reference states.

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hamiltonian.hpp"
#include "manifold.hpp"

namespace nqed {

class EigensolveError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DressedState {
  Complex energy;
  Eigen::VectorXcd vector;  // right eigenvector, unit Euclidean norm
  bool active = false;      // set by classify_active
};

struct Spectrum {
  Manifold manifold;
  std::vector<DressedState> states;  // sorted by (Re E, Im E) ascending
  double block_norm = 0.0;           // Frobenius norm of the source block

  std::size_t size() const noexcept { return states.size(); }
};

namespace detail {

inline std::string dump_matrix(const Eigen::MatrixXcd& h) {
  std::ostringstream os;
  os.precision(17);
  os << h;
  return os.str();
}

}  // namespace detail

// Full right-eigensystem of a manifold block. Eigenvectors are normalized to
// unit Euclidean norm and states are sorted by real part, then imaginary
// part. Each pair must satisfy ||H v - E v|| <= 1e-9 ||H||_F or the solve is
// rejected.
inline Spectrum diagonalize(const BlockMatrix& block) {
  const Eigen::MatrixXcd& h = block.matrix;
  if (h.rows() != h.cols() || h.rows() == 0)
    throw std::invalid_argument("diagonalize: matrix must be square and "
                                "non-empty");
  if (static_cast<std::size_t>(h.rows()) != block.manifold.size())
    throw std::invalid_argument(
        "diagonalize: matrix dimension does not match manifold size");
  if (!h.allFinite())
    throw EigensolveError("diagonalize: non-finite matrix entry\n" +
                          detail::dump_matrix(h));

  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(h, true);
  if (solver.info() != Eigen::Success)
    throw EigensolveError("diagonalize: eigensolver failed to converge\n" +
                          detail::dump_matrix(h));

  const double norm = h.norm();  // Frobenius
  const double residual_bound = 1e-9 * norm;

  Spectrum spectrum;
  spectrum.manifold = block.manifold;
  spectrum.block_norm = norm;
  spectrum.states.reserve(static_cast<std::size_t>(h.rows()));
  for (Eigen::Index k = 0; k < h.rows(); ++k) {
    DressedState st;
    st.energy = solver.eigenvalues()(k);
    st.vector = solver.eigenvectors().col(k);
    const double vn = st.vector.norm();
    if (!(vn > 0.0) || !st.vector.allFinite())
      throw EigensolveError("diagonalize: degenerate eigenvector returned\n" +
                            detail::dump_matrix(h));
    st.vector /= vn;
    const double residual = (h * st.vector - st.energy * st.vector).norm();
    if (residual > residual_bound)
      throw EigensolveError(
          "diagonalize: residual " + std::to_string(residual) +
          " exceeds bound " + std::to_string(residual_bound) + "\n" +
          detail::dump_matrix(h));
    spectrum.states.push_back(std::move(st));
  }

  std::sort(spectrum.states.begin(), spectrum.states.end(),
            [](const DressedState& x, const DressedState& y) {
              if (x.energy.real() != y.energy.real())
                return x.energy.real() < y.energy.real();
              return x.energy.imag() < y.energy.imag();
            });
  return spectrum;
}

// The zero-quanta manifold holds the single state |a...a, 0> at energy 0.
inline Spectrum ground_state(int n_atoms, ManifoldLimits limits = {}) {
  Spectrum spectrum;
  spectrum.manifold = build_manifold(n_atoms, 0, limits);
  DressedState st;
  st.energy = Complex(0.0, 0.0);
  st.vector = Eigen::VectorXcd::Ones(1);
  st.active = true;
  spectrum.states.push_back(std::move(st));
  spectrum.block_norm = 0.0;
  return spectrum;
}

// Flags each state whose photon-emission overlap |<L| a |U>| with the given
// lower state exceeds `threshold` times the largest overlap in the spectrum.
// `a_map` must map this spectrum's manifold down to the lower state's space.
inline Spectrum classify_active(Spectrum spectrum,
                                const Eigen::VectorXcd& lower_vector,
                                const AnnihilationMap& a_map,
                                double threshold = 1e-6) {
  if (!(threshold > 0.0) || !(threshold < 1.0))
    throw std::invalid_argument(
        "classify_active: threshold must lie in (0, 1)");
  if (a_map.cols() != static_cast<Eigen::Index>(spectrum.manifold.size()))
    throw std::invalid_argument(
        "classify_active: annihilation map does not match spectrum manifold");
  if (a_map.rows() != lower_vector.size())
    throw std::invalid_argument(
        "classify_active: annihilation map does not match lower state");

  std::vector<double> overlaps;
  overlaps.reserve(spectrum.size());
  double peak = 0.0;
  for (const DressedState& st : spectrum.states) {
    // dot() conjugates its left argument.
    const double o = std::abs(lower_vector.dot(a_map * st.vector));
    overlaps.push_back(o);
    peak = std::max(peak, o);
  }
  for (std::size_t k = 0; k < spectrum.size(); ++k)
    spectrum.states[k].active = overlaps[k] > threshold * peak;
  return spectrum;
}

// Coefficients (c_a1, c_b0) of the single-atom one-quantum dark state
//   (omega |a,1> - g_ac |b,0>) / sqrt(omega^2 + g_ac^2),
// an exact zero-energy eigenvector when the cavity is lossless.
inline std::pair<double, double> dark_state_coefficients(
    const ModelParams& p) {
  const double norm = std::hypot(p.omega, p.g_ac);
  if (!(norm > 0.0))
    throw std::invalid_argument(
        "dark_state_coefficients: omega and g_ac cannot both vanish");
  return {p.omega / norm, -p.g_ac / norm};
}

// Clusters eigenvalues lying within `tol` of each other (transitive
// closure) and returns one (mean energy, multiplicity) pair per cluster,
// sorted by (Re, Im). The overload without `tol` uses 1e-8 ||H||_F.
inline std::vector<std::pair<Complex, int>> degeneracy_groups(
    const Spectrum& spectrum, double tol) {
  if (!(tol >= 0.0) || !std::isfinite(tol))
    throw std::invalid_argument("degeneracy_groups: tol must be finite and "
                                ">= 0");
  const std::size_t n = spectrum.size();
  std::vector<std::size_t> parent(n);
  for (std::size_t i = 0; i < n; ++i) parent[i] = i;
  auto find = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (std::abs(spectrum.states[i].energy - spectrum.states[j].energy) <=
          tol)
        parent[find(j)] = find(i);

  std::vector<Complex> sum(n, Complex(0.0, 0.0));
  std::vector<int> count(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t r = find(i);
    sum[r] += spectrum.states[i].energy;
    count[r] += 1;
  }
  std::vector<std::pair<Complex, int>> groups;
  for (std::size_t i = 0; i < n; ++i)
    if (count[i] > 0)
      groups.emplace_back(sum[i] / static_cast<double>(count[i]), count[i]);
  std::sort(groups.begin(), groups.end(),
            [](const auto& x, const auto& y) {
              if (x.first.real() != y.first.real())
                return x.first.real() < y.first.real();
              return x.first.imag() < y.first.imag();
            });
  return groups;
}

inline std::vector<std::pair<Complex, int>> degeneracy_groups(
    const Spectrum& spectrum) {
  return degeneracy_groups(spectrum, 1e-8 * spectrum.block_norm);
}

}  // namespace nqed
