#pragma once

// Excitation-conserving basis enumeration for N four-level atoms coupled to
// a single cavity mode. States are products |l_1 ... l_N, n> of one level per
// atom and a photon number; a manifold collects every product state with the
// same total quantum count.

#include <Eigen/SparseCore>

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace nqed {

// Atomic levels in increasing energy order. The cavity mode couples a-c and
// b-d; the classical coupling field drives b-c.
enum class AtomLevel : std::uint8_t { a = 0, b = 1, c = 2, d = 3 };

constexpr char to_char(AtomLevel l) noexcept {
  return "abcd"[static_cast<int>(l)];
}

// Quanta stored in each level: the ladder a (0) -> b,c (1) -> d (2).
constexpr int excitation_weight(AtomLevel l) noexcept {
  constexpr int w[4] = {0, 1, 1, 2};
  return w[static_cast<int>(l)];
}

struct ProductState {
  std::vector<AtomLevel> atoms;  // one entry per atom, fixed order
  int photons = 0;

  friend bool operator==(const ProductState&, const ProductState&) = default;
};

inline int total_quanta(const ProductState& s) {
  int q = s.photons;
  for (AtomLevel l : s.atoms) q += excitation_weight(l);
  return q;
}

// Canonical basis order: photon number descending, then lexicographic in the
// atom tuple (a < b < c < d). This is the column order used throughout.
inline bool canonical_less(const ProductState& x, const ProductState& y) {
  if (x.photons != y.photons) return x.photons > y.photons;
  return x.atoms < y.atoms;
}

inline std::string to_string(const ProductState& s) {
  std::string out = "|";
  for (AtomLevel l : s.atoms) out += to_char(l);
  out += ",";
  out += std::to_string(s.photons);
  out += ">";
  return out;
}

// Guard rails for basis sizes; dimensions grow like 4^N.
struct ManifoldLimits {
  int max_atoms = 6;
  int max_quanta = 4;
};

struct Manifold {
  int n_atoms = 0;
  int quanta = 0;
  std::vector<ProductState> basis;  // sorted by canonical_less

  std::size_t size() const noexcept { return basis.size(); }

  const ProductState& state(std::size_t i) const { return basis.at(i); }

  std::optional<std::size_t> index_of(const ProductState& s) const {
    auto it = std::lower_bound(basis.begin(), basis.end(), s, canonical_less);
    if (it == basis.end() || !(*it == s)) return std::nullopt;
    return static_cast<std::size_t>(it - basis.begin());
  }
};

// Enumerates every product state with the given total quantum count for
// n_atoms atoms, in canonical order. The photon number of each state is
// determined by the atom tuple: photons = quanta - sum of level weights.
inline Manifold build_manifold(int n_atoms, int quanta,
                               ManifoldLimits limits = {}) {
  if (n_atoms < 1 || n_atoms > limits.max_atoms)
    throw std::invalid_argument("build_manifold: n_atoms must be in [1, " +
                                std::to_string(limits.max_atoms) + "], got " +
                                std::to_string(n_atoms));
  if (quanta < 0 || quanta > limits.max_quanta)
    throw std::invalid_argument("build_manifold: quanta must be in [0, " +
                                std::to_string(limits.max_quanta) + "], got " +
                                std::to_string(quanta));

  Manifold m;
  m.n_atoms = n_atoms;
  m.quanta = quanta;

  // Odometer over all 4^N atom tuples in lexicographic order.
  std::vector<AtomLevel> tuple(static_cast<std::size_t>(n_atoms), AtomLevel::a);
  while (true) {
    int weight = 0;
    for (AtomLevel l : tuple) weight += excitation_weight(l);
    if (int photons = quanta - weight; photons >= 0)
      m.basis.push_back(ProductState{tuple, photons});

    int pos = n_atoms - 1;
    while (pos >= 0 && tuple[static_cast<std::size_t>(pos)] == AtomLevel::d) {
      tuple[static_cast<std::size_t>(pos)] = AtomLevel::a;
      --pos;
    }
    if (pos < 0) break;
    auto& slot = tuple[static_cast<std::size_t>(pos)];
    slot = static_cast<AtomLevel>(static_cast<int>(slot) + 1);
  }

  std::sort(m.basis.begin(), m.basis.end(), canonical_less);
  return m;
}

using AnnihilationMap = Eigen::SparseMatrix<double>;

// Matrix elements <lower_i| a |upper_j> of the photon annihilation operator
// between adjacent manifolds: sqrt(n) where the atom tuples match and the
// photon number drops by one, zero elsewhere. Dimensions: lower.size() rows,
// upper.size() columns.
inline AnnihilationMap annihilation_map(const Manifold& upper,
                                        const Manifold& lower) {
  if (upper.n_atoms != lower.n_atoms)
    throw std::invalid_argument("annihilation_map: atom counts differ");
  if (upper.quanta != lower.quanta + 1)
    throw std::invalid_argument(
        "annihilation_map: upper manifold must hold exactly one quantum more "
        "than lower");

  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(upper.size());
  for (std::size_t j = 0; j < upper.size(); ++j) {
    const ProductState& u = upper.basis[j];
    if (u.photons < 1) continue;
    ProductState lowered{u.atoms, u.photons - 1};
    if (auto i = lower.index_of(lowered))
      entries.emplace_back(static_cast<int>(*i), static_cast<int>(j),
                           std::sqrt(static_cast<double>(u.photons)));
  }

  AnnihilationMap map(static_cast<int>(lower.size()),
                      static_cast<int>(upper.size()));
  map.setFromTriplets(entries.begin(), entries.end());
  return map;
}

}  // namespace nqed
