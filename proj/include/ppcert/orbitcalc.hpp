#pragma once

// Orbits of matrix groups on the exact-order vectors V_n, stabilizers,
// transitivity verdicts and the orbit -> point-degree dictionary.

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "ppcert/errors.hpp"
#include "ppcert/grouptab.hpp"
#include "ppcert/modarith.hpp"

namespace ppcert {

// All vectors of exact order n in (Z/nZ)^2, lexicographic.  For n = 1 this
// is the single zero vector.
struct ExactOrderSet {
  Modulus modulus;
  std::vector<Vec2> vectors;
};

inline ExactOrderSet exact_order_vectors(uint32_t n) {
  Modulus m(n);
  ExactOrderSet out{m, {}};
  out.vectors.reserve(count_exact_order(n));
  for (uint32_t a = 0; a < n; ++a)
    for (uint32_t b = 0; b < n; ++b) {
      Vec2 v(m, a, b);
      if (vec_order(v) == n) out.vectors.push_back(v);
    }
  return out;
}

namespace detail {

// BFS of the generator action starting from seed; returns discovered
// vectors in lexicographic order.  Visited flags live in a dense bitmap
// for small n and a hash set beyond that.
inline std::vector<Vec2> orbit_bfs(const GroupTable& g, const Vec2& seed) {
  require_same_modulus(g.modulus(), seed.modulus, "orbit");
  uint32_t n = g.modulus().value();
  bool dense = size_t(n) * n <= (size_t(1) << 22);
  std::vector<uint8_t> bitmap(dense ? size_t(n) * n : 0, 0);
  KeySet sparse;
  auto mark = [&](const Vec2& w) {
    if (dense) {
      uint8_t& seen = bitmap[size_t(w.a) * n + w.b];
      if (seen) return false;
      seen = 1;
      return true;
    }
    return sparse.insert(w.pack());
  };
  std::vector<Vec2> frontier{seed};
  mark(seed);
  for (size_t i = 0; i < frontier.size(); ++i) {
    Vec2 v = frontier[i];
    for (const Mat2& s : g.generators()) {
      Vec2 w = vec_act(s, v);
      if (mark(w)) frontier.push_back(w);
    }
  }
  std::sort(frontier.begin(), frontier.end());
  return frontier;
}

}  // namespace detail

inline std::vector<Vec2> orbit_of(const GroupTable& g, const Vec2& v) {
  return detail::orbit_bfs(g, v);
}

struct Orbit {
  Vec2 representative;  // lexicographically minimal member
  uint64_t size;
  std::vector<Vec2> members;  // lexicographic
};

struct OrbitDecomposition {
  GroupTable group;
  Modulus modulus;
  std::vector<Orbit> orbits;

  size_t r() const { return orbits.size(); }

  // Index into orbits of the orbit containing v; v must lie in V_n.
  size_t orbit_index(const Vec2& v) const {
    auto it = member_to_orbit.find(v.pack());
    if (it == member_to_orbit.end())
      throw DomainError("vector is not of exact order " +
                        std::to_string(modulus.value()));
    return it->second;
  }

  std::unordered_map<uint32_t, size_t> member_to_orbit;
};

// Partition of V_n into g-orbits.  Seeds are scanned lexicographically, so
// each orbit's representative is its lexicographic minimum and the orbit
// list is ordered by representative.
inline OrbitDecomposition orbit_decomposition(const GroupTable& g,
                                              uint32_t n) {
  if (g.modulus().value() != n)
    throw DomainError("orbit_decomposition: group lives at modulus " +
                      std::to_string(g.modulus().value()) + ", not " +
                      std::to_string(n));
  ExactOrderSet vn = exact_order_vectors(n);
  OrbitDecomposition out{g, g.modulus(), {}, {}};
  out.member_to_orbit.reserve(vn.vectors.size());
  for (const Vec2& seed : vn.vectors) {
    if (out.member_to_orbit.count(seed.pack())) continue;
    Orbit o{seed, 0, detail::orbit_bfs(g, seed)};
    o.size = o.members.size();
    size_t idx = out.orbits.size();
    for (const Vec2& w : o.members) out.member_to_orbit.emplace(w.pack(), idx);
    out.orbits.push_back(std::move(o));
  }
  uint64_t covered = 0;
  for (const Orbit& o : out.orbits) covered += o.size;
  if (covered != vn.vectors.size())
    throw InternalInvariantError("orbit decomposition does not partition V_n");
  return out;
}

inline std::vector<Mat2> stabilizer(const GroupTable& g, const Vec2& v) {
  require_same_modulus(g.modulus(), v.modulus, "stabilizer");
  std::vector<Mat2> fix;
  for (const Mat2& x : g.elements())
    if (vec_act(x, v) == v) fix.push_back(x);
  return fix;
}

// Transitivity on V_n, decided from the single seed e1 = (1, 0): one orbit
// iff the orbit of any fixed exact-order vector is everything.
inline bool is_transitive(const GroupTable& g, uint32_t n) {
  if (g.modulus().value() != n)
    throw DomainError("is_transitive: group lives at modulus " +
                      std::to_string(g.modulus().value()) + ", not " +
                      std::to_string(n));
  return orbit_of(g, basis_e1(g.modulus())).size() == count_exact_order(n);
}

// Degree of the closed point attached to an orbit of H(n) on V_n:
// the orbit size for n <= 2, half of it for n > 2.  An odd orbit at
// n > 2 means -I was never adjoined, which is rejected outright.
inline uint64_t point_degree(uint64_t orbit_size, uint32_t n) {
  if (n == 1) return 1;
  if (n == 2) return orbit_size;
  if (orbit_size % 2)
    throw ContractViolationError(
        "odd orbit of size " + std::to_string(orbit_size) + " at level " +
        std::to_string(n) + "; was -I adjoined?");
  return orbit_size / 2;
}

}  // namespace ppcert
