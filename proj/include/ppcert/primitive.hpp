#pragma once

// The modular-curve layer: natural-map degrees between levels, closed
// points above j(E), exact enumeration of the primitive-point set, the
// divisor-sum bounds and the Serre shortcut.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ppcert/errors.hpp"
#include "ppcert/grouptab.hpp"
#include "ppcert/modarith.hpp"
#include "ppcert/orbitcalc.hpp"

namespace ppcert {

// Degree of the natural map X1(ab) -> X1(a):
//   c * b^2 * prod_{p | b, p !| a} (1 - 1/p^2),  c = 1/2 iff a <= 2 < ab.
struct NaturalMapDegree {
  uint32_t source;  // ab
  uint32_t target;  // a
  uint32_t b;
  bool halved;
  uint64_t degree;
};

inline NaturalMapDegree deg_natural_map(uint32_t a, uint32_t b) {
  if (a < 1 || b < 1) throw DomainError("deg_natural_map: levels must be >= 1");
  uint64_t ab = uint64_t(a) * b;
  uint64_t deg = uint64_t(b) * b;
  uint32_t rest = b;
  for (uint32_t p = 2; p <= rest; ++p) {
    if (rest % p) continue;
    while (rest % p == 0) rest /= p;
    if (a % p) deg = deg / (uint64_t(p) * p) * (uint64_t(p) * p - 1);
  }
  bool halved = a <= 2 && ab > 2;
  if (halved) {
    if (deg % 2)
      throw InternalInvariantError("half-degree is not an integer");
    deg /= 2;
  }
  return NaturalMapDegree{uint32_t(ab), a, b, halved, deg};
}

// A closed point above j(E) at level n: an orbit of H(n) on V_n with its
// degree.
struct ClosedPoint {
  uint32_t level;
  Vec2 representative;
  uint64_t orbit_size;
  uint64_t degree;
};

namespace detail {

struct LevelData {
  uint32_t n;
  GroupTable h;
  OrbitDecomposition od;
  std::vector<ClosedPoint> points;
};

inline LevelData level_data(const GroupTable& g_m0, uint32_t n) {
  GroupTable h = adjoin_neg_identity(project(g_m0, n));
  LevelData d{n, h, orbit_decomposition(h, n), {}};
  d.points.reserve(d.od.orbits.size());
  for (const Orbit& o : d.od.orbits)
    d.points.push_back(
        ClosedPoint{n, o.representative, o.size, point_degree(o.size, n)});
  return d;
}

}  // namespace detail

// One closed point per H(n)-orbit, ordered by representative.
inline std::vector<ClosedPoint> closed_points_above_j(const GroupTable& g_m0,
                                                      uint32_t n) {
  if (n == 0 || g_m0.modulus().value() % n)
    throw DomainError("closed_points_above_j: " + std::to_string(n) +
                      " does not divide " +
                      std::to_string(g_m0.modulus().value()));
  return detail::level_data(g_m0, n).points;
}

// Image of a closed point under X1(n) -> X1(a).  On vectors the map
// [E,P] -> [E,bP] lands in the order-a subgroup b*(Z/nZ)^2, whose level-a
// coordinates are just the coordinates mod a.
inline ClosedPoint natural_map_image(const GroupTable& g_m0,
                                     const ClosedPoint& p, uint32_t a) {
  if (a == 0 || p.level % a || a >= p.level)
    throw DomainError("natural_map_image: " + std::to_string(a) +
                      " is not a proper divisor of " +
                      std::to_string(p.level));
  detail::LevelData d = detail::level_data(g_m0, a);
  return d.points[d.od.orbit_index(reduce_level(p.representative, a))];
}

struct LevelBound {
  uint32_t n;
  uint64_t r_n;
  uint64_t h_index;  // [GL2(Z/nZ) : H(n)], a cap on r_n
  std::optional<uint64_t> half_index_cap;  // idx(g)/2 for n < m0 when gated
};

struct BoundsRecord {
  uint32_t m0 = 1;
  std::optional<uint64_t> adelic_index;
  uint64_t crude = 1;  // m0^2
  std::optional<uint64_t> index_bound;  // floor(1 + I*sigma0(m0)/2)
  std::vector<LevelBound> per_level;    // only when a group was supplied
  std::optional<uint64_t> g_index;      // [GL2(Z/m0) : g]
  std::optional<uint32_t> image_level;  // subgroup_level(g)
  bool half_index_applicable = false;   // image_level == m0
};

namespace detail {

inline BoundsRecord make_bounds(uint32_t m0,
                                std::optional<uint64_t> adelic_index,
                                const GroupTable* g,
                                const std::vector<LevelData>* levels) {
  BoundsRecord out;
  out.m0 = m0;
  out.adelic_index = adelic_index;
  out.crude = uint64_t(m0) * m0;
  if (adelic_index)
    out.index_bound = (2 + *adelic_index * uint64_t(Modulus(m0).sigma0())) / 2;
  if (g) {
    out.g_index = index_in_gl2(*g);
    out.image_level = subgroup_level(*g);
    out.half_index_applicable = *out.image_level == m0;
    for (const LevelData& d : *levels) {
      LevelBound lb{d.n, d.od.r(), index_in_gl2(d.h), std::nullopt};
      if (out.half_index_applicable && d.n < m0)
        lb.half_index_cap = *out.g_index / 2;
      out.per_level.push_back(lb);
    }
  }
  return out;
}

inline std::vector<LevelData> all_level_data(const GroupTable& g_m0,
                                             uint32_t m0) {
  std::vector<LevelData> levels;
  for (uint32_t n : Modulus(m0).divisors())
    levels.push_back(level_data(g_m0, n));
  return levels;
}

}  // namespace detail

// min{m0^2, 1 + I*sigma0/2} together with the per-level orbit caps when the
// image is supplied.
inline BoundsRecord bounds(uint32_t m0,
                           std::optional<uint64_t> adelic_index = {},
                           const GroupTable* g_m0 = nullptr) {
  if (adelic_index && *adelic_index < 1)
    throw DomainError("bounds: adelic index must be positive");
  if (!g_m0) return detail::make_bounds(m0, adelic_index, nullptr, nullptr);
  if (g_m0->modulus().value() != m0)
    throw DomainError("bounds: group lives at modulus " +
                      std::to_string(g_m0->modulus().value()) + ", not " +
                      std::to_string(m0));
  auto levels = detail::all_level_data(*g_m0, m0);
  return detail::make_bounds(m0, adelic_index, g_m0, &levels);
}

struct PrimitivePoint {
  ClosedPoint point;
  bool primitive;
};

struct PrimitiveReport {
  uint32_t m0 = 1;
  std::optional<uint64_t> adelic_index;
  std::vector<std::pair<uint32_t, uint64_t>> r_table;  // (n, r_n) ascending
  std::vector<PrimitivePoint> points;  // every closed point, every n | m0
  uint64_t primitive_count = 0;
  BoundsRecord bound;
};

// Exact enumeration of the primitive points: a closed point x at level n
// is primitive iff deg(x) < deg(f) * deg(f(x)) for the natural map f to
// every proper divisor level.  The level-1 point has no lower level and is
// always primitive.
inline PrimitiveReport enumerate_primitive_points(
    const GroupTable& g_m0, uint32_t m0,
    std::optional<uint64_t> adelic_index = {}) {
  if (g_m0.modulus().value() != m0)
    throw DomainError("enumerate_primitive_points: group lives at modulus " +
                      std::to_string(g_m0.modulus().value()) + ", not " +
                      std::to_string(m0));
  auto levels = detail::all_level_data(g_m0, m0);
  PrimitiveReport report;
  report.m0 = m0;
  report.adelic_index = adelic_index;
  for (size_t li = 0; li < levels.size(); ++li) {
    const detail::LevelData& d = levels[li];
    report.r_table.emplace_back(d.n, d.od.r());
    for (const ClosedPoint& p : d.points) {
      bool primitive = true;
      for (size_t ai = 0; ai < li && primitive; ++ai) {
        uint32_t a = levels[ai].n;
        if (d.n % a) continue;
        const detail::LevelData& down = levels[ai];
        const ClosedPoint& image =
            down.points[down.od.orbit_index(reduce_level(p.representative, a))];
        uint64_t f_deg = deg_natural_map(a, d.n / a).degree;
        if (p.degree >= f_deg * image.degree) primitive = false;
      }
      report.points.push_back(PrimitivePoint{p, primitive});
      if (primitive) ++report.primitive_count;
    }
  }
  report.bound = detail::make_bounds(m0, adelic_index, &g_m0, &levels);
  return report;
}

// Witnessed uniqueness for curves with adelic index 2: the commutator
// subgroup of the full group sits inside every such image, so its
// transitivity on V_m0 settles the question outright.
struct SerreCertificate {
  bool applicable = false;
  uint32_t m0 = 1;
  uint64_t adelic_index = 0;
  bool m0_divides_24 = true;
  bool unique = false;
  uint64_t commutator_order = 0;
  uint64_t orbit_size = 0;
  uint64_t expected = 0;
  std::string message;
};

inline SerreCertificate serre_certificate(uint32_t m0, uint64_t adelic_index) {
  SerreCertificate out;
  out.m0 = m0;
  out.adelic_index = adelic_index;
  out.m0_divides_24 = 24 % m0 == 0;
  if (adelic_index != 2) {
    out.message = "not applicable: adelic index " +
                  std::to_string(adelic_index) + " != 2";
    return out;
  }
  out.applicable = true;
  GroupTable c = commutator_subgroup(m0);
  out.commutator_order = c.order();
  out.orbit_size = orbit_of(c, basis_e1(c.modulus())).size();
  out.expected = count_exact_order(m0);
  out.unique = out.orbit_size == out.expected;
  out.message = out.unique
                    ? "unique primitive point: commutator subgroup acts "
                      "transitively at level " + std::to_string(m0)
                    : "commutator subgroup unexpectedly intransitive";
  if (!out.m0_divides_24)
    out.message += " (warning: m0 does not divide 24)";
  return out;
}

}  // namespace ppcert
