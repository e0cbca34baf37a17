#pragma once

// Finite subgroups of GL2(Z/nZ) as fully enumerated tables: closure from
// generators, membership, index, projections, fiber-product kernels,
// commutator subgroups and the finite-level subgroup level.

#include <cstdint>
#include <cstdlib>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "ppcert/errors.hpp"
#include "ppcert/modarith.hpp"

namespace ppcert {

namespace detail {

inline uint64_t mix64(uint64_t x) {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ull;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebull;
  x ^= x >> 31;
  return x;
}

// Open-addressing set of packed matrix keys.  Entry keys never reach
// 2^63, so ~0 is a safe empty slot.
class KeySet {
 public:
  explicit KeySet(size_t expected = 0) { rehash(slots_for(expected)); }

  bool contains(uint64_t k) const {
    size_t i = mix64(k) & mask_;
    while (slots_[i] != kEmpty) {
      if (slots_[i] == k) return true;
      i = (i + 1) & mask_;
    }
    return false;
  }

  // Returns true when k was newly inserted.
  bool insert(uint64_t k) {
    if ((size_ + 1) * 2 > slots_.size()) rehash(slots_.size() * 2);
    size_t i = mix64(k) & mask_;
    while (slots_[i] != kEmpty) {
      if (slots_[i] == k) return false;
      i = (i + 1) & mask_;
    }
    slots_[i] = k;
    ++size_;
    return true;
  }

  void reserve(size_t n) {
    size_t want = slots_for(n);
    if (want > slots_.size()) rehash(want);
  }

  size_t size() const { return size_; }

 private:
  static constexpr uint64_t kEmpty = ~0ull;

  static size_t slots_for(size_t n) {
    size_t s = 16;
    while (s < 2 * n + 1) s <<= 1;
    return s;
  }

  void rehash(size_t cap) {
    std::vector<uint64_t> old = std::move(slots_);
    slots_.assign(cap, kEmpty);
    mask_ = cap - 1;
    for (uint64_t k : old) {
      if (k == kEmpty) continue;
      size_t i = mix64(k) & mask_;
      while (slots_[i] != kEmpty) i = (i + 1) & mask_;
      slots_[i] = k;
    }
  }

  std::vector<uint64_t> slots_;
  size_t mask_ = 0;
  size_t size_ = 0;
};

// Membership set for matrices at one modulus: a dense bitmap over the n^4
// entry space when that fits comfortably in cache, the hash set otherwise.
class MatSet {
 public:
  explicit MatSet(uint32_t n, size_t expected = 0)
      : n_(n), space_(uint64_t(n) * n * n * n), sparse_(0) {
    dense_ = space_ <= (uint64_t(1) << 28);
    if (dense_)
      bits_.assign(size_t((space_ + 63) / 64), 0);
    else
      sparse_ = KeySet(expected);
  }

  bool insert(const Mat2& x) {
    if (!dense_) {
      bool fresh = sparse_.insert(x.key());
      size_ += fresh;
      return fresh;
    }
    uint64_t i = dense_index(x);
    uint64_t& word = bits_[size_t(i >> 6)];
    uint64_t bit = uint64_t(1) << (i & 63);
    if (word & bit) return false;
    word |= bit;
    ++size_;
    return true;
  }

  bool contains(const Mat2& x) const {
    if (!dense_) return sparse_.contains(x.key());
    uint64_t i = dense_index(x);
    return bits_[size_t(i >> 6)] >> (i & 63) & 1;
  }

  size_t size() const { return size_; }

 private:
  uint64_t dense_index(const Mat2& x) const {
    return ((uint64_t(x.e[0]) * n_ + x.e[1]) * n_ + x.e[2]) * n_ + x.e[3];
  }

  uint32_t n_;
  uint64_t space_;
  bool dense_ = false;
  std::vector<uint64_t> bits_;
  KeySet sparse_;
  size_t size_ = 0;
};

}  // namespace detail

struct SubgroupSpec {
  Modulus modulus;
  std::vector<Mat2> generators;  // may be empty: the trivial group
};

// Largest group the closure routines will enumerate.  Overridable through
// the PPCERT_MAX_GROUP environment variable, read once per process.
inline uint64_t enumeration_ceiling() {
  static const uint64_t ceiling = [] {
    if (const char* s = std::getenv("PPCERT_MAX_GROUP")) {
      char* end = nullptr;
      unsigned long long v = std::strtoull(s, &end, 10);
      if (end && *end == '\0' && v > 0) return uint64_t(v);
    }
    return uint64_t(1) << 24;
  }();
  return ceiling;
}

// An immutable, fully enumerated subgroup.  Copies share storage.
class GroupTable {
 public:
  // BFS closure of the generators, identity first, generators applied in
  // ascending key order so element order is reproducible.
  static GroupTable close(SubgroupSpec spec,
                          uint64_t ceiling = enumeration_ceiling()) {
    const Modulus m = spec.modulus;
    std::vector<Mat2> gens;
    detail::KeySet seen_gen;
    for (const Mat2& g : spec.generators) {
      require_same_modulus(g.modulus, m, "close");
      if (!g.invertible())
        throw NotInvertibleError("generator det " + std::to_string(g.det()) +
                                 " is not a unit mod " +
                                 std::to_string(m.value()));
      if (!g.is_identity() && seen_gen.insert(g.key())) gens.push_back(g);
    }
    std::sort(gens.begin(), gens.end());

    auto d = std::make_shared<Data>(Data{std::move(spec), {}, {},
                                         detail::MatSet(m.value(), 64)});
    d->elements.push_back(Mat2::identity(m));
    d->index.insert(d->elements.front());
    for (size_t i = 0; i < d->elements.size(); ++i) {
      Mat2 x = d->elements[i];
      for (const Mat2& s : gens) {
        Mat2 y = mat_mul(x, s);
        if (d->index.insert(y)) {
          if (d->elements.size() + 1 > ceiling)
            throw SizeCeilingError(
                "group closure at modulus " + std::to_string(m.value()) +
                " exceeds ceiling " + std::to_string(ceiling));
          d->elements.push_back(y);
        }
      }
    }
    d->action = gens.empty() ? d->elements : std::move(gens);
    return GroupTable(std::move(d));
  }

  // Wrap an explicit element set.  Elements are deduplicated and sorted by
  // key; the set is audited: identity present, inverse-closed, and product
  // closure spot-checked on a deterministic sample of pairs.
  static GroupTable from_elements(Modulus m, std::vector<Mat2> elems) {
    detail::MatSet index(m.value(), elems.size());
    std::vector<Mat2> uniq;
    uniq.reserve(elems.size());
    for (const Mat2& x : elems) {
      require_same_modulus(x.modulus, m, "from_elements");
      if (!x.invertible())
        throw NotInvertibleError("element det " + std::to_string(x.det()) +
                                 " is not a unit mod " +
                                 std::to_string(m.value()));
      if (index.insert(x)) uniq.push_back(x);
    }
    std::sort(uniq.begin(), uniq.end());
    if (uniq.empty() || !index.contains(Mat2::identity(m)))
      throw DomainError("from_elements: identity missing");
    for (const Mat2& x : uniq)
      if (!index.contains(mat_inv(x)))
        throw DomainError("from_elements: set is not inverse-closed");
    size_t n = uniq.size();
    size_t stride = n * n <= 4096 ? 1 : (n * n / 4096 + 1);
    for (size_t t = 0; t < n * n; t += stride) {
      const Mat2& x = uniq[t / n];
      const Mat2& y = uniq[t % n];
      if (!index.contains(mat_mul(x, y)))
        throw DomainError("from_elements: set is not closed under products");
    }
    auto d = std::make_shared<Data>(Data{SubgroupSpec{m, {}}, {},
                                         std::move(uniq), std::move(index)});
    d->action = d->elements;
    return GroupTable(std::move(d));
  }

  Modulus modulus() const { return d_->spec.modulus; }
  uint64_t order() const { return d_->elements.size(); }
  const std::vector<Mat2>& elements() const { return d_->elements; }
  const SubgroupSpec& spec() const { return d_->spec; }

  // Generating set used for orbit and closure walks: the spec generators
  // when the table was closed from some, otherwise every element.
  const std::vector<Mat2>& generators() const { return d_->action; }

  bool contains(const Mat2& x) const {
    return x.modulus == modulus() && d_->index.contains(x);
  }

  bool elements_equal(const GroupTable& other) const {
    if (modulus() != other.modulus() || order() != other.order()) return false;
    for (const Mat2& x : other.elements())
      if (!d_->index.contains(x)) return false;
    return true;
  }

 private:
  struct Data {
    SubgroupSpec spec;
    std::vector<Mat2> action;
    std::vector<Mat2> elements;
    detail::MatSet index;
  };

  explicit GroupTable(std::shared_ptr<const Data> d) : d_(std::move(d)) {}

  std::shared_ptr<const Data> d_;
};

// |GL2(Z/nZ)|, multiplicative over prime powers with
// |GL2(Z/p^k Z)| = p^(4k-3) (p-1) (p^2-1).
inline uint64_t gl2_order(uint32_t n) {
  Modulus m(n);
  uint64_t r = 1;
  for (const auto& [p, e] : m.factorization()) {
    uint64_t pk = 1;
    for (uint32_t i = 0; i + 3 < 4 * e; ++i) pk *= p;
    r *= pk * (p - 1) * (uint64_t(p) * p - 1);
  }
  return r;
}

inline uint64_t index_in_gl2(const GroupTable& g) {
  uint64_t whole = gl2_order(g.modulus().value());
  if (whole % g.order())
    throw InternalInvariantError("order " + std::to_string(g.order()) +
                                 " does not divide |GL2(Z/" +
                                 std::to_string(g.modulus().value()) + ")|");
  return whole / g.order();
}

inline GroupTable adjoin_neg_identity(const GroupTable& g) {
  Mat2 neg = Mat2::neg_identity(g.modulus());
  if (g.contains(neg)) return g;
  SubgroupSpec spec{g.modulus(), g.generators()};
  spec.generators.push_back(neg);
  return GroupTable::close(std::move(spec));
}

// Image of g under entrywise reduction to level d | n, as the closure of
// the reduced generators.
inline GroupTable project(const GroupTable& g, uint32_t d) {
  uint32_t n = g.modulus().value();
  if (d == 0 || n % d)
    throw DomainError("project: " + std::to_string(d) + " does not divide " +
                      std::to_string(n));
  if (d == n) return g;
  SubgroupSpec spec{Modulus(d), {}};
  spec.generators.reserve(g.generators().size());
  for (const Mat2& s : g.generators())
    spec.generators.push_back(reduce_level(s, d));
  return GroupTable::close(std::move(spec));
}

enum class FiberSide { A, B };

inline const char* fiber_side_name(FiberSide s) {
  return s == FiberSide::A ? "A" : "B";
}

// For gamma <= GL2(Z/abZ) viewed inside GL2(Z/aZ) x GL2(Z/bZ): the mod-a
// components of elements whose mod-b component is the identity (side A),
// and symmetrically for side B.  The result is a normal subgroup of the
// corresponding projection of gamma.
inline GroupTable kernel_fiber(const GroupTable& gamma, FiberSide side,
                               uint32_t a, uint32_t b) {
  if (std::gcd(a, b) != 1)
    throw DomainError("kernel_fiber: " + std::to_string(a) + " and " +
                      std::to_string(b) + " are not coprime");
  if (uint64_t(a) * b != gamma.modulus().value())
    throw DomainError("kernel_fiber: " + std::to_string(a) + "*" +
                      std::to_string(b) + " != modulus " +
                      std::to_string(gamma.modulus().value()));
  uint32_t keep = side == FiberSide::A ? a : b;
  uint32_t fix = side == FiberSide::A ? b : a;
  Mat2 id_fix = Mat2::identity(Modulus(fix));
  std::vector<Mat2> members;
  for (const Mat2& x : gamma.elements())
    if (reduce_level(x, fix) == id_fix) members.push_back(reduce_level(x, keep));
  return GroupTable::from_elements(Modulus(keep), std::move(members));
}

// True iff <subset, extra> equals g.  Both inputs must lie inside g.
inline bool generates_whole(const GroupTable& g,
                            const std::vector<Mat2>& subset,
                            const GroupTable& extra) {
  for (const Mat2& x : subset)
    if (!g.contains(x))
      throw DomainError("generates_whole: subset element outside the group");
  for (const Mat2& x : extra.elements())
    if (!g.contains(x))
      throw DomainError("generates_whole: extra subgroup outside the group");
  SubgroupSpec spec{g.modulus(), subset};
  spec.generators.insert(spec.generators.end(), extra.generators().begin(),
                         extra.generators().end());
  GroupTable closure = GroupTable::close(std::move(spec), g.order());
  return closure.order() == g.order();
}

// Derived subgroup of g.  Commutators of generators alone do not generate
// it in general; commutators of every element against a generating set do,
// since that set is closed under conjugation:
//   g^-1 [x,s] g = [xg,s] [g,s]^-1.
inline GroupTable commutator_subgroup_of(
    const GroupTable& g, uint64_t ceiling = enumeration_ceiling()) {
  std::vector<Mat2> comm_gens;
  detail::KeySet seen;
  std::vector<Mat2> inv;
  inv.reserve(g.generators().size());
  for (const Mat2& s : g.generators()) inv.push_back(mat_inv(s));
  for (const Mat2& x : g.elements()) {
    Mat2 xi = mat_inv(x);
    for (size_t j = 0; j < g.generators().size(); ++j) {
      Mat2 c = mat_mul(mat_mul(xi, inv[j]), mat_mul(x, g.generators()[j]));
      if (seen.insert(c.key())) comm_gens.push_back(c);
    }
  }
  return GroupTable::close(SubgroupSpec{g.modulus(), std::move(comm_gens)},
                           ceiling);
}

// Standard generators of GL2(Z/nZ): the two elementary unipotents plus
// diag(u, 1) for a generating set of the unit group.
inline std::vector<Mat2> gl2_generators(uint32_t n) {
  Modulus m(n);
  std::vector<Mat2> gens{Mat2(m, 1, 1, 0, 1), Mat2(m, 1, 0, 1, 1)};
  if (n <= 2) return gens;
  // Greedy generators of the unit group; reached is always the subgroup
  // generated so far.
  std::vector<uint8_t> reached(n, 0);
  reached[1] = 1;
  for (uint32_t u = 2; u < n; ++u) {
    if (std::gcd(u, n) != 1 || reached[u]) continue;
    gens.push_back(Mat2(m, u, 0, 0, 1));
    std::vector<uint32_t> xs;
    for (uint32_t x = 1; x < n; ++x)
      if (reached[x]) xs.push_back(x);
    for (uint32_t x : xs) {
      uint64_t y = x;
      while (true) {
        y = y * u % n;
        if (y == x) break;
        reached[y] = 1;
      }
    }
  }
  return gens;
}

inline GroupTable full_gl2(uint32_t n,
                           uint64_t ceiling = enumeration_ceiling()) {
  return GroupTable::close(SubgroupSpec{Modulus(n), gl2_generators(n)},
                           ceiling);
}

inline GroupTable sl2_table(uint32_t n,
                            uint64_t ceiling = enumeration_ceiling()) {
  Modulus m(n);
  return GroupTable::close(
      SubgroupSpec{m, {Mat2(m, 1, 1, 0, 1), Mat2(m, 1, 0, 1, 1)}}, ceiling);
}

inline GroupTable commutator_subgroup(
    uint32_t n, uint64_t ceiling = enumeration_ceiling()) {
  return commutator_subgroup_of(full_gl2(n, ceiling), ceiling);
}

namespace detail {

// Does g contain the whole kernel of GL2(Z/nZ) -> GL2(Z/dZ)?
inline bool contains_reduction_kernel(const GroupTable& g, uint32_t d) {
  uint32_t n = g.modulus().value();
  uint32_t q = n / d;
  uint64_t kernel_size = gl2_order(n) / gl2_order(d);
  if (kernel_size > g.order() || g.order() % kernel_size) return false;
  for (uint32_t i0 = 0; i0 < q; ++i0)
    for (uint32_t i1 = 0; i1 < q; ++i1)
      for (uint32_t i2 = 0; i2 < q; ++i2)
        for (uint32_t i3 = 0; i3 < q; ++i3) {
          Mat2 x(g.modulus(), (1 + i0 * d) % n, i1 * d, i2 * d,
                 (1 + i3 * d) % n);
          if (!x.invertible()) continue;
          if (!g.contains(x)) return false;
        }
  return true;
}

}  // namespace detail

// Smallest d | n such that g is the full preimage of its mod-d reduction,
// i.e. such that ker(GL2(Z/nZ) -> GL2(Z/dZ)) lies inside g.
inline uint32_t subgroup_level(const GroupTable& g) {
  uint32_t n = g.modulus().value();
  if (g.order() == gl2_order(n)) return 1;
  for (uint32_t d : g.modulus().divisors()) {
    if (d == n) return n;
    if (d == 1) continue;  // handled by the full-group shortcut
    if (detail::contains_reduction_kernel(g, d)) return d;
  }
  return n;
}

}  // namespace ppcert
