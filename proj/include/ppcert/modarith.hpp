#pragma once

// Exact arithmetic for residues, 2x2 matrices and vectors over Z/nZ:
// reduction between levels, CRT splitting and exact additive orders.

#include <algorithm>
#include <array>
#include <cstdint>
#include <mutex>
#include <numeric>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ppcert/errors.hpp"

namespace ppcert {

// A level n >= 1.  Residues are kept in canonical range [0, n); all
// arithmetic is exact, which the entry width guarantees for n <= 2^15.
class Modulus {
 public:
  static constexpr uint32_t kMax = 1u << 15;

  explicit Modulus(uint32_t n) : n_(n) {
    if (n < 1 || n > kMax)
      throw DomainError("modulus " + std::to_string(n) + " out of range [1, " +
                        std::to_string(kMax) + "]");
  }

  uint32_t value() const { return n_; }

  // (prime, exponent) pairs in ascending prime order, cached per value.
  const std::vector<std::pair<uint32_t, uint32_t>>& factorization() const;

  std::vector<uint32_t> divisors() const;  // ascending

  uint32_t sigma0() const {
    uint32_t d = 1;
    for (const auto& [p, e] : factorization()) d *= e + 1;
    return d;
  }

  friend bool operator==(Modulus a, Modulus b) { return a.n_ == b.n_; }
  friend bool operator!=(Modulus a, Modulus b) { return a.n_ != b.n_; }

 private:
  uint32_t n_;
};

inline const std::vector<std::pair<uint32_t, uint32_t>>&
Modulus::factorization() const {
  static std::mutex mu;
  static std::unordered_map<uint32_t,
                            std::vector<std::pair<uint32_t, uint32_t>>>
      cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n_);
  if (it == cache.end()) {
    std::vector<std::pair<uint32_t, uint32_t>> fac;
    uint32_t m = n_;
    for (uint32_t p = 2; p * p <= m; ++p) {
      if (m % p) continue;
      uint32_t e = 0;
      while (m % p == 0) m /= p, ++e;
      fac.emplace_back(p, e);
    }
    if (m > 1) fac.emplace_back(m, 1);
    it = cache.emplace(n_, std::move(fac)).first;
  }
  return it->second;
}

inline std::vector<uint32_t> Modulus::divisors() const {
  std::vector<uint32_t> divs{1};
  for (const auto& [p, e] : factorization()) {
    size_t base = divs.size();
    uint32_t q = 1;
    for (uint32_t k = 1; k <= e; ++k) {
      q *= p;
      for (size_t i = 0; i < base; ++i) divs.push_back(divs[i] * q);
    }
  }
  std::sort(divs.begin(), divs.end());
  return divs;
}

inline void require_same_modulus(Modulus a, Modulus b, const char* what) {
  if (a != b)
    throw ModulusMismatchError(std::string(what) + ": modulus " +
                               std::to_string(a.value()) + " vs " +
                               std::to_string(b.value()));
}

// Inverse of a modulo n; throws NotInvertibleError when gcd(a, n) != 1.
inline uint32_t mod_inverse(uint32_t a, uint32_t n) {
  if (n == 1) return 0;
  int64_t r0 = n, r1 = int64_t(a % n), s0 = 0, s1 = 1;
  while (r1 != 0) {
    int64_t q = r0 / r1;
    r0 -= q * r1;
    std::swap(r0, r1);
    s0 -= q * s1;
    std::swap(s0, s1);
  }
  if (r0 != 1)
    throw NotInvertibleError(std::to_string(a) + " is not a unit mod " +
                             std::to_string(n) + " (gcd " +
                             std::to_string(r0) + ")");
  return uint32_t(((s0 % int64_t(n)) + int64_t(n)) % int64_t(n));
}

struct Vec2 {
  Vec2(Modulus m, uint32_t a_, uint32_t b_)
      : modulus(m),
        a(uint16_t(a_ % m.value())),
        b(uint16_t(b_ % m.value())) {}

  // Skips reduction; caller guarantees entries already lie in [0, n).
  static Vec2 from_reduced(Modulus m, uint32_t a_, uint32_t b_) {
    return Vec2(m, Raw{}, uint16_t(a_), uint16_t(b_));
  }

  Modulus modulus;
  uint16_t a;
  uint16_t b;

  uint32_t pack() const { return uint32_t(a) << 16 | b; }

  friend bool operator==(const Vec2& x, const Vec2& y) {
    return x.modulus == y.modulus && x.a == y.a && x.b == y.b;
  }
  friend bool operator!=(const Vec2& x, const Vec2& y) { return !(x == y); }
  // Lexicographic by (a, b); only meaningful at a shared modulus.
  friend bool operator<(const Vec2& x, const Vec2& y) {
    return x.pack() < y.pack();
  }

 private:
  struct Raw {};
  Vec2(Modulus m, Raw, uint16_t a_, uint16_t b_)
      : modulus(m), a(a_), b(b_) {}
};

struct Mat2 {
  Mat2(Modulus mod, uint32_t m00, uint32_t m01, uint32_t m10, uint32_t m11)
      : modulus(mod),
        e{uint16_t(m00 % mod.value()), uint16_t(m01 % mod.value()),
          uint16_t(m10 % mod.value()), uint16_t(m11 % mod.value())} {}

  static Mat2 identity(Modulus m) { return Mat2(m, 1, 0, 0, 1); }
  static Mat2 neg_identity(Modulus m) {
    uint32_t n = m.value();
    return Mat2(m, n - 1, 0, 0, n - 1);
  }

  // Skips reduction; caller guarantees entries already lie in [0, n).
  static Mat2 from_reduced(Modulus m, uint32_t m00, uint32_t m01,
                           uint32_t m10, uint32_t m11) {
    return Mat2(m, Raw{}, uint16_t(m00), uint16_t(m01), uint16_t(m10),
                uint16_t(m11));
  }

  Modulus modulus;
  std::array<uint16_t, 4> e;  // row-major m00 m01 m10 m11

  uint32_t det() const {
    uint64_t n = modulus.value();
    uint64_t pos = uint64_t(e[0]) * e[3] % n;
    uint64_t neg = uint64_t(e[1]) * e[2] % n;
    return uint32_t((pos + n - neg) % n);
  }

  bool invertible() const {
    return std::gcd(det(), modulus.value()) == 1;
  }

  bool is_identity() const { return *this == identity(modulus); }

  // Entries packed 16 bits apiece, m00 most significant, so key order is
  // lexicographic entry order within one modulus.
  uint64_t key() const {
    return uint64_t(e[0]) << 48 | uint64_t(e[1]) << 32 | uint64_t(e[2]) << 16 |
           uint64_t(e[3]);
  }

  friend bool operator==(const Mat2& x, const Mat2& y) {
    return x.modulus == y.modulus && x.e == y.e;
  }
  friend bool operator!=(const Mat2& x, const Mat2& y) { return !(x == y); }
  friend bool operator<(const Mat2& x, const Mat2& y) {
    return x.key() < y.key();
  }

 private:
  struct Raw {};
  Mat2(Modulus mod, Raw, uint16_t m00, uint16_t m01, uint16_t m10,
       uint16_t m11)
      : modulus(mod), e{m00, m01, m10, m11} {}
};

inline Mat2 mat_mul(const Mat2& x, const Mat2& y) {
  require_same_modulus(x.modulus, y.modulus, "mat_mul");
  // entries < 2^15, so each two-term dot product fits in 32 bits
  const uint32_t n = x.modulus.value();
  auto cell = [&](int i, int j, int k, int l) {
    return (uint32_t(x.e[i]) * y.e[j] + uint32_t(x.e[k]) * y.e[l]) % n;
  };
  return Mat2::from_reduced(x.modulus, cell(0, 0, 1, 2), cell(0, 1, 1, 3),
                            cell(2, 0, 3, 2), cell(2, 1, 3, 3));
}

inline Mat2 operator*(const Mat2& x, const Mat2& y) { return mat_mul(x, y); }

inline Mat2 mat_inv(const Mat2& x) {
  const uint32_t n = x.modulus.value();
  uint32_t d = x.det();
  if (std::gcd(d, n) != 1)
    throw NotInvertibleError("matrix det " + std::to_string(d) +
                             " is not a unit mod " + std::to_string(n));
  uint64_t di = mod_inverse(d, n);
  auto scale = [&](uint32_t v) { return uint32_t(di * v % n); };
  return Mat2(x.modulus, scale(x.e[3]), scale((n - x.e[1]) % n),
              scale((n - x.e[2]) % n), scale(x.e[0]));
}

inline Vec2 vec_act(const Mat2& m, const Vec2& v) {
  require_same_modulus(m.modulus, v.modulus, "vec_act");
  const uint32_t n = m.modulus.value();
  uint32_t a = (uint32_t(m.e[0]) * v.a + uint32_t(m.e[1]) * v.b) % n;
  uint32_t b = (uint32_t(m.e[2]) * v.a + uint32_t(m.e[3]) * v.b) % n;
  return Vec2::from_reduced(m.modulus, a, b);
}

// Additive order of v in (Z/nZ)^2: n / gcd(a, b, n).
inline uint32_t vec_order(const Vec2& v) {
  uint32_t n = v.modulus.value();
  return n / std::gcd(std::gcd(uint32_t(v.a), uint32_t(v.b)), n);
}

inline Mat2 reduce_level(const Mat2& x, uint32_t d) {
  if (d == 0 || x.modulus.value() % d)
    throw DomainError("reduce_level: " + std::to_string(d) +
                      " does not divide " + std::to_string(x.modulus.value()));
  return Mat2::from_reduced(Modulus(d), x.e[0] % d, x.e[1] % d, x.e[2] % d,
                            x.e[3] % d);
}

inline Vec2 reduce_level(const Vec2& v, uint32_t d) {
  if (d == 0 || v.modulus.value() % d)
    throw DomainError("reduce_level: " + std::to_string(d) +
                      " does not divide " + std::to_string(v.modulus.value()));
  return Vec2::from_reduced(Modulus(d), v.a % d, v.b % d);
}

namespace detail {

// e_a = 1 mod a, 0 mod b and e_b = 0 mod a, 1 mod b, both reduced mod ab.
// Computed once per (a, b) from an extended gcd.
inline std::pair<uint64_t, uint64_t> crt_idempotents(uint32_t a, uint32_t b) {
  static std::mutex mu;
  static std::unordered_map<uint64_t, std::pair<uint64_t, uint64_t>> cache;
  std::lock_guard<std::mutex> lock(mu);
  uint64_t slot = uint64_t(a) << 32 | b;
  auto it = cache.find(slot);
  if (it == cache.end()) {
    int64_t r0 = a, r1 = b, s0 = 1, s1 = 0, t0 = 0, t1 = 1;
    while (r1 != 0) {
      int64_t q = r0 / r1;
      r0 -= q * r1;
      std::swap(r0, r1);
      s0 -= q * s1;
      std::swap(s0, s1);
      t0 -= q * t1;
      std::swap(t0, t1);
    }
    // s0*a + t0*b == 1
    int64_t ab = int64_t(a) * b;
    uint64_t eb = uint64_t(((s0 * a) % ab + ab) % ab);
    uint64_t ea = uint64_t(((t0 * b) % ab + ab) % ab);
    it = cache.emplace(slot, std::make_pair(ea, eb)).first;
  }
  return it->second;
}

}  // namespace detail

inline std::pair<Mat2, Mat2> crt_split(const Mat2& x, uint32_t a, uint32_t b) {
  if (std::gcd(a, b) != 1)
    throw DomainError("crt_split: " + std::to_string(a) + " and " +
                      std::to_string(b) + " are not coprime");
  if (uint64_t(a) * b != x.modulus.value())
    throw DomainError("crt_split: " + std::to_string(a) + "*" +
                      std::to_string(b) + " != modulus " +
                      std::to_string(x.modulus.value()));
  return {reduce_level(x, a), reduce_level(x, b)};
}

inline Mat2 crt_join(const Mat2& xa, const Mat2& xb) {
  uint32_t a = xa.modulus.value(), b = xb.modulus.value();
  if (std::gcd(a, b) != 1)
    throw DomainError("crt_join: " + std::to_string(a) + " and " +
                      std::to_string(b) + " are not coprime");
  Modulus m(a * b);
  auto [ea, eb] = detail::crt_idempotents(a, b);
  uint64_t n = m.value();
  std::array<uint32_t, 4> out{};
  for (int i = 0; i < 4; ++i)
    out[i] = uint32_t((ea * xa.e[i] + eb * xb.e[i]) % n);
  return Mat2(m, out[0], out[1], out[2], out[3]);
}

// |V_n| = n^2 * prod_{p | n} (1 - 1/p^2), the number of exact-order-n
// vectors in (Z/nZ)^2.  Equals 1 for n = 1.
inline uint64_t count_exact_order(uint32_t n) {
  Modulus m(n);
  uint64_t r = uint64_t(n) * n;
  for (const auto& [p, e] : m.factorization())
    r = r / (uint64_t(p) * p) * (uint64_t(p) * p - 1);
  return r;
}

inline Vec2 basis_e1(Modulus m) { return Vec2(m, 1, 0); }

}  // namespace ppcert
