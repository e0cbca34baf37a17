#pragma once

// The uniqueness certificate: local transitivity at prime powers, the
// stabilizer-surjectivity entanglement check across coprime divisor pairs,
// the gated main pipeline and the direct transitivity oracle.

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ppcert/errors.hpp"
#include "ppcert/grouptab.hpp"
#include "ppcert/modarith.hpp"
#include "ppcert/orbitcalc.hpp"

namespace ppcert {

enum class LtMode { TopOnly, AllPowers };

struct LtWitness {
  uint32_t ell;
  uint32_t k;
  uint64_t orbit_size;
  uint64_t expected;  // ell^2k - ell^(2k-2)
};

struct EfWitness {
  uint32_t a;
  uint32_t b;
  FiberSide side;
  Vec2 orbit_rep;
};

// Prime powers of m0 to test, ascending (ell, k).  Checking only the top
// power per prime is equivalent: transitivity at ell^e pushes down to every
// lower ell^k through the reduction map, lifts of exact-order vectors
// staying exact-order.
inline std::vector<std::pair<uint32_t, uint32_t>> lt_prime_powers(
    uint32_t m0, LtMode mode) {
  std::vector<std::pair<uint32_t, uint32_t>> out;
  for (const auto& [p, e] : Modulus(m0).factorization()) {
    if (mode == LtMode::TopOnly) {
      out.emplace_back(p, e);
    } else {
      for (uint32_t k = 1; k <= e; ++k) out.emplace_back(p, k);
    }
  }
  return out;
}

// First prime power ell^k | m0 where the projected group fails to act
// transitively on the exact-order-ell^k vectors; nullopt when all pass.
inline std::optional<LtWitness> check_lt(const GroupTable& g_m0,
                                         LtMode mode = LtMode::TopOnly) {
  uint32_t m0 = g_m0.modulus().value();
  for (auto [ell, k] : lt_prime_powers(m0, mode)) {
    uint32_t q = 1;
    for (uint32_t i = 0; i < k; ++i) q *= ell;
    GroupTable proj = project(g_m0, q);
    uint64_t orb = orbit_of(proj, basis_e1(proj.modulus())).size();
    uint64_t expected =
        uint64_t(q) * q - uint64_t(q / ell) * (q / ell);
    if (orb != expected) return LtWitness{ell, k, orb, expected};
  }
  return std::nullopt;
}

// Unordered coprime pairs a < b, both > 1, with ab | m0, ascending (ab, a).
inline std::vector<std::pair<uint32_t, uint32_t>> coprime_divisor_pairs(
    uint32_t m0) {
  std::vector<std::pair<uint32_t, uint32_t>> pairs;
  auto divs = Modulus(m0).divisors();
  for (uint32_t a : divs)
    for (uint32_t b : divs) {
      if (a <= 1 || b <= a) continue;
      if (std::gcd(a, b) != 1) continue;
      if (m0 % (a * b)) continue;
      pairs.emplace_back(a, b);
    }
  std::sort(pairs.begin(), pairs.end(), [](auto x, auto y) {
    return std::make_pair(x.first * x.second, x.first) <
           std::make_pair(y.first * y.second, y.first);
  });
  return pairs;
}

namespace detail {

struct EfPairData {
  GroupTable a_side;
  GroupTable b_side;
  GroupTable na;
  GroupTable nb;
};

inline EfPairData ef_pair_data(const GroupTable& g, uint32_t a, uint32_t b) {
  GroupTable gamma = project(g, a * b);
  EfPairData d{project(gamma, a), project(gamma, b),
               kernel_fiber(gamma, FiberSide::A, a, b),
               kernel_fiber(gamma, FiberSide::B, a, b)};
  uint64_t ia = d.a_side.order() / d.na.order();
  uint64_t ib = d.b_side.order() / d.nb.order();
  if (d.a_side.order() % d.na.order() || d.b_side.order() % d.nb.order() ||
      ia != ib)
    throw InternalInvariantError(
        "Goursat audit failed at pair (" + std::to_string(a) + "," +
        std::to_string(b) + "): [A:N_A]=" + std::to_string(ia) +
        " vs [B:N_B]=" + std::to_string(ib));
  return d;
}

// First orbit representative on the given side whose stabilizer, together
// with the kernel subgroup, fails to generate the whole side.  The verdict
// is constant on orbits (stabilizers of two members are conjugate and the
// kernel is normal), so one representative per orbit suffices.
inline std::optional<Vec2> ef_side_failure(const GroupTable& side,
                                           const GroupTable& kernel,
                                           uint32_t level) {
  if (kernel.order() == side.order()) return std::nullopt;  // quotient trivial
  OrbitDecomposition od = orbit_decomposition(side, level);
  for (const Orbit& o : od.orbits) {
    std::vector<Mat2> stab = stabilizer(side, o.representative);
    if (!generates_whole(side, stab, kernel)) return o.representative;
  }
  return std::nullopt;
}

}  // namespace detail

// Stabilizer-surjectivity check across every coprime divisor pair of m0.
// Scan order: ascending (ab, a), side A before side B, orbit
// representatives in lexicographic order; the first failure is returned.
inline std::optional<EfWitness> check_ef(const GroupTable& g_m0) {
  uint32_t m0 = g_m0.modulus().value();
  for (auto [a, b] : coprime_divisor_pairs(m0)) {
    detail::EfPairData d = detail::ef_pair_data(g_m0, a, b);
    if (auto v = detail::ef_side_failure(d.a_side, d.na, a))
      return EfWitness{a, b, FiberSide::A, *v};
    if (auto w = detail::ef_side_failure(d.b_side, d.nb, b))
      return EfWitness{a, b, FiberSide::B, *w};
  }
  return std::nullopt;
}

// All failing (pair, side) combinations, one witness each.
inline std::vector<EfWitness> ef_failures(const GroupTable& g_m0) {
  std::vector<EfWitness> out;
  for (auto [a, b] : coprime_divisor_pairs(g_m0.modulus().value())) {
    detail::EfPairData d = detail::ef_pair_data(g_m0, a, b);
    if (auto v = detail::ef_side_failure(d.a_side, d.na, a))
      out.push_back(EfWitness{a, b, FiberSide::A, *v});
    if (auto w = detail::ef_side_failure(d.b_side, d.nb, b))
      out.push_back(EfWitness{a, b, FiberSide::B, *w});
  }
  return out;
}

// Entanglement-freeness in the strict sense: the CRT image must be the
// full product at every coprime pair.  Passing this implies passing
// check_ef.  A failure witness carries the pair; side and representative
// are fixed placeholders (A, e1) since the condition has neither.
inline std::optional<EfWitness> check_ef_star(const GroupTable& g_m0) {
  uint32_t m0 = g_m0.modulus().value();
  for (auto [a, b] : coprime_divisor_pairs(m0)) {
    GroupTable gamma = project(g_m0, a * b);
    if (gamma.order() !=
        project(gamma, a).order() * project(gamma, b).order())
      return EfWitness{a, b, FiberSide::A, basis_e1(Modulus(a))};
  }
  return std::nullopt;
}

struct Certificate {
  enum class Verdict { Pass, Fail };
  enum class FailStage { None, LT, EF };

  Verdict verdict = Verdict::Pass;
  FailStage fail_stage = FailStage::None;
  std::optional<LtWitness> lt_witness;
  std::optional<EfWitness> ef_witness;
  double lt_ms = 0.0;
  double ef_ms = 0.0;
  std::string note;

  bool passed() const { return verdict == Verdict::Pass; }
};

inline const char* verdict_name(Certificate::Verdict v) {
  return v == Certificate::Verdict::Pass ? "PASS" : "FAIL";
}

inline const char* fail_stage_name(Certificate::FailStage s) {
  switch (s) {
    case Certificate::FailStage::LT:
      return "LT";
    case Certificate::FailStage::EF:
      return "EF";
    default:
      return "";
  }
}

// Main pipeline over the mod-m0 image G(m0): the entanglement check runs
// only when every prime power passes local transitivity.  PASS certifies a
// unique primitive point; FAIL is inconclusive.
inline Certificate certify_unique(const GroupTable& g_m0, uint32_t m0,
                                  LtMode mode = LtMode::TopOnly) {
  if (g_m0.modulus().value() != m0)
    throw DomainError("certify_unique: group lives at modulus " +
                      std::to_string(g_m0.modulus().value()) + ", not " +
                      std::to_string(m0));
  using clock = std::chrono::steady_clock;
  Certificate cert;
  if (m0 == 1) {
    cert.note =
        "m0=1 (Serre curve): 1 is the only divisor, so the level-1 point "
        "is the unique primitive point";
    return cert;
  }
  auto t0 = clock::now();
  std::optional<LtWitness> lt = check_lt(g_m0, mode);
  cert.lt_ms = std::chrono::duration<double, std::milli>(clock::now() - t0)
                   .count();
  if (lt) {
    cert.verdict = Certificate::Verdict::Fail;
    cert.fail_stage = Certificate::FailStage::LT;
    cert.lt_witness = lt;
    return cert;
  }
  auto t1 = clock::now();
  std::optional<EfWitness> ef = check_ef(g_m0);
  cert.ef_ms = std::chrono::duration<double, std::milli>(clock::now() - t1)
                   .count();
  if (ef) {
    cert.verdict = Certificate::Verdict::Fail;
    cert.fail_stage = Certificate::FailStage::EF;
    cert.ef_witness = ef;
  }
  return cert;
}

// Exact uniqueness oracle: adjoin -I to the image and test transitivity on
// V_m0 directly.  This decides |P(E)| = 1, independently of the
// certificate's two-stage route.
inline bool unique_primitive_direct(const GroupTable& g_m0, uint32_t m0) {
  if (g_m0.modulus().value() != m0)
    throw DomainError("unique_primitive_direct: group lives at modulus " +
                      std::to_string(g_m0.modulus().value()) + ", not " +
                      std::to_string(m0));
  return is_transitive(adjoin_neg_identity(g_m0), m0);
}

}  // namespace ppcert
