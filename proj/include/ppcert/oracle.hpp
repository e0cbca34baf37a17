#pragma once

// Built-in conformance suite: checks the structural facts the certifier
// relies on, directly against enumeration.

#include <cstdint>
#include <string>
#include <vector>

#include "ppcert/grouptab.hpp"
#include "ppcert/modarith.hpp"
#include "ppcert/orbitcalc.hpp"
#include "ppcert/primitive.hpp"

namespace ppcert {

struct OracleCheck {
  std::string name;
  bool pass;
  std::string detail;
};

inline std::vector<OracleCheck> run_oracle_suite(uint32_t max_n = 30) {
  std::vector<OracleCheck> out;

  {
    bool ok = true;
    uint32_t bad = 0;
    for (uint32_t n = 1; n <= max_n && ok; ++n)
      if (!is_transitive(full_gl2(n), n)) ok = false, bad = n;
    out.push_back({"gl2-transitivity", ok,
                   ok ? "n <= " + std::to_string(max_n)
                      : "fails at n=" + std::to_string(bad)});
  }
  {
    bool ok = true;
    uint32_t bad = 0;
    for (uint32_t n = 1; n <= max_n && ok; ++n)
      if (!is_transitive(sl2_table(n), n)) ok = false, bad = n;
    out.push_back({"sl2-transitivity", ok,
                   ok ? "n <= " + std::to_string(max_n)
                      : "fails at n=" + std::to_string(bad)});
  }
  {
    bool ok = true;
    std::string levels;
    for (uint32_t n : {2u, 3u, 4u, 5u, 6u, 8u, 9u, 12u, 16u, 24u}) {
      if (n > std::max(max_n, 24u)) continue;
      levels += (levels.empty() ? "" : ",") + std::to_string(n);
      ok = ok && is_transitive(commutator_subgroup(n), n);
    }
    out.push_back({"commutator-transitivity", ok, "n in {" + levels + "}"});
  }
  {
    bool ok = true;
    for (uint32_t n = 1; n <= 100 && ok; ++n) {
      uint64_t total = 0;
      for (uint32_t d : Modulus(n).divisors()) total += count_exact_order(d);
      ok = total == uint64_t(n) * n;
    }
    out.push_back({"exact-order-partition", ok, "sum |V_d| = n^2, n <= 100"});
  }
  {
    bool ok = true;
    for (uint32_t n = 1; n <= 36 && ok; ++n)
      for (uint32_t b : Modulus(n).divisors())
        for (uint32_t a : Modulus(b).divisors())
          ok = ok && deg_natural_map(a, n / a).degree ==
                         deg_natural_map(b, n / b).degree *
                             deg_natural_map(a, b / a).degree;
    out.push_back({"degree-multiplicativity", ok, "chains a | b | n <= 36"});
  }
  {
    bool ok = true;
    for (uint32_t a = 1; a <= 50 && ok; ++a)
      for (uint32_t b = 2; a * b <= 100; ++b)
        ok = ok && deg_natural_map(a, b).degree > 1;
    out.push_back({"degree-above-one", ok, "ab <= 100, cofactor > 1"});
  }
  {
    struct Row {
      uint32_t m0;
      uint64_t crude, index_bound;
    };
    const Row rows[] = {{1, 1, 2},    {2, 4, 3},    {3, 9, 3},   {4, 16, 4},
                        {6, 36, 5},   {8, 64, 5},   {12, 144, 7},
                        {24, 576, 9}};
    bool ok = true;
    for (const Row& r : rows) {
      BoundsRecord b = bounds(r.m0, 2);
      ok = ok && b.crude == r.crude && b.index_bound &&
           *b.index_bound == r.index_bound;
    }
    out.push_back({"serre-bounds-table", ok, "m0 | 24, adelic index 2"});
  }
  return out;
}

}  // namespace ppcert
