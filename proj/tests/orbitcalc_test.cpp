#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "ppcert/orbitcalc.hpp"
#include "test_support.hpp"

using namespace ppcert;
using ppsupport::mk;

TEST_CASE("exact_order_vectors", "[orbitcalc]") {
  ExactOrderSet v1 = exact_order_vectors(1);
  REQUIRE(v1.vectors == std::vector<Vec2>{Vec2(Modulus(1), 0, 0)});

  ExactOrderSet v2 = exact_order_vectors(2);
  REQUIRE(v2.vectors == std::vector<Vec2>{Vec2(Modulus(2), 0, 1),
                                          Vec2(Modulus(2), 1, 0),
                                          Vec2(Modulus(2), 1, 1)});

  // complete, duplicate-free, sorted; count matches an independent census
  ExactOrderSet v4 = exact_order_vectors(4);
  REQUIRE(v4.vectors.size() == 12);
  uint64_t brute = 0;
  for (uint32_t a = 0; a < 4; ++a)
    for (uint32_t b = 0; b < 4; ++b)
      if (std::gcd(std::gcd(a, b), 4u) == 1) ++brute;
  REQUIRE(v4.vectors.size() == brute);
  REQUIRE(std::is_sorted(v4.vectors.begin(), v4.vectors.end()));
  for (const Vec2& v : v4.vectors) REQUIRE(vec_order(v) == 4);
}

TEST_CASE("orbit_of", "[orbitcalc]") {
  GroupTable full5 = full_gl2(5);
  auto orb = orbit_of(full5, Vec2(Modulus(5), 1, 0));
  REQUIRE(orb.size() == 24);
  REQUIRE(orb == exact_order_vectors(5).vectors);

  GroupTable pm3 = adjoin_neg_identity(
      GroupTable::close(SubgroupSpec{Modulus(3), {}}));
  auto pair = orbit_of(pm3, Vec2(Modulus(3), 1, 0));
  REQUIRE(pair == std::vector<Vec2>{Vec2(Modulus(3), 1, 0),
                                    Vec2(Modulus(3), 2, 0)});

  GroupTable borel = ppsupport::borel3();
  REQUIRE(borel.order() == 12);  // all upper-triangular invertibles
  auto borel_orbit = orbit_of(borel, Vec2(Modulus(3), 1, 0));
  REQUIRE(borel_orbit == pair);

  // members share the seed's exact order
  for (const Vec2& w : orbit_of(full5, Vec2(Modulus(5), 2, 0)))
    REQUIRE(vec_order(w) == vec_order(Vec2(Modulus(5), 2, 0)));

  REQUIRE_THROWS_AS(orbit_of(full5, Vec2(Modulus(10), 1, 0)),
                    ModulusMismatchError);
}

TEST_CASE("orbit_decomposition", "[orbitcalc]") {
  OrbitDecomposition full12 = orbit_decomposition(full_gl2(12), 12);
  REQUIRE(full12.r() == 1);
  REQUIRE(full12.orbits[0].size == 96);

  GroupTable pm3 = adjoin_neg_identity(
      GroupTable::close(SubgroupSpec{Modulus(3), {}}));
  OrbitDecomposition od3 = orbit_decomposition(pm3, 3);
  REQUIRE(od3.r() == 4);
  for (const Orbit& o : od3.orbits) REQUIRE(o.size == 2);

  OrbitDecomposition borel = orbit_decomposition(ppsupport::borel3(), 3);
  REQUIRE(borel.r() == 2);
  // seeds scan lexicographically: (0,1) leads the 6-orbit, (1,0) the pair
  REQUIRE(borel.orbits[0].size == 6);
  REQUIRE(borel.orbits[1].size == 2);
  REQUIRE(borel.orbits[1].representative == Vec2(Modulus(3), 1, 0));

  // representatives are lexicographic minima and index lookups agree
  for (size_t i = 0; i < borel.orbits.size(); ++i)
    for (const Vec2& w : borel.orbits[i].members) {
      REQUIRE_FALSE(w < borel.orbits[i].representative);
      REQUIRE(borel.orbit_index(w) == i);
    }
}

TEST_CASE("stabilizer", "[orbitcalc]") {
  GroupTable g2 = full_gl2(2);
  auto stab = stabilizer(g2, Vec2(Modulus(2), 1, 0));
  REQUIRE(stab.size() == 2);
  REQUIRE(stab[0] == Mat2::identity(Modulus(2)));
  REQUIRE(stab[1] == mk(2, 1, 1, 0, 1));

  GroupTable pm5 = adjoin_neg_identity(
      GroupTable::close(SubgroupSpec{Modulus(5), {}}));
  REQUIRE(stabilizer(pm5, Vec2(Modulus(5), 1, 0)) ==
          std::vector<Mat2>{Mat2::identity(Modulus(5))});
}

TEST_CASE("orbit-stabilizer identity and conjugacy", "[orbitcalc]") {
  std::mt19937_64 rng(37);
  for (int t = 0; t < 100; ++t) {
    uint32_t n = 2 + uint32_t(rng() % 11);
    GroupTable g = GroupTable::close(ppsupport::random_subgroup_spec(rng, n));
    ExactOrderSet vn = exact_order_vectors(n);
    const Vec2& v = vn.vectors[rng() % vn.vectors.size()];
    auto orb = orbit_of(g, v);
    auto stab = stabilizer(g, v);
    REQUIRE(orb.size() * stab.size() == g.order());

    // Stab(x v) = x Stab(v) x^-1
    const Mat2& x = g.elements()[rng() % g.order()];
    auto stab2 = stabilizer(g, vec_act(x, v));
    REQUIRE(stab2.size() == stab.size());
    Mat2 xi = mat_inv(x);
    bool conjugate = true;
    for (const Mat2& s : stab2) {
      Mat2 back = mat_mul(mat_mul(xi, s), x);
      conjugate = conjugate &&
                  std::find(stab.begin(), stab.end(), back) != stab.end();
    }
    REQUIRE(conjugate);
  }
}

TEST_CASE("is_transitive", "[orbitcalc]") {
  REQUIRE(is_transitive(sl2_table(8), 8));
  GroupTable trivial2 = GroupTable::close(SubgroupSpec{Modulus(2), {}});
  REQUIRE_FALSE(is_transitive(trivial2, 2));
  REQUIRE(is_transitive(commutator_subgroup(4), 4));
  REQUIRE_THROWS_AS(is_transitive(trivial2, 4), DomainError);
}

TEST_CASE("transitivity of the full and special linear groups",
          "[orbitcalc]") {
  for (uint32_t n = 1; n <= 16; ++n) {
    REQUIRE(is_transitive(full_gl2(n), n));
    REQUIRE(is_transitive(sl2_table(n), n));
  }
  // r_n is bounded by the index of the acting group
  std::mt19937_64 rng(41);
  for (int t = 0; t < 30; ++t) {
    uint32_t n = 2 + uint32_t(rng() % 11);
    GroupTable h = adjoin_neg_identity(
        GroupTable::close(ppsupport::random_subgroup_spec(rng, n)));
    REQUIRE(orbit_decomposition(h, n).r() <= index_in_gl2(h));
  }
}

TEST_CASE("point_degree", "[orbitcalc]") {
  REQUIRE(point_degree(24, 5) == 12);
  REQUIRE(point_degree(3, 2) == 3);
  REQUIRE(point_degree(1, 1) == 1);
  REQUIRE_THROWS_AS(point_degree(7, 5), ContractViolationError);
}
