#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "ppcert/certifier.hpp"
#include "test_support.hpp"

using namespace ppcert;
using ppsupport::mk;

TEST_CASE("lt_prime_powers enumeration", "[certifier]") {
  REQUIRE(lt_prime_powers(1, LtMode::TopOnly).empty());
  REQUIRE(lt_prime_powers(12, LtMode::TopOnly) ==
          std::vector<std::pair<uint32_t, uint32_t>>{{2, 2}, {3, 1}});
  REQUIRE(lt_prime_powers(12, LtMode::AllPowers) ==
          std::vector<std::pair<uint32_t, uint32_t>>{{2, 1}, {2, 2}, {3, 1}});
}

TEST_CASE("check_lt", "[certifier]") {
  // full image at a prime power: passes with a full orbit
  GroupTable full8 = full_gl2(8);
  REQUIRE_FALSE(check_lt(full8).has_value());
  REQUIRE(orbit_of(project(full8, 8), basis_e1(Modulus(8))).size() == 48);
  REQUIRE(count_exact_order(8) == 48);

  auto w = check_lt(ppsupport::borel3());
  REQUIRE(w.has_value());
  REQUIRE(w->ell == 3);
  REQUIRE(w->k == 1);
  REQUIRE(w->orbit_size == 2);
  REQUIRE(w->expected == 8);

  GroupTable trivial1 = GroupTable::close(SubgroupSpec{Modulus(1), {}});
  REQUIRE_FALSE(check_lt(trivial1).has_value());
}

TEST_CASE("coprime_divisor_pairs", "[certifier]") {
  REQUIRE(coprime_divisor_pairs(8).empty());
  REQUIRE(coprime_divisor_pairs(6) ==
          std::vector<std::pair<uint32_t, uint32_t>>{{2, 3}});
  REQUIRE(coprime_divisor_pairs(12) ==
          std::vector<std::pair<uint32_t, uint32_t>>{{2, 3}, {3, 4}});
  REQUIRE(coprime_divisor_pairs(24) ==
          std::vector<std::pair<uint32_t, uint32_t>>{{2, 3}, {3, 4}, {3, 8}});
  REQUIRE(coprime_divisor_pairs(72) ==
          std::vector<std::pair<uint32_t, uint32_t>>{
              {2, 3}, {3, 4}, {2, 9}, {3, 8}, {4, 9}, {8, 9}});
}

TEST_CASE("check_ef", "[certifier]") {
  REQUIRE_FALSE(check_ef(full_gl2(6)).has_value());

  // sign/det fiber product: entangled, yet stabilizers surject on both sides
  GroupTable gamma = ppsupport::signdet_gamma();
  REQUIRE_FALSE(check_ef(gamma).has_value());

  // graph of GL2(F3) ->> GL2(F2): kernel on side A is trivial, so the
  // stabilizer alone would have to generate all of GL2(F2) and cannot
  GroupTable graph = ppsupport::psi_graph_gamma();
  REQUIRE(graph.order() == 48);
  auto w = check_ef(graph);
  REQUIRE(w.has_value());
  REQUIRE(w->a == 2);
  REQUIRE(w->b == 3);
  REQUIRE(w->side == FiberSide::A);

  GroupTable trivial9 = GroupTable::close(SubgroupSpec{Modulus(9), {}});
  REQUIRE_FALSE(check_ef(trivial9).has_value());  // no pairs at prime powers
}

TEST_CASE("check_ef is constant on orbits", "[certifier]") {
  GroupTable gamma = ppsupport::signdet_gamma();
  GroupTable a_side = project(gamma, 2);
  GroupTable na = kernel_fiber(gamma, FiberSide::A, 2, 3);
  OrbitDecomposition od = orbit_decomposition(a_side, 2);
  for (const Orbit& o : od.orbits) {
    bool first = generates_whole(a_side,
                                 stabilizer(a_side, o.members.front()), na);
    bool last = generates_whole(a_side,
                                stabilizer(a_side, o.members.back()), na);
    REQUIRE(first == last);
  }
}

TEST_CASE("check_ef_star", "[certifier]") {
  REQUIRE_FALSE(check_ef_star(full_gl2(6)).has_value());

  auto w = check_ef_star(ppsupport::signdet_gamma());
  REQUIRE(w.has_value());  // |Gamma| = 144 < 6 * 48
  REQUIRE(w->a == 2);
  REQUIRE(w->b == 3);
  // ...even though the stabilizer condition holds
  REQUIRE_FALSE(check_ef(ppsupport::signdet_gamma()).has_value());

  GroupTable trivial8 = GroupTable::close(SubgroupSpec{Modulus(8), {}});
  REQUIRE_FALSE(check_ef_star(trivial8).has_value());
}

TEST_CASE("ef star implies ef", "[certifier]") {
  std::mt19937_64 rng(43);
  for (int t = 0; t < 60; ++t) {
    uint32_t m0 = t % 2 ? 6 : 12;
    GroupTable g = GroupTable::close(ppsupport::random_subgroup_spec(rng, m0));
    if (!check_ef_star(g).has_value()) REQUIRE_FALSE(check_ef(g).has_value());
  }
}

TEST_CASE("certify_unique", "[certifier]") {
  Certificate pass = certify_unique(full_gl2(24), 24);
  REQUIRE(pass.passed());
  REQUIRE(pass.fail_stage == Certificate::FailStage::None);
  REQUIRE_FALSE(pass.lt_witness.has_value());
  REQUIRE_FALSE(pass.ef_witness.has_value());

  Certificate lt_fail = certify_unique(ppsupport::borel3(), 3);
  REQUIRE_FALSE(lt_fail.passed());
  REQUIRE(lt_fail.fail_stage == Certificate::FailStage::LT);
  REQUIRE(lt_fail.lt_witness.has_value());

  Certificate ef_fail = certify_unique(ppsupport::psi_graph_gamma(), 6);
  REQUIRE_FALSE(ef_fail.passed());
  REQUIRE(ef_fail.fail_stage == Certificate::FailStage::EF);
  REQUIRE(ef_fail.ef_witness.has_value());
  REQUIRE(ef_fail.ef_witness->a == 2);
  REQUIRE(ef_fail.ef_witness->b == 3);

  GroupTable trivial1 = GroupTable::close(SubgroupSpec{Modulus(1), {}});
  Certificate serre = certify_unique(trivial1, 1);
  REQUIRE(serre.passed());
  REQUIRE_FALSE(serre.note.empty());

  REQUIRE_THROWS_AS(certify_unique(full_gl2(6), 12), DomainError);
}

TEST_CASE("unique_primitive_direct", "[certifier]") {
  REQUIRE(unique_primitive_direct(full_gl2(12), 12));

  GroupTable pm3 = adjoin_neg_identity(
      GroupTable::close(SubgroupSpec{Modulus(3), {}}));
  REQUIRE_FALSE(unique_primitive_direct(pm3, 3));

  // the graph construction fails the certificate but is genuinely unique
  GroupTable graph = ppsupport::psi_graph_gamma();
  REQUIRE_FALSE(certify_unique(graph, 6).passed());
  REQUIRE(unique_primitive_direct(graph, 6));
}

TEST_CASE("soundness and mode agreement on random subgroups", "[certifier]") {
  std::mt19937_64 rng(47);
  for (int t = 0; t < 80; ++t) {
    uint32_t m0 = t % 2 ? 6 : 12;
    GroupTable g = GroupTable::close(ppsupport::random_subgroup_spec(rng, m0));
    Certificate cert = certify_unique(g, m0);
    bool direct = unique_primitive_direct(g, m0);
    if (cert.passed()) REQUIRE(direct);
    REQUIRE(check_lt(g, LtMode::TopOnly).has_value() ==
            check_lt(g, LtMode::AllPowers).has_value());
  }
}

TEST_CASE("divisor coherence of the direct oracle", "[certifier]") {
  std::mt19937_64 rng(53);
  for (int t = 0; t < 40; ++t) {
    uint32_t m0 = t % 2 ? 8 : 12;
    GroupTable g = GroupTable::close(ppsupport::random_subgroup_spec(rng, m0));
    bool at_top = unique_primitive_direct(g, m0);
    bool at_all = true;
    for (uint32_t n : Modulus(m0).divisors())
      at_all = at_all && is_transitive(adjoin_neg_identity(project(g, n)), n);
    REQUIRE(at_top == at_all);
  }
}

TEST_CASE("ef_failures collects every failing pair", "[certifier]") {
  GroupTable graph = ppsupport::psi_graph_gamma();
  auto fails = ef_failures(graph);
  REQUIRE(fails.size() == 1);
  REQUIRE(fails[0].a == 2);
  REQUIRE(fails[0].b == 3);
  REQUIRE(ef_failures(full_gl2(12)).empty());
}
