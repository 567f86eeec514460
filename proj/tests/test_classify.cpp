#include <catch2/catch_amalgamated.hpp>

#include "qflat/classify.hpp"

using namespace qflat;

TEST_CASE("determinant identities hold on both routes", "[classify]") {
  SamplePoints rng(3);
  for (int t = 0; t < 20; ++t) {
    const int s = 2 + t % 5;
    std::vector<cplx> x;
    for (int k = 0; k < s; ++k) x.push_back(std::polar(1.0, two_pi * rng.unit()));
    CHECK(std::abs(vandermonde_closed(x) - det_by_permutations(vandermonde_matrix(x))) < 1e-9);
    CHECK(std::abs(odd_power_det_closed(x) - det_by_permutations(odd_power_matrix(x))) < 1e-9);
    CHECK(std::abs(power_table_det_closed(x) - det_by_permutations(power_table_matrix(x))) < 1e-9);
  }
  CHECK_THROWS_AS(det_by_permutations(Eigen::MatrixXcd::Identity(9, 9)), std::invalid_argument);
}

TEST_CASE("pattern engine deduction rules", "[classify]") {
  SECTION("an all-zero row is contradictory") {
    PatternSolver ps(3);
    for (int j = 0; j < 3; ++j) ps.set(0, j, EntryState::Zero);
    CHECK_FALSE(ps.propagate());
    CHECK(ps.contradiction());
  }
  SECTION("single support becomes unit and clears its row") {
    PatternSolver ps(2);
    ps.set(0, 0, EntryState::Zero);
    REQUIRE(ps.propagate());
    CHECK(ps.at(0, 1) == EntryState::Unit);
    CHECK(ps.at(1, 1) == EntryState::Zero);
    CHECK(ps.at(1, 0) == EntryState::Unit);  // symmetry
  }
  SECTION("a single surviving product is forced to vanish") {
    PatternSolver ps(3);
    // rows 0 and 1 overlap only in column 2; entry (0,2) is known nonzero
    ps.set(0, 1, EntryState::Zero);
    ps.set(0, 0, EntryState::Nonzero);
    ps.set(1, 1, EntryState::Nonzero);
    ps.set(0, 2, EntryState::Nonzero);
    REQUIRE(ps.propagate());
    CHECK(ps.at(1, 2) == EntryState::Zero);
  }
  SECTION("a balance relation cannot have one surviving term") {
    PatternSolver ps(4);
    ps.add_relation({{0, 2}, {1, 3}}, "balance");
    ps.set(1, 3, EntryState::Zero);
    ps.set(0, 2, EntryState::Nonzero);
    CHECK_FALSE(ps.propagate());
  }
  SECTION("too many rows confined to too few columns") {
    PatternSolver ps(4);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) ps.set(i, j, EntryState::Zero);
    CHECK_FALSE(ps.propagate());  // three rows share the single column 3
  }
  SECTION("state conflicts are caught") {
    PatternSolver ps(2);
    ps.set(0, 1, EntryState::Zero);
    ps.set(0, 1, EntryState::Unit);
    CHECK(ps.contradiction());
  }
}

TEST_CASE("phase-order feasibility of antipodal pairings", "[classify]") {
  CHECK(order_feasible(3, {{0, 2}, {1, 3}}));
  CHECK_FALSE(order_feasible(3, {{0, 1}, {2, 3}}));
  CHECK_FALSE(order_feasible(3, {{0, 3}, {1, 2}}));
  CHECK(order_feasible(2, {{0, 1}}));
  CHECK(order_feasible(2, {}));
  CHECK(order_feasible(5, {{0, 3}, {1, 4}, {2, 5}}));
}

TEST_CASE("combinatorial generators", "[classify]") {
  CHECK(pair_sets(4, 1).size() == 6);
  CHECK(pair_sets(4, 2).size() == 3);
  CHECK(pair_sets(5, 2).size() == 15);
  CHECK(perfect_matchings(6).size() == 15);
  CHECK_THROWS_AS(perfect_matchings(5), std::invalid_argument);
}

TEST_CASE("ambient dimension 4: unique curve with aligned witness", "[classify]") {
  const Q2Result q2 = classify_q2(6);
  REQUIRE(q2.branches.size() == 6);
  CHECK(q2.unique);
  CHECK(q2.feasible_subs == 1);
  CHECK(q2.feasible_pairing == "(0,2)(1,3)");
  for (std::size_t b = 0; b + 1 < q2.branches.size(); ++b)
    CHECK_FALSE(q2.branches[b].feasible);
  CHECK(q2.branches.back().feasible);
  CHECK(q2.moduli_residual < 1e-12);
  CHECK(q2.moduli_spread < 1e-8);
  CHECK(q2.witness_checks.worst() < 1e-10);
  CHECK(q2.witness_alignment < 1e-9);
  CHECK(q2.gauge_realness < 1e-9);
}

TEST_CASE("ambient dimension 5: exhaustively empty", "[classify]") {
  const Q3Result q3 = classify_q3();
  CHECK(q3.empty);
  CHECK(q3.feasible_subs == 0);
  REQUIRE(q3.branches.size() == 9);
  for (const Branch& b : q3.branches) {
    INFO(b.name);
    CHECK_FALSE(b.feasible);
    for (const SubBranch& sb : b.subs) CHECK(sb.exhaustive);
  }
}

TEST_CASE("ambient dimension 5: the numerical search agrees", "[classify]") {
  const SearchResult sr = q3_search(12, 2026);
  CHECK(sr.starts == 12);
  CHECK(sr.best >= 1e-6);
}

TEST_CASE("ambient dimension 6 families and invariants", "[classify]") {
  const Q4Report q4 = q4_report();
  CHECK(q4.matchings_total == 15);
  CHECK(q4.families_distinct);
  REQUIRE(q4.families.size() == 4);
  for (const Q4Family& f : q4.families) {
    INFO(f.entry.name);
    CHECK(f.checks.worst() < 1e-10);
    CHECK(f.psi_deviation < 1e-10);
    CHECK(f.entry.N == 6);
  }
  CHECK(std::abs(q4.families[0].psi - cplx(-1.0)) < 1e-9);
  CHECK(std::abs(q4.families[1].psi) < 1e-9);
  CHECK(std::abs(q4.families[2].psi - cplx(0.3)) < 1e-9);
  CHECK(std::abs(q4.families[3].psi - cplx(-0.5877852522924729, 0.1909830056250526)) < 1e-9);
  CHECK(q4.families[3].entry.label == "mixed");
}

TEST_CASE("pairing analysis along the harmonic sequence", "[classify]") {
  SECTION("orthonormal families: predicted ambient matches construction") {
    for (const char* name : {"paired-n3", "paired-n5", "doubling-n2"}) {
      INFO(name);
      const CatalogEntry e = catalog(name);
      const GramAnalysis g = gram_analysis(e);
      CHECK(g.b_constancy < 1e-12);
      CHECK(g.orthonormality < 1e-12);
      CHECK(g.ambient_predicted == e.N);
      CHECK(g.doubled_rank == e.n + 1 + g.rank);  // Schur consistency
    }
  }
  SECTION("non-orthonormal family still predicts the right ambient") {
    const GramAnalysis g = gram_analysis(catalog("paired-n5-skew"));
    CHECK(g.orthonormality > 0.1);    // the simple rank law does not apply...
    CHECK(g.ambient_predicted == 6);  // ...but the doubled Gram rank does
    CHECK(g.rank + 6 != g.ambient_predicted);
  }
  SECTION("mixed family") {
    const GramAnalysis g = gram_analysis(catalog("mixed-family"));
    CHECK(g.ambient_predicted == 6);
    CHECK_FALSE(g.cyclic);
  }
  SECTION("degeneracy indicator") {
    CHECK(std::abs(gram_analysis(catalog("paired-n3")).degenerate_sum - 1.0) < 1e-12);
    CHECK(gram_analysis(catalog("doubling-n2")).degenerate_sum < 1e-12);
  }
}

TEST_CASE("equal-weight root-of-unity theorem, odd and even", "[classify]") {
  for (int n : {2, 3, 4, 5}) {
    INFO(n);
    const CliffordReport cr = clifford_theorem(n);
    CHECK(cr.profile == (n % 2 == 0 ? "all-free" : "all-paired"));
    CHECK_FALSE(cr.mixed_possible);
    CHECK(cr.singleton_lemma);
    CHECK(cr.zero_class == static_cast<std::size_t>(n % 2 == 0 ? 0 : (n + 1) / 2));
    CHECK(cr.minimal_ambient == (n % 2 == 0 ? 2 * (n + 1) : n + 1));
    CHECK(cr.minimal_matches_witness);
    CHECK(cr.checks.worst() < 1e-10);
    CHECK(cr.ambient_consistent);
    CHECK(cr.alignment < 1e-9);
    CHECK(cr.gauge_realness < 1e-9);
    CHECK(cr.obstruction_min > 0.5);
    CHECK(cr.obstruction_gap < 1e-9);
    CHECK(cr.power_table_gap < 1e-9);
  }
}

TEST_CASE("odd-n witness weights are the half-order roots of unity", "[classify]") {
  const CliffordReport c3 = clifford_theorem(3);
  REQUIRE(c3.weights.size() == 2);
  CHECK(std::abs(c3.weights[0] - cplx(1.0)) < 1e-12);
  CHECK(std::abs(c3.weights[1] - cplx(-1.0)) < 1e-12);
  const CliffordReport c5 = clifford_theorem(5);
  REQUIRE(c5.weights.size() == 3);
  CHECK(std::abs(c5.weights[1] - std::polar(1.0, two_pi / 3.0)) < 1e-12);
}
