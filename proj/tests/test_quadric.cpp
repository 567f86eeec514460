#include <catch2/catch_amalgamated.hpp>

#include "qflat/quadric.hpp"

using namespace qflat;

namespace {

Eigen::MatrixXcd random_unitary(int n, std::uint64_t seed) {
  SamplePoints rng(seed);
  Eigen::MatrixXcd A(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      A(i, j) = cplx(2.0 * rng.unit() - 1.0, 2.0 * rng.unit() - 1.0);
  return Eigen::HouseholderQR<Eigen::MatrixXcd>(A).householderQ();
}

}  // namespace

TEST_CASE("symmetric factorization round trips on random inputs", "[quadric]") {
  int count = 0;
  for (int rep = 0; rep < 25; ++rep) {
    for (int n : {4, 5, 6, 8}) {
      const Eigen::MatrixXcd V = random_unitary(n, 1000 + 13 * static_cast<std::uint64_t>(count));
      const Eigen::MatrixXcd W = V.transpose() * V;
      const Eigen::MatrixXcd U = takagi_factor(W);
      CHECK((U.transpose() * U - W).cwiseAbs().maxCoeff() < 1e-9);
      CHECK((U * U.adjoint() - Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-9);
      ++count;
    }
  }
  REQUIRE(count == 100);
}

TEST_CASE("symmetric factorization handles clustered spectra", "[quadric]") {
  // identity: a fully degenerate eigenvalue; catalog W's: exact +-1 pairs
  const Eigen::MatrixXcd I4 = Eigen::MatrixXcd::Identity(4, 4);
  CHECK((takagi_factor(I4).transpose() * takagi_factor(I4) - I4).cwiseAbs().maxCoeff() < 1e-12);
  for (const std::string& name : catalog_names()) {
    const CatalogEntry e = catalog(name);
    const Eigen::MatrixXcd U = takagi_factor(e.W);
    INFO(name);
    CHECK((U.transpose() * U - e.W).cwiseAbs().maxCoeff() < 1e-12);
  }
  Eigen::MatrixXcd D = Eigen::MatrixXcd::Zero(3, 3);
  D(0, 0) = std::polar(1.0, 0.4);
  D(1, 1) = std::polar(1.0, 0.4);  // deliberate repeat
  D(2, 2) = std::polar(1.0, -2.0);
  const Eigen::MatrixXcd U = takagi_factor(D);
  CHECK((U.transpose() * U - D).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("factorizations of the same W differ by a real rotation", "[quadric]") {
  SamplePoints rng(77);
  for (int rep = 0; rep < 5; ++rep) {
    const Eigen::MatrixXcd U1 = random_unitary(5, 500 + rep);
    Eigen::MatrixXd A(5, 5);
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 5; ++j) A(i, j) = 2.0 * rng.unit() - 1.0;
    const Eigen::MatrixXd O = Eigen::HouseholderQR<Eigen::MatrixXd>(A).householderQ();
    const Eigen::MatrixXcd U2 = O.cast<cplx>() * U1;  // same W = U^T U? no: U2^T U2 = U1^T O^T O U1
    const GaugeReport g = so_gauge(U2, U1);
    CHECK(g.realness < 1e-12);
    CHECK(g.orthogonality < 1e-12);
    CHECK(std::abs(std::abs(g.det) - 1.0) < 1e-12);
    CHECK((U2.transpose() * U2 - U1.transpose() * U1).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("frequency classes: singletons plus the antipodal class", "[quadric]") {
  const std::vector<FrequencyClass> cls5 = frequency_classes(clifford(5));
  std::size_t zero_members = 0;
  for (const FrequencyClass& c : cls5) {
    if (std::abs(c.freq) < 1e-7)
      zero_members = c.pairs.size();
    else
      CHECK(c.pairs.size() == 1);
  }
  CHECK(zero_members == 3);

  for (const FrequencyClass& c : frequency_classes(clifford(2)))
    CHECK(c.pairs.size() == 1);
}

TEST_CASE("pairing profiles", "[quadric]") {
  CHECK(pairing_profile(clifford(2)).label == "all-free");
  CHECK(pairing_profile(clifford(3)).label == "all-paired");
  const PairingProfile mp = pairing_profile(mixed_family_moduli());
  CHECK(mp.label == "mixed");
  REQUIRE(mp.free_indices.size() == 1);
  CHECK(mp.free_indices[0] == 3);
}

TEST_CASE("coefficient constraints flag a broken W", "[quadric]") {
  const CatalogEntry e = catalog("paired-n3");
  const auto cons = derive_constraints(e.ms);
  CHECK(constraint_residual(e.W, cons) < 1e-12);
  CHECK(quadric_residual(e.W, e.ms) < 1e-12);
  Eigen::MatrixXcd bad = e.W;
  bad(0, 0) = 0.05;  // a double frequency must have zero coefficient
  CHECK(constraint_residual(bad, cons) > 1e-3);
  CHECK(quadric_residual(bad, e.ms) > 1e-3);
}

TEST_CASE("curve values at the origin", "[quadric]") {
  const CatalogEntry e = catalog("paired-n3");
  const Eigen::VectorXcd v = eval(e.f0.f, cplx(0, 0));
  const double s = 1.0 / std::sqrt(2.0);
  CHECK(std::abs(v(0) - cplx(s, 0)) < 1e-12);
  CHECK(std::abs(v(1) - cplx(0, s)) < 1e-12);
  CHECK(std::abs(v(2)) < 1e-12);
  CHECK(std::abs(v(3)) < 1e-12);
}

TEST_CASE("frozen gauge determinants against rebuilt factors", "[quadric]") {
  const std::vector<std::pair<std::string, double>> expected = {
      {"doubling-n2", -1.0}, {"doubling-n3", 1.0},      {"doubling-n5", 1.0},
      {"paired-n3", -1.0},   {"paired-n5", -1.0},       {"paired-n5-skew", -1.0},
      {"mixed-family", -1.0}};
  for (const auto& [name, det] : expected) {
    const CatalogEntry e = catalog(name);
    const GaugeReport g = so_gauge(e.U, takagi_factor(e.W));
    INFO(name);
    CHECK(g.realness < 1e-9);
    CHECK(std::abs(g.det - det) < 1e-9);
  }
}

TEST_CASE("mixed family: the parameter survives into W", "[quadric]") {
  for (const cplx t : {cplx(1.0), cplx(0.0, 1.0), std::polar(1.0, 0.3)}) {
    const CatalogEntry e = catalog_mixed_family(t);
    CHECK(std::abs(e.W(3, 5) - t) < 1e-12);
    CHECK(verify_entry(e).worst() < 1e-10);
  }
}

TEST_CASE("construction guards", "[quadric]") {
  CHECK_THROWS_AS(catalog("nope"), std::invalid_argument);
  CHECK_THROWS_AS(mixed_family_moduli(0.4 * two_pi / 2.0), std::invalid_argument);
  const ModuliSolution ms = clifford(3);
  CHECK_THROWS_AS(catalog_paired(ms, {cplx(2.0), cplx(-2.0)}), std::invalid_argument);
  CHECK_THROWS_AS(catalog_paired(ms, {cplx(1.0), cplx(1.0)}), std::invalid_argument);
  Eigen::MatrixXcd notsym = Eigen::MatrixXcd::Identity(3, 3);
  notsym(0, 1) = 0.3;
  CHECK_THROWS_AS(takagi_factor(notsym), std::invalid_argument);
}

TEST_CASE("W from a unitary factor is symmetric unitary", "[quadric]") {
  const Eigen::MatrixXcd U = random_unitary(6, 42);
  const Eigen::MatrixXcd W = w_from_u(U);
  CHECK((W - W.transpose()).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((W * W.adjoint() - Eigen::MatrixXcd::Identity(6, 6)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK_NOTHROW(require_symmetric_unitary(W));
}
