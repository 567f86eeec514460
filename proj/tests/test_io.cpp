#include <catch2/catch_amalgamated.hpp>

#include "qflat/jsonio.hpp"
#include "qflat/quadric.hpp"

using namespace qflat;

TEST_CASE("round trips are bit exact", "[io]") {
  const CatalogEntry e = catalog("paired-n5-skew");
  SECTION("curve") {
    const json j = to_json(e.f0);
    const Curve back = curve_from_json(j);
    REQUIRE(back.f.size() == e.f0.f.size());
    for (std::size_t k = 0; k < back.f.size(); ++k)
      CHECK((back.f[k] - e.f0.f[k]).max_abs_coeff() == 0.0);
    REQUIRE(back.freq_mult.size() == e.f0.freq_mult.size());
    for (std::size_t k = 0; k < back.freq_mult.size(); ++k)
      CHECK(back.freq_mult[k] == e.f0.freq_mult[k]);
    CHECK(to_json(back).dump() == j.dump());
  }
  SECTION("moduli") {
    const json j = to_json(e.ms);
    const ModuliSolution ms = moduli_from_json(j);
    CHECK(ms.n == e.ms.n);
    for (std::size_t k = 0; k < ms.r.size(); ++k) CHECK(ms.r[k] == e.ms.r[k]);
    for (std::size_t k = 0; k < ms.theta.size(); ++k) CHECK(ms.theta[k] == e.ms.theta[k]);
  }
  SECTION("matrix") {
    const json j = to_json(e.W);
    const Eigen::MatrixXcd W = matrix_from_json(j);
    CHECK((W - e.W).cwiseAbs().maxCoeff() == 0.0);
    CHECK(to_json(W).dump() == j.dump());
  }
}

TEST_CASE("serialization is deterministic", "[io]") {
  const CatalogEntry a = catalog("mixed-family");
  const CatalogEntry b = catalog("mixed-family");
  CHECK(to_json(a.f0).dump() == to_json(b.f0).dump());
  CHECK(to_json(a.W).dump() == to_json(b.W).dump());
}

TEST_CASE("schema and shape violations are rejected", "[io]") {
  CHECK_THROWS_AS(exppoly_from_json(json{{"schema", "bogus/1"}}), std::invalid_argument);
  CHECK_THROWS_AS(exppoly_from_json(json{{"schema", "qflat-exppoly/1"}}), std::invalid_argument);
  CHECK_THROWS_AS(
      exppoly_from_json(json{{"schema", "qflat-exppoly/1"}, {"terms", {{1.0, 2.0}}}}),
      std::invalid_argument);
  CHECK_THROWS_AS(curve_from_json(json{{"schema", "qflat-curve/1"},
                                       {"components", json::array()}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(moduli_from_json(json{{"schema", "qflat-moduli/1"}, {"n", 3}}),
                  std::invalid_argument);
  json jm = to_json(clifford(3));
  jm["r"] = {0.5, 0.5};  // wrong length: validation must reject
  CHECK_THROWS_AS(moduli_from_json(jm), std::invalid_argument);
  json jw = to_json(Eigen::MatrixXcd::Identity(2, 2));
  jw["re"] = {{1.0, 0.0}};  // row count disagrees
  CHECK_THROWS_AS(matrix_from_json(jw), std::invalid_argument);
}

TEST_CASE("csv export is deterministic with hand-checked values", "[io]") {
  const CatalogEntry e = catalog("paired-n3");
  const std::vector<cplx> zs{cplx(0, 0), cplx(0.3, 0.7)};
  const std::string csv = curve_samples_csv(e.f0, zs);
  CHECK(csv == curve_samples_csv(e.f0, zs));
  CHECK(csv.rfind("re_z,im_z,re_f0,im_f0,re_f1,im_f1,re_f2,im_f2,re_f3,im_f3\n", 0) == 0);
  // at z = 0 the curve is (1/sqrt2, i/sqrt2, 0, 0)
  CHECK(csv.find("\n0,0,0.70710678118654746,0,0,0.70710678118654746,0,0,0,0\n") !=
        std::string::npos);
}
