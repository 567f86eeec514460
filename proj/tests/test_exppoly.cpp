#include <catch2/catch_amalgamated.hpp>

#include "qflat/exppoly.hpp"

using namespace qflat;

namespace {

ExpPoly random_poly(std::uint64_t seed, int nterms) {
  SamplePoints rng(seed);
  std::vector<ExpPoly::Term> terms;
  for (int k = 0; k < nterms; ++k) {
    const cplx a = std::polar(1.0, two_pi * rng.unit());
    const cplx c(2.0 * rng.unit() - 1.0, 2.0 * rng.unit() - 1.0);
    terms.push_back({a, c});
  }
  return ExpPoly::from_terms(terms);
}

}  // namespace

TEST_CASE("exact cancellation and inverse waves", "[exppoly]") {
  const cplx a(0.3, 0.954);
  const ExpPoly w = ExpPoly::wave(a);
  CHECK((w - w).is_zero());
  const ExpPoly prod = w * w.conj();  // |e^{az - conj(a) conj(z)}|^2 = 1
  CHECK(prod.is_constant());
  CHECK(std::abs(prod.constant_value() - 1.0) < 1e-15);
}

TEST_CASE("product evaluates like pointwise product", "[exppoly]") {
  const cplx z(0.3, 0.7);
  for (std::uint64_t seed : {11u, 12u, 13u}) {
    const ExpPoly p = random_poly(seed, 5);
    const ExpPoly q = random_poly(seed + 100, 4);
    CHECK(std::abs((p * q).eval(z) - p.eval(z) * q.eval(z)) < 1e-12);
    CHECK(std::abs((p + q).eval(z) - (p.eval(z) + q.eval(z))) < 1e-12);
    CHECK(std::abs(p.conj().eval(z) - std::conj(p.eval(z))) < 1e-12);
  }
}

TEST_CASE("derivatives agree with finite differences", "[exppoly]") {
  const double h = 1e-5;
  SamplePoints pts(21);
  for (std::uint64_t seed : {31u, 32u}) {
    const ExpPoly p = random_poly(seed, 4);
    const ExpPoly px = p.dz(), pb = p.dzbar();
    for (int k = 0; k < 4; ++k) {
      const cplx z = pts.next();
      const cplx fx = (p.eval(z + h) - p.eval(z - h)) / (2.0 * h);
      const cplx fy = (p.eval(z + cplx(0, h)) - p.eval(z - cplx(0, h))) / (2.0 * h);
      const cplx dz_num = 0.5 * (fx - cplx(0, 1) * fy);
      const cplx db_num = 0.5 * (fx + cplx(0, 1) * fy);
      CHECK(std::abs(px.eval(z) - dz_num) < 1e-6);
      CHECK(std::abs(pb.eval(z) - db_num) < 1e-6);
    }
  }
}

TEST_CASE("derivation rules", "[exppoly]") {
  const ExpPoly p = random_poly(41, 5), q = random_poly(42, 4);
  CHECK((p.conj().conj() - p).is_zero());
  CHECK((p.dz().dzbar() - p.dzbar().dz()).is_zero());
  CHECK(((p * q).dz() - (p.dz() * q + p * q.dz())).max_abs_coeff() < 1e-12);
  CHECK(((p * q).dzbar() - (p.dzbar() * q + p * q.dzbar())).max_abs_coeff() < 1e-12);
  CHECK((p.dz().conj() - p.conj().dzbar()).is_zero());
}

TEST_CASE("canonical form merges across interleaved frequencies", "[exppoly]") {
  // Three frequencies whose real parts differ only by floating-point noise:
  // the cancelling partner of the first is separated from it, in the sorted
  // order, by a term with a different imaginary part.
  const std::vector<ExpPoly::Term> terms = {
      {cplx(0.0, 1.0), 1.0}, {cplx(5e-17, 2.0), 0.5}, {cplx(1e-16, 1.0), -1.0}};
  const ExpPoly p = ExpPoly::from_terms(terms);
  REQUIRE(p.terms().size() == 1);
  CHECK(std::abs(p.terms()[0].coeff - cplx(0.5)) < 1e-15);
}

TEST_CASE("canonical form is order independent", "[exppoly]") {
  const ExpPoly p = random_poly(51, 6);
  std::vector<ExpPoly::Term> shuffled(p.terms().rbegin(), p.terms().rend());
  std::swap(shuffled[0], shuffled[2]);
  const ExpPoly q = ExpPoly::from_terms(shuffled);
  REQUIRE(p.terms().size() == q.terms().size());
  for (std::size_t k = 0; k < p.terms().size(); ++k) {
    CHECK(p.terms()[k].freq == q.terms()[k].freq);
    CHECK(p.terms()[k].coeff == q.terms()[k].coeff);
  }
}

TEST_CASE("tiny coefficients are pruned", "[exppoly]") {
  const ExpPoly p = ExpPoly::from_terms({{cplx(0, 1), 1e-14}});
  CHECK(p.is_zero());
  CHECK(p.terms().empty());
}
