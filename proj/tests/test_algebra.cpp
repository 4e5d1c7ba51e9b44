#include <doctest.h>

#include <cmath>

#include "modsig/algebra.hpp"

using namespace modsig;

TEST_CASE("polynomial parsing and helpers") {
  CHECK(parse_polynomial("trinomial:3") == make_polynomial({-1, 0, -1, 1}));
  CHECK(parse_polynomial("alpha:3") == make_polynomial({-1, 1, 0, 1}));
  CHECK(parse_polynomial("1,2,0,0") .degree() == 1);
  CHECK(cyclotomic(6) == make_polynomial({1, -1, 1}));
  CHECK(cyclotomic(12) == make_polynomial({1, 0, -1, 0, 1}));
  CHECK(characteristic_polynomial(narayana_spec()) == trinomial(3));
  CHECK(derivative(trinomial(3)) == make_polynomial({0, -2, 3}));
  CHECK_THROWS(parse_polynomial("1,x"));
}

TEST_CASE("exact division and gcd") {
  auto t5 = trinomial(5);
  CHECK(divides(cyclotomic(6), t5));
  CHECK(exact_divide(t5, cyclotomic(6)) == make_polynomial({-1, -1, 0, 1}));
  CHECK_THROWS_AS(exact_divide(trinomial(4), cyclotomic(6)), std::domain_error);
  CHECK(gcd(t5, trinomial(11)) == cyclotomic(6));
  auto sq = squarefree_decomposition(make_polynomial({1, -2, 1}));  // (x-1)^2
  REQUIRE(sq.size() == 1);
  CHECK(sq[0].multiplicity == 2);
}

TEST_CASE("roots of the narayana polynomial") {
  auto r = isolate_roots(trinomial(3));
  REQUIRE(r.roots.size() == 3);
  CHECK(r.count_outside_unit == 1);
  CHECK(r.roots[0].real);
  CHECK(r.roots[0].center.real() == doctest::Approx(1.46557123187676802665).epsilon(1e-15));
  CHECK(r.roots[0].center_re.rfind("1.465571231876768026656731225", 0) == 0);
  CHECK(std::abs(r.roots[1].center.real() + 0.232785615938384013328) < 1e-15);
  CHECK(std::abs(std::abs(r.roots[1].center.imag()) - 0.792551992515447848326) < 1e-15);
  CHECK(r.roots[1].radius < 1e-30);
  auto [err, bound] = vieta_check(r);
  CHECK(err <= bound);
}

TEST_CASE("unit-circle counts") {
  CHECK(count_outside_unit(trinomial(6)) == 3);
  CHECK(is_pisot(trinomial(2)));
  CHECK(is_pisot(trinomial(3)));
  CHECK(is_pisot(trinomial(4)));
  CHECK(is_pisot(trinomial(5)));  // after removing x^2 - x + 1
  CHECK_FALSE(is_pisot(trinomial(6)));
  auto r5 = isolate_roots(trinomial(5));
  CHECK(r5.count_on_unit == 2);
  for (const auto& z : r5.roots)
    if (z.location == UnitLocation::on_circle) CHECK(z.cyclotomic_order == 6);
  CHECK(isolate_roots(cyclotomic(7)).count_on_unit == 6);
  for (int d = 2; d <= 12; ++d) {
    auto rs = isolate_roots(trinomial(d));
    auto [err, bound] = vieta_check(rs);
    CHECK(err <= bound);
  }
}

TEST_CASE("alpha is the reciprocal of rho") {
  const double want[] = {0, 0, 0.618033988749894848, 0.682327803828019327, 0.724491959000515611588,
                         0.754877666246692760, 0.778089598678601097, 0.796544354128457103};
  for (int d = 2; d <= 7; ++d) {
    auto r = isolate_roots(alpha_polynomial(d));
    bool found = false;
    for (const auto& z : r.roots)
      if (z.real && std::abs(z.center.real() - want[d]) < 1e-15) found = true;
    CHECK(found);
  }
  for (int d = 2; d <= 12; ++d) CHECK(reciprocal_root_gap(d) < 1e-30);
}

TEST_CASE("closed forms") {
  auto nar = generate_recurrent(narayana_spec(), 60);
  auto cf = closed_form(nar);
  REQUIRE(cf.coefficients.size() == 3);
  CHECK(cf.validated_through >= 60);
  CHECK(std::abs(cf.coefficients[0].center - std::complex<double>(0.896185071926131021, 0)) < 1e-14);
  CHECK(std::abs(cf.coefficients[1].center - std::conj(cf.coefficients[2].center)) < 1e-14);
  CHECK(std::abs(cf.coefficients[1].center.real() - 0.0519074640369344894191) < 1e-14);
  CHECK(std::abs(std::abs(cf.coefficients[1].center.imag()) - 0.182484203313284331738) < 1e-14);

  auto inv = closed_form(nar, ClosedFormOrientation::inverse_powers);
  CHECK(inv.bases[0].center.real() == doctest::Approx(0.682327803828019327).epsilon(1e-14));

  auto pow2 = closed_form(generate_recurrent(RecurrenceSpec{"pow2", {2}, {2}}, 40));
  REQUIRE(pow2.coefficients.size() == 1);
  CHECK(std::abs(pow2.coefficients[0].center - 1.0) < 1e-20);

  auto s6 = generate_recurrent(sqrt6_example_spec(), 60);
  auto c6 = closed_form(s6);
  CHECK(c6.validated_through >= 60);
  CHECK(c6.max_residual < std::ldexp(1.0, -32));
}
