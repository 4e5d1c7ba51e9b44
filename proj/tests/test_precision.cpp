#include <doctest.h>

#include <cmath>

#include "modsig/precision.hpp"

using namespace modsig;

TEST_CASE("alpha3 digits") {
  auto a = named_frequency("alpha3").approx(200);
  CHECK(a.radius_double() < 1e-55);
  CHECK(a.to_decimal(40).rfind("0.682327803828019327369483739711048256891", 0) == 0);
  CHECK(named_frequency("alpha").to_double() == a.to_double());
}

TEST_CASE("distance to the nearest integer") {
  auto d = dist_to_int(named_frequency("alpha3"), BigInt(41));
  CHECK(std::abs(d.to_double() - 0.024560043051207577851166671847) < 1e-25);
  auto q = dist_to_int(parse_frequency("rat:2/7"), BigInt(3));
  CHECK(q.radius_double() < 1e-30);
  CHECK(q.to_double() == doctest::Approx(1.0 / 7));
}

TEST_CASE("algebraic reals need an isolating interval") {
  std::vector<BigInt> p{-1, 1, 0, 1};  // x^3 + x - 1
  CHECK_THROWS(AlgebraicReal(p, BigRational(2), BigRational(3)));
  CHECK_NOTHROW(AlgebraicReal(p, BigRational(0), BigRational(1)));
  CHECK(sign_at(p, BigRational(0)) == -1);
  CHECK(sign_at(p, BigRational(1)) == 1);
}

TEST_CASE("frequency grammar") {
  CHECK(parse_frequency("1/3*alpha3").to_double() == doctest::Approx(0.682327803828019 / 3));
  CHECK(parse_frequency("sqrt2+1").to_double() == doctest::Approx(std::sqrt(2.0) + 1));
  CHECK(parse_frequency("root:-2,0,1@1:2").to_double() == doctest::Approx(std::sqrt(2.0)));
  auto dec = parse_frequency("dec:2.5714474995:10");
  CHECK(dec.intrinsically_limited());
  CHECK(dec.to_double() == doctest::Approx(2.5714474995));
  CHECK(parse_frequency("rat:3/4").as_rational() == BigRational(3, 4));
  CHECK(parse_frequency("inv_e").to_double() == doctest::Approx(std::exp(-1.0)));
  CHECK_THROWS(parse_frequency("nonsense"));
  CHECK_THROWS(parse_frequency(""));
}

TEST_CASE("decay classification fixtures") {
  auto nar = generate_recurrent(narayana_spec(), 120);
  CHECK(classify_decay(named_frequency("alpha3"), nar, 10, 120).classification == DecayClass::decays_geometric);
  CHECK(classify_decay(named_frequency("sqrt2"), nar, 10, 120).classification == DecayClass::non_decaying);
  auto rep = classify_decay(named_frequency("alpha3"), nar, 10, 120);
  REQUIRE(rep.fitted_rate);
  CHECK(*rep.fitted_rate == doctest::Approx(std::log(0.826031357654187)).epsilon(0.02));  // |second root|
  auto s13 = generate_recurrent(sqrt13_example_spec(), 120);
  CHECK(classify_decay(named_frequency("sqrt13_half"), s13, 10, 120).classification == DecayClass::decays_geometric);
  CHECK(classify_decay(named_frequency("phi"), s13, 10, 120).classification == DecayClass::non_decaying);
}

TEST_CASE("nearest integers of alpha h_k follow the recurrence") {
  auto nar = generate_recurrent(narayana_spec(), 80);
  auto ni = nearest_integer_sequence(named_frequency("alpha3"), nar);
  REQUIRE(ni.residual_recurrence_index);
  CHECK(*ni.residual_recurrence_index < 20);
}

TEST_CASE("coefficient recovery in the cubic basis") {
  auto nar = generate_recurrent(narayana_spec(), 120);
  auto beta = parse_frequency("2+3*alpha3+-1*alpha3*alpha3");
  auto rec = recover_coefficients(beta, hofstadter_alpha(3), nar, 20, 120);
  REQUIRE(rec.accepted);
  CHECK(rec.coefficients == std::vector<BigInt>{2, 3, -1});
  auto bad = recover_coefficients(named_frequency("sqrt2"), hofstadter_alpha(3), nar, 20, 120);
  CHECK_FALSE(bad.accepted);
}

TEST_CASE("decay multiplier") {
  auto nar = generate_recurrent(narayana_spec(), 120);
  auto m = find_decay_multiplier(parse_frequency("1/3*alpha3"), nar, 10, 120, 8);
  REQUIRE(m);
  CHECK(*m == 3);
  CHECK_FALSE(find_decay_multiplier(named_frequency("sqrt2"), nar, 10, 120, 4));
}
