#include <doctest.h>

#include <sstream>

#include "modsig/seqcore.hpp"

using namespace modsig;

TEST_CASE("narayana and fibonacci prefixes") {
  auto n = generate_recurrent(narayana_spec(), 12);
  const std::int64_t want[] = {1, 2, 3, 4, 6, 9, 13, 19, 28, 41, 60, 88};
  REQUIRE(n.size() == 12);
  for (std::size_t i = 0; i < 12; ++i) CHECK(n.term(i + 1) == want[i]);
  auto f = generate_recurrent(fibonacci_spec(), 6);
  CHECK(f.term(6) == 13);
  CHECK_FALSE(recurrence_violation(n));
}

TEST_CASE("generalized narayana: d = 1 is binary, d = 2 is fibonacci") {
  auto b = generate_recurrent(generalized_narayana_spec(1), 10);
  for (std::size_t i = 1; i <= 10; ++i) CHECK(b.term(i) == BigInt(1) << (i - 1));
  auto g = generate_recurrent(generalized_narayana_spec(2), 10);
  auto f = generate_recurrent(fibonacci_spec(), 10);
  for (std::size_t i = 1; i <= 10; ++i) CHECK(g.term(i) == f.term(i));
}

TEST_CASE("ulam prefix") {
  auto u = generate_ulam(12);
  const std::int64_t want[] = {1, 2, 3, 4, 6, 8, 11, 13, 16, 18, 26, 28};
  for (std::size_t i = 0; i < 12; ++i) CHECK(u.term(i + 1) == want[i]);
  CHECK(u.strictly_increasing());
}

TEST_CASE("factorial sums follow the binary digits") {
  auto f = generate_factorial_sums(8);
  // f_n = sum over set bits i of n of (i+1)!
  const std::int64_t want[] = {1, 2, 3, 6, 7, 8, 9, 24};
  for (std::size_t i = 0; i < 8; ++i) CHECK(f.term(i + 1) == want[i]);
}

TEST_CASE("tables switch to big integers when terms overflow") {
  auto small = generate_recurrent(narayana_spec(), 50);
  CHECK(small.is_machine());
  auto big = generate_recurrent(narayana_spec(), 400);
  CHECK_FALSE(big.is_machine());
  CHECK(big.term(50) == small.term(50));
  CHECK_THROWS_AS(big.term(0), RangeError);
  CHECK_THROWS_AS(big.term(401), RangeError);
  CHECK(big.count_at_most(BigInt(60)) == 11);
}

TEST_CASE("recurrence violations are located") {
  auto t = generate_recurrent(narayana_spec(), 20).big();
  t[14] += 1;
  SequenceTable bad({GeneratorKind::custom, 0, "bad"}, t, narayana_spec());
  auto v = recurrence_violation(bad);
  REQUIRE(v);
  CHECK(*v == 15);
}

TEST_CASE("csv and cache round trip") {
  auto t = generate_recurrent(narayana_spec(), 300);
  std::stringstream csv;
  write_csv(csv, t);
  std::string header;
  std::getline(csv, header);
  CHECK(header == "index,value");

  std::stringstream bin;
  write_cache(bin, t);
  auto back = read_cache(bin);
  REQUIRE(back.size() == t.size());
  for (std::size_t i = 1; i <= t.size(); ++i) CHECK(back.term(i) == t.term(i));
  REQUIRE(back.spec());
  CHECK(back.spec()->coefficients == t.spec()->coefficients);
  CHECK(back.label() == t.label());

  std::stringstream junk("not a cache");
  CHECK_THROWS(read_cache(junk));
}

TEST_CASE("spec validation") {
  RecurrenceSpec s{"broken", {1, 1}, {1}};
  CHECK_THROWS(s.validate());
  auto p = narayana_spec().characteristic_polynomial();  // x^3 - x^2 - 1
  CHECK(p == std::vector<BigInt>{-1, 0, -1, 1});
}
