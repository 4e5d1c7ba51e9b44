#include <doctest.h>

#include <fstream>
#include <sstream>

#include "modsig/hofstadter.hpp"
#include "modsig/numeration.hpp"

using namespace modsig;

TEST_CASE("greedy representation of 16 in the narayana base") {
  auto base = hofstadter_base(3, 100);
  auto rep = encode_greedy(BigInt(16), base);
  REQUIRE(rep.digits.size() == 2);
  // 16 = 13 + 3
  CHECK(base.terms()[rep.digits[0].index - 1] + base.terms()[rep.digits[1].index - 1] == 16);
  CHECK(decode(rep, base) == 16);
  CHECK(decode(right_shift(rep, base), base) == 11);
}

TEST_CASE("greedy digits round trip and respect the gap") {
  auto base = hofstadter_base(3, 5000);
  std::vector<Digit> d;
  for (std::uint64_t n = 1; n < 3000; ++n) {
    auto rep = encode_greedy(BigInt(n), base);
    CHECK(decode(rep, base) == n);
    for (std::size_t i = 1; i < rep.digits.size(); ++i)
      CHECK(rep.digits[i - 1].index >= rep.digits[i].index + 3);
    encode_digits_u64(n, base, d);
    CHECK(d.size() == rep.digits.size());
  }
  CHECK_THROWS_AS(encode_greedy(base.terms().back(), base), RangeError);
}

TEST_CASE("binary to ternary replacement") {
  auto map = Registry::builtin().map("binary_ternary", BigInt(100));
  CHECK(replace(BigInt(5), map) == 10);  // 101b -> 9 + 1
  CHECK(replace(BigInt(0), map) == 0);
  auto r = replace_range(map, 8);
  CHECK(r == std::vector<std::int64_t>{0, 1, 3, 4, 9, 10, 12, 13});
}

TEST_CASE("digit sums") {
  auto reg = Registry::builtin();
  auto fib = reg.base("fibonacci", BigInt(1000));
  CHECK(digit_sum(BigInt(12), fib) == 3);  // 8 + 3 + 1
  auto m = reg.map("fibonacci_digit_sum", BigInt(100));
  CHECK(replace(BigInt(12), m) == 3);
}

TEST_CASE("signature of the narayana base") {
  auto base = hofstadter_base(3, 1000000);
  auto prof = verify_signature(base, 2, base.size());
  CHECK(prof.L <= 3);
  CHECK(prof.growth_s <= 2);
  CHECK(prof.growth_r > 1);
}

TEST_CASE("signature failure is reported with an index") {
  std::vector<BigInt> t{1, 2, 3, 100, 101};
  NumerationBase b(SequenceTable({GeneratorKind::custom, 0, "gappy"}, t));
  CHECK_THROWS_AS(verify_signature(b, 1, 5), SignatureError);
}

TEST_CASE("shift map equals the hofstadter closed form") {
  auto base = hofstadter_base(3, 10000);
  auto map = make_shift_map(base);
  auto h = eval_direct(3, 5000);
  auto a = replace_range(map, 5001);
  for (std::size_t n = 0; n <= 5000; ++n) CHECK(a[n] == h(n));
}

TEST_CASE("builtin registry matches configs/registry.json") {
  std::ifstream in(MODSIG_SOURCE_DIR "/configs/registry.json");
  REQUIRE(in);
  auto disk = nlohmann::ordered_json::parse(in);
  CHECK(disk == Registry::builtin().document());
  auto reg = Registry::builtin();
  for (const auto& name : reg.map_names()) CHECK_NOTHROW(reg.map(name, BigInt(1000)));
  CHECK_FALSE(reg.has_map("nope"));
  CHECK_THROWS(Registry(nlohmann::ordered_json::parse(R"({"bases":{},"maps":{"m":{"source":"x","target":{"kind":"shift"}}}})")));
}
