#include <doctest.h>

#include <boost/multiprecision/integer.hpp>

#include "modsig/hofstadter.hpp"

using namespace modsig;

namespace {

// Plain recursion, memoized bottom-up.
std::vector<std::uint32_t> nested(int d, std::size_t upto) {
  std::vector<std::uint32_t> h(upto + 1, 0);
  for (std::size_t n = 1; n <= upto; ++n) {
    std::uint32_t x = static_cast<std::uint32_t>(n - 1);
    for (int i = 0; i < d; ++i) x = h[x];
    h[n] = static_cast<std::uint32_t>(n) - x;
  }
  return h;
}

}  // namespace

TEST_CASE("depth 3 first values") {
  auto h = eval_direct(3, 20);
  const std::uint32_t want[] = {0, 1, 1, 2, 3, 4, 4, 5, 5, 6, 7, 7, 8, 9, 10, 10, 11};
  for (std::size_t n = 0; n <= 16; ++n) CHECK(h(n) == want[n]);
}

TEST_CASE("direct and shift evaluation agree with the plain recursion") {
  for (int d = 1; d <= 7; ++d) {
    auto ref = nested(d, 20000);
    auto a = eval_direct(d, 20000);
    auto b = eval_shift(d, 20000);
    CHECK(a.values() == ref);
    CHECK(b.values() == ref);
  }
}

TEST_CASE("depth 2 is floor((n+1)/phi)") {
  auto g = eval_direct(2, 100000);
  for (std::uint64_t n = 0; n <= 100000; ++n) {
    BigInt m = n + 1;
    BigInt root5 = boost::multiprecision::sqrt(BigInt(5 * m * m));  // floor((n+1) sqrt5)
    BigInt want = (root5 - m) / 2;
    CHECK(g(n) == want);
  }
}

TEST_CASE("preimages and envelope") {
  auto h = eval_direct(3, 200000);
  CHECK(max_preimage_multiplicity(h) == 2);
  CHECK(linear_envelope_deviation(h, 0.6823278038280193) < 2.0);
  CHECK(h.head(5).size() == 5);
  auto t = h.to_table();
  CHECK(t.size() == 200000);
  CHECK(t.term(4) == 3);
}
