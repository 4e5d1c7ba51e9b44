#include <doctest.h>

#include <cmath>
#include <numeric>

#include "modsig/hofstadter.hpp"
#include "modsig/weyl.hpp"

using namespace modsig;

TEST_CASE("phase reduction against exact rationals") {
  PhaseReducer r(parse_frequency("rat:3/7"));
  for (std::uint64_t v : {1ull, 2ull, 1000000000007ull, 9000000000000000001ull}) {
    // {3v/7} computed exactly in integers
    double want = static_cast<double>((3 * (v % 7)) % 7) / 7.0;
    CHECK(to_turns(r(v)) == doctest::Approx(want).epsilon(1e-15));
  }
  CHECK(to_turns(r(std::int64_t{-1})) == doctest::Approx(4.0 / 7));
}

TEST_CASE("phase reduction of large integers") {
  auto alpha = named_frequency("alpha3");
  PhaseReducer r(alpha, 200);
  BigInt v = BigInt(1) << 180;
  v += 12345;
  auto ref = (alpha.approx(512) * v).frac_distance().to_double();
  double t = to_turns(r(v));
  CHECK(std::min(t, 1 - t) == doctest::Approx(ref).epsilon(1e-12));
}

TEST_CASE("bins and units") {
  CHECK(bin_of(Phase(0), 8) == 0);
  CHECK(bin_of(Phase(1) << 127, 8) == 4);
  auto u = unit(Phase(1) << 126);  // a quarter turn
  CHECK(std::abs(u - std::complex<double>(0, 1)) < 1e-15);
  auto cps = geometric_checkpoints(10);
  CHECK(cps == std::vector<std::size_t>{1, 2, 4, 8, 10});
}

TEST_CASE("weyl sums do not depend on the worker count") {
  auto h = eval_direct(3, 300000);
  auto alpha = named_frequency("alpha3");
  auto cps = geometric_checkpoints(300000);
  auto a = weyl_direct<std::uint32_t>(h.head(300000), alpha, cps, 1);
  auto b = weyl_direct<std::uint32_t>(h.head(300000), alpha, cps, 4);
  REQUIRE(a.checkpoints.size() == b.checkpoints.size());
  for (std::size_t i = 0; i < a.checkpoints.size(); ++i) CHECK(a.checkpoints[i].value == b.checkpoints[i].value);
  auto ha = histogram<std::uint32_t>(h.head(300000), alpha, 128, 1);
  auto hb = histogram<std::uint32_t>(h.head(300000), alpha, 128, 3);
  CHECK(ha.counts == hb.counts);
  CHECK(ha.total == 300000);
  auto fa = fourier_coeffs<std::uint32_t>(h.head(300000), alpha, 5, 1);
  CHECK(std::abs(fa[0] - a.checkpoints.back().value) < 1e-12);
}

TEST_CASE("recurrence unravelling matches direct sums") {
  auto alpha = named_frequency("alpha3");
  auto map = make_shift_map(hofstadter_base(3, 400000));
  auto h = eval_direct(3, 300000);
  for (std::uint64_t n : {1ull, 7ull, 1000ull, 123457ull, 300000ull}) {
    std::size_t cp[] = {static_cast<std::size_t>(n)};
    auto direct = weyl_direct<std::uint32_t>(h.head(n), alpha, cp);
    CHECK(std::abs(weyl_recurrence_at(map, alpha, BigInt(n)) - direct.checkpoints[0].value) < 1e-10);
  }
}

TEST_CASE("fft peak of the depth 3 sequence sits at alpha") {
  auto h = eval_direct(3, 1 << 18);
  std::vector<std::int64_t> v(h.values().begin(), h.values().end());
  auto s = fft_scan(v, v.size());
  auto peaks = top_peaks(s, 3);
  REQUIRE(!peaks.empty());
  CHECK(peaks[0].frequency == doctest::Approx(0.6823278).epsilon(1e-4));

  std::vector<std::int64_t> id(50000);
  std::iota(id.begin(), id.end(), 0);
  auto si = fft_scan(id, id.size(), 1 << 16);
  auto pi = top_peaks(si, 1);
  REQUIRE(!pi.empty());
  CHECK(pi[0].magnitude < 0.01);
  CHECK_THROWS(fft_scan(std::vector<std::int64_t>{-1, 2}, 2));
}
