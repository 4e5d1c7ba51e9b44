#include <doctest.h>

#include <cmath>

#include "modsig/limits.hpp"

using namespace modsig;

namespace {

CircleHistogram from_density(const std::vector<double>& dens) {
  CircleHistogram h;
  h.bins = dens.size();
  for (double d : dens) {
    h.counts.push_back(static_cast<std::uint64_t>(std::llround(d * 1000)));
    h.total += h.counts.back();
  }
  return h;
}

double partial_at(const InfiniteProductCoeff& c, std::size_t n) {
  for (const auto& [k, v] : c.partial_products)
    if (k == n) return std::abs(v);
  return -1;
}

}  // namespace

TEST_CASE("factorial products") {
  auto zero = factorial_product_coeff(0, "inv_e", 100);
  CHECK(std::abs(zero.value() - 1.0) < 1e-15);

  // Reference moduli from an independent 60-digit evaluation.
  auto c = factorial_product_coeff(1, "inv_e", 10000);
  CHECK(partial_at(c, 16) == doctest::Approx(0.11147347555109517).epsilon(1e-10));
  CHECK(partial_at(c, 1024) == doctest::Approx(0.08571088292899182).epsilon(1e-10));
  CHECK(std::abs(c.value()) == doctest::Approx(0.08534191797266015).epsilon(1e-10));
  CHECK(c.status == ProductStatus::converged);
  CHECK(c.tail_bound < 1e-2);

  auto e = factorial_product_coeff(1, "e", 4096);
  CHECK(e.status == ProductStatus::divergent_argument);
  CHECK_THROWS(factorial_product_coeff(1, "sqrt2", 10));
}

TEST_CASE("coefficient decay bound") {
  std::vector<double> mu{0.5, 0.97, 0.1};
  auto r = coeff_decay_bound_check(mu, 3);
  CHECK(r[0].pass);
  CHECK_FALSE(r[1].pass);
  CHECK(r[2].bound == doctest::Approx(std::pow(0.98, 3)));
}

TEST_CASE("density bound hypotheses") {
  std::vector<std::uint32_t> vals{0, 1, 1, 2, 3};
  auto h = histogram<std::uint32_t>(vals, named_frequency("alpha3"), 4);
  auto ok = density_bound_check(h, vals, 1.0, 2);
  CHECK(ok.bound == doctest::Approx(8.0));
  std::vector<std::uint32_t> bad{0, 1, 1, 1, 3};
  CHECK_THROWS_AS(density_bound_check(h, bad, 1.0, 2), HypothesisError);
  std::vector<std::uint32_t> steep{0, 9};
  CHECK_THROWS_AS(density_bound_check(h, steep, 1.0, 2), HypothesisError);
}

TEST_CASE("valley and hill on a synthetic profile") {
  std::vector<double> d(512, 1.0);
  for (int b = 100; b < 200; ++b) d[b] = 0.5;
  for (int b = 300; b < 400; ++b) d[b] = 1.5;
  auto r = valley_hill_analysis(from_density(d), named_frequency("alpha3"));
  REQUIRE(r.decided);
  CHECK(r.valley.first == 100);
  CHECK(r.valley.length == 100);
  CHECK(r.hill.first == 300);
  CHECK(r.height_ratio == doctest::Approx(3.0).epsilon(1e-3));
  CHECK(r.offset == doctest::Approx(1.0 - 200.0 / 512).epsilon(1e-9));
  CHECK(r.expected_offset == doctest::Approx(2 * 0.6823278038280193 - 1));

  auto flat = valley_hill_analysis(from_density(std::vector<double>(512, 1.0)), named_frequency("alpha3"));
  CHECK_FALSE(flat.decided);
}

TEST_CASE("folding and scaled copies") {
  CircleHistogram base, scaled;
  base.bins = 4;
  base.counts = {1, 2, 3, 4};
  base.total = 10;
  scaled.bins = 8;
  scaled.counts = {2, 4, 6, 8, 1, 2, 3, 4};
  scaled.total = 30;
  auto f = fold_histogram(scaled, 2);
  REQUIRE(f.size() == 2);
  CHECK(f[1] == std::vector<std::uint64_t>{1, 2, 3, 4});
  CHECK(scaled_copies_deviation(scaled, base, 2) < 1e-12);
  CHECK_THROWS(fold_histogram(scaled, 3));
}

TEST_CASE("preimage split and multiset identity") {
  auto h = eval_direct(3, 200000);
  auto alpha = named_frequency("alpha3");
  auto split = preimage_split_histograms(alpha, h, 100000, 64);
  CHECK(split.total.total == 100000);
  std::uint64_t sum = 0;
  for (std::size_t b = 0; b < 64; ++b) {
    CHECK(split.total.counts[b] == split.uniform_part.counts[b] + split.eta1.counts[b]);
    CHECK(split.uniform_part.counts[b] == split.eta1.counts[b] + split.eta2.counts[b]);
    sum += split.total.counts[b];
  }
  CHECK(sum == 100000);

  auto rows = multiset_histogram_identity(h, alpha, 64, 100000);
  REQUIRE(rows.size() > 10);
  for (const auto& row : rows) CHECK(row.equal);
}

TEST_CASE("power-law fit of coefficient magnitudes") {
  std::vector<std::complex<double>> c;
  for (int d = 1; d <= 200; ++d) c.emplace_back(3.0 * std::pow(d, -1.5), 0);
  auto fit = fourier_decay_exponent(c, 4, 200);
  CHECK(fit.exponent == doctest::Approx(-1.5).epsilon(1e-9));
  CHECK(fit.ci_low <= fit.exponent);
  CHECK(fit.ci_high >= fit.exponent);
}
