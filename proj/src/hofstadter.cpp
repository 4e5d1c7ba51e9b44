#include "modsig/hofstadter.hpp"

#include <cmath>
#include <limits>

namespace modsig {

std::span<const std::uint32_t> HofstadterTable::head(std::size_t count) const {
  if (count > values_.size()) throw RangeError("Hofstadter table holds only " + std::to_string(values_.size()) + " values");
  return std::span<const std::uint32_t>(values_).first(count);
}

SequenceTable HofstadterTable::to_table() const {
  std::vector<std::int64_t> v(values_.begin() + (values_.empty() ? 0 : 1), values_.end());
  return SequenceTable({GeneratorKind::hofstadter, depth_, "hofstadter_" + std::to_string(depth_)}, std::move(v));
}

HofstadterTable eval_direct(int d, std::size_t upto) {
  if (d < 1) throw std::invalid_argument("depth must be >= 1");
  if (upto >= std::numeric_limits<std::uint32_t>::max()) throw std::invalid_argument("upto exceeds 32-bit table");
  std::vector<std::uint32_t> h(upto + 1);
  h[0] = 0;
  for (std::size_t n = 1; n <= upto; ++n) {
    std::uint32_t x = static_cast<std::uint32_t>(n - 1);
    for (int k = 0; k < d; ++k) {
      // Composition only reads already computed entries.
      if (x >= n) throw std::logic_error("Hofstadter recursion left the computed range at n=" + std::to_string(n));
      x = h[x];
    }
    h[n] = static_cast<std::uint32_t>(n - x);
    if (h[n] < 1 || h[n] > n || h[n] < h[n - 1])
      throw std::logic_error("Hofstadter invariant 1 <= H(n) <= n, nondecreasing failed at n=" + std::to_string(n));
  }
  return HofstadterTable(d, std::move(h));
}

NumerationBase hofstadter_base(int d, std::uint64_t limit) {
  auto t = generate_recurrent_past(generalized_narayana_spec(d), BigInt(limit));
  return NumerationBase(std::move(t), d == 3);
}

HofstadterTable eval_shift(int d, std::size_t upto) {
  auto base = hofstadter_base(d, upto);
  auto w = base.words();
  std::vector<std::uint32_t> h(upto + 1);
  std::vector<Digit> digits;
  for (std::size_t n = 1; n <= upto; ++n) {
    encode_digits_u64(n, base, digits);
    std::uint64_t v = 0;
    for (const auto& dg : digits) v += dg.multiplicity * (dg.index == 1 ? 1 : w[dg.index - 2]);
    h[n] = static_cast<std::uint32_t>(v);
  }
  return HofstadterTable(d, std::move(h));
}

double linear_envelope_deviation(const HofstadterTable& h, double alpha) {
  double worst = 0;
  for (std::size_t n = 0; n <= h.upto(); ++n)
    worst = std::max(worst, std::abs(static_cast<double>(h(n)) - alpha * static_cast<double>(n)));
  return worst;
}

std::size_t max_preimage_multiplicity(const HofstadterTable& h) {
  std::size_t best = 0, run = 0;
  for (std::size_t n = 1; n <= h.upto(); ++n) {
    run = (n > 1 && h(n) == h(n - 1)) ? run + 1 : 1;
    best = std::max(best, run);
  }
  return best;
}

}  // namespace modsig
