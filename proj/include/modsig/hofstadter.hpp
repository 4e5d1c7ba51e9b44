#pragma once

#include <cstdint>
#include <vector>

#include "modsig/numeration.hpp"

namespace modsig {

// H(n) = n - H^{(d)}(n-1), H(0) = 0. values()[n] = H(n) for 0 <= n <= upto.
class HofstadterTable {
 public:
  HofstadterTable() = default;
  HofstadterTable(int depth, std::vector<std::uint32_t> values) : depth_(depth), values_(std::move(values)) {}

  int depth() const { return depth_; }
  std::size_t upto() const { return values_.empty() ? 0 : values_.size() - 1; }
  std::uint32_t operator()(std::size_t n) const { return values_[n]; }
  const std::vector<std::uint32_t>& values() const { return values_; }
  // H(0), ..., H(count-1): the stream fed to Weyl sums and histograms.
  std::span<const std::uint32_t> head(std::size_t count) const;
  SequenceTable to_table() const;  // 1-indexed H(1..upto)

 private:
  int depth_ = 0;
  std::vector<std::uint32_t> values_;
};

HofstadterTable eval_direct(int d, std::size_t upto);
// Right shift in the generalized Narayana base for depth d.
HofstadterTable eval_shift(int d, std::size_t upto);

NumerationBase hofstadter_base(int d, std::uint64_t limit);

// max_n |H(n) - alpha n| with alpha the real root of x^d + x - 1.
double linear_envelope_deviation(const HofstadterTable& h, double alpha);
// Largest preimage count #{n <= upto : H(n) = m} over m.
std::size_t max_preimage_multiplicity(const HofstadterTable& h);

}  // namespace modsig
