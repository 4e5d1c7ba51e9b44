#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "modsig/numeration.hpp"
#include "modsig/precision.hpp"

namespace modsig {

// Fraction of a turn in units of 2^-128.
using Phase = unsigned __int128;

// {beta v} as a 128-bit fixed-point fraction, from an exact integer
// product with a fixed-point image of {beta} carrying value_bits + 128
// fraction bits. Error is below 2^-128 per call.
class PhaseReducer {
 public:
  explicit PhaseReducer(const Frequency& beta, unsigned value_bits = 64);

  Phase operator()(std::uint64_t v) const {
    // Top 128 of the 192 leading fraction bits times v, plus the carry of the next 64.
    return frac128_ * v + ((static_cast<Phase>(frac_next64_) * v) >> 64);
  }
  Phase operator()(std::int64_t v) const {
    return v >= 0 ? (*this)(static_cast<std::uint64_t>(v)) : Phase(0) - (*this)(static_cast<std::uint64_t>(-(v + 1)) + 1);
  }
  Phase operator()(std::uint32_t v) const { return (*this)(static_cast<std::uint64_t>(v)); }
  Phase operator()(const BigInt& v) const;

  const Frequency& frequency() const { return beta_; }

 private:
  Frequency beta_;
  unsigned fraction_bits_;
  BigInt frac_big_;  // floor({beta} 2^fraction_bits_)
  Phase frac128_;    // top 128 bits of the same
  std::uint64_t frac_next64_;
};

// e(t) for a fixed-point phase.
std::complex<double> unit(Phase p);
double to_turns(Phase p);  // in [0, 1)
std::size_t bin_of(Phase p, std::size_t bins);

struct WeylCheckpoint {
  std::size_t n;
  std::complex<double> value;
};

struct WeylSeries {
  std::string frequency_label;
  std::string sequence_label;
  std::vector<WeylCheckpoint> checkpoints;
  std::size_t final_n = 0;
};

// 1, 2, 4, ... up to n, plus n itself.
std::vector<std::size_t> geometric_checkpoints(std::size_t n);

// x_N = (1/N) sum_{i<N} e(beta v_i) at each checkpoint. Segments are summed
// independently (in parallel when workers > 1) and combined in a fixed
// order with compensated summation, so results do not depend on workers.
template <class Int>
WeylSeries weyl_direct(std::span<const Int> values, const Frequency& beta, std::span<const std::size_t> checkpoints,
                       unsigned workers = 1);
WeylSeries weyl_direct_phases(std::span<const Phase> phases, std::span<const std::size_t> checkpoints,
                              unsigned workers = 1);

// x_{a_k} for k = 1..upto_index from S(a_k) = S(a_{k-1}) + e(beta b_{k-1}) S(a_k - a_{k-1}).
std::vector<WeylCheckpoint> weyl_recurrence(const ReplacementMap& map, const Frequency& beta, std::size_t upto_index);
// x_n for arbitrary n via the same unravelling.
std::complex<double> weyl_recurrence_at(const ReplacementMap& map, const Frequency& beta, const BigInt& n);

// {beta A(n)} for n = 0..count-1 without materializing A(n).
std::vector<Phase> replacement_phases(const ReplacementMap& map, const Frequency& beta, std::uint64_t count);
template <class Int>
std::vector<Phase> phases_of(std::span<const Int> values, const Frequency& beta);

struct FourierSpectrum {
  std::size_t grid_size = 0;
  std::size_t term_count = 0;
  std::size_t value_span = 0;  // largest value + 1
  bool truncated = false;
  std::string source_label;
  std::vector<double> magnitudes;  // |f(j/M)| / T
};

struct SpectralPeak {
  std::size_t grid_index;
  double frequency;
  double magnitude;
};

constexpr std::size_t kMaxFftGrid = std::size_t{1} << 26;

// Multiplicity vector of the first T values, then one FFT. M = 0 selects the
// next power of two above the largest value. Values must be >= 0.
FourierSpectrum fft_scan(std::span<const std::int64_t> values, std::size_t T, std::size_t M = 0,
                         std::string label = {});
// Local maxima in the upper half of the grid (magnitudes are symmetric), largest
// first, excluding the DC lobe ||x|| < 64 / value_span.
std::vector<SpectralPeak> top_peaks(const FourierSpectrum& s, std::size_t k);

struct CircleHistogram {
  std::size_t bins = 0;
  std::vector<std::uint64_t> counts;
  std::uint64_t total = 0;
  std::string frequency_label;
  std::string sequence_label;

  double density(std::size_t b) const {
    return static_cast<double>(counts[b]) * static_cast<double>(bins) / static_cast<double>(total);
  }
  double max_deviation() const;  // max_b |density - 1|
};

template <class Int>
CircleHistogram histogram(std::span<const Int> values, const Frequency& beta, std::size_t bins, unsigned workers = 1);
CircleHistogram histogram_phases(std::span<const Phase> phases, std::size_t bins, unsigned workers = 1);

// mu_N(d) for d = 1..d_max (index d-1) in one pass.
template <class Int>
std::vector<std::complex<double>> fourier_coeffs(std::span<const Int> values, const Frequency& beta, std::size_t d_max,
                                                 unsigned workers = 1);
std::vector<std::complex<double>> fourier_coeffs_phases(std::span<const Phase> phases, std::size_t d_max,
                                                        unsigned workers = 1);

nlohmann::ordered_json to_json(const WeylSeries& w);
void write_csv(std::ostream& out, const CircleHistogram& h);
void write_csv(std::ostream& out, const FourierSpectrum& s);

}  // namespace modsig
