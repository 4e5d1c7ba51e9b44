#pragma once

#include <complex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "modsig/hofstadter.hpp"
#include "modsig/weyl.hpp"

namespace modsig {

enum class ProductStatus { converged, divergent_argument, undecided };
std::string to_string(ProductStatus s);

// prod_{n>=1} (1 + e(d beta n!)) / 2 for beta in {1/e, e}.
struct InfiniteProductCoeff {
  int d = 0;
  std::string tag;
  std::vector<std::pair<std::size_t, std::complex<double>>> partial_products;  // at 2^k and N
  std::size_t truncation_N = 0;
  double tail_bound = 0;             // bound on |P_inf - P_N|, see factorial_product_coeff
  double accumulated_argument = 0;   // pi * sum of signed ||d beta n!||
  ProductStatus status = ProductStatus::undecided;
  std::complex<double> value() const { return partial_products.empty() ? 1.0 : partial_products.back().second; }
};

// Each factor is e(s/2) cos(pi s) with s the signed distance of d beta n!
// to the nearest integer. The tail bound adds pi^2/(2N) for the moduli
// (|s_n| <= 1/n) and pi (N+1) |s_{N+1} + s_{N+2}| for the arguments: the
// first omitted pair, extrapolated with pair sums shrinking like 1/n^2.
// Status is converged when tail_bound < tolerance, divergent_argument when
// the argument has passed 4 pi and is still moving over the last doubling.
InfiniteProductCoeff factorial_product_coeff(int d, const std::string& tag, std::size_t truncation,
                                             double tolerance = 1e-2);

struct DecayBoundEntry {
  int d;
  double value;
  double bound;
  bool pass;
};
// |mu(d)| <= 0.98^d for d = 1..d_max; coeffs[d-1] = |mu(d)|.
std::vector<DecayBoundEntry> coeff_decay_bound_check(std::span<const double> coeffs, int d_max);

struct DensityBoundResult {
  double max_density = 0;
  double bound = 0;
  bool pass = false;
};
// Treats values[i] as a_{i+1}. Throws HypothesisError unless a_n <= B n and
// no value repeats more than C times.
DensityBoundResult density_bound_check(const CircleHistogram& hist, std::span<const std::uint32_t> values,
                                       double B_lin, int C_mult);

struct BinRun {
  std::size_t first = 0;  // circular: bins first, first+1, ..., first+length-1 (mod B)
  std::size_t length = 0;
};

struct ValleyHillReport {
  bool decided = false;
  std::string reason;
  BinRun valley, hill;
  double valley_height = 0, hill_height = 0;
  double height_ratio = 0;
  double offset = 0;        // (valley center - hill center) mod 1
  double expected_offset = 0;  // {2 alpha}
  double fit_residual = 0;  // relative to hill height, on the valley run
  std::vector<double> overlay;  // valley_h + hill_h - density(x - {2 alpha}) per bin
};

struct ValleyHillOptions {
  double flat_tolerance = 0.02;
  std::size_t min_run = 0;  // 0 means bins / 64
  double min_contrast = 1.1;
};

ValleyHillReport valley_hill_analysis(const CircleHistogram& hist, const Frequency& alpha,
                                      const ValleyHillOptions& opt = {});
nlohmann::ordered_json to_json(const ValleyHillReport& r);

struct PreimageSplit {
  CircleHistogram total, uniform_part, eta1, eta2;
  std::uint64_t distinct_values = 0;
};
// Splits the stream H(0..N-1) by how often each value is hit. Throws
// HypothesisError if a value is hit more than twice.
PreimageSplit preimage_split_histograms(const Frequency& beta, const HofstadterTable& h, std::size_t N,
                                        std::size_t bins);

// Folds a histogram with m*B bins into m segments of B bins.
std::vector<std::vector<std::uint64_t>> fold_histogram(const CircleHistogram& hist, std::size_t m);
// max over segments and bins of |shape_j(b) / shape(b) - 1|, shapes normalized to mass 1.
double scaled_copies_deviation(const CircleHistogram& scaled, const CircleHistogram& base, std::size_t m);

struct MultisetCheckpoint {
  std::size_t n;    // Narayana index
  std::uint64_t h;  // h_n
  bool equal;
};
// hist{beta H(i): i < h_n} == hist{beta H(i): i < h_{n-1}} + hist{beta (h_{n-2} + H(l)): l < h_{n-3}}
std::vector<MultisetCheckpoint> multiset_histogram_identity(const HofstadterTable& h, const Frequency& beta,
                                                            std::size_t bins, std::uint64_t limit);

struct DecayExponentFit {
  double exponent = 0;
  double stderr_ = 0;
  double ci_low = 0, ci_high = 0;  // 95%
  std::size_t d_lo = 0, d_hi = 0;
};
DecayExponentFit fourier_decay_exponent(std::span<const std::complex<double>> coeffs, std::size_t d_lo,
                                        std::size_t d_hi);

nlohmann::ordered_json to_json(const InfiniteProductCoeff& c);

}  // namespace modsig
