#pragma once

#include <compare>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <mpfr.h>

#include <json.hpp>

#include "modsig/seqcore.hpp"

namespace modsig {

// Owning mpfr_t.
class Mpfr {
 public:
  explicit Mpfr(mpfr_prec_t prec = 64) {
    mpfr_init2(v_, prec);
    mpfr_set_zero(v_, 1);
  }
  Mpfr(const Mpfr& o) {
    mpfr_init2(v_, mpfr_get_prec(o.v_));
    mpfr_set(v_, o.v_, MPFR_RNDN);
  }
  Mpfr(Mpfr&& o) noexcept {
    mpfr_init2(v_, MPFR_PREC_MIN);
    mpfr_swap(v_, o.v_);
  }
  Mpfr& operator=(const Mpfr& o) {
    if (this != &o) {
      mpfr_set_prec(v_, mpfr_get_prec(o.v_));
      mpfr_set(v_, o.v_, MPFR_RNDN);
    }
    return *this;
  }
  Mpfr& operator=(Mpfr&& o) noexcept {
    mpfr_swap(v_, o.v_);
    return *this;
  }
  ~Mpfr() { mpfr_clear(v_); }

  mpfr_ptr get() { return v_; }
  mpfr_srcptr get() const { return v_; }
  mpfr_prec_t precision() const { return mpfr_get_prec(v_); }

 private:
  mpfr_t v_;
};

// Midpoint at P bits plus an absolute error radius that is always rounded up.
class ExtReal {
 public:
  ExtReal() : mid_(64), rad_(64) {}
  ExtReal(Mpfr mid, Mpfr rad);

  static ExtReal from_integer(const BigInt& v, mpfr_prec_t prec);
  static ExtReal from_rational(const BigRational& v, mpfr_prec_t prec);
  static ExtReal from_double(double v);  // exact

  mpfr_prec_t precision() const { return mid_.precision(); }
  const Mpfr& mid() const { return mid_; }
  const Mpfr& rad() const { return rad_; }
  double to_double() const;
  double radius_double() const;  // rounded up
  bool is_exact() const { return mpfr_zero_p(rad_.get()); }
  // e with radius < 2^e; INT_MIN for exact values.
  long error_exponent() const;
  std::string to_decimal(int digits = 20) const;
  // log(mid) via significand/exponent split; -inf for zero.
  double log_mid() const;

  bool contains_zero() const;
  // Unordered when the enclosures overlap.
  std::partial_ordering compare(const ExtReal& o) const;
  std::partial_ordering compare(double v) const { return compare(from_double(v)); }

  ExtReal abs() const;
  ExtReal operator-() const;
  // Enclosure of distance to the nearest integer.
  ExtReal frac_distance() const;
  // Nearest integer, or nullopt if the enclosure may straddle a half-integer.
  std::optional<BigInt> nearest_integer() const;

  friend ExtReal operator+(const ExtReal& a, const ExtReal& b);
  friend ExtReal operator-(const ExtReal& a, const ExtReal& b);
  friend ExtReal operator*(const ExtReal& a, const ExtReal& b);
  friend ExtReal operator*(const ExtReal& a, const BigInt& n);

 private:
  Mpfr mid_;
  Mpfr rad_;
};

// Real root of an integer polynomial, given by an isolating interval.
// Approximations are cached; refine() may be called concurrently.
class AlgebraicReal {
 public:
  AlgebraicReal(std::vector<BigInt> poly, BigRational lo, BigRational hi);

  const std::vector<BigInt>& min_poly() const;  // ascending
  int degree() const { return static_cast<int>(min_poly().size()) - 1; }
  std::pair<BigRational, BigRational> isolating_interval() const;
  // Radius <= 2^-bits.
  ExtReal refine(unsigned bits) const;

 private:
  struct State;
  std::shared_ptr<State> state_;
};

// Sign of p at a rational point, exact.
int sign_at(std::span<const BigInt> poly, const BigRational& x);

// Real frequency as an immutable expression tree.
class Frequency {
 public:
  Frequency();  // zero
  static Frequency rational(const BigRational& q);
  static Frequency integer(const BigInt& n) { return rational(BigRational(n)); }
  static Frequency algebraic(AlgebraicReal a, std::string label);
  static Frequency euler();
  static Frequency inverse_euler();
  static Frequency inverse_two_pi();
  // Exact decimal value with a declared radius of 10^-digits.
  static Frequency decimal(std::string_view text, unsigned digits);

  ExtReal approx(unsigned bits) const;
  std::optional<BigRational> as_rational() const;
  // Radius floor the node can never beat (decimals); 0 otherwise.
  bool intrinsically_limited() const;
  const std::string& label() const;
  double to_double() const { return approx(64).to_double(); }

  friend Frequency operator+(const Frequency& a, const Frequency& b);
  friend Frequency operator*(const Frequency& a, const Frequency& b);
  Frequency scaled(const BigRational& q) const { return rational(q) * *this; }

  struct Node;

 private:
  explicit Frequency(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

// alpha2..alpha7 (alpha = alpha3), phi, inv_phi, e, inv_e, sqrt2, sqrt3,
// sqrt5, sqrt6, sqrt13, sqrt13_half, one_plus_sqrt6, inv_two_pi.
Frequency named_frequency(std::string_view tag);
std::vector<std::string> named_frequency_tags();
AlgebraicReal hofstadter_alpha(int d);  // real root of x^d + x - 1

// Grammar: sum of products of factors. Factor: tag | alg:tag | rat:p/q |
// dec:<decimal>:<digits> | root:c0,c1,...@lo:hi | integer | p/q.
Frequency parse_frequency(std::string_view spec);

// Enclosure of ||beta a||, using bits(a) + guard_bits working precision.
ExtReal dist_to_int(const Frequency& beta, const BigInt& a, unsigned guard_bits = 64);

enum class DecayClass { decays_geometric, non_decaying, indeterminate };
std::string to_string(DecayClass c);

struct DecayOptions {
  double slope_threshold = 0.05;  // delta
  double tail_max = 1e-3;         // epsilon
  double spread_level = 0.05;
  double spread_fraction = 0.2;
  unsigned guard_bits = 64;
  unsigned max_extra_bits = 4096;
};

struct DecaySample {
  std::size_t index;
  ExtReal distance;
  bool determinate;
};

struct DecayReport {
  std::string frequency_label;
  std::string sequence_label;
  std::vector<DecaySample> samples;
  DecayClass classification = DecayClass::indeterminate;
  std::optional<double> fitted_rate;  // slope of log ||beta a_k|| per index
  std::optional<double> rate_stderr;
};

// Window [k_first, k_last], 1-indexed. The tail is the second half.
DecayReport classify_decay(const Frequency& beta, const SequenceTable& seq, std::size_t k_first, std::size_t k_last,
                           const DecayOptions& opt = {});
nlohmann::ordered_json to_json(const DecayReport& r);

struct NearestIntegerSequence {
  std::string frequency_label;
  std::vector<BigInt> terms;  // b_1..b_n
  // First index i such that b_i, b_{i+1}, ... satisfies the source recurrence.
  std::optional<std::size_t> residual_recurrence_index;
};

NearestIntegerSequence nearest_integer_sequence(const Frequency& beta, const SequenceTable& seq);

struct CoefficientRecovery {
  bool accepted = false;
  std::vector<BigInt> coefficients;
  std::string reason;
};

// Solves sum_j c_j round(gamma_j a_k) = round(beta a_k) at consecutive large k
// for the basis gamma_j, then asks classify_decay to confirm.
CoefficientRecovery recover_coefficients(const Frequency& beta, std::span<const Frequency> basis,
                                         const SequenceTable& seq, std::size_t k_first, std::size_t k_last);
// Degree-3 form: basis 1, alpha, alpha^2, rows h_k, h_{k-1}, h_{k-2}.
CoefficientRecovery recover_coefficients(const Frequency& beta, const AlgebraicReal& base_alg, const SequenceTable& seq,
                                         std::size_t k_first, std::size_t k_last);

// Smallest d in [1, d_max] with ||d beta a_k|| decaying, if any.
std::optional<int> find_decay_multiplier(const Frequency& beta, const SequenceTable& seq, std::size_t k_first,
                                         std::size_t k_last, int d_max = 64);

}  // namespace modsig
