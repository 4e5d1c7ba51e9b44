#pragma once

#include <complex>
#include <string>
#include <vector>

#include <json.hpp>

#include "modsig/precision.hpp"
#include "modsig/seqcore.hpp"

namespace modsig {

// Integer polynomial, coefficients in ascending order.
struct PolynomialSpec {
  std::vector<BigInt> coefficients;

  int degree() const { return static_cast<int>(coefficients.size()) - 1; }
  const BigInt& leading() const { return coefficients.back(); }
  bool is_monic() const { return !coefficients.empty() && coefficients.back() == 1; }
  std::string to_string() const;
  friend bool operator==(const PolynomialSpec&, const PolynomialSpec&) = default;
};

PolynomialSpec make_polynomial(std::vector<BigInt> ascending);  // strips leading zeros
PolynomialSpec trinomial(int d);         // x^d - x^(d-1) - 1
PolynomialSpec alpha_polynomial(int d);  // x^d + x - 1
PolynomialSpec characteristic_polynomial(const RecurrenceSpec& spec);
// "trinomial:D", "alpha:D", "cyclotomic:M", or ascending "c0,c1,...,cn".
PolynomialSpec parse_polynomial(const std::string& text);

PolynomialSpec derivative(const PolynomialSpec& p);
// Primitive gcd with positive leading coefficient.
PolynomialSpec gcd(const PolynomialSpec& a, const PolynomialSpec& b);
// Exact quotient; throws std::domain_error when b does not divide a.
PolynomialSpec exact_divide(const PolynomialSpec& a, const PolynomialSpec& b);
bool divides(const PolynomialSpec& b, const PolynomialSpec& a);
PolynomialSpec cyclotomic(int m);

struct SquarefreeFactor {
  PolynomialSpec factor;
  int multiplicity;
};
// Yun's algorithm; the product of factor^multiplicity equals p up to a constant.
std::vector<SquarefreeFactor> squarefree_decomposition(const PolynomialSpec& p);

enum class UnitLocation { inside, outside, on_circle, ambiguous };
std::string to_string(UnitLocation u);

struct RootEnclosure {
  std::complex<double> center;
  std::string center_re, center_im;  // decimal, full working precision
  double radius = 0;                 // rounded up
  int multiplicity = 1;
  UnitLocation location = UnitLocation::ambiguous;
  bool real = false;                 // certified by an exact sign change
  int cyclotomic_order = 0;          // m when the root is a certified root of Phi_m
};

struct RootSet {
  PolynomialSpec polynomial;
  std::vector<RootEnclosure> roots;
  int count_outside_unit = 0;
  int count_on_unit = 0;  // exact roots of unity
  int count_on_unit_ambiguous = 0;
  long precision_bits = 0;
};

// Aberth iteration, then disk-inclusion radii r_i = n |p(z_i)| / |lc prod (z_i - z_j)|
// on each squarefree factor. Cyclotomic factors are split off exactly first.
// Escalates precision up to max_bits while enclosures overlap each other or
// the unit circle; throws CertificationError if overlaps remain.
RootSet isolate_roots(const PolynomialSpec& p, long bits = 128, long max_bits = 4096);
int count_outside_unit(const PolynomialSpec& p);
// Exactly one root outside the closed unit disk, real and > 1; all other roots
// strictly inside once cyclotomic factors (not conjugates of that root) are removed.
bool is_pisot(const PolynomialSpec& p);
// |prod of centers - (-1)^n c0 / lc| and the enclosure bound that should contain it.
std::pair<double, double> vieta_check(const RootSet& r);

// |alpha_d rho_d - 1| upper bound where alpha_d is the root of x^d + x - 1 in (0,1)
// and rho_d the root of x^d - x^(d-1) - 1 in (1,2).
double reciprocal_root_gap(int d, long bits = 160);

struct ComplexEnclosure {
  std::complex<double> center;
  std::string re, im;
  double radius = 0;
};

enum class ClosedFormOrientation { powers, inverse_powers };

// a_n = sum c_i rho_i^n over roots of the characteristic polynomial (powers), or
// a_n = sum c_i alpha_i^-n with alpha_i = 1 / rho_i (inverse_powers).
struct ClosedFormDecomposition {
  RootSet roots;
  std::vector<ComplexEnclosure> bases;  // rho_i, or alpha_i for inverse_powers
  std::vector<ComplexEnclosure> coefficients;
  ClosedFormOrientation orientation = ClosedFormOrientation::powers;
  std::size_t validated_through = 0;  // reconstruction < 2^-32 for n <= this
  double max_residual = 0;
  long precision_bits = 0;
};

ClosedFormDecomposition closed_form(const SequenceTable& seq, ClosedFormOrientation orientation =
                                                                  ClosedFormOrientation::powers);

nlohmann::ordered_json to_json(const RootSet& r);
nlohmann::ordered_json to_json(const ClosedFormDecomposition& c);

}  // namespace modsig
