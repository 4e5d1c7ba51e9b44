#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "modsig/core.hpp"

namespace modsig {

// a_n = c_1 a_{n-1} + ... + c_L a_{n-L}, with a_1..a_L given.
struct RecurrenceSpec {
  std::string name;
  std::vector<BigInt> coefficients;
  std::vector<BigInt> initial_terms;

  std::size_t order() const { return coefficients.size(); }
  void validate() const;
  // Ascending coefficients of x^L - c_1 x^{L-1} - ... - c_L.
  std::vector<BigInt> characteristic_polynomial() const;
};

RecurrenceSpec narayana_spec();
RecurrenceSpec fibonacci_spec();
// a_i = i for i <= d, a_i = a_{i-1} + a_{i-d}. d = 1 gives powers of two.
RecurrenceSpec generalized_narayana_spec(int d);
RecurrenceSpec power_spec(std::int64_t b);
RecurrenceSpec sqrt13_example_spec();
RecurrenceSpec sqrt6_example_spec();

enum class GeneratorKind { recurrence, ulam, factorial_sum, power_base, naturals, hofstadter, custom };

struct GeneratorTag {
  GeneratorKind kind = GeneratorKind::custom;
  std::int64_t parameter = 0;
  std::string label;
};

std::string to_string(GeneratorKind kind);

// Immutable 1-indexed prefix of an integer sequence. Terms are held as
// machine words when they all fit, otherwise as big integers.
class SequenceTable {
 public:
  SequenceTable() = default;
  SequenceTable(GeneratorTag tag, std::vector<BigInt> terms, std::optional<RecurrenceSpec> spec = std::nullopt);
  SequenceTable(GeneratorTag tag, std::vector<std::int64_t> terms);

  const GeneratorTag& tag() const { return tag_; }
  const std::optional<RecurrenceSpec>& spec() const { return spec_; }
  const std::string& label() const { return tag_.label; }

  std::size_t size() const;
  bool empty() const { return size() == 0; }
  BigInt term(std::size_t i) const;  // 1-indexed
  BigInt back() const { return term(size()); }

  bool is_machine() const { return std::holds_alternative<std::vector<std::int64_t>>(terms_); }
  std::span<const std::int64_t> machine() const;
  std::vector<BigInt> big() const;

  bool strictly_increasing() const;
  // Number of leading terms <= limit (terms assumed sorted).
  std::size_t count_at_most(const BigInt& limit) const;
  SequenceTable prefix(std::size_t count) const;

 private:
  GeneratorTag tag_;
  std::optional<RecurrenceSpec> spec_;
  std::variant<std::vector<std::int64_t>, std::vector<BigInt>> terms_;
};

SequenceTable generate_recurrent(const RecurrenceSpec& spec, std::size_t count);
// Shortest prefix (at least `min_count` terms) whose last term exceeds `limit`.
SequenceTable generate_recurrent_past(const RecurrenceSpec& spec, const BigInt& limit, std::size_t min_count = 0);
SequenceTable generate_ulam(std::size_t count);
SequenceTable generate_factorial_sums(std::size_t count);
SequenceTable generate_powers(std::int64_t b, std::size_t count);
// a_i = i - 1, so the values are 0, 1, 2, ...
SequenceTable generate_naturals(std::size_t count);

// First index > order whose recurrence residual is nonzero, or nullopt.
std::optional<std::size_t> recurrence_violation(const SequenceTable& table);

// "index,value" with a header row.
void write_csv(std::ostream& out, const SequenceTable& table);

// Binary cache: "MODSIGSQ", u32 version, generator tag, optional
// recurrence spec, u64 count, then per term a sign byte, u32 byte length
// and little-endian magnitude bytes.
void write_cache(std::ostream& out, const SequenceTable& table);
SequenceTable read_cache(std::istream& in);

}  // namespace modsig
