#pragma once

#include <algorithm>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "modsig/seqcore.hpp"

namespace modsig {

struct Digit {
  std::size_t index;  // 0 only after a right shift (virtual a_0 = a_1)
  std::uint64_t multiplicity;
  friend bool operator==(const Digit&, const Digit&) = default;
};

template <class Int>
struct BasicGreedyRepresentation {
  std::vector<Digit> digits;  // indices strictly decreasing
  Int value{};
};

using GreedyRepresentation = BasicGreedyRepresentation<BigInt>;

// Greedy codec over a span holding a_1, a_2, ... (base[0] = a_1 = 1).
// Int is std::uint64_t or BigInt.
template <class Int>
BasicGreedyRepresentation<Int> encode_greedy(const Int& n, std::span<const Int> base) {
  if (base.empty() || base.front() != 1) throw std::invalid_argument("numeration base must start with a_1 = 1");
  if (n < 1) throw std::invalid_argument("greedy encoding needs n >= 1");
  if (!(n < base.back())) throw RangeError("numeration base not materialized past the encoded value");
  BasicGreedyRepresentation<Int> rep;
  rep.value = n;
  Int rest = n;
  auto end = base.end();
  while (rest != 0) {
    auto it = std::upper_bound(base.begin(), end, rest);
    --it;  // a_1 = 1 <= rest
    Int q = rest / *it;
    rest -= q * *it;
    rep.digits.push_back({static_cast<std::size_t>(it - base.begin()) + 1, static_cast<std::uint64_t>(q)});
    end = it;
  }
  return rep;
}

template <class Int>
Int decode_digits(std::span<const Digit> digits, std::span<const Int> base) {
  Int v = 0;
  for (const auto& d : digits) {
    std::size_t k = d.index == 0 ? 1 : d.index;
    if (k > base.size()) throw RangeError("digit index outside materialized base");
    v += Int(d.multiplicity) * base[k - 1];
  }
  return v;
}

// A numeration base with cached big-integer and machine-word views.
class NumerationBase {
 public:
  NumerationBase() = default;
  explicit NumerationBase(SequenceTable table, bool gap3 = false);

  const SequenceTable& table() const { return table_; }
  const std::string& name() const { return table_.label(); }
  bool gap3() const { return gap3_; }
  std::size_t size() const { return big_.size(); }
  std::span<const BigInt> terms() const { return big_; }
  // Leading terms that fit in 63 bits.
  std::span<const std::uint64_t> words() const { return words_; }

 private:
  SequenceTable table_;
  bool gap3_ = false;
  std::vector<BigInt> big_;
  std::vector<std::uint64_t> words_;
};

GreedyRepresentation encode_greedy(const BigInt& n, const NumerationBase& base);
BigInt decode(const GreedyRepresentation& rep, const NumerationBase& base);
GreedyRepresentation right_shift(const GreedyRepresentation& rep, const NumerationBase& base);
std::uint64_t digit_sum(const BigInt& n, const NumerationBase& base);

// Digit list only (no value) for machine-sized n; the hot path of bulk work.
void encode_digits_u64(std::uint64_t n, const NumerationBase& base, std::vector<Digit>& out);

struct SignatureProfile {
  std::size_t L = 0;
  BigRational growth_r;  // min a_{n+1}/a_n on the range
  BigRational growth_s;  // max a_{n+1}/a_n on the range
  std::size_t first = 0, last = 0;
};

// Greedy self-expansion of every a_n, n in [first, last], must stay within
// a_{n-1}..a_{n-L} for some L <= lookback_cap; ratios must stay in (1, growth_cap].
SignatureProfile verify_signature(const NumerationBase& base, std::size_t first, std::size_t last,
                                  std::size_t lookback_cap = 12, std::int64_t growth_cap = 16);

struct ReplacementMap {
  std::string name;
  NumerationBase source;
  SequenceTable target;  // b_1, b_2, ...; b_0 = b_1 would be used for index 0
};

BigInt replace(const BigInt& n, const ReplacementMap& map);
// A(0..count-1) for maps whose targets fit machine words; A(0) = 0.
std::vector<std::int64_t> replace_range(const ReplacementMap& map, std::uint64_t count);
void write_replacement_csv(std::ostream& out, const ReplacementMap& map, std::uint64_t count);

// b_i = a_{i-1}, b_1 = 1: A(n) is the right shift of n.
ReplacementMap make_shift_map(const NumerationBase& source);

// Named bases and maps. Base kinds: recurrence (spec name), gen_narayana (d),
// power (b). Target kinds: shift, base (another base's terms), factorial, ones.
class Registry {
 public:
  explicit Registry(nlohmann::ordered_json doc);
  static Registry builtin();
  static Registry load(const std::string& path);

  std::vector<std::string> base_names() const;
  std::vector<std::string> map_names() const;
  bool has_base(const std::string& name) const;
  bool has_map(const std::string& name) const;
  const nlohmann::ordered_json& document() const { return doc_; }

  // Materialized so that every value <= limit is encodable.
  NumerationBase base(const std::string& name, const BigInt& limit) const;
  ReplacementMap map(const std::string& name, const BigInt& limit) const;

 private:
  nlohmann::ordered_json doc_;
};

extern const char* const kBuiltinRegistryJson;

}  // namespace modsig
