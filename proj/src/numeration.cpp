#include "modsig/numeration.hpp"

#include <fstream>
#include <ostream>

namespace modsig {

NumerationBase::NumerationBase(SequenceTable table, bool gap3) : table_(std::move(table)), gap3_(gap3) {
  big_ = table_.big();
  if (big_.empty() || big_.front() != 1) throw std::invalid_argument("numeration base " + name() + " must start with 1");
  if (!table_.strictly_increasing()) throw std::invalid_argument("numeration base " + name() + " must be increasing");
  for (const auto& t : big_) {
    if (bit_length(t) > 63) break;
    words_.push_back(t.convert_to<std::uint64_t>());
  }
}

GreedyRepresentation encode_greedy(const BigInt& n, const NumerationBase& base) {
  return encode_greedy<BigInt>(n, base.terms());
}

BigInt decode(const GreedyRepresentation& rep, const NumerationBase& base) {
  return decode_digits<BigInt>(rep.digits, base.terms());
}

GreedyRepresentation right_shift(const GreedyRepresentation& rep, const NumerationBase& base) {
  GreedyRepresentation out;
  out.digits.reserve(rep.digits.size());
  for (const auto& d : rep.digits) {
    if (d.index == 0) throw std::invalid_argument("cannot shift a virtual index-0 digit");
    out.digits.push_back({d.index - 1, d.multiplicity});
  }
  out.value = decode(out, base);
  return out;
}

std::uint64_t digit_sum(const BigInt& n, const NumerationBase& base) {
  std::uint64_t s = 0;
  for (const auto& d : encode_greedy(n, base).digits) s += d.multiplicity;
  return s;
}

void encode_digits_u64(std::uint64_t n, const NumerationBase& base, std::vector<Digit>& out) {
  out.clear();
  auto w = base.words();
  if (n == 0) return;
  if (w.empty() || !(n < w.back())) throw RangeError("numeration base not materialized past " + std::to_string(n));
  auto end = w.end();
  while (n != 0) {
    auto it = std::upper_bound(w.begin(), end, n) - 1;
    std::uint64_t q = n / *it;
    n -= q * *it;
    out.push_back({static_cast<std::size_t>(it - w.begin()) + 1, q});
    end = it;
  }
}

SignatureProfile verify_signature(const NumerationBase& base, std::size_t first, std::size_t last,
                                  std::size_t lookback_cap, std::int64_t growth_cap) {
  auto a = base.terms();
  if (first < 1 || last > a.size() || first > last) throw RangeError("signature range outside materialized base");
  SignatureProfile prof;
  prof.first = first;
  prof.last = last;
  for (std::size_t n = std::max<std::size_t>(first, 2); n <= last; ++n) {
    BigInt rest = a[n - 1];
    std::size_t i = n - 1;  // 1-indexed candidate
    std::size_t lowest = n;
    while (rest != 0) {
      while (a[i - 1] > rest) --i;
      rest -= (rest / a[i - 1]) * a[i - 1];
      lowest = i;
    }
    std::size_t lookback = n - lowest;
    if (lookback > lookback_cap)
      throw SignatureError("greedy self-expansion of a_" + std::to_string(n) + " reaches back " +
                               std::to_string(lookback) + " > cap " + std::to_string(lookback_cap),
                           n);
    prof.L = std::max(prof.L, lookback);
  }
  for (std::size_t n = first; n < last; ++n) {
    BigRational ratio(a[n], a[n - 1]);
    if (ratio <= 1) throw SignatureError("growth ratio <= 1 at index " + std::to_string(n), n);
    if (ratio > growth_cap)
      throw SignatureError("growth ratio above " + std::to_string(growth_cap) + " at index " + std::to_string(n), n);
    if (n == first || ratio < prof.growth_r) prof.growth_r = ratio;
    if (n == first || ratio > prof.growth_s) prof.growth_s = ratio;
  }
  if (prof.L == 0) prof.L = 1;
  return prof;
}

BigInt replace(const BigInt& n, const ReplacementMap& map) {
  if (n == 0) return 0;
  auto rep = encode_greedy(n, map.source);
  BigInt v = 0;
  for (const auto& d : rep.digits) v += BigInt(d.multiplicity) * map.target.term(d.index);
  return v;
}

std::vector<std::int64_t> replace_range(const ReplacementMap& map, std::uint64_t count) {
  if (!map.target.is_machine()) throw RangeError("replacement target " + map.target.label() + " exceeds machine words");
  auto b = map.target.machine();
  std::vector<std::int64_t> out(count);
  std::vector<Digit> digits;
  for (std::uint64_t n = 1; n < count; ++n) {
    encode_digits_u64(n, map.source, digits);
    std::int64_t v = 0;
    for (const auto& d : digits) {
      if (d.index > b.size()) throw RangeError("replacement target too short for " + map.name);
      v += static_cast<std::int64_t>(d.multiplicity) * b[d.index - 1];
    }
    out[n] = v;
  }
  return out;
}

void write_replacement_csv(std::ostream& out, const ReplacementMap& map, std::uint64_t count) {
  out << "n,A(n)\n";
  if (map.target.is_machine()) {
    auto a = replace_range(map, count);
    for (std::uint64_t n = 0; n < count; ++n) out << n << ',' << a[n] << '\n';
    return;
  }
  for (std::uint64_t n = 0; n < count; ++n) out << n << ',' << replace(BigInt(n), map).str() << '\n';
}

ReplacementMap make_shift_map(const NumerationBase& source) {
  auto a = source.terms();
  std::vector<BigInt> b;
  b.reserve(a.size());
  b.push_back(1);
  for (std::size_t i = 1; i < a.size(); ++i) b.push_back(a[i - 1]);
  return {source.name() + "_shift", source, SequenceTable({GeneratorKind::custom, 0, source.name() + "_shifted"}, std::move(b))};
}

const char* const kBuiltinRegistryJson = R"json({
  "bases": {
    "narayana": {"kind": "recurrence", "spec": "narayana", "gap3": true},
    "fibonacci": {"kind": "recurrence", "spec": "fibonacci"},
    "binary": {"kind": "power", "b": 2},
    "ternary": {"kind": "power", "b": 3},
    "quaternary": {"kind": "power", "b": 4},
    "gen_narayana_2": {"kind": "gen_narayana", "d": 2},
    "gen_narayana_4": {"kind": "gen_narayana", "d": 4},
    "gen_narayana_5": {"kind": "gen_narayana", "d": 5},
    "gen_narayana_6": {"kind": "gen_narayana", "d": 6},
    "gen_narayana_7": {"kind": "gen_narayana", "d": 7}
  },
  "maps": {
    "narayana_shift": {"source": "narayana", "target": {"kind": "shift"}},
    "fibonacci_shift": {"source": "fibonacci", "target": {"kind": "shift"}},
    "binary_ternary": {"source": "binary", "target": {"kind": "base", "base": "ternary"}},
    "binary_quaternary": {"source": "binary", "target": {"kind": "base", "base": "quaternary"}},
    "binary_factorial": {"source": "binary", "target": {"kind": "factorial"}},
    "fibonacci_binary": {"source": "fibonacci", "target": {"kind": "base", "base": "binary"}},
    "narayana_digit_sum": {"source": "narayana", "target": {"kind": "ones"}},
    "fibonacci_digit_sum": {"source": "fibonacci", "target": {"kind": "ones"}}
  }
}
)json";

Registry::Registry(nlohmann::ordered_json doc) : doc_(std::move(doc)) {
  if (!doc_.contains("bases") || !doc_.contains("maps")) throw std::invalid_argument("registry needs bases and maps");
  for (auto& [name, m] : doc_["maps"].items()) {
    if (!has_base(m.at("source").get<std::string>()))
      throw std::invalid_argument("map " + name + " names unknown source base");
    const auto& t = m.at("target");
    if (t.at("kind") == "base" && !has_base(t.at("base").get<std::string>()))
      throw std::invalid_argument("map " + name + " names unknown target base");
  }
}

Registry Registry::builtin() { return Registry(nlohmann::ordered_json::parse(kBuiltinRegistryJson)); }

Registry Registry::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open registry " + path);
  return Registry(nlohmann::ordered_json::parse(in));
}

std::vector<std::string> Registry::base_names() const {
  std::vector<std::string> v;
  for (auto& [k, _] : doc_["bases"].items()) v.push_back(k);
  return v;
}

std::vector<std::string> Registry::map_names() const {
  std::vector<std::string> v;
  for (auto& [k, _] : doc_["maps"].items()) v.push_back(k);
  return v;
}

bool Registry::has_base(const std::string& name) const { return doc_["bases"].contains(name); }
bool Registry::has_map(const std::string& name) const { return doc_["maps"].contains(name); }

namespace {

RecurrenceSpec spec_by_name(const std::string& name) {
  if (name == "narayana") return narayana_spec();
  if (name == "fibonacci") return fibonacci_spec();
  if (name == "sqrt13_example") return sqrt13_example_spec();
  if (name == "sqrt6_example") return sqrt6_example_spec();
  throw std::invalid_argument("unknown recurrence spec " + name);
}

SequenceTable base_table(const nlohmann::ordered_json& b, const std::string& name, const BigInt& limit,
                         std::size_t min_count) {
  const std::string kind = b.at("kind");
  RecurrenceSpec spec;
  if (kind == "recurrence") spec = spec_by_name(b.at("spec"));
  else if (kind == "gen_narayana") spec = generalized_narayana_spec(b.at("d").get<int>());
  else if (kind == "power") spec = power_spec(b.at("b").get<std::int64_t>());
  else throw std::invalid_argument("unknown base kind " + kind);
  auto t = generate_recurrent_past(spec, limit, min_count);
  return SequenceTable({GeneratorKind::recurrence, 0, name}, t.big(), t.spec());
}

}  // namespace

NumerationBase Registry::base(const std::string& name, const BigInt& limit) const {
  if (!has_base(name)) throw std::invalid_argument("unknown base " + name);
  const auto& b = doc_["bases"][name];
  return NumerationBase(base_table(b, name, limit, 0), b.value("gap3", false));
}

ReplacementMap Registry::map(const std::string& name, const BigInt& limit) const {
  if (!has_map(name)) throw std::invalid_argument("unknown map " + name);
  const auto& m = doc_["maps"][name];
  NumerationBase src = base(m.at("source"), limit);
  const auto& t = m.at("target");
  const std::string kind = t.at("kind");
  const std::size_t len = src.size();
  if (kind == "shift") {
    auto r = make_shift_map(src);
    r.name = name;
    return r;
  }
  std::vector<BigInt> b;
  if (kind == "base") {
    const std::string other = t.at("base");
    auto tab = base_table(doc_["bases"][other], other, 0, len);
    auto all = tab.big();
    b.assign(all.begin(), all.begin() + len);
  } else if (kind == "factorial") {
    BigInt f = 1;
    for (std::size_t i = 1; i <= len; ++i) b.push_back(f *= i);
  } else if (kind == "ones") {
    b.assign(len, BigInt(1));
  } else {
    throw std::invalid_argument("unknown target kind " + kind);
  }
  return {name, std::move(src), SequenceTable({GeneratorKind::custom, 0, name + "_target"}, std::move(b))};
}

}  // namespace modsig
