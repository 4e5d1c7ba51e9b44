#include "modsig/seqcore.hpp"

#include <algorithm>
#include <array>
#include <cstring>

#include <gmp.h>
#include <istream>
#include <ostream>

namespace modsig {

void RecurrenceSpec::validate() const {
  if (coefficients.empty()) throw std::invalid_argument("recurrence order must be >= 1");
  if (initial_terms.size() != coefficients.size())
    throw std::invalid_argument("recurrence " + name + ": initial_terms length must equal order");
}

std::vector<BigInt> RecurrenceSpec::characteristic_polynomial() const {
  const std::size_t L = order();
  std::vector<BigInt> p(L + 1);
  p[L] = 1;
  for (std::size_t i = 1; i <= L; ++i) p[L - i] = -coefficients[i - 1];
  return p;
}

namespace {

RecurrenceSpec make_spec(std::string name, std::vector<int> c, std::vector<int> init) {
  RecurrenceSpec s;
  s.name = std::move(name);
  for (int v : c) s.coefficients.emplace_back(v);
  for (int v : init) s.initial_terms.emplace_back(v);
  return s;
}

}  // namespace

RecurrenceSpec narayana_spec() { return make_spec("narayana", {1, 0, 1}, {1, 2, 3}); }
RecurrenceSpec fibonacci_spec() { return make_spec("fibonacci", {1, 1}, {1, 2}); }

RecurrenceSpec generalized_narayana_spec(int d) {
  if (d < 1) throw std::invalid_argument("depth must be >= 1");
  if (d == 1) return make_spec("gen_narayana_1", {2}, {1});
  std::vector<int> c(d, 0), init(d);
  c[0] = 1;
  c[d - 1] = 1;
  for (int i = 0; i < d; ++i) init[i] = i + 1;
  return make_spec("gen_narayana_" + std::to_string(d), c, init);
}

RecurrenceSpec power_spec(std::int64_t b) {
  if (b < 2) throw std::invalid_argument("power base must be >= 2");
  RecurrenceSpec s;
  s.name = "power_" + std::to_string(b);
  s.coefficients = {BigInt(b)};
  s.initial_terms = {BigInt(1)};
  return s;
}

RecurrenceSpec sqrt13_example_spec() {
  return make_spec("sqrt13_example", {3, 6, -4, -5, 1, 1}, {0, 0, 0, 0, 0, 1});
}

RecurrenceSpec sqrt6_example_spec() { return make_spec("sqrt6_example", {0, 10, 0, -1}, {1, 2, 3, 4}); }

std::string to_string(GeneratorKind kind) {
  switch (kind) {
    case GeneratorKind::recurrence: return "recurrence";
    case GeneratorKind::ulam: return "ulam";
    case GeneratorKind::factorial_sum: return "factorial_sum";
    case GeneratorKind::power_base: return "power_base";
    case GeneratorKind::naturals: return "naturals";
    case GeneratorKind::hofstadter: return "hofstadter";
    case GeneratorKind::custom: return "custom";
  }
  return "custom";
}

SequenceTable::SequenceTable(GeneratorTag tag, std::vector<BigInt> terms, std::optional<RecurrenceSpec> spec)
    : tag_(std::move(tag)), spec_(std::move(spec)) {
  bool small = std::all_of(terms.begin(), terms.end(), [](const BigInt& t) { return fits_int64(t); });
  if (small) {
    std::vector<std::int64_t> m;
    m.reserve(terms.size());
    for (const auto& t : terms) m.push_back(t.convert_to<std::int64_t>());
    terms_ = std::move(m);
  } else {
    terms_ = std::move(terms);
  }
}

SequenceTable::SequenceTable(GeneratorTag tag, std::vector<std::int64_t> terms)
    : tag_(std::move(tag)), terms_(std::move(terms)) {}

std::size_t SequenceTable::size() const {
  return std::visit([](const auto& v) { return v.size(); }, terms_);
}

BigInt SequenceTable::term(std::size_t i) const {
  if (i < 1 || i > size())
    throw RangeError("index " + std::to_string(i) + " outside materialized prefix of " + label() + " (size " +
                     std::to_string(size()) + ")");
  if (is_machine()) return BigInt(std::get<0>(terms_)[i - 1]);
  return std::get<1>(terms_)[i - 1];
}

std::span<const std::int64_t> SequenceTable::machine() const {
  if (!is_machine()) throw std::logic_error("sequence " + label() + " exceeds machine words");
  return std::get<0>(terms_);
}

std::vector<BigInt> SequenceTable::big() const {
  if (!is_machine()) return std::get<1>(terms_);
  const auto& m = std::get<0>(terms_);
  return std::vector<BigInt>(m.begin(), m.end());
}

bool SequenceTable::strictly_increasing() const {
  if (is_machine()) {
    const auto& m = std::get<0>(terms_);
    return std::adjacent_find(m.begin(), m.end(), std::greater_equal<>()) == m.end();
  }
  const auto& b = std::get<1>(terms_);
  return std::adjacent_find(b.begin(), b.end(), std::greater_equal<>()) == b.end();
}

std::size_t SequenceTable::count_at_most(const BigInt& limit) const {
  if (is_machine()) {
    const auto& m = std::get<0>(terms_);
    if (limit > std::numeric_limits<std::int64_t>::max()) return m.size();
    if (limit < std::numeric_limits<std::int64_t>::min()) return 0;
    auto lim = limit.convert_to<std::int64_t>();
    return std::upper_bound(m.begin(), m.end(), lim) - m.begin();
  }
  const auto& b = std::get<1>(terms_);
  return std::upper_bound(b.begin(), b.end(), limit) - b.begin();
}

SequenceTable SequenceTable::prefix(std::size_t count) const {
  if (count > size()) throw RangeError("prefix longer than table " + label());
  SequenceTable out = *this;
  std::visit([count](auto& v) { v.resize(count); }, out.terms_);
  return out;
}

SequenceTable generate_recurrent(const RecurrenceSpec& spec, std::size_t count) {
  spec.validate();
  const std::size_t L = spec.order();
  if (count < L) throw std::invalid_argument("count must be >= recurrence order");
  std::vector<BigInt> a(spec.initial_terms);
  a.reserve(count);
  for (std::size_t n = L; n < count; ++n) {
    BigInt next = 0;
    for (std::size_t i = 0; i < L; ++i)
      if (spec.coefficients[i] != 0) next += spec.coefficients[i] * a[n - 1 - i];
    a.push_back(std::move(next));
  }
  return SequenceTable({GeneratorKind::recurrence, 0, spec.name}, std::move(a), spec);
}

SequenceTable generate_recurrent_past(const RecurrenceSpec& spec, const BigInt& limit, std::size_t min_count) {
  spec.validate();
  const std::size_t L = spec.order();
  std::vector<BigInt> a(spec.initial_terms);
  while (a.size() < std::max(min_count, L) || a.back() <= limit) {
    if (a.size() > 1'000'000) throw RangeError("recurrence " + spec.name + " does not grow past the limit");
    const std::size_t n = a.size();
    BigInt next = 0;
    for (std::size_t i = 0; i < L; ++i)
      if (spec.coefficients[i] != 0) next += spec.coefficients[i] * a[n - 1 - i];
    a.push_back(std::move(next));
  }
  return SequenceTable({GeneratorKind::recurrence, 0, spec.name}, std::move(a), spec);
}

SequenceTable generate_ulam(std::size_t count) {
  if (count < 2) throw std::invalid_argument("Ulam count must be >= 2");
  std::vector<std::int64_t> u{1, 2};
  // counts[v] = number of representations of v as u_i + u_j, i < j, saturated at 2.
  std::vector<std::uint8_t> counts(64, 0);
  auto bump = [&](std::int64_t v) {
    if (static_cast<std::size_t>(v) >= counts.size()) counts.resize(std::max<std::size_t>(2 * counts.size(), v + 1), 0);
    if (counts[v] < 2) ++counts[v];
  };
  bump(3);
  while (u.size() < count) {
    std::int64_t v = u.back() + 1;
    while (static_cast<std::size_t>(v) < counts.size() && counts[v] != 1) ++v;
    // Some sum is always unique (u_{k-1} + u_k), so v is inside the array.
    const std::size_t k = u.size();
    u.push_back(v);
    for (std::size_t j = 0; j < k; ++j) bump(u[j] + v);
  }
  return SequenceTable({GeneratorKind::ulam, 0, "ulam"}, std::move(u));
}

SequenceTable generate_factorial_sums(std::size_t count) {
  if (count < 1) throw std::invalid_argument("count must be >= 1");
  // f_n = sum over set bits i of n of (i+1)!
  std::vector<BigInt> fact{1};
  std::vector<BigInt> f;
  f.reserve(count);
  for (std::size_t n = 1; n <= count; ++n) {
    BigInt s = 0;
    std::size_t m = n;
    for (std::size_t i = 0; m != 0; ++i, m >>= 1) {
      while (fact.size() <= i) fact.push_back(fact.back() * (fact.size() + 1));
      if (m & 1) s += fact[i];
    }
    f.push_back(std::move(s));
  }
  return SequenceTable({GeneratorKind::factorial_sum, 0, "factorial_sum"}, std::move(f));
}

SequenceTable generate_powers(std::int64_t b, std::size_t count) {
  auto t = generate_recurrent(power_spec(b), count);
  return SequenceTable({GeneratorKind::power_base, b, "power_" + std::to_string(b)}, t.big(), t.spec());
}

SequenceTable generate_naturals(std::size_t count) {
  std::vector<std::int64_t> v(count);
  for (std::size_t i = 0; i < count; ++i) v[i] = static_cast<std::int64_t>(i);
  return SequenceTable({GeneratorKind::naturals, 0, "naturals"}, std::move(v));
}

std::optional<std::size_t> recurrence_violation(const SequenceTable& table) {
  if (!table.spec()) return std::nullopt;
  const auto& spec = *table.spec();
  const std::size_t L = spec.order();
  auto a = table.big();
  for (std::size_t n = L; n < a.size(); ++n) {
    BigInt r = a[n];
    for (std::size_t i = 0; i < L; ++i) r -= spec.coefficients[i] * a[n - 1 - i];
    if (r != 0) return n + 1;
  }
  return std::nullopt;
}

void write_csv(std::ostream& out, const SequenceTable& table) {
  out << "index,value\n";
  if (table.is_machine()) {
    auto m = table.machine();
    for (std::size_t i = 0; i < m.size(); ++i) out << (i + 1) << ',' << m[i] << '\n';
  } else {
    auto b = table.big();
    for (std::size_t i = 0; i < b.size(); ++i) out << (i + 1) << ',' << b[i].str() << '\n';
  }
}

namespace {

constexpr std::array<char, 8> kMagic{'M', 'O', 'D', 'S', 'I', 'G', 'S', 'Q'};
constexpr std::uint32_t kVersion = 1;

template <class T>
void put_le(std::ostream& out, T v) {
  std::array<char, sizeof(T)> buf;
  auto u = static_cast<std::make_unsigned_t<T>>(v);
  for (std::size_t i = 0; i < sizeof(T); ++i) buf[i] = static_cast<char>((u >> (8 * i)) & 0xff);
  out.write(buf.data(), buf.size());
}

template <class T>
T get_le(std::istream& in) {
  std::array<unsigned char, sizeof(T)> buf;
  if (!in.read(reinterpret_cast<char*>(buf.data()), buf.size())) throw std::runtime_error("truncated sequence cache");
  std::make_unsigned_t<T> u = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) u |= static_cast<std::make_unsigned_t<T>>(buf[i]) << (8 * i);
  return static_cast<T>(u);
}

void put_string(std::ostream& out, const std::string& s) {
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(s.size()));
  out.write(s.data(), s.size());
}

std::string get_string(std::istream& in) {
  auto n = get_le<std::uint32_t>(in);
  std::string s(n, '\0');
  if (n && !in.read(s.data(), n)) throw std::runtime_error("truncated sequence cache");
  return s;
}

void put_big(std::ostream& out, const BigInt& v) {
  std::vector<unsigned char> bytes((bit_length(v) + 7) / 8);
  std::size_t written = 0;
  if (!bytes.empty()) mpz_export(bytes.data(), &written, -1, 1, -1, 0, v.backend().data());
  bytes.resize(written);
  out.put(v < 0 ? 1 : 0);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(bytes.size()));
  out.write(reinterpret_cast<const char*>(bytes.data()), bytes.size());
}

BigInt get_big(std::istream& in) {
  int sign = in.get();
  if (sign == EOF) throw std::runtime_error("truncated sequence cache");
  auto n = get_le<std::uint32_t>(in);
  std::vector<unsigned char> bytes(n);
  if (n && !in.read(reinterpret_cast<char*>(bytes.data()), n)) throw std::runtime_error("truncated sequence cache");
  BigInt v = 0;
  if (n) mpz_import(v.backend().data(), n, -1, 1, -1, 0, bytes.data());
  return sign ? BigInt(-v) : v;
}

}  // namespace

void write_cache(std::ostream& out, const SequenceTable& table) {
  out.write(kMagic.data(), kMagic.size());
  put_le<std::uint32_t>(out, kVersion);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(table.tag().kind));
  put_le<std::int64_t>(out, table.tag().parameter);
  put_string(out, table.tag().label);
  out.put(table.spec() ? 1 : 0);
  if (table.spec()) {
    const auto& s = *table.spec();
    put_string(out, s.name);
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(s.order()));
    for (const auto& c : s.coefficients) put_big(out, c);
    for (const auto& c : s.initial_terms) put_big(out, c);
  }
  put_le<std::uint64_t>(out, table.size());
  if (table.is_machine()) {
    for (auto v : table.machine()) put_big(out, BigInt(v));
  } else {
    for (const auto& v : table.big()) put_big(out, v);
  }
}

SequenceTable read_cache(std::istream& in) {
  std::array<char, 8> magic;
  if (!in.read(magic.data(), magic.size()) || magic != kMagic) throw std::runtime_error("not a sequence cache");
  if (get_le<std::uint32_t>(in) != kVersion) throw std::runtime_error("unsupported sequence cache version");
  GeneratorTag tag;
  tag.kind = static_cast<GeneratorKind>(get_le<std::uint32_t>(in));
  tag.parameter = get_le<std::int64_t>(in);
  tag.label = get_string(in);
  std::optional<RecurrenceSpec> spec;
  if (in.get() == 1) {
    RecurrenceSpec s;
    s.name = get_string(in);
    auto L = get_le<std::uint32_t>(in);
    for (std::uint32_t i = 0; i < L; ++i) s.coefficients.push_back(get_big(in));
    for (std::uint32_t i = 0; i < L; ++i) s.initial_terms.push_back(get_big(in));
    spec = std::move(s);
  }
  auto count = get_le<std::uint64_t>(in);
  std::vector<BigInt> terms;
  terms.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) terms.push_back(get_big(in));
  return SequenceTable(std::move(tag), std::move(terms), std::move(spec));
}

}  // namespace modsig
