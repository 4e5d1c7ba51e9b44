#include "modsig/selector.hpp"

#include <cmath>
#include <stdexcept>

#include "modsig/hofstadter.hpp"

namespace modsig {

std::string SequenceSelector::key() const {
  std::string k = name;
  if (name == "hofstadter" || name == "gen_narayana") k += "_d" + std::to_string(d);
  if (name == "power") k += "_b" + std::to_string(base);
  if (name == "replacement") k += "_" + map;
  if (value_limit) k += "_le" + std::to_string(value_limit);
  else k += "_n" + std::to_string(count);
  return k;
}

std::vector<std::string> sequence_names() {
  return {"hofstadter", "narayana", "fibonacci", "gen_narayana", "power", "ulam",
          "factorial",  "naturals", "sqrt13",    "sqrt6",        "replacement"};
}

SequenceSelector selector_from_json(const nlohmann::ordered_json& j) {
  SequenceSelector s;
  s.name = j.value("name", s.name);
  s.d = j.value("d", s.d);
  s.base = j.value("base", s.base);
  s.map = j.value("map", s.map);
  if (j.contains("count")) s.count = j["count"].is_string() ? parse_count(j["count"]) : j["count"].get<std::uint64_t>();
  if (j.contains("value_limit"))
    s.value_limit = j["value_limit"].is_string() ? parse_count(j["value_limit"]) : j["value_limit"].get<std::uint64_t>();
  s.registry_path = j.value("registry", s.registry_path);
  return s;
}

nlohmann::ordered_json to_json(const SequenceSelector& s) {
  nlohmann::ordered_json j;
  j["name"] = s.name;
  if (s.name == "hofstadter" || s.name == "gen_narayana") j["d"] = s.d;
  if (s.name == "power") j["base"] = s.base;
  if (s.name == "replacement") j["map"] = s.map;
  if (s.value_limit) j["value_limit"] = s.value_limit;
  else j["count"] = s.count;
  return j;
}

Registry selector_registry(const SequenceSelector& s) {
  return s.registry_path.empty() ? Registry::builtin() : Registry::load(s.registry_path);
}

std::uint64_t parse_count(const std::string& text) {
  if (auto caret = text.find('^'); caret != std::string::npos) {
    std::uint64_t b = std::stoull(text.substr(0, caret)), e = std::stoull(text.substr(caret + 1)), r = 1;
    for (std::uint64_t i = 0; i < e; ++i) r *= b;
    return r;
  }
  std::size_t used = 0;
  double v = std::stod(text, &used);
  if (used != text.size() || v < 0 || v != std::floor(v) || v > 1e18)
    throw std::invalid_argument("not a count: " + text);
  return static_cast<std::uint64_t>(v);
}

namespace {

void require_count(const SequenceSelector& s) {
  if (s.count == 0 && !(s.name == "ulam" && s.value_limit))
    throw std::invalid_argument("sequence " + s.name + " needs a positive count");
}

}  // namespace

SequenceTable materialize(const SequenceSelector& s) {
  require_count(s);
  const std::size_t n = s.count;
  if (s.name == "hofstadter") return eval_direct(s.d, n).to_table();
  if (s.name == "narayana") return generate_recurrent(narayana_spec(), n);
  if (s.name == "fibonacci") return generate_recurrent(fibonacci_spec(), n);
  if (s.name == "gen_narayana") return generate_recurrent(generalized_narayana_spec(s.d), n);
  if (s.name == "power") return generate_powers(s.base, n);
  if (s.name == "sqrt13") return generate_recurrent(sqrt13_example_spec(), n);
  if (s.name == "sqrt6") return generate_recurrent(sqrt6_example_spec(), n);
  if (s.name == "factorial") return generate_factorial_sums(n);
  if (s.name == "naturals") return generate_naturals(n);
  if (s.name == "ulam") {
    if (!s.value_limit) return generate_ulam(n);
    // density is about 0.074; grow until the prefix passes the limit
    std::size_t guess = s.value_limit / 10 + 64;
    for (;;) {
      auto t = generate_ulam(guess);
      if (t.back() > s.value_limit) return t.prefix(t.count_at_most(BigInt(s.value_limit)));
      guess *= 2;
    }
  }
  if (s.name == "replacement") {
    auto map = selector_registry(s).map(s.map, BigInt(n));
    std::vector<BigInt> terms;
    terms.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) terms.push_back(replace(BigInt(i), map));
    return SequenceTable({GeneratorKind::custom, 0, map.name}, std::move(terms));
  }
  throw std::invalid_argument("unknown sequence: " + s.name);
}

std::vector<std::int64_t> machine_values(const SequenceSelector& s) {
  require_count(s);
  if (s.name == "hofstadter") {
    auto h = eval_direct(s.d, s.count);
    auto v = h.head(s.count + 1).subspan(1);
    return {v.begin(), v.end()};
  }
  if (s.name == "replacement") return replace_range(selector_registry(s).map(s.map, BigInt(s.count)), s.count);
  auto t = materialize(s);
  if (!t.is_machine()) throw RangeError("terms of " + t.label() + " exceed 64 bits");
  auto m = t.machine();
  return {m.begin(), m.end()};
}

std::vector<Phase> sequence_phases(const SequenceSelector& s, const Frequency& beta) {
  require_count(s);
  if (s.name == "factorial") {
    auto p = replacement_phases(selector_registry(s).map("binary_factorial", BigInt(s.count)), beta, s.count + 1);
    p.erase(p.begin());
    return p;
  }
  if (s.name == "replacement")
    return replacement_phases(selector_registry(s).map(s.map, BigInt(s.count)), beta, s.count);
  if (s.name == "hofstadter") {
    auto v = machine_values(s);
    return phases_of<std::int64_t>(v, beta);
  }
  auto t = materialize(s);
  if (t.is_machine()) return phases_of<std::int64_t>(t.machine(), beta);
  std::size_t bits = 64;
  for (std::size_t i = 1; i <= t.size(); ++i) bits = std::max(bits, bit_length(t.term(i)));
  PhaseReducer red(beta, static_cast<unsigned>(bits));
  std::vector<Phase> out;
  out.reserve(t.size());
  for (std::size_t i = 1; i <= t.size(); ++i) out.push_back(red(t.term(i)));
  return out;
}

}  // namespace modsig
