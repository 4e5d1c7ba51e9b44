#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "modsig/numeration.hpp"
#include "modsig/seqcore.hpp"
#include "modsig/weyl.hpp"

namespace modsig {

// Names: hofstadter (d), narayana, fibonacci, gen_narayana (d), power (base),
// ulam, factorial, naturals, sqrt13, sqrt6, replacement (map).
struct SequenceSelector {
  std::string name = "hofstadter";
  int d = 3;
  std::int64_t base = 2;
  std::string map;
  std::uint64_t count = 0;        // number of terms
  std::uint64_t value_limit = 0;  // ulam only: keep terms <= value_limit instead
  std::string registry_path;      // empty selects the builtin registry

  std::string key() const;  // stable file-name fragment
};

std::vector<std::string> sequence_names();
SequenceSelector selector_from_json(const nlohmann::ordered_json& j);
nlohmann::ordered_json to_json(const SequenceSelector& s);
Registry selector_registry(const SequenceSelector& s);

// Terms a_1..a_count. Hofstadter starts at H(1), replacement at A(0).
SequenceTable materialize(const SequenceSelector& s);
// Same terms as machine words; avoids the big-integer table for the large
// Hofstadter and replacement prefixes. Throws RangeError when terms overflow.
std::vector<std::int64_t> machine_values(const SequenceSelector& s);

// {beta a_i} for the selected terms; factorial sums go through the binary to
// factorial replacement so that no big-integer table is built.
std::vector<Phase> sequence_phases(const SequenceSelector& s, const Frequency& beta);

// Parses "10000000", "1e7", "2^20".
std::uint64_t parse_count(const std::string& text);

}  // namespace modsig
