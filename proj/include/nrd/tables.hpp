#pragma once

// Explicit maps and tables reproduced from the source material, plus the
// certificates they define.

#include <array>
#include <string_view>
#include <utility>
#include <vector>

#include "nrd/catalog.hpp"
#include "nrd/predicate.hpp"
#include "nrd/substructure.hpp"

namespace nrd::tables {

using Row = std::pair<std::string_view, std::string_view>;

inline constexpr std::array<Row, 8> kOr3Into3Lin = {{
    Row{"000", "000"}, Row{"001", "012"}, Row{"010", "102"},
    Row{"011", "111"}, Row{"100", "210"}, Row{"101", "222"},
    Row{"110", "012"}, Row{"111", "021"},
}};

inline constexpr std::array<Row, 36> kR2S2IntoJ1 = {{
    Row{"0000", "00010001"}, Row{"0100", "10100001"}, Row{"1000", "01010100"},
    Row{"1200", "01100010"}, Row{"2100", "10001100"}, Row{"2200", "00001010"},
    Row{"0001", "10100001"}, Row{"0101", "10100001"}, Row{"1001", "10001100"},
    Row{"1201", "00001010"}, Row{"2101", "10001100"}, Row{"2201", "00001010"},
    Row{"0010", "01010100"}, Row{"0110", "01100010"}, Row{"1010", "01010100"},
    Row{"1210", "01100010"}, Row{"2110", "00001010"}, Row{"2210", "00001010"},
    Row{"0012", "10001100"}, Row{"0112", "00001010"}, Row{"1012", "10001100"},
    Row{"1212", "00001010"}, Row{"2112", "01100010"}, Row{"2212", "01100010"},
    Row{"0021", "01100010"}, Row{"0121", "01100010"}, Row{"1021", "00001010"},
    Row{"1221", "00001010"}, Row{"2121", "00001010"}, Row{"2221", "00001010"},
    Row{"0022", "00001010"}, Row{"0122", "00001010"}, Row{"1022", "00001010"},
    Row{"1222", "00001010"}, Row{"2122", "01100010"}, Row{"2222", "01100010"},
}};

inline constexpr std::array<Row, 36> kR2S2IntoJ2 = {{
    Row{"0000", "10010001"}, Row{"0100", "00100001"}, Row{"1000", "10001010"},
    Row{"1200", "00001100"}, Row{"2100", "01100010"}, Row{"2200", "01010100"},
    Row{"0001", "00100001"}, Row{"0101", "00100001"}, Row{"1001", "01100010"},
    Row{"1201", "01010100"}, Row{"2101", "01100010"}, Row{"2201", "01010100"},
    Row{"0010", "01010100"}, Row{"0110", "01100010"}, Row{"1010", "00001100"},
    Row{"1210", "00001100"}, Row{"2110", "01100010"}, Row{"2210", "01010100"},
    Row{"0012", "00001100"}, Row{"0112", "10001010"}, Row{"1012", "00001100"},
    Row{"1212", "00001100"}, Row{"2112", "10001010"}, Row{"2212", "00001100"},
    Row{"0021", "01100010"}, Row{"0121", "01100010"}, Row{"1021", "01100010"},
    Row{"1221", "01010100"}, Row{"2121", "01100010"}, Row{"2221", "01010100"},
    Row{"0022", "10001010"}, Row{"0122", "10001010"}, Row{"1022", "10001010"},
    Row{"1222", "00001100"}, Row{"2122", "10001010"}, Row{"2222", "00001100"},
}};

inline constexpr std::array<Row, 18> kR1S1IntoP1Q1 = {{
    Row{"000", "000"}, Row{"001", "001"}, Row{"002", "001"},
    Row{"010", "120"}, Row{"011", "111"}, Row{"012", "111"},
    Row{"100", "001"}, Row{"101", "001"}, Row{"102", "001"},
    Row{"120", "111"}, Row{"121", "111"}, Row{"122", "111"},
    Row{"210", "222"}, Row{"211", "212"}, Row{"212", "212"},
    Row{"220", "212"}, Row{"221", "212"}, Row{"222", "212"},
}};

inline constexpr std::array<Row, 18> kR1S1IntoP2Q2 = {{
    Row{"000", "000"}, Row{"001", "102"}, Row{"002", "102"},
    Row{"010", "220"}, Row{"011", "222"}, Row{"012", "222"},
    Row{"100", "011"}, Row{"101", "111"}, Row{"102", "111"},
    Row{"120", "111"}, Row{"121", "111"}, Row{"122", "111"},
    Row{"210", "222"}, Row{"211", "222"}, Row{"212", "222"},
    Row{"220", "102"}, Row{"221", "102"}, Row{"222", "102"},
}};

inline constexpr std::array<Row, 36> kR2S2IntoP3Q3 = {{
    Row{"0000", "0000"}, Row{"0001", "1220"}, Row{"0010", "0101"},
    Row{"0012", "1111"}, Row{"0021", "2222"}, Row{"0022", "2012"},
    Row{"0100", "2012"}, Row{"0101", "2222"}, Row{"0110", "1111"},
    Row{"0112", "1111"}, Row{"0121", "2222"}, Row{"0122", "2012"},
    Row{"1000", "0101"}, Row{"1001", "1111"}, Row{"1010", "0101"},
    Row{"1012", "1111"}, Row{"1021", "2012"}, Row{"1022", "2012"},
    Row{"1200", "1111"}, Row{"1201", "1111"}, Row{"1210", "1111"},
    Row{"1212", "1111"}, Row{"1221", "2012"}, Row{"1222", "2012"},
    Row{"2100", "2222"}, Row{"2101", "2222"}, Row{"2110", "1220"},
    Row{"2112", "1220"}, Row{"2121", "2222"}, Row{"2122", "2222"},
    Row{"2200", "1220"}, Row{"2201", "1220"}, Row{"2210", "1220"},
    Row{"2212", "1220"}, Row{"2221", "2222"}, Row{"2222", "2222"},
}};
/// Cat5+ into BoolBCK+, one row per tuple of Cat5+.
inline constexpr std::array<Row, 6> kCat5IntoBoolBCK = {{
    Row{"00000", "100010001"}, Row{"01012", "010100001"}, Row{"11111", "001100010"},
    Row{"12201", "001010100"}, Row{"22222", "010001100"}, Row{"20120", "100001010"},
}};

/// Columns of the Cat5 matrix whose rows cancel down to 00000.
inline constexpr std::array<std::string_view, 5> kCat5MatrixColumns = {"01012", "11111", "12201", "22222", "20120"};

/// sigma_i(j) for i = 3..9 and j = 1..9 with 0 marking the excluded index.
struct SigmaRow {
  int i;
  /// 1 for J_1 = [9] minus {1}, 2 for J_2 = [9] minus {2}.
  int target;
  std::array<int, 9> values;
};

inline constexpr std::array<SigmaRow, 7> kSigmaRows = {{
    {3, 2, {1, 3, 0, 7, 9, 8, 4, 6, 5}},
    {4, 2, {1, 4, 7, 0, 5, 8, 3, 6, 9}},
    {5, 1, {5, 2, 8, 4, 0, 7, 6, 3, 9}},
    {6, 2, {9, 6, 3, 8, 5, 0, 8, 4, 1}},
    {7, 2, {1, 7, 4, 3, 9, 6, 0, 8, 5}},
    {8, 2, {9, 3, 6, 7, 1, 4, 8, 0, 5}},
    {9, 1, {5, 6, 4, 8, 9, 7, 2, 3, 0}},
}};

/// Excluded source coordinate per output coordinate (1-based) for the two
/// BoolBCK projection maps: I_j = [4] minus {i_j}.
inline constexpr std::array<int, 8> kJ1Dropped = {1, 2, 3, 1, 2, 4, 1, 2};
inline constexpr std::array<int, 8> kJ2Dropped = {1, 2, 1, 3, 2, 1, 4, 2};

template <std::size_t N>
TupleMap to_map(const std::array<Row, N>& rows) {
  TupleMap m;
  for (const auto& [a, b] : rows) m.emplace(parse_digits(a), parse_digits(b));
  return m;
}

struct NamedCertificate {
  std::string name;
  std::size_t rows;
  SubstructureCertificate certificate;
};

inline std::vector<int> zero_based(const std::array<int, 8>& one_based) {
  std::vector<int> out;
  for (int i : one_based) out.push_back(i - 1);
  return out;
}

inline SubstructureCertificate or3_into_3lin() {
  return {ConditionalPredicate::plain(fixtures::or_k(3)), fixtures::lin3_star_pair(),
          IndexFamily::from_one_based(3, {{1, 2}, {1, 3}, {2, 3}}), to_map(kOr3Into3Lin)};
}

inline SubstructureCertificate r2s2_into_j1() {
  return {fixtures::r2s2(), fixtures::boolbck_drop(0), IndexFamily::complements(4, zero_based(kJ1Dropped)),
          to_map(kR2S2IntoJ1)};
}

inline SubstructureCertificate r2s2_into_j2() {
  return {fixtures::r2s2(), fixtures::boolbck_drop(1), IndexFamily::complements(4, zero_based(kJ2Dropped)),
          to_map(kR2S2IntoJ2)};
}

inline SubstructureCertificate r1s1_into_p1q1() {
  return {fixtures::r1s1(), fixtures::cat5_p1q1(), IndexFamily::from_one_based(3, {{1, 2}, {2, 3}, {1, 3}}),
          to_map(kR1S1IntoP1Q1)};
}

inline SubstructureCertificate r1s1_into_p2q2() {
  return {fixtures::r1s1(), fixtures::cat5_p2q2(), IndexFamily::from_one_based(3, {{1, 2}, {2, 3}, {1, 3}}),
          to_map(kR1S1IntoP2Q2)};
}

inline SubstructureCertificate r2s2_into_p3q3() {
  return {fixtures::r2s2(), fixtures::cat5_p3q3(),
          IndexFamily::from_one_based(4, {{2, 3, 4}, {1, 3, 4}, {1, 2, 4}, {1, 2, 3}}), to_map(kR2S2IntoP3Q3)};
}

/// OR2 inside the four-ary predicate: Sigma(x) = (0, 1-x1, 1-x1, 1-x2).
inline SubstructureCertificate or2_into_four() {
  TupleMap m;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) m.emplace(Tuple{a, b}, Tuple{0, 1 - a, 1 - a, 1 - b});
  return {ConditionalPredicate::plain(fixtures::or_k(2)), ConditionalPredicate::plain(fixtures::four_ary_example()),
          IndexFamily::from_one_based(2, {{}, {1}, {1}, {2}}), std::move(m)};
}

/// Every explicit certificate, in presentation order.
inline std::vector<NamedCertificate> all_certificates() {
  return {
      {"or2-into-four", 4, or2_into_four()},
      {"or3-into-3lin", kOr3Into3Lin.size(), or3_into_3lin()},
      {"r2s2-into-boolbck-j1", kR2S2IntoJ1.size(), r2s2_into_j1()},
      {"r2s2-into-boolbck-j2", kR2S2IntoJ2.size(), r2s2_into_j2()},
      {"r1s1-into-p1q1", kR1S1IntoP1Q1.size(), r1s1_into_p1q1()},
      {"r1s1-into-p2q2", kR1S1IntoP2Q2.size(), r1s1_into_p2q2()},
      {"r2s2-into-p3q3", kR2S2IntoP3Q3.size(), r2s2_into_p3q3()},
  };
}

}  // namespace nrd::tables
