#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "bicot/cot_document.hpp"
#include "bicot/toy_lab.hpp"

namespace bicot::testing {

// Fixture whose reward components are exactly format 1.0, weighted rouge
// 0.5 and keyword 1.25 (five matches), composing to 2.75.
struct CompositionFixture {
  QARecord record;
  std::string high_completion;  // totals 2.75
  std::string low_completion;   // totals 1.793 against the same record
};
CompositionFixture make_composition_fixture();

// 5 questions x 8 templates with strictly ordered totals per question;
// exactly templates 0 and 1 have format reward 1.0.
struct BankFixture {
  TemplateBank bank;
  std::vector<QARecord> dataset;
};
BankFixture make_standard_bank();

// n records with distinct ids, 4-token final answers, and two keywords
// present in both forward reasoning and final answer.
std::vector<QARecord> make_synthetic_dataset(std::size_t n);

// Random well-formed document: canonical segment order, annotation spans
// at valid non-overlapping offsets.
BiCotDocument random_document(std::mt19937_64& rng);

std::string random_bytes(std::mt19937_64& rng, std::size_t max_len);

// Brute-force LCS: max subsequence of `a` (by bitmask) that is also a
// subsequence of `b`. Usable up to |a| ~ 16.
std::size_t lcs_oracle(const std::vector<std::uint8_t>& a,
                       const std::vector<std::uint8_t>& b);

}  // namespace bicot::testing
