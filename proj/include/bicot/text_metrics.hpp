#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace bicot {

enum class TokenizeMode { Char, Whitespace, Auto };

struct TokenSeq {
  std::vector<std::string> tokens;
  TokenizeMode mode = TokenizeMode::Whitespace;

  std::size_t size() const { return tokens.size(); }
  bool empty() const { return tokens.empty(); }
};

// Resolves Auto: Char when at least half of the non-space characters are
// CJK, otherwise Whitespace. Char/Whitespace pass through unchanged.
TokenizeMode resolve_mode(std::string_view text, TokenizeMode mode);

// Char mode splits into Unicode scalar values, dropping whitespace;
// Whitespace mode splits on runs of Unicode whitespace. The returned
// sequence carries the resolved mode.
TokenSeq tokenize(std::string_view text, TokenizeMode mode);

// O(|a|*|b|) dynamic program. Throws ValidationError on mode mismatch.
std::size_t lcs_length(const TokenSeq& a, const TokenSeq& b);

struct RougeScore {
  double precision = 0.0;
  double recall = 0.0;
  double f = 0.0;
  std::size_t lcs_len = 0;
};

// F-measure with beta = 1; empty-vs-empty is defined equal (f = 1).
RougeScore rouge_l(const TokenSeq& cand, const TokenSeq& ref);

struct BleuScore {
  double score = 0.0;
  std::array<double, 4> ngram_precisions{};
  double brevity_penalty = 1.0;
  std::string diagnostic;  // non-empty for degenerate inputs
};

// Sentence BLEU with clipped 1..4-gram precisions, exponential brevity
// penalty and add-epsilon (0.1 counts) smoothing for zero-match orders.
BleuScore bleu4(const TokenSeq& cand, const TokenSeq& ref);

}  // namespace bicot
