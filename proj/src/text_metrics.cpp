#include "bicot/text_metrics.hpp"

#include <cmath>
#include <map>

#include "bicot/errors.hpp"
#include "bicot/unicode.hpp"

namespace bicot {

namespace {

constexpr double kBleuEpsilonCount = 0.1;

void check_modes(const TokenSeq& a, const TokenSeq& b) {
  if (a.mode != b.mode)
    throw ValidationError("tokenization mode mismatch");
}

}  // namespace

TokenizeMode resolve_mode(std::string_view text, TokenizeMode mode) {
  if (mode != TokenizeMode::Auto) return mode;
  std::size_t cjk = 0, non_space = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const char32_t cp = decode_utf8(text, pos);
    if (is_unicode_space(cp)) continue;
    ++non_space;
    if (is_cjk(cp)) ++cjk;
  }
  if (non_space == 0) return TokenizeMode::Whitespace;
  return 2 * cjk >= non_space ? TokenizeMode::Char : TokenizeMode::Whitespace;
}

TokenSeq tokenize(std::string_view text, TokenizeMode mode) {
  TokenSeq seq;
  seq.mode = resolve_mode(text, mode);
  std::size_t pos = 0;
  if (seq.mode == TokenizeMode::Char) {
    while (pos < text.size()) {
      const std::size_t start = pos;
      const char32_t cp = decode_utf8(text, pos);
      if (is_unicode_space(cp)) continue;
      seq.tokens.emplace_back(text.substr(start, pos - start));
    }
  } else {
    std::string current;
    while (pos < text.size()) {
      const std::size_t start = pos;
      const char32_t cp = decode_utf8(text, pos);
      if (is_unicode_space(cp)) {
        if (!current.empty()) {
          seq.tokens.push_back(std::move(current));
          current.clear();
        }
      } else {
        current.append(text.substr(start, pos - start));
      }
    }
    if (!current.empty()) seq.tokens.push_back(std::move(current));
  }
  return seq;
}

std::size_t lcs_length(const TokenSeq& a, const TokenSeq& b) {
  check_modes(a, b);
  const auto& x = a.tokens;
  const auto& y = b.tokens;
  if (x.empty() || y.empty()) return 0;
  std::vector<std::size_t> prev(y.size() + 1, 0), cur(y.size() + 1, 0);
  for (std::size_t i = 1; i <= x.size(); ++i) {
    for (std::size_t j = 1; j <= y.size(); ++j) {
      cur[j] = x[i - 1] == y[j - 1] ? prev[j - 1] + 1
                                    : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[y.size()];
}

RougeScore rouge_l(const TokenSeq& cand, const TokenSeq& ref) {
  check_modes(cand, ref);
  RougeScore s;
  if (cand.empty() && ref.empty()) {
    s.precision = s.recall = s.f = 1.0;
    return s;
  }
  s.lcs_len = lcs_length(cand, ref);
  s.precision = cand.empty() ? 0.0 : double(s.lcs_len) / double(cand.size());
  s.recall = ref.empty() ? 0.0 : double(s.lcs_len) / double(ref.size());
  const double pr = s.precision + s.recall;
  s.f = pr > 0.0 ? 2.0 * s.precision * s.recall / pr : 0.0;
  return s;
}

BleuScore bleu4(const TokenSeq& cand, const TokenSeq& ref) {
  check_modes(cand, ref);
  BleuScore s;
  if (cand.empty()) {
    s.diagnostic = "empty candidate";
    return s;
  }

  double log_sum = 0.0;
  for (std::size_t n = 1; n <= 4; ++n) {
    double matches = 0.0;
    double total = 0.0;
    if (cand.size() >= n) {
      std::map<std::vector<std::string>, std::size_t> ref_counts;
      if (ref.size() >= n) {
        for (std::size_t i = 0; i + n <= ref.size(); ++i) {
          std::vector<std::string> gram(ref.tokens.begin() + i,
                                        ref.tokens.begin() + i + n);
          ++ref_counts[gram];
        }
      }
      std::map<std::vector<std::string>, std::size_t> cand_counts;
      for (std::size_t i = 0; i + n <= cand.size(); ++i) {
        std::vector<std::string> gram(cand.tokens.begin() + i,
                                      cand.tokens.begin() + i + n);
        ++cand_counts[gram];
      }
      for (const auto& [gram, count] : cand_counts) {
        total += double(count);
        const auto it = ref_counts.find(gram);
        if (it != ref_counts.end())
          matches += double(std::min(count, it->second));
      }
    }
    if (total == 0.0) total = 1.0;  // candidate shorter than n
    if (matches == 0.0) matches = kBleuEpsilonCount;
    const double p = matches / total;
    s.ngram_precisions[n - 1] = p;
    log_sum += std::log(p);
  }

  s.brevity_penalty =
      cand.size() < ref.size()
          ? std::exp(1.0 - double(ref.size()) / double(cand.size()))
          : 1.0;
  s.score = s.brevity_penalty * std::exp(log_sum / 4.0);
  return s;
}

}  // namespace bicot
