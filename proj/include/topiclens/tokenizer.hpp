#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace topiclens {

using TermIndex = std::uint32_t;

/// A token of the input text. `begin`/`end` are byte offsets into the
/// original (unnormalized) text; `text` is the NFC-normalized, lowercased form.
struct Token {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::string text;
};

/// Splits UTF-8 text into maximal runs of Unicode letters and decimal digits.
/// Combining marks continue a token that is already open, so decomposed and
/// precomposed spellings produce the same tokens. Invalid UTF-8 sequences act
/// as separators.
std::vector<Token> tokenize(std::string_view text);

std::string normalize_nfc(std::string_view text);
bool is_nfc(std::string_view text);

/// Number of Unicode code points in valid UTF-8 (invalid bytes count as one each).
std::size_t count_code_points(std::string_view text);

/// One vocabulary match in a text: a run of one or more consecutive tokens.
struct TermOccurrence {
  TermIndex term = 0;
  std::size_t byte_begin = 0;
  std::size_t byte_end = 0;
  std::size_t token_begin = 0;
  std::size_t token_end = 0;
};

struct MatchedText {
  std::size_t token_count = 0;
  std::vector<Token> tokens;
  std::vector<TermOccurrence> occurrences;  // ascending, non-overlapping

  /// Per-token vocabulary index: the term sits at the first token of its
  /// occurrence, every other token (unmatched or consumed) is empty.
  std::vector<std::optional<TermIndex>> token_terms() const;
};

/// Matches vocabulary entries against tokenized text. Multiword entries match
/// as contiguous token sequences, longest match first, each token consumed at
/// most once. When two entries tokenize identically the lower index wins.
class TermMatcher {
 public:
  explicit TermMatcher(const std::vector<std::string>& vocabulary);

  MatchedText match(std::string_view text) const;

  /// Token sequence for a vocabulary entry (empty if the entry has no tokens).
  const std::vector<std::string>& term_tokens(TermIndex term) const { return term_tokens_[term]; }
  std::size_t max_tokens() const { return max_tokens_; }
  std::size_t vocabulary_size() const { return term_tokens_.size(); }

 private:
  std::vector<std::vector<std::string>> term_tokens_;
  std::unordered_map<std::string, TermIndex> lookup_;
  std::size_t max_tokens_ = 0;
};

}  // namespace topiclens
