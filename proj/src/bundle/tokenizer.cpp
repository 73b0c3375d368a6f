#include "topiclens/tokenizer.hpp"

#include <unicode/locid.h>
#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include <algorithm>
#include <stdexcept>

namespace topiclens {
namespace {

const icu::Normalizer2& nfc() {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* n = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status) || n == nullptr) throw std::runtime_error("ICU NFC normalizer unavailable");
  return *n;
}

bool is_word_char(UChar32 c) { return u_isalpha(c) || u_isdigit(c); }

bool is_mark(UChar32 c) {
  const auto mask = U_GET_GC_MASK(c);
  return (mask & U_GC_M_MASK) != 0;
}

bool is_ascii(std::string_view s) {
  for (unsigned char ch : s)
    if (ch >= 0x80) return false;
  return true;
}

std::string normalize_token(std::string_view raw) {
  if (is_ascii(raw)) {
    std::string out(raw);
    for (char& ch : out)
      if (ch >= 'A' && ch <= 'Z') ch = static_cast<char>(ch - 'A' + 'a');
    return out;
  }
  UErrorCode status = U_ZERO_ERROR;
  icu::UnicodeString s = icu::UnicodeString::fromUTF8(icu::StringPiece(raw.data(), static_cast<int32_t>(raw.size())));
  icu::UnicodeString normalized = nfc().normalize(s, status);
  if (U_FAILURE(status)) throw std::runtime_error("NFC normalization failed");
  normalized.toLower(icu::Locale::getRoot());
  std::string out;
  normalized.toUTF8String(out);
  return out;
}

}  // namespace

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> tokens;
  const auto* bytes = reinterpret_cast<const uint8_t*>(text.data());
  const auto length = static_cast<int32_t>(text.size());
  int32_t pos = 0;
  std::optional<std::size_t> open;
  std::size_t last_end = 0;

  auto close = [&](std::size_t end) {
    if (open) {
      tokens.push_back(Token{*open, end, normalize_token(text.substr(*open, end - *open))});
      open.reset();
    }
  };

  while (pos < length) {
    const int32_t start = pos;
    UChar32 c;
    U8_NEXT(bytes, pos, length, c);
    if (c < 0) {
      close(static_cast<std::size_t>(start));
      continue;
    }
    if (is_word_char(c)) {
      if (!open) open = static_cast<std::size_t>(start);
      last_end = static_cast<std::size_t>(pos);
    } else if (open && is_mark(c)) {
      last_end = static_cast<std::size_t>(pos);
    } else {
      close(static_cast<std::size_t>(start));
    }
  }
  close(last_end);
  return tokens;
}

std::string normalize_nfc(std::string_view text) {
  UErrorCode status = U_ZERO_ERROR;
  icu::UnicodeString s = icu::UnicodeString::fromUTF8(icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
  icu::UnicodeString normalized = nfc().normalize(s, status);
  if (U_FAILURE(status)) throw std::runtime_error("NFC normalization failed");
  std::string out;
  normalized.toUTF8String(out);
  return out;
}

bool is_nfc(std::string_view text) {
  UErrorCode status = U_ZERO_ERROR;
  icu::UnicodeString s = icu::UnicodeString::fromUTF8(icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
  const bool result = nfc().isNormalized(s, status);
  return U_SUCCESS(status) && result;
}

std::size_t count_code_points(std::string_view text) {
  const auto* bytes = reinterpret_cast<const uint8_t*>(text.data());
  const auto length = static_cast<int32_t>(text.size());
  int32_t pos = 0;
  std::size_t n = 0;
  while (pos < length) {
    UChar32 c;
    U8_NEXT(bytes, pos, length, c);
    ++n;
  }
  return n;
}

std::vector<std::optional<TermIndex>> MatchedText::token_terms() const {
  std::vector<std::optional<TermIndex>> out(token_count);
  for (const auto& occ : occurrences) out[occ.token_begin] = occ.term;
  return out;
}

namespace {
// Unit separator cannot occur inside a token (it is not a letter or digit).
constexpr char kJoin = '\x1f';

std::string join_key(const std::vector<Token>& tokens, std::size_t begin, std::size_t end) {
  std::string key;
  for (std::size_t i = begin; i < end; ++i) {
    if (i > begin) key.push_back(kJoin);
    key += tokens[i].text;
  }
  return key;
}
}  // namespace

TermMatcher::TermMatcher(const std::vector<std::string>& vocabulary) {
  term_tokens_.reserve(vocabulary.size());
  for (std::size_t i = 0; i < vocabulary.size(); ++i) {
    auto tokens = tokenize(vocabulary[i]);
    std::vector<std::string> parts;
    parts.reserve(tokens.size());
    for (auto& t : tokens) parts.push_back(std::move(t.text));
    if (!parts.empty()) {
      std::string key;
      for (std::size_t p = 0; p < parts.size(); ++p) {
        if (p > 0) key.push_back(kJoin);
        key += parts[p];
      }
      lookup_.try_emplace(std::move(key), static_cast<TermIndex>(i));
      max_tokens_ = std::max(max_tokens_, parts.size());
    }
    term_tokens_.push_back(std::move(parts));
  }
}

MatchedText TermMatcher::match(std::string_view text) const {
  MatchedText result;
  result.tokens = tokenize(text);
  result.token_count = result.tokens.size();
  const auto& tokens = result.tokens;
  std::size_t i = 0;
  while (i < tokens.size()) {
    const std::size_t longest = std::min(max_tokens_, tokens.size() - i);
    bool matched = false;
    for (std::size_t len = longest; len >= 1; --len) {
      auto it = lookup_.find(join_key(tokens, i, i + len));
      if (it != lookup_.end()) {
        result.occurrences.push_back(
            TermOccurrence{it->second, tokens[i].begin, tokens[i + len - 1].end, i, i + len});
        i += len;
        matched = true;
        break;
      }
    }
    if (!matched) ++i;
  }
  return result;
}

}  // namespace topiclens
