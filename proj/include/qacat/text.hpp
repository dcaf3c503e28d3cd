#ifndef QACAT_TEXT_HPP
#define QACAT_TEXT_HPP

#include <openssl/evp.h>
#include <unicode/normalizer2.h>
#include <unicode/unistr.h>

#include <array>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qacat/error.hpp"

namespace qacat::text {

inline bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

inline std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && is_space(s[b])) ++b;
  while (e > b && is_space(s[e - 1])) --e;
  return std::string(s.substr(b, e - b));
}

inline std::string nfc(std::string_view s) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* norm = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) fail(ErrorCode::InvalidArgument, "ICU NFC normalizer unavailable");
  icu::UnicodeString in = icu::UnicodeString::fromUTF8(icu::StringPiece(s.data(), static_cast<int32_t>(s.size())));
  icu::UnicodeString out = norm->normalize(in, status);
  if (U_FAILURE(status)) fail(ErrorCode::InvalidArgument, "NFC normalization failed");
  std::string result;
  out.toUTF8String(result);
  return result;
}

inline std::string case_fold(std::string_view s) {
  icu::UnicodeString u = icu::UnicodeString::fromUTF8(icu::StringPiece(s.data(), static_cast<int32_t>(s.size())));
  u.foldCase();
  std::string result;
  u.toUTF8String(result);
  return result;
}

/// Trimmed, NFC-normalized, case-folded form used for identity.
inline std::string canonical(std::string_view s) { return nfc(case_fold(nfc(trim(s)))); }

inline std::vector<std::string_view> words(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && is_space(s[i])) ++i;
    std::size_t start = i;
    while (i < s.size() && !is_space(s[i])) ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

inline std::size_t word_count(std::string_view s) { return words(s).size(); }

/// Collapses whitespace runs to single spaces and trims.
inline std::string normalize_space(std::string_view s) {
  std::string out;
  for (auto w : words(s)) {
    if (!out.empty()) out += ' ';
    out += w;
  }
  return out;
}

/// Byte offset just past the n-th word (0 when n == 0); the whole length when
/// the text has fewer words.
inline std::size_t prefix_end_after_words(std::string_view s, std::size_t n) {
  if (n == 0) return 0;
  std::size_t i = 0;
  std::size_t seen = 0;
  while (i < s.size()) {
    while (i < s.size() && is_space(s[i])) ++i;
    std::size_t start = i;
    while (i < s.size() && !is_space(s[i])) ++i;
    if (i > start && ++seen == n) return i;
  }
  return s.size();
}

/// Sentence boundaries: a sentence ends at '.', '!' or '?' followed by
/// whitespace or end of text. Each range includes trailing whitespace so the
/// ranges tile the input.
inline std::vector<std::pair<std::size_t, std::size_t>> sentence_ranges(std::string_view s) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    char c = s[i];
    if ((c == '.' || c == '!' || c == '?') && (i + 1 == s.size() || is_space(s[i + 1]))) {
      std::size_t end = i + 1;
      while (end < s.size() && is_space(s[end])) ++end;
      if (!trim(s.substr(start, end - start)).empty()) out.emplace_back(start, end);
      start = end;
      i = end - 1;
    }
  }
  if (start < s.size() && !trim(s.substr(start)).empty()) out.emplace_back(start, s.size());
  return out;
}

inline std::size_t sentence_count(std::string_view s) { return sentence_ranges(s).size(); }

inline std::string sha256_hex(std::string_view data) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1) {
    fail(ErrorCode::InvalidArgument, "sha256 failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  hex.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    hex += kHex[digest[i] >> 4];
    hex += kHex[digest[i] & 0xf];
  }
  return hex;
}

/// Shortest round-trip decimal rendering for report numbers.
inline std::string format_real(double v) {
  char buf[64];
  for (int precision = 1; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof buf, "%.*g", precision, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

}  // namespace qacat::text

#endif  // QACAT_TEXT_HPP
