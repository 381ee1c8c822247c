#pragma once

// UTF-8 handling and the handful of Unicode character classes the pipeline
// needs. Character properties come from ICU; script blocks are our own tables.

#include <unicode/uchar.h>

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace forge {

inline constexpr char32_t kReplacementChar = 0xFFFD;

// One decoded scalar value and the byte range it occupied.
struct CodePoint {
  char32_t value = 0;
  std::size_t offset = 0;
  std::size_t length = 0;
  bool malformed = false;
};

// Decodes one scalar at `pos`. A malformed sequence yields one U+FFFD covering
// its maximal well-formed prefix (at least one byte), as in Unicode's
// recommended substitution practice.
inline CodePoint decode_at(std::string_view s, std::size_t pos) {
  const auto byte = [&](std::size_t i) { return static_cast<unsigned char>(s[i]); };
  const unsigned char b0 = byte(pos);
  CodePoint cp{kReplacementChar, pos, 1, true};
  if (b0 < 0x80) {
    cp.value = b0;
    cp.malformed = false;
    return cp;
  }
  std::size_t need = 0;
  char32_t value = 0;
  unsigned char lo = 0x80, hi = 0xBF;  // allowed range of the second byte
  if (b0 >= 0xC2 && b0 <= 0xDF) {
    need = 1; value = b0 & 0x1F;
  } else if (b0 >= 0xE0 && b0 <= 0xEF) {
    need = 2; value = b0 & 0x0F;
    if (b0 == 0xE0) lo = 0xA0;
    if (b0 == 0xED) hi = 0x9F;
  } else if (b0 >= 0xF0 && b0 <= 0xF4) {
    need = 3; value = b0 & 0x07;
    if (b0 == 0xF0) lo = 0x90;
    if (b0 == 0xF4) hi = 0x8F;
  } else {
    return cp;
  }
  for (std::size_t k = 1; k <= need; ++k) {
    if (pos + k >= s.size()) return cp;
    const unsigned char b = byte(pos + k);
    const bool ok = k == 1 ? (b >= lo && b <= hi) : (b & 0xC0) == 0x80;
    if (!ok) return cp;
    value = (value << 6) | (b & 0x3F);
    cp.length = k + 1;
  }
  cp.value = value;
  cp.length = need + 1;
  cp.malformed = false;
  return cp;
}

inline void append_utf8(std::string& out, char32_t c) {
  if (c < 0x80) {
    out.push_back(static_cast<char>(c));
  } else if (c < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (c >> 6)));
    out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
  } else if (c < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (c >> 12)));
    out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (c >> 18)));
    out.push_back(static_cast<char>(0x80 | ((c >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
  }
}

inline std::vector<CodePoint> decode(std::string_view s) {
  std::vector<CodePoint> out;
  out.reserve(s.size());
  for (std::size_t pos = 0; pos < s.size();) {
    const CodePoint cp = decode_at(s, pos);
    out.push_back(cp);
    pos += cp.length;
  }
  return out;
}

inline std::u32string to_u32(std::string_view s) {
  std::u32string out;
  for (const CodePoint& cp : decode(s)) out.push_back(cp.value);
  return out;
}

inline std::string to_utf8(std::u32string_view s) {
  std::string out;
  for (char32_t c : s) append_utf8(out, c);
  return out;
}

// Result of making arbitrary bytes valid UTF-8.
struct Utf8Repair {
  std::string text;
  std::size_t replaced = 0;
};

inline Utf8Repair repair_utf8(std::string_view bytes) {
  Utf8Repair r;
  r.text.reserve(bytes.size());
  for (std::size_t pos = 0; pos < bytes.size();) {
    const CodePoint cp = decode_at(bytes, pos);
    if (cp.malformed) {
      ++r.replaced;
      append_utf8(r.text, kReplacementChar);
    } else {
      r.text.append(bytes.substr(pos, cp.length));
    }
    pos += cp.length;
  }
  return r;
}

inline bool is_valid_utf8(std::string_view s) { return repair_utf8(s).replaced == 0; }

// Number of Unicode scalar values.
inline std::size_t scalar_count(std::string_view s) {
  std::size_t n = 0;
  for (unsigned char c : s) n += (c & 0xC0) != 0x80;
  return n;
}

// ---------------------------------------------------------------------------
// Character classes

inline bool is_space(char32_t c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v' ||
         c == 0x00A0 || c == 0x1680 || (c >= 0x2000 && c <= 0x200A) || c == 0x2028 ||
         c == 0x2029 || c == 0x202F || c == 0x205F || c == 0x3000;
}

inline bool is_mark(char32_t c) {
  const auto t = u_charType(static_cast<UChar32>(c));
  return t == U_NON_SPACING_MARK || t == U_COMBINING_SPACING_MARK || t == U_ENCLOSING_MARK;
}

// Characters that never start an extended grapheme cluster.
inline bool is_cluster_extender(char32_t c) {
  if (c == 0x200C || c == 0x200D) return true;
  const auto gcb = u_getIntPropertyValue(static_cast<UChar32>(c), UCHAR_GRAPHEME_CLUSTER_BREAK);
  return gcb == U_GCB_EXTEND || gcb == U_GCB_SPACING_MARK || gcb == U_GCB_ZWJ || is_mark(c);
}

inline bool is_letter(char32_t c) { return u_isalpha(static_cast<UChar32>(c)) != 0; }
inline bool is_digit(char32_t c) { return u_isdigit(static_cast<UChar32>(c)) != 0; }
inline bool is_upper(char32_t c) { return u_isupper(static_cast<UChar32>(c)) != 0; }
inline bool is_punct(char32_t c) { return u_ispunct(static_cast<UChar32>(c)) != 0; }

inline bool is_initial_punct(char32_t c) {
  if (c == '\'' || c == '"' || c == '(' || c == '[' || c == 0x00BF || c == 0x00A1) return true;
  const auto t = u_charType(static_cast<UChar32>(c));
  return t == U_INITIAL_PUNCTUATION || t == U_START_PUNCTUATION;
}

inline bool is_final_punct(char32_t c) {
  if (c == '\'' || c == '"' || c == ')' || c == ']' || c == '%') return true;
  const auto t = u_charType(static_cast<UChar32>(c));
  return t == U_FINAL_PUNCTUATION || t == U_END_PUNCTUATION;
}

// Unicode simple case folding, applied per scalar.
inline std::string case_fold(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (const CodePoint& cp : decode(s)) {
    append_utf8(out, static_cast<char32_t>(u_foldCase(static_cast<UChar32>(cp.value), U_FOLD_CASE_DEFAULT)));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Whitespace helpers

inline std::string trim(std::string_view s) {
  const auto cps = decode(s);
  std::size_t b = 0, e = cps.size();
  while (b < e && is_space(cps[b].value)) ++b;
  while (e > b && is_space(cps[e - 1].value)) --e;
  if (b == e) return {};
  return std::string(s.substr(cps[b].offset, cps[e - 1].offset + cps[e - 1].length - cps[b].offset));
}

// Trims and collapses every whitespace run (including NBSP, tabs and
// newlines) to one ASCII space.
inline std::string collapse_whitespace(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool pending_space = false;
  for (const CodePoint& cp : decode(s)) {
    if (is_space(cp.value)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.append(s.substr(cp.offset, cp.length));
  }
  return out;
}

inline std::vector<std::string> split_whitespace(std::string_view s) {
  std::vector<std::string> out;
  std::string cur;
  for (const CodePoint& cp : decode(s)) {
    if (is_space(cp.value)) {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.append(s.substr(cp.offset, cp.length));
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

// Splits on whitespace and punctuation, case-folding each token. Used for
// dictionary lookup on both sides of a bitext.
inline std::vector<std::string> lexical_tokens(std::string_view s) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) out.push_back(case_fold(cur));
    cur.clear();
  };
  for (const CodePoint& cp : decode(s)) {
    const char32_t c = cp.value;
    if (is_space(c) || is_punct(c) || c == 0x0964 || c == 0x0965 || c == 0x06D4) {
      flush();
    } else {
      cur.append(s.substr(cp.offset, cp.length));
    }
  }
  flush();
  return out;
}

inline std::vector<std::string> split_on(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto p = s.find(sep, start);
    if (p == std::string_view::npos) {
      out.emplace_back(s.substr(start));
      return out;
    }
    out.emplace_back(s.substr(start, p - start));
    start = p + 1;
  }
}

}  // namespace forge
