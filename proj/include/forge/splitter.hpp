#pragma once

// Moses-style sentence splitting, extended for Indian scripts.
//
// A break is placed after a terminator run followed by whitespace and a
// sentence starter. Starters are uppercase letters, digits, or any base
// letter from the configured script blocks (these scripts are unicameral).
// Breaks only ever fall on whitespace in front of a base character, so no
// boundary lands inside a grapheme cluster.

#include "forge/corpus.hpp"
#include "forge/prefix_data.hpp"
#include "forge/scripts.hpp"

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace forge {

enum class PrefixKind { Always, NumericOnly };

using PrefixTable = std::map<std::string, PrefixKind>;

// Parses the Moses non-breaking prefix format. Later files may extend earlier ones.
inline void parse_prefixes(std::string_view data, PrefixTable& table) {
  for (const auto& raw : split_on(data, '\n')) {
    std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    PrefixKind kind = PrefixKind::Always;
    if (const auto p = line.find("#NUMERIC_ONLY#"); p != std::string::npos) {
      kind = PrefixKind::NumericOnly;
      line = trim(std::string_view(line).substr(0, p));
    }
    while (!line.empty() && line.back() == '.') line.pop_back();
    if (!line.empty()) table[line] = kind;
  }
}

inline PrefixTable load_prefixes(const std::filesystem::path& path) {
  PrefixTable table;
  parse_prefixes(read_file(path), table);
  return table;
}

struct SplitterConfig {
  LanguageCode lang;
  PrefixTable prefixes;
  std::set<char32_t> terminators;
  BlockSet script_blocks;
  // Treat a single script-block letter (plus its combining marks) as an
  // initial. Latin initials come from the prefix list.
  bool single_letter_prefixes = true;

  static std::set<char32_t> default_terminators() {
    return {U'.', U'!', U'?', 0x0964, 0x0965, 0x06D4, 0x061F};
  }

  // Shipped defaults: the English list everywhere, plus the pan-Indic list for
  // every language other than English.
  static SplitterConfig for_language(const LanguageCode& lang) {
    SplitterConfig cfg;
    cfg.lang = lang;
    parse_prefixes(prefix_data::kEnglish, cfg.prefixes);
    if (!lang.is_english()) parse_prefixes(prefix_data::kIndic, cfg.prefixes);
    cfg.terminators = default_terminators();
    cfg.script_blocks = indic_blocks();
    return cfg;
  }
};

namespace detail {

inline bool is_word_char(char32_t c) {
  return is_letter(c) || is_digit(c) || is_mark(c) || c == '.' || c == '-' || c == '_' || c == 0x200C ||
         c == 0x200D;
}

// One base letter followed only by combining marks.
inline bool is_single_letter(const std::vector<CodePoint>& cps, std::size_t b, std::size_t e) {
  if (b >= e || !is_letter(cps[b].value) || is_cluster_extender(cps[b].value)) return false;
  for (std::size_t k = b + 1; k < e; ++k) {
    if (!is_cluster_extender(cps[k].value)) return false;
  }
  return true;
}

inline std::string slice(std::string_view text, const std::vector<CodePoint>& cps, std::size_t b, std::size_t e) {
  if (b >= e) return {};
  const std::size_t from = cps[b].offset;
  const std::size_t to = cps[e - 1].offset + cps[e - 1].length;
  return std::string(text.substr(from, to - from));
}

// Slice with surrounding whitespace removed, except a space that carries a
// combining mark: dropping it would cut the cluster.
inline std::string trimmed_slice(std::string_view text, const std::vector<CodePoint>& cps, std::size_t b,
                                 std::size_t e) {
  while (b < e && is_space(cps[b].value) && !(b + 1 < e && is_cluster_extender(cps[b + 1].value))) ++b;
  while (e > b && is_space(cps[e - 1].value)) --e;
  return slice(text, cps, b, e);
}

}  // namespace detail

inline std::vector<std::string> split_sentences(std::string_view text, const SplitterConfig& cfg) {
  const auto cps = decode(text);
  const std::size_t n = cps.size();
  std::vector<std::string> out;
  std::size_t start = 0;

  const auto is_terminator = [&](char32_t c) { return cfg.terminators.count(c) != 0; };
  const auto is_starter = [&](char32_t c) {
    if (is_cluster_extender(c)) return false;
    if (is_digit(c)) return true;
    if (is_upper(c)) return true;
    return is_letter(c) && in_blocks(c, cfg.script_blocks);
  };

  for (std::size_t i = 0; i < n; ++i) {
    if (!is_terminator(cps[i].value)) continue;
    const std::size_t term_begin = i;
    std::size_t j = i;
    while (j < n && is_terminator(cps[j].value)) ++j;
    const std::size_t term_end = j;
    while (j < n && is_final_punct(cps[j].value)) ++j;
    if (j >= n || !is_space(cps[j].value)) {
      i = j > i ? j - 1 : i;
      continue;
    }
    std::size_t k = j;
    while (k < n && is_space(cps[k].value)) ++k;
    if (k >= n) break;
    std::size_t q = k;
    while (q < n && is_initial_punct(cps[q].value)) ++q;
    while (q < n && q > k && is_space(cps[q].value)) ++q;
    if (q >= n || !is_starter(cps[q].value)) {
      i = k - 1;
      continue;
    }

    bool split = true;
    // Prefix rules only apply to a run of periods directly ending the word.
    bool all_dots = true;
    for (std::size_t t = term_begin; t < term_end; ++t) all_dots = all_dots && cps[t].value == '.';
    if (all_dots) {
      std::size_t wb = term_begin;
      while (wb > start && !is_space(cps[wb - 1].value)) --wb;
      // Moses: the prefix is the trailing run of word characters; closing
      // punctuation between it and the periods disables the prefix rules.
      std::size_t pe = term_begin;
      std::size_t pb = pe;
      while (pb > wb && detail::is_word_char(cps[pb - 1].value)) --pb;
      const std::string prefix = detail::slice(text, cps, pb, pe);
      const bool closing_punct = term_end != j;
      const auto it = cfg.prefixes.find(prefix);
      const bool starts_with_digit = is_digit(cps[q].value);

      if (!closing_punct && it != cfg.prefixes.end() && it->second == PrefixKind::Always) {
        split = false;
      } else if (!closing_punct && cfg.single_letter_prefixes && detail::is_single_letter(cps, pb, pe) &&
                 in_blocks(cps[pb].value, cfg.script_blocks)) {
        split = false;
      } else {
        // Upper-case acronym such as "U.S."
        std::size_t a = pe;
        while (a > pb && (is_upper(cps[a - 1].value) || cps[a - 1].value == '-')) --a;
        if (a < pe && a > pb && cps[a - 1].value == '.') split = false;
      }
      if (split && !closing_punct && it != cfg.prefixes.end() && it->second == PrefixKind::NumericOnly &&
          starts_with_digit) {
        split = false;
      }
    }
    if (!split) {
      i = k - 1;
      continue;
    }
    std::string sentence = detail::trimmed_slice(text, cps, start, j);
    if (!sentence.empty()) out.push_back(std::move(sentence));
    start = k;
    i = k - 1;
  }
  std::string tail = detail::trimmed_slice(text, cps, start, n);
  if (!tail.empty()) out.push_back(std::move(tail));
  return out;
}

enum class UnitKind { Paragraph, ListItem };

struct TextUnit {
  std::string text;
  UnitKind kind = UnitKind::Paragraph;

  friend bool operator==(const TextUnit&, const TextUnit&) = default;
};

namespace detail {

inline bool is_bullet_glyph(char32_t c) {
  switch (c) {
    case 0x2022: case 0x25E6: case 0x25AA: case 0x25AB: case 0x2023: case 0x25CF: case 0x25CB:
    case 0x25A0: case 0x25A1: case 0x25BA: case 0x25B6: case 0x2713: case 0x2714: case 0x27A2:
    case 0x27A4: case 0x2043: case 0x2219: case 0x00B7:
      return true;
    default:
      return false;
  }
}

inline bool is_roman_letter(char32_t c) {
  return c == 'i' || c == 'v' || c == 'x' || c == 'l' || c == 'I' || c == 'V' || c == 'X' || c == 'L';
}

// Length in code points of a list marker at the start of `cps`, 0 if none.
inline std::size_t list_marker_length(const std::vector<CodePoint>& cps) {
  const std::size_t n = cps.size();
  if (n == 0) return 0;
  const auto followed_by_space = [&](std::size_t at) { return at < n && is_space(cps[at].value); };
  const char32_t c0 = cps[0].value;
  if (is_bullet_glyph(c0)) return 1;
  if ((c0 == '-' || c0 == '*' || c0 == 0x2013 || c0 == 0x2014) && followed_by_space(1)) return 1;

  // "(i)", "(a)", "(1)"
  if (c0 == '(') {
    std::size_t k = 1;
    while (k < n && k <= 5 && (is_roman_letter(cps[k].value) || is_digit(cps[k].value))) ++k;
    if (k == 1 && k < n && cps[k].value >= 'a' && cps[k].value <= 'z') ++k;
    if (k > 1 && k < n && cps[k].value == ')' && followed_by_space(k + 1)) return k + 1;
    return 0;
  }
  // "1.", "12)", "i)", "a)"
  std::size_t k = 0;
  while (k < n && k < 3 && is_digit(cps[k].value)) ++k;
  if (k > 0 && k < n && (cps[k].value == '.' || cps[k].value == ')') && followed_by_space(k + 1)) return k + 1;
  k = 0;
  while (k < n && k < 4 && is_roman_letter(cps[k].value)) ++k;
  if (k == 0 && cps[0].value >= 'a' && cps[0].value <= 'z') k = 1;
  if (k > 0 && k < n && cps[k].value == ')' && followed_by_space(k + 1)) return k + 1;
  return 0;
}

}  // namespace detail

// Marks itemised-list paragraphs (bullet, "(i)" or "1." markers) as single
// units with the marker removed. Other paragraphs pass through.
inline std::vector<TextUnit> split_list_items(const std::vector<std::string>& paragraphs) {
  std::vector<TextUnit> out;
  out.reserve(paragraphs.size());
  for (const auto& p : paragraphs) {
    const auto cps = decode(p);
    const std::size_t marker = detail::list_marker_length(cps);
    if (marker == 0) {
      out.push_back({p, UnitKind::Paragraph});
      continue;
    }
    std::string rest = trim(p.substr(marker < cps.size() ? cps[marker].offset : p.size()));
    if (!rest.empty()) out.push_back({std::move(rest), UnitKind::ListItem});
  }
  return out;
}

// Full segmentation of extracted article text: blank-line paragraphs, list
// items kept whole, everything else sentence-split.
inline std::vector<std::string> segment_text(const std::vector<std::string>& paragraphs, const SplitterConfig& cfg) {
  std::vector<std::string> out;
  for (auto& unit : split_list_items(paragraphs)) {
    if (unit.kind == UnitKind::ListItem) {
      out.push_back(sanitize_field(unit.text));
      continue;
    }
    for (auto& s : split_sentences(unit.text, cfg)) out.push_back(sanitize_field(s));
  }
  return out;
}

}  // namespace forge
