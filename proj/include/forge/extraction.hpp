#pragma once

// Article body extraction from HTML.
//
// The tokenizer is deliberately lenient: unknown tags are ignored, unclosed
// elements are tolerated. Only input that cannot be tokenized at all (a tag or
// comment left open at end of input) is rejected.

#include "forge/corpus.hpp"

#include <cctype>
#include <cstdlib>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace forge {

struct RawHtml {
  std::string article_id;
  std::string text;
  std::size_t replaced_bytes = 0;

  static RawHtml from_bytes(std::string article_id, std::string_view bytes) {
    auto repaired = repair_utf8(bytes);
    return {std::move(article_id), std::move(repaired.text), repaired.replaced};
  }
};

namespace html {

struct Attribute {
  std::string name;
  std::string value;
};

enum class TokenKind { Text, StartTag, EndTag, Comment, Declaration };

struct Token {
  TokenKind kind = TokenKind::Text;
  std::size_t begin = 0;
  std::size_t end = 0;  // one past the last byte
  std::string name;     // lower-cased tag name
  std::vector<Attribute> attrs;
  bool self_closing = false;

  const std::string* attr(std::string_view key) const {
    for (const auto& a : attrs) {
      if (a.name == key) return &a.value;
    }
    return nullptr;
  }

  bool has_class(std::string_view cls) const {
    const std::string* c = attr("class");
    if (!c) return false;
    for (const auto& part : split_whitespace(*c)) {
      if (part == cls) return true;
    }
    return false;
  }
};

inline char lower(char c) { return static_cast<char>(std::tolower(static_cast<unsigned char>(c))); }

inline bool iequals_at(std::string_view s, std::size_t pos, std::string_view needle) {
  if (pos + needle.size() > s.size()) return false;
  for (std::size_t i = 0; i < needle.size(); ++i) {
    if (lower(s[pos + i]) != needle[i]) return false;
  }
  return true;
}

inline std::size_t ifind(std::string_view s, std::string_view needle, std::size_t from) {
  for (std::size_t i = from; i + needle.size() <= s.size(); ++i) {
    if (iequals_at(s, i, needle)) return i;
  }
  return std::string_view::npos;
}

inline bool is_raw_text_element(std::string_view name) {
  return name == "script" || name == "style" || name == "textarea" || name == "title";
}

class ParseError : public Error {
 public:
  using Error::Error;
};

inline std::vector<Attribute> parse_attributes(std::string_view s) {
  std::vector<Attribute> attrs;
  std::size_t i = 0;
  const auto skip_ws = [&] {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
  };
  while (true) {
    skip_ws();
    if (i >= s.size()) break;
    if (s[i] == '/') {
      ++i;
      continue;
    }
    const std::size_t name_begin = i;
    while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i])) && s[i] != '=' && s[i] != '/') ++i;
    Attribute a;
    for (std::size_t k = name_begin; k < i; ++k) a.name.push_back(lower(s[k]));
    skip_ws();
    if (i < s.size() && s[i] == '=') {
      ++i;
      skip_ws();
      if (i < s.size() && (s[i] == '"' || s[i] == '\'')) {
        const char q = s[i++];
        const std::size_t vb = i;
        while (i < s.size() && s[i] != q) ++i;
        a.value = std::string(s.substr(vb, i - vb));
        if (i < s.size()) ++i;
      } else {
        const std::size_t vb = i;
        while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i]))) ++i;
        a.value = std::string(s.substr(vb, i - vb));
      }
    }
    if (!a.name.empty()) attrs.push_back(std::move(a));
  }
  return attrs;
}

// Splits a document into tokens covering every byte of the input.
inline std::vector<Token> tokenize(std::string_view s) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  std::size_t text_begin = 0;
  const auto flush_text = [&](std::size_t upto) {
    if (upto > text_begin) tokens.push_back({TokenKind::Text, text_begin, upto, {}, {}, false});
  };
  while (i < s.size()) {
    if (s[i] != '<') {
      ++i;
      continue;
    }
    if (s.compare(i, 4, "<!--") == 0) {
      const auto close = s.find("-->", i + 4);
      if (close == std::string_view::npos) throw ParseError("unterminated comment at byte " + std::to_string(i));
      flush_text(i);
      tokens.push_back({TokenKind::Comment, i, close + 3, {}, {}, false});
      i = text_begin = close + 3;
      continue;
    }
    const bool is_end = i + 1 < s.size() && s[i + 1] == '/';
    const std::size_t name_at = i + (is_end ? 2 : 1);
    const bool decl = !is_end && name_at < s.size() && (s[name_at] == '!' || s[name_at] == '?');
    if (!decl && (name_at >= s.size() || !std::isalpha(static_cast<unsigned char>(s[name_at])))) {
      ++i;  // a literal '<'
      continue;
    }
    // Find the closing '>' outside quoted attribute values.
    std::size_t j = name_at;
    char quote = 0;
    for (; j < s.size(); ++j) {
      if (quote) {
        if (s[j] == quote) quote = 0;
      } else if (s[j] == '"' || s[j] == '\'') {
        std::size_t p = j;
        while (p > name_at && std::isspace(static_cast<unsigned char>(s[p - 1]))) --p;
        if (p > name_at && s[p - 1] == '=') quote = s[j];
      } else if (s[j] == '>') {
        break;
      }
    }
    if (j >= s.size()) throw ParseError("unterminated tag at byte " + std::to_string(i));
    flush_text(i);
    Token t;
    t.begin = i;
    t.end = j + 1;
    if (decl) {
      t.kind = TokenKind::Declaration;
      tokens.push_back(std::move(t));
      i = text_begin = j + 1;
      continue;
    }
    std::size_t k = name_at;
    while (k < j && (std::isalnum(static_cast<unsigned char>(s[k])) || s[k] == '-' || s[k] == ':')) {
      t.name.push_back(lower(s[k]));
      ++k;
    }
    t.kind = is_end ? TokenKind::EndTag : TokenKind::StartTag;
    t.self_closing = j > name_at && s[j - 1] == '/';
    if (!is_end) t.attrs = parse_attributes(s.substr(k, j - k));
    tokens.push_back(t);
    i = text_begin = j + 1;
    if (!is_end && !t.self_closing && is_raw_text_element(t.name)) {
      const std::string close_tag = "</" + t.name;
      const auto close = ifind(s, close_tag, i);
      if (close == std::string_view::npos) {
        throw ParseError("unterminated <" + t.name + "> at byte " + std::to_string(t.begin));
      }
      flush_text(close);
      i = text_begin = close;
    }
  }
  flush_text(s.size());
  return tokens;
}

inline const std::unordered_map<std::string_view, char32_t>& named_entities() {
  static const std::unordered_map<std::string_view, char32_t> table = {
      {"amp", '&'},      {"lt", '<'},       {"gt", '>'},       {"quot", '"'},     {"apos", '\''},
      {"nbsp", 0x00A0},  {"ndash", 0x2013}, {"mdash", 0x2014}, {"lsquo", 0x2018}, {"rsquo", 0x2019},
      {"ldquo", 0x201C}, {"rdquo", 0x201D}, {"hellip", 0x2026}, {"bull", 0x2022}, {"middot", 0x00B7},
      {"copy", 0x00A9},  {"reg", 0x00AE},   {"trade", 0x2122}, {"laquo", 0x00AB}, {"raquo", 0x00BB},
      {"zwj", 0x200D},   {"zwnj", 0x200C},
      // Latin-1 supplement
      {"iexcl", 0x00A1}, {"cent", 0x00A2}, {"pound", 0x00A3}, {"curren", 0x00A4}, {"yen", 0x00A5}, {"brvbar", 0x00A6},
      {"sect", 0x00A7}, {"uml", 0x00A8}, {"ordf", 0x00AA}, {"not", 0x00AC}, {"shy", 0x00AD}, {"macr", 0x00AF},
      {"deg", 0x00B0}, {"plusmn", 0x00B1}, {"sup2", 0x00B2}, {"sup3", 0x00B3}, {"acute", 0x00B4}, {"micro", 0x00B5},
      {"para", 0x00B6}, {"cedil", 0x00B8}, {"sup1", 0x00B9}, {"ordm", 0x00BA}, {"frac14", 0x00BC}, {"frac12", 0x00BD},
      {"frac34", 0x00BE}, {"iquest", 0x00BF}, {"Agrave", 0x00C0}, {"Aacute", 0x00C1}, {"Acirc", 0x00C2}, {"Atilde", 0x00C3},
      {"Auml", 0x00C4}, {"Aring", 0x00C5}, {"AElig", 0x00C6}, {"Ccedil", 0x00C7}, {"Egrave", 0x00C8}, {"Eacute", 0x00C9},
      {"Ecirc", 0x00CA}, {"Euml", 0x00CB}, {"Igrave", 0x00CC}, {"Iacute", 0x00CD}, {"Icirc", 0x00CE}, {"Iuml", 0x00CF},
      {"ETH", 0x00D0}, {"Ntilde", 0x00D1}, {"Ograve", 0x00D2}, {"Oacute", 0x00D3}, {"Ocirc", 0x00D4}, {"Otilde", 0x00D5},
      {"Ouml", 0x00D6}, {"times", 0x00D7}, {"Oslash", 0x00D8}, {"Ugrave", 0x00D9}, {"Uacute", 0x00DA}, {"Ucirc", 0x00DB},
      {"Uuml", 0x00DC}, {"Yacute", 0x00DD}, {"THORN", 0x00DE}, {"szlig", 0x00DF}, {"agrave", 0x00E0}, {"aacute", 0x00E1},
      {"acirc", 0x00E2}, {"atilde", 0x00E3}, {"auml", 0x00E4}, {"aring", 0x00E5}, {"aelig", 0x00E6}, {"ccedil", 0x00E7},
      {"egrave", 0x00E8}, {"eacute", 0x00E9}, {"ecirc", 0x00EA}, {"euml", 0x00EB}, {"igrave", 0x00EC}, {"iacute", 0x00ED},
      {"icirc", 0x00EE}, {"iuml", 0x00EF}, {"eth", 0x00F0}, {"ntilde", 0x00F1}, {"ograve", 0x00F2}, {"oacute", 0x00F3},
      {"ocirc", 0x00F4}, {"otilde", 0x00F5}, {"ouml", 0x00F6}, {"divide", 0x00F7}, {"oslash", 0x00F8}, {"ugrave", 0x00F9},
      {"uacute", 0x00FA}, {"ucirc", 0x00FB}, {"uuml", 0x00FC}, {"yacute", 0x00FD}, {"thorn", 0x00FE}, {"yuml", 0x00FF},
  };
  return table;
}

// Decodes character references; non-breaking spaces become plain spaces.
inline std::string decode_entities(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size();) {
    if (s[i] != '&') {
      out.push_back(s[i++]);
      continue;
    }
    const auto semi = s.find(';', i + 1);
    if (semi == std::string_view::npos || semi - i > 12) {
      out.push_back(s[i++]);
      continue;
    }
    const std::string_view body = s.substr(i + 1, semi - i - 1);
    std::optional<char32_t> cp;
    if (!body.empty() && body[0] == '#') {
      const bool hex = body.size() > 1 && (body[1] == 'x' || body[1] == 'X');
      const std::string digits(body.substr(hex ? 2 : 1));
      char* endp = nullptr;
      const long v = digits.empty() ? -1 : std::strtol(digits.c_str(), &endp, hex ? 16 : 10);
      if (endp && *endp == '\0' && v > 0 && v <= 0x10FFFF && !(v >= 0xD800 && v <= 0xDFFF)) {
        cp = static_cast<char32_t>(v);
      }
    } else {
      const auto& table = named_entities();
      const auto it = table.find(body);
      if (it != table.end()) cp = it->second;
    }
    if (!cp) {
      out.push_back(s[i++]);
      continue;
    }
    append_utf8(out, *cp == 0x00A0 ? U' ' : *cp);
    i = semi + 1;
  }
  return out;
}

}  // namespace html

// Removes embedded tweets (twitter-tweet blockquotes and the widget script).
// Every byte outside the removed elements is preserved.
inline RawHtml strip_tweets(const RawHtml& in) {
  using html::TokenKind;
  const std::string& s = in.text;
  const auto tokens = html::tokenize(s);
  std::vector<std::pair<std::size_t, std::size_t>> cuts;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const auto& t = tokens[i];
    if (t.kind != TokenKind::StartTag) continue;
    if (t.name == "blockquote" && (t.has_class("twitter-tweet") || t.has_class("twitter-video"))) {
      int depth = 1;
      std::size_t j = i + 1;
      for (; j < tokens.size(); ++j) {
        if (tokens[j].name != "blockquote") continue;
        if (tokens[j].kind == TokenKind::StartTag && !tokens[j].self_closing) ++depth;
        if (tokens[j].kind == TokenKind::EndTag && --depth == 0) break;
      }
      const std::size_t end = j < tokens.size() ? tokens[j].end : s.size();
      cuts.emplace_back(t.begin, end);
      i = j;
    } else if (t.name == "script") {
      const std::string* src = t.attr("src");
      std::size_t j = i + 1;
      while (j < tokens.size() && !(tokens[j].kind == TokenKind::EndTag && tokens[j].name == "script")) ++j;
      const std::size_t body_end = j < tokens.size() ? tokens[j].begin : s.size();
      const std::string_view body = std::string_view(s).substr(t.end, body_end - t.end);
      const bool widget = (src && src->find("platform.twitter.com/widgets") != std::string::npos) ||
                          body.find("platform.twitter.com/widgets") != std::string_view::npos;
      if (widget) {
        cuts.emplace_back(t.begin, j < tokens.size() ? tokens[j].end : s.size());
        i = j;
      }
    }
  }
  if (cuts.empty()) return in;
  RawHtml out{in.article_id, {}, in.replaced_bytes};
  std::size_t pos = 0;
  for (const auto& [b, e] : cuts) {
    out.text.append(s, pos, b - pos);
    pos = e;
  }
  out.text.append(s, pos, std::string::npos);
  return out;
}

struct ExtractConfig {
  double max_link_density = 0.5;
  std::size_t min_block_chars = 25;
};

namespace detail {

inline bool is_block_element(std::string_view n) {
  static const std::unordered_set<std::string_view> names = {
      "p",     "div",  "li",     "ul",   "ol",      "h1",      "h2",   "h3",         "h4",   "h5",
      "h6",    "br",   "table",  "tr",   "td",      "th",      "tbody", "thead",     "section", "article",
      "main",  "blockquote", "pre", "dd", "dt",     "dl",      "figure", "figcaption", "hr",  "body",
      "center", "address", "caption"};
  return names.count(n) != 0;
}

inline bool is_boilerplate_element(std::string_view n) {
  static const std::unordered_set<std::string_view> names = {
      "nav",    "header", "footer", "aside",  "script", "style", "noscript", "form",
      "template", "iframe", "head", "select", "button", "svg",   "menu",     "textarea"};
  return names.count(n) != 0;
}

inline bool is_void_element(std::string_view n) {
  static const std::unordered_set<std::string_view> names = {"area", "base", "br",   "col",   "embed",
                                                             "hr",   "img",  "input", "link", "meta",
                                                             "param", "source", "track", "wbr"};
  return names.count(n) != 0;
}

struct TextBlock {
  std::string text;
  std::size_t link_chars = 0;
};

}  // namespace detail

// Returns the main-content text with paragraphs separated by blank lines.
// Throws html::ParseError (with the article id) on unparseable input; an
// empty string means no body was found.
inline std::string extract_body(const RawHtml& in, const ExtractConfig& cfg = {}) {
  using html::TokenKind;
  std::vector<html::Token> tokens;
  try {
    tokens = html::tokenize(in.text);
  } catch (const html::ParseError& e) {
    throw html::ParseError("article '" + in.article_id + "': " + e.what());
  }

  std::vector<detail::TextBlock> blocks(1);
  std::unordered_map<std::string, int> skip_depth;
  int skipping = 0;
  int link_depth = 0;
  const auto new_block = [&] {
    if (!blocks.back().text.empty()) blocks.emplace_back();
  };

  for (const auto& t : tokens) {
    switch (t.kind) {
      case TokenKind::Comment:
      case TokenKind::Declaration:
        break;
      case TokenKind::StartTag:
        if (detail::is_boilerplate_element(t.name) && !t.self_closing && !detail::is_void_element(t.name)) {
          ++skip_depth[t.name];
          ++skipping;
        }
        if (t.name == "a" && !t.self_closing) ++link_depth;
        if (detail::is_block_element(t.name)) new_block();
        break;
      case TokenKind::EndTag:
        if (detail::is_boilerplate_element(t.name)) {
          auto& d = skip_depth[t.name];
          if (d > 0) {
            --d;
            --skipping;
          }
        }
        if (t.name == "a" && link_depth > 0) --link_depth;
        if (detail::is_block_element(t.name)) new_block();
        break;
      case TokenKind::Text: {
        if (skipping > 0) break;
        const std::string decoded =
            html::decode_entities(std::string_view(in.text).substr(t.begin, t.end - t.begin));
        auto& b = blocks.back();
        if (!b.text.empty()) b.text.push_back(' ');
        b.text += decoded;
        if (link_depth > 0) b.link_chars += scalar_count(collapse_whitespace(decoded));
        break;
      }
    }
  }

  struct Scored {
    std::string text;
    std::size_t chars;
    bool candidate;
  };
  std::vector<Scored> scored;
  for (auto& b : blocks) {
    std::string text = collapse_whitespace(b.text);
    if (text.empty()) continue;
    const std::size_t chars = scalar_count(text);
    const double link_density = static_cast<double>(b.link_chars) / static_cast<double>(chars);
    scored.push_back({std::move(text), chars, link_density <= cfg.max_link_density});
  }

  // Densest region: the run of consecutive candidate blocks with the most text.
  std::size_t best_begin = 0, best_end = 0, best_chars = 0;
  for (std::size_t i = 0; i < scored.size();) {
    if (!scored[i].candidate) {
      ++i;
      continue;
    }
    std::size_t j = i, chars = 0;
    while (j < scored.size() && scored[j].candidate) chars += scored[j++].chars;
    if (chars > best_chars) {
      best_begin = i;
      best_end = j;
      best_chars = chars;
    }
    i = j;
  }

  std::string out;
  for (std::size_t i = 0; i < scored.size(); ++i) {
    const auto& b = scored[i];
    if (!b.candidate) continue;
    const bool in_region = i >= best_begin && i < best_end;
    if (!in_region && b.chars < cfg.min_block_chars) continue;
    if (!out.empty()) out += "\n\n";
    out += b.text;
  }
  return out;
}

// The href of the page's pointer to its English version: a <link> or <a>
// carrying hreflang="en".
inline std::optional<std::string> find_english_link(const RawHtml& in) {
  for (const auto& t : html::tokenize(in.text)) {
    if (t.kind != html::TokenKind::StartTag || (t.name != "link" && t.name != "a")) continue;
    const std::string* lang = t.attr("hreflang");
    const std::string* href = t.attr("href");
    if (lang && href && (*lang == "en" || *lang == "en-in" || *lang == "en-IN") && !href->empty()) {
      return html::decode_entities(*href);
    }
  }
  return std::nullopt;
}

// Splits extracted text on blank lines.
inline std::vector<std::string> paragraphs_of(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  for (const auto& line : split_on(text, '\n')) {
    const std::string t = trim(line);
    if (t.empty()) {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
      continue;
    }
    if (!cur.empty()) cur.push_back(' ');
    cur += t;
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

}  // namespace forge
