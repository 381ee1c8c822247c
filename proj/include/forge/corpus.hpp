#pragma once

// Core data types shared by every pipeline stage, plus the corpus and
// dictionary file formats.

#include "forge/text.hpp"

#include <algorithm>
#include <compare>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace forge {

// Unrecoverable failure; carries enough context to find the offending input.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Recoverable problems are collected here instead of thrown.
struct Warnings {
  std::vector<std::string> messages;

  void add(std::string msg) { messages.push_back(std::move(msg)); }
  std::size_t size() const { return messages.size(); }
  bool empty() const { return messages.empty(); }
  void merge(const Warnings& other) {
    messages.insert(messages.end(), other.messages.begin(), other.messages.end());
  }
};

class LanguageCode {
 public:
  LanguageCode() = default;
  explicit LanguageCode(std::string code) : code_(std::move(code)) {
    if (!valid(code_)) throw Error("invalid language code '" + code_ + "'");
  }

  static bool valid(std::string_view code) {
    if (code.size() < 2 || code.size() > 3) return false;
    return std::all_of(code.begin(), code.end(), [](char c) { return c >= 'a' && c <= 'z'; });
  }

  const std::string& str() const { return code_; }
  bool is_english() const { return code_ == "en"; }

  friend auto operator<=>(const LanguageCode&, const LanguageCode&) = default;
  friend std::ostream& operator<<(std::ostream& os, const LanguageCode& l) { return os << l.code_; }

 private:
  std::string code_ = "en";
};

inline const LanguageCode kEnglish{"en"};

// Replaces tabs, newlines and other line separators with a single space so
// the text can be stored in a TSV field.
inline std::string sanitize_field(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (const CodePoint& cp : decode(s)) {
    const char32_t c = cp.value;
    if (c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f' || c == 0x2028 || c == 0x2029 ||
        c == 0x85) {
      if (out.empty() || out.back() != ' ') out.push_back(' ');
    } else {
      out.append(s.substr(cp.offset, cp.length));
    }
  }
  return out;
}

inline bool has_field_breaks(std::string_view s) {
  return s.find_first_of("\t\n\r") != std::string_view::npos;
}

struct Document {
  std::string id;
  LanguageCode lang;
  std::string url;
  std::string title;
  // Target of the page's link to its English version; empty for English pages.
  std::string english_link;
  std::vector<std::string> body_sentences;
};

struct DocumentPair {
  Document en_doc;
  Document xx_doc;
};

enum class AlignMethod { LengthDict, Embedding };

inline std::string_view to_string(AlignMethod m) {
  return m == AlignMethod::LengthDict ? "length" : "embedding";
}

inline AlignMethod parse_method(std::string_view s) {
  if (s == "length") return AlignMethod::LengthDict;
  if (s == "embedding") return AlignMethod::Embedding;
  throw Error("unknown alignment method '" + std::string(s) + "'");
}

// A monotone alignment unit. One side may be empty (insertion/deletion).
struct AlignmentLink {
  std::vector<std::size_t> src;
  std::vector<std::size_t> tgt;
  double score = 0.0;
  AlignMethod method = AlignMethod::LengthDict;

  bool is_one_to_one() const { return src.size() == 1 && tgt.size() == 1; }

  friend bool operator==(const AlignmentLink& a, const AlignmentLink& b) {
    return a.src == b.src && a.tgt == b.tgt && a.method == b.method;
  }
};

// Where a released pair came from.
struct PairOrigin {
  std::string doc_id;
  std::size_t en_index = 0;
  std::size_t xx_index = 0;
};

struct SentencePair {
  std::string en;
  std::string xx;
  PairOrigin origin;

  bool valid() const {
    return !trim(en).empty() && !trim(xx).empty() && !has_field_breaks(en) && !has_field_breaks(xx);
  }
};

// Pair identity ignores origin and whitespace differences.
struct PairKey {
  std::string en;
  std::string xx;

  static PairKey of(const SentencePair& p) { return {collapse_whitespace(p.en), collapse_whitespace(p.xx)}; }

  friend auto operator<=>(const PairKey&, const PairKey&) = default;
};

class BilingualDictionary {
 public:
  // Keeps the first translation seen for a headword. Returns false when the
  // headword was already present.
  bool add(std::string_view english, std::string_view foreign) {
    auto key = case_fold(english);
    if (key.empty() || foreign.empty()) return false;
    return entries_.emplace(std::move(key), std::string(foreign)).second;
  }

  const std::string* lookup(std::string_view folded_english) const {
    const auto it = entries_.find(std::string(folded_english));
    return it == entries_.end() ? nullptr : &it->second;
  }

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const std::map<std::string, std::string>& entries() const { return entries_; }

  friend bool operator==(const BilingualDictionary&, const BilingualDictionary&) = default;

 private:
  std::map<std::string, std::string> entries_;
};

// ---------------------------------------------------------------------------
// File IO

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path& path, std::string_view data) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!out) throw Error("write failed: " + path.string());
}

inline std::vector<std::string> read_lines(const std::filesystem::path& path) {
  const std::string data = read_file(path);
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start < data.size()) {
    auto end = data.find('\n', start);
    if (end == std::string::npos) end = data.size();
    std::string line = data.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
    start = end + 1;
  }
  return lines;
}

inline std::string join_lines(const std::vector<std::string>& lines) {
  std::string out;
  for (const auto& l : lines) {
    out += l;
    out += '\n';
  }
  return out;
}

// Reads a `english<TAB>foreign` dictionary. Malformed lines are skipped with
// a warning; the first translation of a headword wins.
inline BilingualDictionary read_dictionary(const std::filesystem::path& path, Warnings* warnings = nullptr) {
  BilingualDictionary dict;
  const auto lines = read_lines(path);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string& line = lines[i];
    if (line.empty() || line[0] == '#') continue;
    const auto cols = split_on(line, '\t');
    if (cols.size() != 2 || trim(cols[0]).empty() || trim(cols[1]).empty()) {
      if (warnings) {
        warnings->add(path.string() + ":" + std::to_string(i + 1) + ": expected 2 tab-separated columns");
      }
      continue;
    }
    dict.add(trim(cols[0]), trim(cols[1]));
  }
  return dict;
}

inline std::size_t write_corpus(const std::vector<SentencePair>& pairs, const std::filesystem::path& path) {
  std::string out;
  for (const auto& p : pairs) {
    if (!p.valid()) {
      throw Error("invalid sentence pair from document '" + p.origin.doc_id + "' (empty side or tab/newline)");
    }
    out += p.en;
    out += '\t';
    out += p.xx;
    out += '\n';
  }
  write_file(path, out);
  return pairs.size();
}

inline std::vector<SentencePair> read_corpus(const std::filesystem::path& path) {
  std::vector<SentencePair> pairs;
  const auto lines = read_lines(path);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto cols = split_on(lines[i], '\t');
    if (cols.size() != 2) {
      throw Error(path.string() + ":" + std::to_string(i + 1) + ": expected en<TAB>xx");
    }
    pairs.push_back({cols[0], cols[1], {path.filename().string(), i, i}});
  }
  return pairs;
}

// `<name>.<l1>-<l2>.tsv`
inline std::string corpus_filename(std::string_view name, const LanguageCode& l1, const LanguageCode& l2) {
  return std::string(name) + "." + l1.str() + "-" + l2.str() + ".tsv";
}

}  // namespace forge
