#pragma once

#include "forge/corpus.hpp"

#include <map>
#include <string>
#include <vector>

namespace forge {

struct Block {
  char32_t first;
  char32_t last;
  const char* name;

  bool contains(char32_t c) const { return c >= first && c <= last; }
};

namespace blocks {
inline constexpr Block kBasicLatin{0x0041, 0x024F, "Latin"};
inline constexpr Block kArabic{0x0600, 0x06FF, "Arabic"};
inline constexpr Block kArabicSupplement{0x0750, 0x077F, "Arabic Supplement"};
inline constexpr Block kDevanagari{0x0900, 0x097F, "Devanagari"};
inline constexpr Block kBengali{0x0980, 0x09FF, "Bengali"};
inline constexpr Block kGurmukhi{0x0A00, 0x0A7F, "Gurmukhi"};
inline constexpr Block kGujarati{0x0A80, 0x0AFF, "Gujarati"};
inline constexpr Block kOriya{0x0B00, 0x0B7F, "Oriya"};
inline constexpr Block kTamil{0x0B80, 0x0BFF, "Tamil"};
inline constexpr Block kTelugu{0x0C00, 0x0C7F, "Telugu"};
inline constexpr Block kKannada{0x0C80, 0x0CFF, "Kannada"};
inline constexpr Block kMalayalam{0x0D00, 0x0D7F, "Malayalam"};
inline constexpr Block kMeeteiMayek{0xABC0, 0xABFF, "Meetei Mayek"};
}  // namespace blocks

using BlockSet = std::vector<Block>;

// The ten Indic blocks plus Arabic: every script a sentence may start with.
inline BlockSet indic_blocks() {
  using namespace blocks;
  return {kDevanagari, kBengali, kGurmukhi, kGujarati, kOriya, kTamil, kTelugu,
          kKannada,    kMalayalam, kMeeteiMayek, kArabic, kArabicSupplement};
}

inline bool in_blocks(char32_t c, const BlockSet& set) {
  for (const auto& b : set) {
    if (b.contains(c)) return true;
  }
  return false;
}

// Per-language script mapping. Overridable through the pipeline config.
class ScriptTable {
 public:
  ScriptTable() {
    using namespace blocks;
    table_["en"] = {kBasicLatin};
    table_["hi"] = {kDevanagari};
    table_["mr"] = {kDevanagari};
    table_["bn"] = {kBengali};
    table_["as"] = {kBengali};
    table_["pa"] = {kGurmukhi};
    table_["gu"] = {kGujarati};
    table_["or"] = {kOriya};
    table_["ta"] = {kTamil};
    table_["te"] = {kTelugu};
    table_["kn"] = {kKannada};
    table_["ml"] = {kMalayalam};
    table_["ur"] = {kArabic, kArabicSupplement};
    table_["mni"] = {kBengali, kMeeteiMayek};
  }

  bool knows(const LanguageCode& lang) const { return table_.count(lang.str()) != 0; }

  const BlockSet& blocks_for(const LanguageCode& lang) const {
    const auto it = table_.find(lang.str());
    if (it == table_.end()) throw Error("no script mapping for language '" + lang.str() + "'");
    return it->second;
  }

  void set(const LanguageCode& lang, BlockSet set) { table_[lang.str()] = std::move(set); }

  std::vector<LanguageCode> languages() const {
    std::vector<LanguageCode> out;
    for (const auto& [code, _] : table_) out.emplace_back(code);
    return out;
  }

 private:
  std::map<std::string, BlockSet> table_;
};

inline const ScriptTable& default_scripts() {
  static const ScriptTable table;
  return table;
}

// Looks a block up by the names used in config files.
inline std::optional<Block> block_by_name(std::string_view name) {
  using namespace blocks;
  for (const Block& b : {kBasicLatin, kArabic, kArabicSupplement, kDevanagari, kBengali, kGurmukhi, kGujarati,
                         kOriya, kTamil, kTelugu, kKannada, kMalayalam, kMeeteiMayek}) {
    if (name == b.name) return b;
  }
  return std::nullopt;
}

// Fraction of letters in `text` that fall in `set`. Non-letters (digits,
// punctuation, spaces) are ignored. Returns 0 when no letters remain.
inline double script_fraction(std::string_view text, const BlockSet& set) {
  std::size_t letters = 0, hits = 0;
  for (const CodePoint& cp : decode(text)) {
    const char32_t c = cp.value;
    if (!is_letter(c) && !is_mark(c)) continue;
    ++letters;
    if (in_blocks(c, set)) ++hits;
  }
  return letters == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(letters);
}

}  // namespace forge
