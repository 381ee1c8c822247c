#include "forge/corpus.hpp"
#include "forge/prefix_data.hpp"
#include "forge/random.hpp"
#include "forge/scripts.hpp"
#include "forge/text.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <set>

#include <unistd.h>

namespace fs = std::filesystem;
using namespace forge;

namespace {

fs::path temp_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("forge_text_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST(Utf8, RepairCountsInvalidSequences) {
  const std::string bad = std::string("ok") + "\xC3" + "x" + "\xFF" + "\xE0\xA4";  // truncated, stray, truncated
  const auto r = repair_utf8(bad);
  EXPECT_EQ(r.replaced, 3u);
  EXPECT_TRUE(is_valid_utf8(r.text));
  EXPECT_EQ(r.text, "ok\xEF\xBF\xBDx\xEF\xBF\xBD\xEF\xBF\xBD");
}

TEST(Utf8, RejectsOverlongAndSurrogates) {
  EXPECT_FALSE(is_valid_utf8("\xC0\xAF"));
  EXPECT_FALSE(is_valid_utf8("\xED\xA0\x80"));
  EXPECT_TRUE(is_valid_utf8("नमस्ते"));
}

TEST(Utf8, RoundTripsThroughCodePoints) {
  const std::string s = "aéन्\U0001F600";
  EXPECT_EQ(to_utf8(to_u32(s)), s);
  EXPECT_EQ(scalar_count(s), 5u);
}

TEST(Text, TrimAndCollapseHandleUnicodeSpaces) {
  EXPECT_EQ(trim("  x y \t"), "x y");
  EXPECT_EQ(collapse_whitespace("  a  \t b  "), "a b");
  EXPECT_EQ(trim(""), "");
}

TEST(Text, CaseFoldIsSimpleFolding) {
  EXPECT_EQ(case_fold("Dog"), "dog");
  EXPECT_EQ(case_fold("STRASSE"), "strasse");
  EXPECT_EQ(case_fold("कुत्ता"), "कुत्ता");
}

TEST(Text, LexicalTokensSplitOnPunctuationAndDanda) {
  EXPECT_EQ(lexical_tokens("The dog, barked."), (std::vector<std::string>{"the", "dog", "barked"}));
  EXPECT_EQ(lexical_tokens("कुत्ता भौंका। ठीक"), (std::vector<std::string>{"कुत्ता", "भौंका", "ठीक"}));
}

TEST(LanguageCodeTest, Validation) {
  EXPECT_NO_THROW(LanguageCode("mni"));
  EXPECT_THROW(LanguageCode("EN"), Error);
  EXPECT_THROW(LanguageCode("e"), Error);
  EXPECT_THROW(LanguageCode("engl"), Error);
  EXPECT_THROW(LanguageCode(""), Error);
  EXPECT_TRUE(LanguageCode("en").is_english());
}

TEST(Sanitize, TabsAndNewlinesBecomeSpaces) {
  EXPECT_EQ(sanitize_field("a\tb\nc\r\nd"), "a b c d");
  EXPECT_FALSE(has_field_breaks(sanitize_field("x\ty")));
}

TEST(Dictionary, FirstTranslationWins) {
  const auto dir = temp_dir("dict1");
  write_file(dir / "d.tsv", "dog\tकुत्ता\ndog\tश्वान\n");
  const auto d = read_dictionary(dir / "d.tsv");
  ASSERT_EQ(d.size(), 1u);
  EXPECT_EQ(*d.lookup("dog"), "कुत्ता");
}

TEST(Dictionary, EmptyFile) {
  const auto dir = temp_dir("dict2");
  write_file(dir / "d.tsv", "");
  Warnings w;
  EXPECT_TRUE(read_dictionary(dir / "d.tsv", &w).empty());
  EXPECT_TRUE(w.empty());
}

TEST(Dictionary, MalformedLineWarnsWithLineNumber) {
  const auto dir = temp_dir("dict3");
  write_file(dir / "d.tsv", "# comment\ndog\tकुत्ता\ncat\nbird\tपक्षी\nsun\tसूरज\n");
  Warnings w;
  const auto d = read_dictionary(dir / "d.tsv", &w);
  EXPECT_EQ(d.size(), 3u);
  ASSERT_EQ(w.size(), 1u);
  EXPECT_NE(w.messages[0].find(":3:"), std::string::npos);
}

TEST(Dictionary, HeadwordsAreCaseFolded) {
  const auto dir = temp_dir("dict4");
  write_file(dir / "d.tsv", "Prime\tप्रधान\nprime\tमुख्य\n");
  const auto d = read_dictionary(dir / "d.tsv");
  ASSERT_EQ(d.size(), 1u);
  EXPECT_EQ(*d.lookup("prime"), "प्रधान");
}

TEST(Dictionary, UnreadableFileIsFatal) {
  EXPECT_THROW(read_dictionary("/nonexistent/forge/dict.tsv"), Error);
}

TEST(Dictionary, ReadingTwiceGivesEqualDictionaries) {
  const auto dir = temp_dir("dict5");
  write_file(dir / "d.tsv", "a\tअ\nb\tब\na\tआ\nbad line\n");
  EXPECT_EQ(read_dictionary(dir / "d.tsv").entries(), read_dictionary(dir / "d.tsv").entries());
}

TEST(Corpus, WriteThreePairs) {
  const auto dir = temp_dir("corpus1");
  const std::vector<SentencePair> pairs = {{"a", "अ", {}}, {"b", "ब", {}}, {"c", "क", {}}};
  EXPECT_EQ(write_corpus(pairs, dir / "x.hi-en.tsv"), 3u);
  EXPECT_EQ(read_file(dir / "x.hi-en.tsv"), "a\tअ\nb\tब\nc\tक\n");
}

TEST(Corpus, WriteEmpty) {
  const auto dir = temp_dir("corpus2");
  EXPECT_EQ(write_corpus({}, dir / "e.tsv"), 0u);
  EXPECT_EQ(read_file(dir / "e.tsv"), "");
  EXPECT_TRUE(read_corpus(dir / "e.tsv").empty());
}

TEST(Corpus, InvalidPairIsFatal) {
  const auto dir = temp_dir("corpus3");
  EXPECT_THROW(write_corpus({{"a\tb", "x", {}}}, dir / "bad.tsv"), Error);
  EXPECT_THROW(write_corpus({{"  ", "x", {}}}, dir / "bad.tsv"), Error);
}

TEST(Corpus, RoundTripProperty) {
  const auto dir = temp_dir("corpus4");
  Rng rng(7);
  const std::vector<std::string> alphabet = {"a", "Z", " ", "é", "क", "्", "ा", "।", "த", "ு", " ", "1", "\""};
  const auto word = [&] {
    std::string s = "x";
    const std::size_t len = rng.index(12);
    for (std::size_t k = 0; k < len; ++k) s += alphabet[rng.index(alphabet.size())];
    return s + "y";
  };
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<SentencePair> pairs;
    const std::size_t n = rng.index(20);
    for (std::size_t i = 0; i < n; ++i) pairs.push_back({word(), word(), {}});
    const auto path = dir / "rt.hi-en.tsv";
    write_corpus(pairs, path);
    const auto back = read_corpus(path);
    ASSERT_EQ(back.size(), pairs.size());
    for (std::size_t i = 0; i < n; ++i) {
      EXPECT_EQ(back[i].en, pairs[i].en);
      EXPECT_EQ(back[i].xx, pairs[i].xx);
    }
  }
}

TEST(Corpus, FileNaming) {
  EXPECT_EQ(corpus_filename("pmindia", LanguageCode("hi"), LanguageCode("en")), "pmindia.hi-en.tsv");
}

TEST(Scripts, FractionCountsLettersOnly) {
  const auto& t = default_scripts();
  EXPECT_DOUBLE_EQ(script_fraction("प्रधानमंत्री 2019!", t.blocks_for(LanguageCode("hi"))), 1.0);
  EXPECT_DOUBLE_EQ(script_fraction("PM inaugurates", t.blocks_for(LanguageCode("ta"))), 0.0);
  EXPECT_DOUBLE_EQ(script_fraction("123 ...", t.blocks_for(LanguageCode("hi"))), 0.0);
}

TEST(Scripts, DocumentedBlockMapping) {
  const auto& t = default_scripts();
  EXPECT_EQ(t.blocks_for(LanguageCode("ur"))[0].name, std::string("Arabic"));
  ASSERT_EQ(t.blocks_for(LanguageCode("mni")).size(), 2u);
  EXPECT_EQ(t.blocks_for(LanguageCode("as"))[0].name, std::string("Bengali"));
  for (const char* code : {"en", "hi", "bn", "gu", "mr", "te", "ta", "or", "ml", "pa", "kn", "mni", "as", "ur"}) {
    EXPECT_TRUE(t.knows(LanguageCode(code))) << code;
  }
  EXPECT_FALSE(t.knows(LanguageCode("xx")));
  EXPECT_THROW(t.blocks_for(LanguageCode("xx")), Error);
}

TEST(Scripts, BlockByName) {
  ASSERT_TRUE(block_by_name("Tamil"));
  EXPECT_EQ(block_by_name("Tamil")->first, 0x0B80u);
  EXPECT_FALSE(block_by_name("Klingon"));
}

TEST(PrefixData, EmbeddedListsMatchDataFiles) {
  const fs::path data = FORGE_DATA_DIR;
  EXPECT_EQ(read_file(data / "nonbreaking_prefixes/nonbreaking_prefix.en"), prefix_data::kEnglish);
  EXPECT_EQ(read_file(data / "nonbreaking_prefixes/nonbreaking_prefix.indic"), prefix_data::kIndic);
}

TEST(RngTest, SampleIndicesAreDistinctAndReproducible) {
  Rng a(42), b(42);
  const auto x = a.sample_indices(50, 20);
  EXPECT_EQ(x, b.sample_indices(50, 20));
  std::set<std::size_t> uniq(x.begin(), x.end());
  EXPECT_EQ(uniq.size(), 20u);
  for (auto i : x) EXPECT_LT(i, 50u);
  Rng c(1);
  EXPECT_EQ(c.sample_indices(3, 10).size(), 3u);
}
