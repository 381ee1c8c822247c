#include "forge/extraction.hpp"
#include "forge/http_fetcher.hpp"
#include "forge/ingestion.hpp"
#include "forge/random.hpp"

#include <gtest/gtest.h>

#include <atomic>
#include <chrono>
#include <regex>
#include <thread>

#include <unistd.h>

namespace fs = std::filesystem;
using namespace forge;

namespace {

const fs::path kFixture = FORGE_FIXTURE_DIR;

RawHtml page(const std::string& html) { return RawHtml::from_bytes("t", html); }

std::size_t count(const std::string& hay, const std::string& needle) {
  std::size_t n = 0;
  for (auto p = hay.find(needle); p != std::string::npos; p = hay.find(needle, p + 1)) ++n;
  return n;
}

fs::path temp_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("forge_ext_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

Document doc(const std::string& id, const std::string& lang, const std::string& url, const std::string& link = {}) {
  Document d;
  d.id = id;
  d.lang = LanguageCode(lang);
  d.url = url;
  d.title = id;
  d.english_link = link;
  d.body_sentences = {"x"};
  return d;
}

}  // namespace

// --- strip_tweets -----------------------------------------------------------

TEST(StripTweets, RemovesOneTweetSubtree) {
  const std::string before = "<p>Keep.</p>";
  const std::string tweet =
      "<blockquote class=\"twitter-tweet\"><p lang=\"en\">Tweet text</p>&mdash; PM (@pm) "
      "<a href=\"https://twitter.com/x\">May 1</a></blockquote>";
  const std::string after = "<p>Also keep.</p>";
  EXPECT_EQ(strip_tweets(page(before + tweet + after)).text, before + after);
}

TEST(StripTweets, NoTweetIsIdentity) {
  const std::string html = "<html><body><blockquote>Quote</blockquote><script>var a;</script></body></html>";
  EXPECT_EQ(strip_tweets(page(html)).text, html);
}

TEST(StripTweets, TwoTweetsAndOrdinaryBlockquote) {
  const std::string html =
      "<div><blockquote class=\"foo twitter-tweet\"><p>one</p></blockquote>"
      "<blockquote class=\"quote\">Ordinary quotation.</blockquote>"
      "<blockquote class=\"twitter-tweet\" data-lang=\"hi\"><p>two <blockquote>nested</blockquote></p></blockquote>"
      "<script async src=\"https://platform.twitter.com/widgets.js\" charset=\"utf-8\"></script></div>";
  const std::string out = strip_tweets(page(html)).text;
  EXPECT_EQ(out, "<div><blockquote class=\"quote\">Ordinary quotation.</blockquote></div>");
  EXPECT_EQ(count(out, "<blockquote"), 1u);
}

TEST(StripTweets, Idempotent) {
  for (const auto& name : {"en/en-105.html", "en/en-110.html", "hi/hi-201.html"}) {
    const auto raw = page(read_file(kFixture / "site/html" / name));
    const auto once = strip_tweets(raw);
    EXPECT_EQ(strip_tweets(once).text, once.text) << name;
  }
}

// --- extract_body -----------------------------------------------------------

TEST(ExtractBody, MinimalPage) {
  EXPECT_EQ(extract_body(page("<html><body><p>A.</p><p>B.</p></body></html>")), "A.\n\nB.");
}

TEST(ExtractBody, ListItemsBecomeParagraphs) {
  EXPECT_EQ(extract_body(page("<ul><li>One</li><li>Two</li></ul>")), "One\n\nTwo");
}

TEST(ExtractBody, LinkBarDroppedParagraphKept) {
  std::string links;
  for (int i = 0; i < 12; ++i) links += "<a href=\"/s" + std::to_string(i) + "\">Link" + std::to_string(i) + "</a> ";
  std::string para;
  for (int i = 0; i < 80; ++i) para += (i ? " " : "") + std::string("word") + std::to_string(i);
  para += ".";
  for (const std::string& bar : {"<div class=\"bar\">" + links + "</div>", "<nav>" + links + "</nav>"}) {
    const std::string out = extract_body(page("<html><body>" + bar + "<p>" + para + "</p></body></html>"));
    EXPECT_EQ(out, para);
    for (int i = 0; i < 12; ++i) EXPECT_EQ(out.find("Link" + std::to_string(i)), std::string::npos);
  }
}

TEST(ExtractBody, ShortBlocksOutsideMainRegionDropped) {
  const std::string html =
      "<body><div><a href=\"/\">Home</a></div><div>Tiny</div>"
      "<p>The main article paragraph with enough text to matter.</p><p>Second.</p>"
      "<div><a href=\"/x\">Share on social media now</a></div><div>Short tail</div></body>";
  EXPECT_EQ(extract_body(page(html)), "Tiny\n\nThe main article paragraph with enough text to matter.\n\nSecond.");
}

TEST(ExtractBody, EntitiesDecodedAndNbspNormalized) {
  EXPECT_EQ(extract_body(page("<p>Tom&nbsp;&amp;&#160;Jerry &lt;3 &#x0928;&#2350; &eacute;</p>")),
            "Tom & Jerry <3 नम é");
}

TEST(ExtractBody, NoTagsOrScriptContentRemain) {
  const std::regex tag("<[A-Za-z/!][^>]*>");
  for (const auto& e : fs::directory_iterator(kFixture / "site/html/en")) {
    const std::string out = extract_body(strip_tweets(page(read_file(e.path()))));
    EXPECT_FALSE(std::regex_search(out, tag)) << e.path();
    EXPECT_EQ(out.find("not content"), std::string::npos) << e.path();
    EXPECT_EQ(out.find("margin"), std::string::npos) << e.path();
    EXPECT_EQ(out.find("Copyright"), std::string::npos) << e.path();
    EXPECT_EQ(out.find("Photo Gallery"), std::string::npos) << e.path();
  }
}

TEST(ExtractBody, Deterministic) {
  const auto raw = page(read_file(kFixture / "site/html/hi/hi-204.html"));
  EXPECT_EQ(extract_body(raw), extract_body(raw));
}

TEST(ExtractBody, UnparseableNamesArticle) {
  try {
    extract_body(RawHtml::from_bytes("hi-999", "<p>ok</p><div class=\"x"));
    FAIL() << "expected ParseError";
  } catch (const html::ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("hi-999"), std::string::npos);
  }
  EXPECT_THROW(extract_body(page("<p>a</p><!-- never closed")), html::ParseError);
  EXPECT_THROW(extract_body(page("<script>var x = 1;")), html::ParseError);
}

TEST(ExtractBody, EmptyBody) {
  EXPECT_EQ(extract_body(page("<html><head><title>T</title></head><body><nav>x</nav></body></html>")), "");
}

TEST(ExtractBody, TweetTextNeverExtracted) {
  const auto raw = page(read_file(kFixture / "site/html/en/en-110.html"));
  ASSERT_NE(raw.text.find("twitter-tweet"), std::string::npos);
  const std::string out = extract_body(strip_tweets(raw));
  EXPECT_EQ(out.find("pic.twitter.com"), std::string::npos);
  EXPECT_EQ(out.find("@"), std::string::npos);
}

TEST(ExtractBody, LiteralLessThanIsText) {
  EXPECT_EQ(extract_body(page("<p>3 < 5 and 5 > 3</p>")), "3 < 5 and 5 > 3");
}

TEST(Utf8Decoding, LossyReplacementCounted) {
  const auto raw = RawHtml::from_bytes("x", "<p>caf\xE9</p>");
  EXPECT_EQ(raw.replaced_bytes, 1u);
  EXPECT_EQ(extract_body(raw), "caf\xEF\xBF\xBD");
}

TEST(EnglishLink, FoundFromHreflang) {
  EXPECT_EQ(find_english_link(page("<link rel=\"alternate\" hreflang=\"en\" href=\"https://x/en/a?x=1&amp;y=2\">")),
            std::optional<std::string>("https://x/en/a?x=1&y=2"));
  EXPECT_EQ(find_english_link(page("<a hreflang=\"hi\" href=\"/hi\">x</a>")), std::nullopt);
}

TEST(Paragraphs, BlankLinesSeparate) {
  EXPECT_EQ(paragraphs_of("a\nb\n\n\nc\n"), (std::vector<std::string>{"a b", "c"}));
  EXPECT_TRUE(paragraphs_of("").empty());
}

// --- listing ----------------------------------------------------------------

TEST(ListArticles, FixtureCounts) {
  FixtureFetcher f(kFixture / "site");
  const auto en = list_articles(f, LanguageCode("en"));
  ASSERT_EQ(en.size(), 10u);
  EXPECT_EQ(en.front().id, "en-101");
  EXPECT_EQ(en.back().id, "en-110");
  EXPECT_EQ(list_articles(f, LanguageCode("hi")).size(), 10u);
}

TEST(ListArticles, Deterministic) {
  FixtureFetcher f(kFixture / "site");
  const auto a = list_articles(f, LanguageCode("hi"));
  const auto b = list_articles(f, LanguageCode("hi"));
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].id, b[i].id);
}

TEST(ListArticles, EmptyFixture) {
  const auto dir = temp_dir("empty");
  FixtureFetcher f(dir);
  EXPECT_TRUE(list_articles(f, LanguageCode("en")).empty());
}

TEST(ListArticles, StopsAtEmptyPageAndSkipsMalformed) {
  const auto dir = temp_dir("listing");
  write_file(dir / "listing/en/page-1.json",
             R"([{"id":"a","url":"u/a","title":"T a"},{"id":"","title":"no id"},{"id":"a","title":"dup"}])");
  write_file(dir / "listing/en/page-2.json", "{not json");
  write_file(dir / "listing/en/page-3.json", R"({"articles":[{"id":"b","title":"T b","lang":"en"}]})");
  write_file(dir / "listing/en/page-4.json", "[]");
  write_file(dir / "listing/en/page-5.json", R"([{"id":"c","title":"never reached"}])");
  FixtureFetcher f(dir);
  Warnings w;
  const auto refs = list_articles(f, LanguageCode("en"), &w);
  ASSERT_EQ(refs.size(), 2u);
  EXPECT_EQ(refs[0].id, "a");
  EXPECT_EQ(refs[1].id, "b");
  EXPECT_EQ(w.size(), 3u);
}

TEST(ListArticles, RejectsPathLikeIds) {
  const auto dir = temp_dir("traversal");
  write_file(dir / "listing/en/page-1.json", R"([{"id":"../x","title":"T"},{"id":"a/b","title":"T"}])");
  FixtureFetcher f(dir);
  Warnings w;
  EXPECT_TRUE(list_articles(f, LanguageCode("en"), &w).empty());
  EXPECT_EQ(w.size(), 2u);
}

// --- title language ---------------------------------------------------------

TEST(IsTranslated, Examples) {
  EXPECT_TRUE(is_translated({"1", LanguageCode("hi"), "", "प्रधानमंत्री ने योजना शुरू की"}, LanguageCode("hi")));
  EXPECT_FALSE(is_translated({"2", LanguageCode("ta"), "", "PM inaugurates new bridge"}, LanguageCode("ta")));
  EXPECT_FALSE(is_translated({"3", LanguageCode("hi"), "", "2019 ..."}, LanguageCode("hi")));
}

TEST(IsTranslated, CountedMixedTitle) {
  const std::string tamil = "தததததத";  // six letters, against four Latin ones
  const std::string title = tamil + " abcd";
  const ArticleRef ref{"m", LanguageCode("ta"), "", title};
  EXPECT_DOUBLE_EQ(script_fraction(title, default_scripts().blocks_for(LanguageCode("ta"))), 0.6);
  EXPECT_TRUE(is_translated(ref, LanguageCode("ta"), 0.5));
  EXPECT_FALSE(is_translated(ref, LanguageCode("ta"), 0.6));
}

TEST(IsTranslated, ZeroScriptLettersIsNeverTranslated) {
  Rng rng(3);
  const std::vector<std::string> foreign = {"a", "Q", "é", "ب", "த", "ক", " ", "1", "!"};
  for (const auto& lang : default_scripts().languages()) {
    if (lang.is_english()) continue;
    const auto& blocks = default_scripts().blocks_for(lang);
    for (int trial = 0; trial < 200; ++trial) {
      std::string title;
      for (int k = 0; k < 10; ++k) {
        const std::string& piece = foreign[rng.index(foreign.size())];
        if (!in_blocks(to_u32(piece)[0], blocks)) title += piece;
      }
      EXPECT_FALSE(is_translated({"x", lang, "", title}, lang, 0.0)) << lang << " " << title;
    }
  }
}

// --- pairing ----------------------------------------------------------------

TEST(PairDocuments, ThreeDistinctLinks) {
  const std::vector<Document> en = {doc("e1", "en", "http://s/en/e1"), doc("e2", "en", "http://s/en/e2"),
                                    doc("e3", "en", "http://s/en/e3")};
  const std::vector<Document> xx = {doc("h1", "hi", "", "http://s/en/e1"), doc("h2", "hi", "", "/en/e2.html"),
                                    doc("h3", "hi", "", "http://other/en/e3?utm=1")};
  const auto r = pair_documents(en, xx);
  ASSERT_EQ(r.pairs.size(), 3u);
  EXPECT_TRUE(r.dangling.empty());
  EXPECT_EQ(r.pairs[1].en_doc.id, "e2");
  EXPECT_EQ(r.pairs[1].xx_doc.id, "h2");
}

TEST(PairDocuments, DanglingLinkReported) {
  const auto r = pair_documents({doc("e1", "en", "http://s/en/e1")}, {doc("h1", "hi", "", "http://s/en/e9")});
  EXPECT_TRUE(r.pairs.empty());
  EXPECT_EQ(r.dangling, std::vector<std::string>{"h1"});
}

TEST(PairDocuments, SizeBoundProperty) {
  Rng rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<Document> en, xx;
    const std::size_t ne = rng.index(6), nx = rng.index(6);
    for (std::size_t i = 0; i < ne; ++i) en.push_back(doc("e" + std::to_string(i), "en", "http://s/e" + std::to_string(i)));
    for (std::size_t i = 0; i < nx; ++i) {
      xx.push_back(doc("h" + std::to_string(i), "hi", "", "http://s/e" + std::to_string(rng.index(8))));
    }
    const auto r = pair_documents(en, xx);
    EXPECT_LE(r.pairs.size(), std::min(ne, nx));
    EXPECT_EQ(r.pairs.size() + r.dangling.size(), nx);
    std::set<std::string> used;
    for (const auto& p : r.pairs) {
      EXPECT_EQ(detail::last_path_segment(p.xx_doc.english_link), p.en_doc.id);
      EXPECT_TRUE(used.insert(p.en_doc.id).second);
    }
  }
}

// --- live HTTP access against a local server --------------------------------

class LocalArchive : public ::testing::Test {
 protected:
  void SetUp() override {
    server_.Get(R"(/archive/listing/en/page-(\d+)\.json)", [this](const httplib::Request& req, httplib::Response& res) {
      ++requests_;
      if (req.matches[1] == "1") {
        res.set_content(R"([{"id":"a1","title":"First"},{"id":"a2","title":"Second"}])", "application/json");
      } else {
        res.set_content("[]", "application/json");
      }
    });
    server_.Get("/archive/html/en/a1.html", [this](const httplib::Request&, httplib::Response& res) {
      ++requests_;
      res.set_content("<p>Hello</p>", "text/html");
    });
    server_.Get("/archive/flaky", [this](const httplib::Request&, httplib::Response& res) {
      ++requests_;
      if (++flaky_ < 3) {
        res.status = 503;
        return;
      }
      res.set_content("finally", "text/plain");
    });
    server_.Get("/archive/broken", [this](const httplib::Request&, httplib::Response& res) {
      ++requests_;
      res.status = 500;
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }

  void TearDown() override {
    server_.stop();
    thread_.join();
  }

  HttpArchive source(std::size_t delay_ms = 1) const {
    return {"http://127.0.0.1:" + std::to_string(port_) + "/archive/", delay_ms, 2, 3};
  }

  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
  std::atomic<int> requests_{0};
  std::atomic<int> flaky_{0};
};

TEST_F(LocalArchive, ListsAndFetches) {
  HttpFetcher f(source());
  const auto refs = list_articles(f, LanguageCode("en"));
  ASSERT_EQ(refs.size(), 2u);
  EXPECT_EQ(fetch_article(f, refs[0]).text, "<p>Hello</p>");
}

TEST_F(LocalArchive, NotFoundIsAbsentNotRetried) {
  HttpFetcher f(source());
  EXPECT_EQ(f.fetch("nothing/here"), std::nullopt);
  EXPECT_EQ(requests_.load(), 0);  // 404 from the router, no handler ran
  EXPECT_THROW(fetch_article(f, {"a2", LanguageCode("en"), "", "Second"}), Error);
}

TEST_F(LocalArchive, RetriesTransientFailures) {
  HttpFetcher f(source());
  EXPECT_EQ(f.fetch("flaky"), std::optional<std::string>("finally"));
  EXPECT_EQ(flaky_.load(), 3);
}

TEST_F(LocalArchive, PersistentFailureIsFatalWithUrl) {
  HttpFetcher f(source());
  try {
    f.fetch("broken");
    FAIL() << "expected Error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("/archive/broken"), std::string::npos);
  }
  EXPECT_EQ(requests_.load(), 3);
}

TEST_F(LocalArchive, PolitenessDelaySpacesRequests) {
  HttpFetcher f(source(60));
  const auto t0 = std::chrono::steady_clock::now();
  for (int i = 0; i < 4; ++i) f.fetch("html/en/a1.html");
  const auto elapsed = std::chrono::steady_clock::now() - t0;
  EXPECT_GE(elapsed, std::chrono::milliseconds(180));
}

TEST(ParseSource, KindsAndValidation) {
  EXPECT_TRUE(std::holds_alternative<HttpArchive>(parse_source("https://example.org")));
  EXPECT_TRUE(std::holds_alternative<FixtureArchive>(parse_source("some/dir")));
  EXPECT_THROW(parse_source("http://x", 0, 0), Error);
}
