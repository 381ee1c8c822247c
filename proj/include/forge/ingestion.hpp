#pragma once

// Archive access and document pairing.
//
// Archive layout (identical for fixture directories and live HTTP):
//   listing/<lang>/page-<n>.json   JSON array of {id, lang, url, title}, n = 1, 2, ...
//   html/<lang>/<id>.html          article page
// Listing stops at the first missing or empty page.

#include "forge/corpus.hpp"
#include "forge/extraction.hpp"
#include "forge/scripts.hpp"

#include <json.hpp>

#include <chrono>
#include <functional>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <variant>
#include <vector>

namespace forge {

struct HttpArchive {
  std::string base_url;
  std::size_t politeness_delay_ms = 500;
  std::size_t max_concurrent = 4;
  std::size_t attempts = 3;
};

struct FixtureArchive {
  std::filesystem::path directory;
};

using ArchiveSource = std::variant<HttpArchive, FixtureArchive>;

inline bool is_http_source(std::string_view s) {
  return s.rfind("http://", 0) == 0 || s.rfind("https://", 0) == 0;
}

inline ArchiveSource parse_source(const std::string& s, std::size_t delay_ms = 500, std::size_t max_concurrent = 4) {
  if (is_http_source(s)) {
    if (max_concurrent < 1) throw Error("max_concurrent must be >= 1");
    return HttpArchive{s, delay_ms, max_concurrent, 3};
  }
  return FixtureArchive{s};
}

struct ArticleRef {
  std::string id;
  LanguageCode lang;
  std::string url;
  std::string title;
};

// Resource access behind an ArchiveSource. `fetch` returns nullopt for a
// resource that does not exist and throws Error for transport failures.
class Fetcher {
 public:
  virtual ~Fetcher() = default;
  virtual std::optional<std::string> fetch(const std::string& path) = 0;
  virtual std::size_t max_concurrent() const { return 1; }
};

class FixtureFetcher final : public Fetcher {
 public:
  explicit FixtureFetcher(std::filesystem::path root) : root_(std::move(root)) {
    if (!std::filesystem::is_directory(root_)) throw Error("fixture archive not found: " + root_.string());
  }

  std::optional<std::string> fetch(const std::string& path) override {
    const auto p = root_ / path;
    if (!std::filesystem::is_regular_file(p)) return std::nullopt;
    return read_file(p);
  }

 private:
  std::filesystem::path root_;
};

// Function-backed fetcher; the HTTP implementation lives in http_fetcher.hpp.
class CallbackFetcher final : public Fetcher {
 public:
  using Fn = std::function<std::optional<std::string>(const std::string&)>;
  CallbackFetcher(Fn fn, std::size_t concurrency) : fn_(std::move(fn)), concurrency_(concurrency) {}

  std::optional<std::string> fetch(const std::string& path) override { return fn_(path); }
  std::size_t max_concurrent() const override { return concurrency_; }

 private:
  Fn fn_;
  std::size_t concurrency_;
};

inline std::string listing_path(const LanguageCode& lang, std::size_t page) {
  return "listing/" + lang.str() + "/page-" + std::to_string(page) + ".json";
}

inline std::string html_path(const ArticleRef& ref) { return "html/" + ref.lang.str() + "/" + ref.id + ".html"; }

// Every article ref for `lang`, in archive order. Malformed pages and records
// are skipped with a warning; duplicate ids keep their first occurrence.
inline std::vector<ArticleRef> list_articles(Fetcher& fetcher, const LanguageCode& lang, Warnings* warnings = nullptr) {
  std::vector<ArticleRef> out;
  std::set<std::string> seen;
  const auto warn = [&](std::string m) {
    if (warnings) warnings->add(std::move(m));
  };
  for (std::size_t page = 1;; ++page) {
    const std::string path = listing_path(lang, page);
    const auto body = fetcher.fetch(path);
    if (!body) break;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(*body);
    } catch (const nlohmann::json::exception& e) {
      warn(path + ": malformed listing skipped (" + e.what() + ")");
      continue;
    }
    if (j.is_object() && j.contains("articles")) j = j["articles"];
    if (!j.is_array()) {
      warn(path + ": listing is not a JSON array; skipped");
      continue;
    }
    if (j.empty()) break;
    for (std::size_t k = 0; k < j.size(); ++k) {
      const auto& rec = j[k];
      const auto str = [&](const char* key) -> std::string {
        return rec.is_object() && rec.contains(key) && rec[key].is_string() ? rec[key].get<std::string>() : "";
      };
      ArticleRef ref;
      ref.id = str("id");
      ref.url = str("url");
      ref.title = str("title");
      const std::string rec_lang = str("lang");
      if (ref.id.empty() || ref.title.empty() || (!rec_lang.empty() && rec_lang != lang.str()) ||
          ref.id.find('/') != std::string::npos || ref.id.find("..") != std::string::npos) {
        warn(path + ": record " + std::to_string(k) + " malformed; skipped");
        continue;
      }
      ref.lang = lang;
      if (!seen.insert(ref.id).second) {
        warn(path + ": duplicate article id '" + ref.id + "'; keeping the first");
        continue;
      }
      out.push_back(std::move(ref));
    }
  }
  return out;
}

inline RawHtml fetch_article(Fetcher& fetcher, const ArticleRef& ref) {
  const auto body = fetcher.fetch(html_path(ref));
  if (!body) throw Error("article page missing: " + html_path(ref));
  return RawHtml::from_bytes(ref.id, *body);
}

// True when more than `threshold` of the title's letters are in the expected
// language's script. Untranslated pages are served with the English title.
inline bool is_translated(const ArticleRef& article, const LanguageCode& expected, double threshold = 0.5,
                          const ScriptTable& scripts = default_scripts()) {
  return script_fraction(article.title, scripts.blocks_for(expected)) > threshold;
}

struct PairingResult {
  std::vector<DocumentPair> pairs;
  std::vector<std::string> dangling;  // xx ids whose English link did not resolve
};

namespace detail {

inline std::string last_path_segment(std::string url) {
  if (const auto q = url.find_first_of("?#"); q != std::string::npos) url.resize(q);
  while (!url.empty() && url.back() == '/') url.pop_back();
  const auto slash = url.rfind('/');
  std::string seg = slash == std::string::npos ? url : url.substr(slash + 1);
  if (seg.size() > 5 && seg.compare(seg.size() - 5, 5, ".html") == 0) seg.resize(seg.size() - 5);
  return seg;
}

}  // namespace detail

// Resolves each foreign document's English link by URL, then by trailing
// path segment against English ids.
inline PairingResult pair_documents(const std::vector<Document>& en_docs, const std::vector<Document>& xx_docs) {
  std::map<std::string, const Document*> by_url, by_id;
  for (const auto& d : en_docs) {
    if (!d.url.empty()) by_url.emplace(d.url, &d);
    by_id.emplace(d.id, &d);
  }
  PairingResult result;
  std::set<std::string> used;
  for (const auto& x : xx_docs) {
    const Document* en = nullptr;
    if (!x.english_link.empty()) {
      if (auto it = by_url.find(x.english_link); it != by_url.end()) en = it->second;
      if (!en) {
        if (auto it = by_id.find(detail::last_path_segment(x.english_link)); it != by_id.end()) en = it->second;
      }
    }
    // One foreign version per English article.
    if (!en || !used.insert(en->id).second) {
      result.dangling.push_back(x.id);
      continue;
    }
    result.pairs.push_back({*en, x});
  }
  return result;
}

// Per-language crawl counts.
struct CrawlStats {
  std::size_t listed = 0;
  std::size_t untranslated = 0;
  std::size_t fetched = 0;
  std::size_t extracted = 0;
  std::size_t empty_body = 0;
  std::size_t paired = 0;
  std::size_t dangling = 0;
};

inline nlohmann::ordered_json crawl_report(const std::map<LanguageCode, CrawlStats>& stats) {
  nlohmann::ordered_json articles = nlohmann::ordered_json::object();
  nlohmann::ordered_json detail = nlohmann::ordered_json::object();
  std::size_t dangling = 0;
  for (const auto& [lang, s] : stats) {
    articles[lang.str()] = s.extracted;
    detail[lang.str()] = {{"listed", s.listed},       {"untranslated", s.untranslated}, {"fetched", s.fetched},
                          {"extracted", s.extracted}, {"empty_body", s.empty_body},     {"paired", s.paired},
                          {"dangling", s.dangling}};
    dangling += s.dangling;
  }
  return {{"articles", articles}, {"detail", detail}, {"dangling_links", dangling}};
}

}  // namespace forge
