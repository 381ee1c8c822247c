#pragma once

// Stage runners and the end-to-end pipeline.
//
// Artifact tree under the output directory:
//   documents/<lang>/listing.json   article refs kept by the crawl
//   documents/<lang>/<id>.html      fetched page
//   documents/<lang>/<id>.txt       extracted body, blank line between paragraphs
//   documents/<lang>/index.json     extracted documents with metadata
//   sentences/<lang>/<id>.txt       one sentence per line
//   links/<xx>/...                  see load_link_tree
//   release/<xx>-en.tsv, release/report.json
//   reports/crawl.json, reports/agreement.json, reports/pipeline.json
//
// Warnings carry paths relative to the output directory, so reports are
// byte-identical between runs in different locations.

#include "forge/align_embed.hpp"
#include "forge/align_length.hpp"
#include "forge/evaluation.hpp"
#include "forge/extraction.hpp"
#include "forge/http_fetcher.hpp"
#include "forge/ingestion.hpp"
#include "forge/parallel.hpp"
#include "forge/release.hpp"
#include "forge/splitter.hpp"

#include <json.hpp>

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace forge {

class ConfigError : public Error {
 public:
  using Error::Error;
};

class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& what) : Error("stage '" + stage + "': " + what), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

enum class EmbedProvider { Files, Stub };

struct EmbedSettings {
  std::set<LanguageCode> languages;
  EmbedProvider provider = EmbedProvider::Files;
  std::filesystem::path dir;  // Files: <dir>/<lang>/<id>.emb
  std::size_t stub_dim = 64;
  std::uint64_t stub_seed = 1;
  EmbedAlignParams params;
};

struct SplitSettings {
  std::size_t dev = 0;
  std::size_t test = 0;
  std::uint64_t seed = 0;
};

struct PipelineConfig {
  std::string source;  // URL or fixture directory
  std::vector<LanguageCode> languages;
  double title_threshold = 0.5;
  std::size_t politeness_delay_ms = 500;
  std::size_t max_concurrent = 4;
  std::size_t workers = 1;
  ExtractConfig extract;
  std::map<LanguageCode, std::vector<std::filesystem::path>> prefixes;
  bool single_letter_prefixes = true;
  LengthModel length_model;
  std::map<LanguageCode, std::filesystem::path> dictionaries;
  std::optional<EmbedSettings> embed;
  std::optional<SplitSettings> split;
  ScriptTable scripts = default_scripts();

  SplitterConfig splitter_for(const LanguageCode& lang) const {
    SplitterConfig cfg = SplitterConfig::for_language(lang);
    cfg.single_letter_prefixes = single_letter_prefixes;
    if (auto it = prefixes.find(lang); it != prefixes.end()) {
      cfg.prefixes.clear();
      for (const auto& p : it->second) parse_prefixes(read_file(p), cfg.prefixes);
    }
    return cfg;
  }

  bool embeds(const LanguageCode& lang) const { return embed && embed->languages.count(lang) != 0; }
};

namespace detail {

inline void require_keys(const nlohmann::json& j, const std::string& where, std::initializer_list<std::string_view> allowed) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [key, _] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ConfigError(where + ": unknown key '" + key + "'");
    }
  }
}

inline double num(const nlohmann::json& j, const std::string& where) {
  if (!j.is_number()) throw ConfigError(where + ": expected a number");
  return j.get<double>();
}

inline std::size_t count(const nlohmann::json& j, const std::string& where) {
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<long long>() >= 0)) {
    throw ConfigError(where + ": expected a non-negative integer");
  }
  return j.get<std::size_t>();
}

inline std::string str(const nlohmann::json& j, const std::string& where) {
  if (!j.is_string()) throw ConfigError(where + ": expected a string");
  return j.get<std::string>();
}

inline LanguageCode lang_code(const std::string& s, const std::string& where, const ScriptTable& scripts) {
  if (!LanguageCode::valid(s)) throw ConfigError(where + ": invalid language code '" + s + "'");
  LanguageCode l(s);
  if (!scripts.knows(l)) throw ConfigError(where + ": unknown language '" + s + "' (no script mapping)");
  return l;
}

}  // namespace detail

// Parses and validates a JSON config. Relative paths resolve against `base`.
inline PipelineConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base) {
  using namespace detail;
  require_keys(j, "config", {"source", "languages", "title_threshold", "politeness_delay_ms", "max_concurrent",
                             "workers", "extract", "splitter", "length_model", "dictionaries", "embed", "split",
                             "scripts"});
  PipelineConfig cfg;
  const auto resolve = [&](const std::string& p) -> std::filesystem::path {
    const std::filesystem::path path(p);
    return path.is_absolute() ? path : base / path;
  };

  // Script overrides first: they decide which languages are known.
  if (j.contains("scripts")) {
    const auto& s = j["scripts"];
    if (!s.is_object()) throw ConfigError("scripts: expected an object");
    for (const auto& [code, names] : s.items()) {
      if (!LanguageCode::valid(code)) throw ConfigError("scripts: invalid language code '" + code + "'");
      if (!names.is_array() || names.empty()) throw ConfigError("scripts." + code + ": expected a non-empty array");
      BlockSet set;
      for (const auto& n : names) {
        const auto b = block_by_name(str(n, "scripts." + code));
        if (!b) throw ConfigError("scripts." + code + ": unknown block '" + n.get<std::string>() + "'");
        set.push_back(*b);
      }
      cfg.scripts.set(LanguageCode(code), std::move(set));
    }
  }

  if (!j.contains("source")) throw ConfigError("config: 'source' is required");
  const std::string source = str(j["source"], "source");
  cfg.source = is_http_source(source) ? source : resolve(source).string();

  if (!j.contains("languages") || !j["languages"].is_array() || j["languages"].empty()) {
    throw ConfigError("config: 'languages' must be a non-empty array");
  }
  std::set<LanguageCode> seen;
  for (const auto& l : j["languages"]) {
    const auto code = lang_code(str(l, "languages"), "languages", cfg.scripts);
    if (code.is_english()) throw ConfigError("languages: list the non-English languages only");
    if (!seen.insert(code).second) throw ConfigError("languages: duplicate '" + code.str() + "'");
    cfg.languages.push_back(code);
  }
  const auto configured = [&](const std::string& code, const std::string& where) {
    const auto l = lang_code(code, where, cfg.scripts);
    if (!l.is_english() && !seen.count(l)) throw ConfigError(where + ": language '" + code + "' is not in 'languages'");
    return l;
  };

  if (j.contains("title_threshold")) {
    cfg.title_threshold = num(j["title_threshold"], "title_threshold");
    if (cfg.title_threshold < 0.0 || cfg.title_threshold >= 1.0) throw ConfigError("title_threshold: must be in [0, 1)");
  }
  if (j.contains("politeness_delay_ms")) cfg.politeness_delay_ms = count(j["politeness_delay_ms"], "politeness_delay_ms");
  if (j.contains("max_concurrent")) cfg.max_concurrent = count(j["max_concurrent"], "max_concurrent");
  if (j.contains("workers")) cfg.workers = count(j["workers"], "workers");
  if (cfg.max_concurrent < 1 || cfg.workers < 1) throw ConfigError("max_concurrent and workers must be >= 1");

  if (j.contains("extract")) {
    const auto& e = j["extract"];
    require_keys(e, "extract", {"max_link_density", "min_block_chars"});
    if (e.contains("max_link_density")) cfg.extract.max_link_density = num(e["max_link_density"], "extract.max_link_density");
    if (e.contains("min_block_chars")) cfg.extract.min_block_chars = count(e["min_block_chars"], "extract.min_block_chars");
  }

  if (j.contains("splitter")) {
    const auto& s = j["splitter"];
    require_keys(s, "splitter", {"prefixes", "single_letter_prefixes"});
    if (s.contains("single_letter_prefixes")) {
      if (!s["single_letter_prefixes"].is_boolean()) throw ConfigError("splitter.single_letter_prefixes: expected a boolean");
      cfg.single_letter_prefixes = s["single_letter_prefixes"].get<bool>();
    }
    if (s.contains("prefixes")) {
      if (!s["prefixes"].is_object()) throw ConfigError("splitter.prefixes: expected an object");
      for (const auto& [code, files] : s["prefixes"].items()) {
        const std::string where = "splitter.prefixes." + code;
        const auto l = configured(code, where);
        if (!files.is_array()) throw ConfigError(where + ": expected an array of paths");
        for (const auto& f : files) {
          auto p = resolve(str(f, where));
          if (!std::filesystem::is_regular_file(p)) throw ConfigError(where + ": file not found: " + p.string());
          cfg.prefixes[l].push_back(std::move(p));
        }
      }
    }
  }

  if (j.contains("length_model")) {
    const auto& m = j["length_model"];
    require_keys(m, "length_model", {"c", "s2", "kappa", "lambda"});
    if (m.contains("c")) cfg.length_model.mean_ratio = num(m["c"], "length_model.c");
    if (m.contains("s2")) cfg.length_model.variance = num(m["s2"], "length_model.s2");
    if (m.contains("kappa")) cfg.length_model.skip_penalty = num(m["kappa"], "length_model.kappa");
    if (m.contains("lambda")) cfg.length_model.lex_weight = num(m["lambda"], "length_model.lambda");
    try {
      cfg.length_model.validate();
    } catch (const Error& e) {
      throw ConfigError(std::string("length_model: ") + e.what());
    }
  }

  if (j.contains("dictionaries")) {
    if (!j["dictionaries"].is_object()) throw ConfigError("dictionaries: expected an object");
    for (const auto& [code, path] : j["dictionaries"].items()) {
      const std::string where = "dictionaries." + code;
      const auto l = configured(code, where);
      auto p = resolve(str(path, where));
      if (!std::filesystem::is_regular_file(p)) throw ConfigError(where + ": file not found: " + p.string());
      cfg.dictionaries[l] = std::move(p);
    }
  }

  if (j.contains("embed") && !j["embed"].is_null()) {
    const auto& e = j["embed"];
    require_keys(e, "embed", {"languages", "provider", "dir", "stub_dim", "stub_seed", "max_block", "skip_cost",
                              "window", "norm_samples", "seed", "exact_cell_limit"});
    EmbedSettings es;
    if (e.contains("languages")) {
      if (!e["languages"].is_array()) throw ConfigError("embed.languages: expected an array");
      for (const auto& l : e["languages"]) es.languages.insert(configured(str(l, "embed.languages"), "embed.languages"));
    } else {
      es.languages.insert(cfg.languages.begin(), cfg.languages.end());
    }
    const std::string provider = e.contains("provider") ? str(e["provider"], "embed.provider") : "files";
    if (provider == "files") {
      es.provider = EmbedProvider::Files;
      if (!e.contains("dir")) throw ConfigError("embed.dir: required for provider 'files'");
      es.dir = resolve(str(e["dir"], "embed.dir"));
      if (!std::filesystem::is_directory(es.dir)) throw ConfigError("embed.dir: directory not found: " + es.dir.string());
    } else if (provider == "stub") {
      es.provider = EmbedProvider::Stub;
    } else {
      throw ConfigError("embed.provider: expected 'files' or 'stub'");
    }
    if (e.contains("stub_dim")) es.stub_dim = count(e["stub_dim"], "embed.stub_dim");
    if (es.stub_dim < 8) throw ConfigError("embed.stub_dim: must be >= 8");
    if (e.contains("stub_seed")) es.stub_seed = count(e["stub_seed"], "embed.stub_seed");
    if (e.contains("max_block")) es.params.max_block = count(e["max_block"], "embed.max_block");
    if (e.contains("skip_cost")) es.params.skip_cost = num(e["skip_cost"], "embed.skip_cost");
    if (e.contains("window")) es.params.window = count(e["window"], "embed.window");
    if (e.contains("norm_samples")) es.params.norm_samples = count(e["norm_samples"], "embed.norm_samples");
    if (e.contains("seed")) es.params.seed = count(e["seed"], "embed.seed");
    if (e.contains("exact_cell_limit")) es.params.exact_cell_limit = count(e["exact_cell_limit"], "embed.exact_cell_limit");
    try {
      es.params.validate();
    } catch (const Error& err) {
      throw ConfigError(std::string("embed: ") + err.what());
    }
    cfg.embed = std::move(es);
  }

  if (j.contains("split") && !j["split"].is_null()) {
    const auto& s = j["split"];
    require_keys(s, "split", {"dev", "test", "seed"});
    SplitSettings ss;
    if (s.contains("dev")) ss.dev = count(s["dev"], "split.dev");
    if (s.contains("test")) ss.test = count(s["test"], "split.test");
    if (s.contains("seed")) ss.seed = count(s["seed"], "split.seed");
    cfg.split = ss;
  }
  return cfg;
}

inline PipelineConfig load_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return parse_config(j, path.parent_path());
}

// ---------------------------------------------------------------------------
// Document index files

inline nlohmann::ordered_json ref_json(const ArticleRef& r) {
  return {{"id", r.id}, {"lang", r.lang.str()}, {"url", r.url}, {"title", r.title}};
}

inline std::vector<ArticleRef> read_listing(const std::filesystem::path& path) {
  const auto j = nlohmann::json::parse(read_file(path));
  std::vector<ArticleRef> out;
  for (const auto& r : j) {
    out.push_back({r.at("id").get<std::string>(), LanguageCode(r.at("lang").get<std::string>()),
                   r.at("url").get<std::string>(), r.at("title").get<std::string>()});
  }
  return out;
}

inline void write_json(const std::filesystem::path& path, const nlohmann::ordered_json& j) {
  write_file(path, j.dump(2) + "\n");
}

// Metadata of extracted documents, without sentences.
inline std::vector<Document> read_document_index(const std::filesystem::path& path) {
  const auto j = nlohmann::json::parse(read_file(path));
  std::vector<Document> out;
  for (const auto& r : j) {
    Document d;
    d.id = r.at("id").get<std::string>();
    d.lang = LanguageCode(r.at("lang").get<std::string>());
    d.url = r.value("url", "");
    d.title = r.value("title", "");
    d.english_link = r.value("english_link", "");
    out.push_back(std::move(d));
  }
  return out;
}

inline void write_document_index(const std::vector<Document>& docs, const std::filesystem::path& path) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& d : docs) {
    arr.push_back({{"id", d.id}, {"lang", d.lang.str()}, {"url", d.url}, {"title", d.title},
                   {"english_link", d.english_link}});
  }
  write_json(path, arr);
}

// ---------------------------------------------------------------------------
// Stages

// Language subdirectories of `dir` that contain `marker`, sorted.
inline std::vector<LanguageCode> languages_in(const std::filesystem::path& dir, const std::string& marker) {
  std::vector<LanguageCode> out;
  if (!std::filesystem::is_directory(dir)) throw Error("directory not found: " + dir.string());
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    const auto name = e.path().filename().string();
    if (e.is_directory() && LanguageCode::valid(name) && std::filesystem::exists(e.path() / marker)) out.emplace_back(name);
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline std::vector<LanguageCode> with_english(const std::vector<LanguageCode>& langs) {
  std::vector<LanguageCode> out{kEnglish};
  for (const auto& l : langs) {
    if (!l.is_english()) out.push_back(l);
  }
  return out;
}

struct CrawlOptions {
  double title_threshold = 0.5;
  std::size_t workers = 1;
  const ScriptTable* scripts = &default_scripts();
};

// Lists and fetches English plus `langs` into <docs_dir>/<lang>/.
inline std::map<LanguageCode, CrawlStats> crawl(Fetcher& fetcher, const std::vector<LanguageCode>& langs,
                                                const std::filesystem::path& docs_dir, const CrawlOptions& opt,
                                                Warnings& warnings) {
  std::map<LanguageCode, CrawlStats> stats;
  for (const auto& lang : with_english(langs)) {
    auto& st = stats[lang];
    Warnings w;
    auto refs = list_articles(fetcher, lang, &w);
    st.listed = refs.size();
    std::vector<ArticleRef> kept;
    for (auto& r : refs) {
      if (!lang.is_english() && !is_translated(r, lang, opt.title_threshold, *opt.scripts)) {
        ++st.untranslated;
        continue;
      }
      kept.push_back(std::move(r));
    }
    std::vector<std::optional<std::string>> pages(kept.size());
    const std::size_t threads = std::min(opt.workers, std::max<std::size_t>(1, fetcher.max_concurrent()));
    parallel_for(kept.size(), threads, [&](std::size_t i) { pages[i] = fetcher.fetch(html_path(kept[i])); });
    const auto dir = docs_dir / lang.str();
    std::filesystem::create_directories(dir);
    nlohmann::ordered_json listing = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < kept.size(); ++i) {
      if (!pages[i]) {
        w.add(html_path(kept[i]) + ": page missing; skipped");
        continue;
      }
      write_file(dir / (kept[i].id + ".html"), *pages[i]);
      listing.push_back(ref_json(kept[i]));
      ++st.fetched;
    }
    write_json(dir / "listing.json", listing);
    warnings.merge(w);
  }
  return stats;
}

// Extracts every fetched page of each language. Unparseable pages are skipped
// with a warning.
// Reads <in_dir>/<lang>/{listing.json,<id>.html}; writes <out_dir>/<lang>/{<id>.txt,index.json}.
inline void extract(const std::filesystem::path& in_dir, const std::filesystem::path& out_dir,
                    const std::vector<LanguageCode>& langs, const ExtractConfig& cfg, std::size_t workers,
                    Warnings& warnings, std::map<LanguageCode, CrawlStats>* stats = nullptr) {
  for (const auto& lang : langs) {
    const auto dir = in_dir / lang.str();
    const auto odir = out_dir / lang.str();
    std::filesystem::create_directories(odir);
    const auto listing_file = dir / "listing.json";
    if (!std::filesystem::exists(listing_file)) throw Error("missing " + listing_file.string());
    const auto refs = read_listing(listing_file);
    struct Out {
      std::optional<Document> doc;
      std::string text;
      Warnings w;
      bool empty = false;
    };
    std::vector<Out> outs(refs.size());
    parallel_for(refs.size(), workers, [&](std::size_t i) {
      const auto& r = refs[i];
      const std::string rel = lang.str() + "/" + r.id + ".html";
      auto& o = outs[i];
      RawHtml raw = RawHtml::from_bytes(r.id, read_file(dir / (r.id + ".html")));
      if (raw.replaced_bytes > 0) o.w.add(rel + ": " + std::to_string(raw.replaced_bytes) + " invalid UTF-8 bytes replaced");
      std::string body;
      std::optional<std::string> link;
      try {
        raw = strip_tweets(raw);
        body = extract_body(raw, cfg);
        if (!lang.is_english()) link = find_english_link(raw);
      } catch (const html::ParseError& e) {
        o.w.add(rel + ": unparseable; skipped (" + e.what() + ")");
        return;
      }
      if (trim(body).empty()) {
        o.w.add(rel + ": no body text");
        o.empty = true;
        return;
      }
      Document d;
      d.id = r.id;
      d.lang = lang;
      d.url = r.url;
      d.title = r.title;
      d.english_link = link.value_or("");
      o.doc = std::move(d);
      o.text = std::move(body);
    });
    std::vector<Document> index;
    for (auto& o : outs) {
      warnings.merge(o.w);
      if (stats && o.empty) ++(*stats)[lang].empty_body;
      if (!o.doc) continue;
      write_file(odir / (o.doc->id + ".txt"), o.text + "\n");
      index.push_back(std::move(*o.doc));
      if (stats) ++(*stats)[lang].extracted;
    }
    write_document_index(index, odir / "index.json");
  }
}

// Splits every extracted document of `lang` into sentences/<lang>/<id>.txt.
inline void split_documents(const std::filesystem::path& docs_dir, const std::filesystem::path& sentences_dir,
                            const LanguageCode& lang, const SplitterConfig& cfg, std::size_t workers) {
  const auto docs = read_document_index(docs_dir / lang.str() / "index.json");
  std::filesystem::create_directories(sentences_dir / lang.str());
  parallel_for(docs.size(), workers, [&](std::size_t i) {
    const auto text = read_file(docs_dir / lang.str() / (docs[i].id + ".txt"));
    write_file(sentences_dir / lang.str() / (docs[i].id + ".txt"), join_lines(segment_text(paragraphs_of(text), cfg)));
  });
}

inline std::vector<Document> load_documents(const std::filesystem::path& docs_dir,
                                            const std::filesystem::path& sentences_dir, const LanguageCode& lang) {
  auto docs = read_document_index(docs_dir / lang.str() / "index.json");
  for (auto& d : docs) d.body_sentences = read_lines(sentences_dir / lang.str() / (d.id + ".txt"));
  return docs;
}

struct AlignOptions {
  LengthModel length_model;
  const BilingualDictionary* dictionary = nullptr;
  const EmbedSettings* embed = nullptr;  // null: length aligner only
  std::filesystem::path sentences_dir;   // needed by the files provider
  std::size_t workers = 1;
};

struct AlignStats {
  std::size_t paired = 0;
  std::size_t dangling = 0;
  std::size_t aligned = 0;
};

// Pairs documents and writes links/<xx>/ for one language.
inline AlignStats align_language(const LanguageCode& lang, const std::vector<Document>& en_docs,
                                 const std::vector<Document>& xx_docs, const std::filesystem::path& links_dir,
                                 const AlignOptions& opt, Warnings& warnings) {
  AlignStats st;
  const auto pairing = pair_documents(en_docs, xx_docs);
  st.paired = pairing.pairs.size();
  st.dangling = pairing.dangling.size();
  for (const auto& id : pairing.dangling) warnings.add(lang.str() + "/" + id + ": English link does not resolve");

  const auto dir = links_dir / lang.str();
  std::filesystem::create_directories(dir);
  const std::optional<LexicalScorer> lex =
      opt.dictionary ? std::optional<LexicalScorer>(LexicalScorer(*opt.dictionary)) : std::nullopt;

  struct Out {
    bool aligned = false;
    std::vector<AlignmentLink> length;
    std::optional<std::vector<AlignmentLink>> embed;
    Warnings w;
  };
  std::vector<Out> outs(pairing.pairs.size());
  parallel_for(outs.size(), opt.workers, [&](std::size_t i) {
    const auto& [en, xx] = pairing.pairs[i];
    auto& o = outs[i];
    if (en.body_sentences.empty() || xx.body_sentences.empty()) {
      o.w.add(lang.str() + "/" + xx.id + ": no sentences on one side; not aligned");
      return;
    }
    o.length = align_length(en.body_sentences, xx.body_sentences, opt.length_model, lex ? &*lex : nullptr);
    o.aligned = true;
    if (!opt.embed) return;
    std::optional<EmbeddingMatrix> se, te;
    if (opt.embed->provider == EmbedProvider::Stub) {
      se = stub_embeddings(en.body_sentences, opt.embed->stub_dim, opt.embed->stub_seed);
      te = stub_embeddings(xx.body_sentences, opt.embed->stub_dim, opt.embed->stub_seed);
    } else {
      const auto ep = opt.embed->dir / "en" / (en.id + ".emb");
      const auto xp = opt.embed->dir / lang.str() / (xx.id + ".emb");
      if (!std::filesystem::exists(ep) || !std::filesystem::exists(xp)) {
        o.w.add(lang.str() + "/" + xx.id + ": embeddings missing; embedding aligner skipped");
        return;
      }
      se = load_embeddings(opt.sentences_dir / "en" / (en.id + ".txt"), ep);
      te = load_embeddings(opt.sentences_dir / lang.str() / (xx.id + ".txt"), xp);
    }
    if (const auto z = se->zero_norm_rows().size() + te->zero_norm_rows().size(); z > 0) {
      o.w.add(lang.str() + "/" + xx.id + ": " + std::to_string(z) + " zero-norm embedding rows");
    }
    o.embed = align_embed(en.body_sentences, xx.body_sentences, *se, *te, opt.embed->params);
  });

  std::string manifest;
  for (std::size_t i = 0; i < outs.size(); ++i) {
    auto& o = outs[i];
    warnings.merge(o.w);
    if (!o.aligned) continue;
    const auto& [en, xx] = pairing.pairs[i];
    manifest += en.id + "\t" + xx.id + "\n";
    write_links(o.length, dir / (xx.id + ".length.tsv"));
    const auto ep = dir / (xx.id + ".embedding.tsv");
    if (o.embed) {
      write_links(*o.embed, ep);
    } else {
      std::filesystem::remove(ep);
    }
    ++st.aligned;
  }
  write_file(dir / "manifest.tsv", manifest);
  return st;
}

// Aligner agreement per language where both ran: the length aligner's pairs
// are the hypothesis, the embedding aligner's the reference.
inline nlohmann::ordered_json agreement_report(const std::vector<LanguageRelease>& releases) {
  nlohmann::ordered_json out = nlohmann::ordered_json::object();
  for (const auto& r : releases) {
    if (!r.embed_set) continue;
    auto j = to_json(agreement(r.length_set, *r.embed_set));
    j["hypothesis"] = "length";
    j["gold"] = "embedding";
    out[pair_label(r.lang)] = std::move(j);
  }
  return out;
}

// Releases every language present under links_dir.
inline std::vector<LanguageRelease> release_all(const std::filesystem::path& links_dir,
                                                const std::filesystem::path& sentences_dir,
                                                const std::filesystem::path& out_dir) {
  std::vector<LanguageRelease> releases;
  for (const auto& [lang, docs] : load_link_tree(links_dir, sentences_dir)) releases.push_back(build_release(lang, docs));
  write_release(releases, out_dir);
  return releases;
}

inline void write_split(const LanguageRelease& r, const SplitSettings& s, const std::filesystem::path& dir,
                        Warnings& warnings) {
  const auto& pairs = r.corpus.pairs();
  if (s.dev + s.test >= pairs.size()) {
    warnings.add(pair_label(r.lang) + ": corpus of " + std::to_string(pairs.size()) + " pairs too small for dev " +
                 std::to_string(s.dev) + " + test " + std::to_string(s.test) + "; not split");
    return;
  }
  const auto split = split_corpus(pairs, s.dev, s.test, s.seed);
  const std::string base = pair_label(r.lang);
  write_corpus(split.train, dir / (base + ".train.tsv"));
  write_corpus(split.dev, dir / (base + ".dev.tsv"));
  write_corpus(split.test, dir / (base + ".test.tsv"));
}

struct PipelineResult {
  std::vector<LanguageRelease> releases;
  std::map<LanguageCode, CrawlStats> crawl;
  Warnings warnings;
  nlohmann::ordered_json report;
};

inline PipelineResult run_pipeline(const PipelineConfig& cfg, const std::filesystem::path& out) {
  namespace fs = std::filesystem;
  const auto docs_dir = out / "documents";
  const auto sentences_dir = out / "sentences";
  const auto links_dir = out / "links";
  const auto release_dir = out / "release";
  const auto reports_dir = out / "reports";
  // Stale artifacts from an earlier run with other settings must not leak in.
  for (const auto& d : {docs_dir, sentences_dir, links_dir, release_dir, reports_dir}) fs::remove_all(d);

  PipelineResult res;
  const auto all_langs = with_english(cfg.languages);
  const auto stage = [&](const char* name, auto&& fn) {
    try {
      fn();
    } catch (const StageError&) {
      throw;
    } catch (const std::exception& e) {
      throw StageError(name, e.what());
    }
  };

  stage("crawl", [&] {
    const auto fetcher = make_fetcher(parse_source(cfg.source, cfg.politeness_delay_ms, cfg.max_concurrent));
    res.crawl = crawl(*fetcher, cfg.languages, docs_dir, {cfg.title_threshold, cfg.workers, &cfg.scripts}, res.warnings);
  });
  stage("extract", [&] { extract(docs_dir, docs_dir, all_langs, cfg.extract, cfg.workers, res.warnings, &res.crawl); });
  stage("split", [&] {
    for (const auto& l : all_langs) split_documents(docs_dir, sentences_dir, l, cfg.splitter_for(l), cfg.workers);
  });

  stage("align", [&] {
    const auto en_docs = load_documents(docs_dir, sentences_dir, kEnglish);
    std::size_t en_paired = 0;
    for (const auto& lang : cfg.languages) {
      std::optional<BilingualDictionary> dict;
      if (auto it = cfg.dictionaries.find(lang); it != cfg.dictionaries.end()) {
        dict = read_dictionary(it->second, &res.warnings);
      }
      AlignOptions opt;
      opt.length_model = cfg.length_model;
      opt.dictionary = dict ? &*dict : nullptr;
      opt.embed = cfg.embeds(lang) ? &*cfg.embed : nullptr;
      opt.sentences_dir = sentences_dir;
      opt.workers = cfg.workers;
      const auto st = align_language(lang, en_docs, load_documents(docs_dir, sentences_dir, lang), links_dir, opt,
                                     res.warnings);
      res.crawl[lang].paired = st.paired;
      res.crawl[lang].dangling = st.dangling;
      en_paired += st.paired;
    }
    res.crawl[kEnglish].paired = en_paired;
  });

  nlohmann::ordered_json agreement_json;
  stage("release", [&] {
    res.releases = release_all(links_dir, sentences_dir, release_dir);
    for (const auto& r : res.releases) res.warnings.merge(r.warnings);
    agreement_json = agreement_report(res.releases);
    if (cfg.split) {
      for (const auto& r : res.releases) write_split(r, *cfg.split, release_dir / "split", res.warnings);
    }
  });

  stage("report", [&] {
    const auto crawl_json = crawl_report(res.crawl);
    write_json(reports_dir / "crawl.json", crawl_json);
    write_json(reports_dir / "agreement.json", agreement_json);
    nlohmann::ordered_json warnings = nlohmann::ordered_json::array();
    for (const auto& w : res.warnings.messages) warnings.push_back(w);
    res.report = {{"articles", crawl_json["articles"]},
                  {"pairs", release_report(res.releases)["pairs"]},
                  {"agreement", agreement_json},
                  {"warnings", warnings}};
    write_json(reports_dir / "pipeline.json", res.report);
  });
  return res;
}

}  // namespace forge
