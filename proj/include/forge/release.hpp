#pragma once

// From alignment links to the released corpus: keep 1-1 links, intersect the
// two aligners where both ran, deduplicate, export.

#include "forge/corpus.hpp"

#include <json.hpp>

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace forge {

inline std::vector<AlignmentLink> retain_one_to_one(const std::vector<AlignmentLink>& links) {
  std::vector<AlignmentLink> out;
  for (const auto& l : links) {
    if (l.is_one_to_one()) out.push_back(l);
  }
  return out;
}

// Unique sentence pairs in first-seen order.
class PairSet {
 public:
  PairSet() = default;
  explicit PairSet(const std::vector<SentencePair>& pairs) {
    for (const auto& p : pairs) insert(p);
  }

  bool insert(const SentencePair& p) {
    if (!index_.insert(PairKey::of(p)).second) return false;
    pairs_.push_back(p);
    return true;
  }

  bool contains(const SentencePair& p) const { return index_.count(PairKey::of(p)) != 0; }
  bool contains(const PairKey& k) const { return index_.count(k) != 0; }
  std::size_t size() const { return pairs_.size(); }
  bool empty() const { return pairs_.empty(); }
  const std::vector<SentencePair>& pairs() const { return pairs_; }
  const std::set<PairKey>& keys() const { return index_; }

  friend bool operator==(const PairSet& a, const PairSet& b) { return a.index_ == b.index_; }

 private:
  std::vector<SentencePair> pairs_;
  std::set<PairKey> index_;
};

// Pairs in both sets, in `a`'s order.
inline PairSet intersect(const PairSet& a, const PairSet& b) {
  PairSet out;
  for (const auto& p : a.pairs()) {
    if (b.contains(p)) out.insert(p);
  }
  return out;
}

// Sentence pairs for the 1-1 links of one document. Source side is English.
inline std::vector<SentencePair> one_to_one_pairs(const std::vector<AlignmentLink>& links,
                                                  std::span<const std::string> en,
                                                  std::span<const std::string> xx, const std::string& doc_id) {
  std::vector<SentencePair> out;
  for (const auto& l : retain_one_to_one(links)) {
    const std::size_t s = l.src[0], t = l.tgt[0];
    if (s >= en.size() || t >= xx.size()) {
      throw Error("link index out of range in document '" + doc_id + "'");
    }
    SentencePair p{collapse_whitespace(sanitize_field(en[s])), collapse_whitespace(sanitize_field(xx[t])),
                   {doc_id, s, t}};
    if (p.valid()) out.push_back(std::move(p));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Alignment link files: src_idx_list<TAB>tgt_idx_list<TAB>score<TAB>method

inline std::string format_index_list(const std::vector<std::size_t>& idx) {
  if (idx.empty()) return "-";
  std::string out;
  for (std::size_t k = 0; k < idx.size(); ++k) {
    if (k) out.push_back(',');
    out += std::to_string(idx[k]);
  }
  return out;
}

inline std::vector<std::size_t> parse_index_list(const std::string& s, const std::string& where) {
  std::vector<std::size_t> out;
  if (s == "-") return out;
  for (const auto& part : split_on(s, ',')) {
    std::size_t v = 0;
    const auto res = std::from_chars(part.data(), part.data() + part.size(), v);
    if (part.empty() || res.ec != std::errc() || res.ptr != part.data() + part.size()) {
      throw Error(where + ": bad index '" + part + "'");
    }
    out.push_back(v);
  }
  return out;
}

inline std::string format_links(const std::vector<AlignmentLink>& links) {
  std::string out;
  char buf[64];
  for (const auto& l : links) {
    std::snprintf(buf, sizeof buf, "%.6f", l.score);
    out += format_index_list(l.src) + "\t" + format_index_list(l.tgt) + "\t" + buf + "\t" +
           std::string(to_string(l.method)) + "\n";
  }
  return out;
}

inline void write_links(const std::vector<AlignmentLink>& links, const std::filesystem::path& path) {
  write_file(path, format_links(links));
}

inline std::vector<AlignmentLink> read_links(const std::filesystem::path& path) {
  std::vector<AlignmentLink> links;
  const auto lines = read_lines(path);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const std::string where = path.string() + ":" + std::to_string(i + 1);
    const auto cols = split_on(lines[i], '\t');
    if (cols.size() != 4) throw Error(where + ": expected 4 tab-separated columns");
    AlignmentLink l;
    l.src = parse_index_list(cols[0], where);
    l.tgt = parse_index_list(cols[1], where);
    if (l.src.empty() && l.tgt.empty()) throw Error(where + ": link with both sides empty");
    char* end = nullptr;
    l.score = std::strtod(cols[2].c_str(), &end);
    if (!end || *end != '\0') throw Error(where + ": bad score '" + cols[2] + "'");
    l.method = parse_method(cols[3]);
    links.push_back(std::move(l));
  }
  return links;
}

// ---------------------------------------------------------------------------
// Release assembly

// Everything known about one aligned document pair.
struct DocAlignment {
  std::string en_id;
  std::string xx_id;
  std::vector<std::string> en_sentences;
  std::vector<std::string> xx_sentences;
  std::optional<std::vector<AlignmentLink>> length_links;
  std::optional<std::vector<AlignmentLink>> embed_links;
};

struct ReleaseCounts {
  std::size_t length_pairs = 0;
  std::optional<std::size_t> embed_pairs;
  std::optional<std::size_t> intersection;
  std::size_t released = 0;
};

struct LanguageRelease {
  LanguageCode lang;
  PairSet corpus;
  ReleaseCounts counts;
  PairSet length_set;
  std::optional<PairSet> embed_set;
  Warnings warnings;
};

// The intersection of both aligners when every document has embedding links,
// otherwise the length aligner's 1-1 pairs.
inline LanguageRelease build_release(const LanguageCode& lang, const std::vector<DocAlignment>& docs) {
  LanguageRelease rel;
  rel.lang = lang;
  PairSet length_set, embed_set;
  bool any_length = false;
  bool embed_available = !docs.empty();
  for (const auto& d : docs) {
    if (d.length_links) {
      any_length = true;
      for (auto& p : one_to_one_pairs(*d.length_links, d.en_sentences, d.xx_sentences, d.xx_id)) length_set.insert(p);
    } else {
      rel.warnings.add(lang.str() + ": document '" + d.xx_id + "' has no length-aligner links");
    }
    if (d.embed_links) {
      for (auto& p : one_to_one_pairs(*d.embed_links, d.en_sentences, d.xx_sentences, d.xx_id)) embed_set.insert(p);
    } else {
      embed_available = false;
    }
  }
  if (!any_length && !embed_available) {
    rel.warnings.add(lang.str() + ": no alignment links; releasing an empty corpus");
    return rel;
  }
  rel.counts.length_pairs = length_set.size();
  if (embed_available) {
    rel.counts.embed_pairs = embed_set.size();
    rel.corpus = intersect(length_set, embed_set);
    rel.counts.intersection = rel.corpus.size();
    rel.embed_set = std::move(embed_set);
  } else {
    rel.corpus = length_set;
  }
  rel.length_set = std::move(length_set);
  rel.counts.released = rel.corpus.size();
  return rel;
}

inline std::string pair_label(const LanguageCode& lang) { return lang.str() + "-en"; }

inline nlohmann::ordered_json release_report(const std::vector<LanguageRelease>& releases) {
  nlohmann::ordered_json pairs = nlohmann::ordered_json::object();
  for (const auto& r : releases) {
    nlohmann::ordered_json row;
    row["length"] = r.counts.length_pairs;
    row["embedding"] = r.counts.embed_pairs ? nlohmann::ordered_json(*r.counts.embed_pairs) : nullptr;
    row["intersection"] = r.counts.intersection ? nlohmann::ordered_json(*r.counts.intersection) : nullptr;
    row["released"] = r.counts.released;
    row["source"] = r.counts.intersection ? "intersection" : "length";
    pairs[pair_label(r.lang)] = std::move(row);
  }
  nlohmann::ordered_json report;
  report["pairs"] = std::move(pairs);
  return report;
}

// Writes release/<xx>-en.tsv per language plus release/report.json.
inline nlohmann::ordered_json write_release(const std::vector<LanguageRelease>& releases,
                                            const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  for (const auto& r : releases) write_corpus(r.corpus.pairs(), out_dir / (pair_label(r.lang) + ".tsv"));
  auto report = release_report(releases);
  write_file(out_dir / "report.json", report.dump(2) + "\n");
  return report;
}

// Reads a links/ tree:
//   links/<xx>/manifest.tsv            en_id<TAB>xx_id, one per document pair
//   links/<xx>/<xx_id>.length.tsv      length-aligner links (English = source)
//   links/<xx>/<xx_id>.embedding.tsv   embedding-aligner links, when available
// with sentences from sentences/<lang>/<id>.txt.
inline std::map<LanguageCode, std::vector<DocAlignment>> load_link_tree(const std::filesystem::path& links_dir,
                                                                        const std::filesystem::path& sentences_dir) {
  namespace fs = std::filesystem;
  std::map<LanguageCode, std::vector<DocAlignment>> out;
  if (!fs::is_directory(links_dir)) throw Error("links directory not found: " + links_dir.string());
  std::vector<fs::path> lang_dirs;
  for (const auto& e : fs::directory_iterator(links_dir)) {
    if (e.is_directory()) lang_dirs.push_back(e.path());
  }
  std::sort(lang_dirs.begin(), lang_dirs.end());
  for (const auto& dir : lang_dirs) {
    const LanguageCode lang(dir.filename().string());
    auto& docs = out[lang];
    const fs::path manifest = dir / "manifest.tsv";
    if (!fs::exists(manifest)) continue;
    for (const auto& line : read_lines(manifest)) {
      if (line.empty()) continue;
      const auto cols = split_on(line, '\t');
      if (cols.size() != 2) throw Error(manifest.string() + ": expected en_id<TAB>xx_id");
      DocAlignment d;
      d.en_id = cols[0];
      d.xx_id = cols[1];
      d.en_sentences = read_lines(sentences_dir / "en" / (d.en_id + ".txt"));
      d.xx_sentences = read_lines(sentences_dir / lang.str() / (d.xx_id + ".txt"));
      if (const auto p = dir / (d.xx_id + ".length.tsv"); fs::exists(p)) d.length_links = read_links(p);
      if (const auto p = dir / (d.xx_id + ".embedding.tsv"); fs::exists(p)) d.embed_links = read_links(p);
      docs.push_back(std::move(d));
    }
  }
  return out;
}

}  // namespace forge
