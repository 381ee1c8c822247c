#pragma once

// Human annotation sessions over stratified sample pairs.
//
// Judgments go to an append-only JSON-lines log and are flushed before the
// in-memory state changes, so reloading the log after a crash reproduces the
// exact tally. Later judgments of the same pair overwrite earlier ones.

#include "forge/corpus.hpp"
#include "forge/evaluation.hpp"

#include <json.hpp>

#include <cstdio>
#include <map>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

namespace forge {

struct SamplePair {
  std::string pair_id;  // "<stratum>-<index>"
  Stratum stratum = Stratum::Both;
  std::size_t index = 0;
  std::string en;
  std::string xx;
};

// Rejected request (unknown pair or category); maps to HTTP 400.
class RejectedJudgment : public Error {
 public:
  using Error::Error;
};

// Writes only_a.tsv, only_b.tsv and both.tsv.
inline void write_samples(const StratifiedSample& sample, const std::filesystem::path& dir) {
  for (Stratum s : kAllStrata) write_corpus(sample[s], dir / (std::string(to_string(s)) + ".tsv"));
}

inline std::vector<SamplePair> load_samples(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw Error("samples directory not found: " + dir.string());
  std::vector<SamplePair> out;
  for (Stratum s : kAllStrata) {
    const auto path = dir / (std::string(to_string(s)) + ".tsv");
    if (!std::filesystem::exists(path)) continue;
    const auto pairs = read_corpus(path);
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      out.push_back({std::string(to_string(s)) + "-" + std::to_string(i), s, i, pairs[i].en, pairs[i].xx});
    }
  }
  return out;
}

inline bool valid_session_id(std::string_view id) {
  if (id.empty() || id.size() > 64) return false;
  for (char c : id) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_')) return false;
  }
  return true;
}

struct Judgment {
  std::string pair_id;
  AnnotationCategory category;
  std::string annotator;
};

class AnnotationSession {
 public:
  AnnotationSession(std::string session_id, std::vector<SamplePair> samples, std::filesystem::path log_path,
                    std::string annotator = {})
      : id_(std::move(session_id)), samples_(std::move(samples)), log_path_(std::move(log_path)),
        annotator_(std::move(annotator)) {
    for (std::size_t i = 0; i < samples_.size(); ++i) by_id_.emplace(samples_[i].pair_id, i);
    replay();
  }

  const std::string& id() const { return id_; }
  const Warnings& load_warnings() const { return load_warnings_; }

  // Lowest-index unjudged pair of the stratum.
  std::optional<SamplePair> next_pair(Stratum stratum) const {
    std::shared_lock lock(mutex_);
    for (const auto& s : samples_) {
      if (s.stratum == stratum && !judgments_.count(s.pair_id)) return s;
    }
    return std::nullopt;
  }

  std::optional<SamplePair> pair(const std::string& pair_id) const {
    std::shared_lock lock(mutex_);
    const auto it = by_id_.find(pair_id);
    if (it == by_id_.end()) return std::nullopt;
    return samples_[it->second];
  }

  StratumTally record_judgment(const std::string& pair_id, std::string_view category,
                               const std::string& annotator = {}) {
    const auto cat = parse_category(category);
    if (!cat) throw RejectedJudgment("unknown category '" + std::string(category) + "'");
    return record_judgment(pair_id, *cat, annotator);
  }

  StratumTally record_judgment(const std::string& pair_id, AnnotationCategory category,
                               const std::string& annotator = {}) {
    std::unique_lock lock(mutex_);
    const auto it = by_id_.find(pair_id);
    if (it == by_id_.end()) throw RejectedJudgment("unknown pair_id '" + pair_id + "'");
    const std::string who = annotator.empty() ? annotator_ : annotator;
    append_log({pair_id, category, who});
    judgments_[pair_id] = category;
    history_.push_back({pair_id, category, who});
    return tally_locked(samples_[it->second].stratum);
  }

  StratumTally tally(Stratum s) const {
    std::shared_lock lock(mutex_);
    return tally_locked(s);
  }

  std::size_t stratum_size(Stratum s) const {
    std::size_t n = 0;
    for (const auto& p : samples_) n += p.stratum == s;
    return n;
  }

  std::vector<Judgment> history() const {
    std::shared_lock lock(mutex_);
    return history_;
  }

  std::optional<AnnotationCategory> judgment(const std::string& pair_id) const {
    std::shared_lock lock(mutex_);
    const auto it = judgments_.find(pair_id);
    if (it == judgments_.end()) return std::nullopt;
    return it->second;
  }

  nlohmann::ordered_json export_tally() const {
    std::shared_lock lock(mutex_);
    nlohmann::ordered_json strata = nlohmann::ordered_json::object();
    for (Stratum s : kAllStrata) {
      const StratumTally t = tally_locked(s);
      const std::size_t total = stratum_size(s);
      strata[std::string(to_string(s))] = {
          {"counts", to_json(t)},
          {"judged", t.total()},
          {"total", total},
          {"completion", total == 0 ? 0.0 : static_cast<double>(t.total()) / static_cast<double>(total)}};
    }
    return {{"session", id_}, {"strata", strata}};
  }

 private:
  StratumTally tally_locked(Stratum s) const {
    StratumTally t{s, {}};
    for (const auto& [pid, cat] : judgments_) {
      if (samples_[by_id_.at(pid)].stratum == s) ++t[cat];
    }
    return t;
  }

  void append_log(const Judgment& j) {
    if (log_path_.empty()) return;
    nlohmann::ordered_json line = {
        {"seq", history_.size()}, {"pair_id", j.pair_id}, {"category", to_string(j.category)}, {"annotator", j.annotator}};
    const std::string text = line.dump() + "\n";
    if (log_path_.has_parent_path()) std::filesystem::create_directories(log_path_.parent_path());
    std::FILE* f = std::fopen(log_path_.c_str(), "ab");
    if (!f) throw Error("cannot open session log " + log_path_.string());
    const bool ok = std::fwrite(text.data(), 1, text.size(), f) == text.size() && std::fflush(f) == 0;
    std::fclose(f);
    if (!ok) throw Error("cannot append to session log " + log_path_.string());
  }

  void replay() {
    if (log_path_.empty() || !std::filesystem::exists(log_path_)) return;
    const auto lines = read_lines(log_path_);
    for (std::size_t i = 0; i < lines.size(); ++i) {
      if (trim(lines[i]).empty()) continue;
      const std::string where = log_path_.string() + ":" + std::to_string(i + 1);
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(lines[i]);
      } catch (const nlohmann::json::exception&) {
        // A torn final line from an interrupted write is dropped.
        load_warnings_.add(where + ": unreadable log line skipped");
        continue;
      }
      const std::string pid = j.value("pair_id", "");
      const auto cat = parse_category(j.value("category", ""));
      if (!by_id_.count(pid) || !cat) {
        load_warnings_.add(where + ": judgment for unknown pair or category skipped");
        continue;
      }
      judgments_[pid] = *cat;
      history_.push_back({pid, *cat, j.value("annotator", "")});
    }
  }

  std::string id_;
  std::vector<SamplePair> samples_;
  std::map<std::string, std::size_t> by_id_;
  std::filesystem::path log_path_;
  std::string annotator_;
  std::map<std::string, AnnotationCategory> judgments_;
  std::vector<Judgment> history_;
  Warnings load_warnings_;
  mutable std::shared_mutex mutex_;
};

// Reads the tally export back into per-stratum tallies.
inline std::map<Stratum, StratumTally> tallies_from_export(const nlohmann::json& j) {
  std::map<Stratum, StratumTally> out;
  const auto& strata = j.at("strata");
  for (Stratum s : kAllStrata) {
    const std::string key(to_string(s));
    if (!strata.contains(key)) continue;
    const auto& node = strata.at(key);
    out[s] = tally_from_json(s, node.contains("counts") ? node.at("counts") : node);
  }
  return out;
}

}  // namespace forge
