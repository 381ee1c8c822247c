#pragma once

// Measurement: aligner agreement, annotation tallies and accuracy, the
// combined per-method precision estimate, dev/test splitting and BLEU.

#include "forge/corpus.hpp"
#include "forge/random.hpp"
#include "forge/release.hpp"

#include <json.hpp>

#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

namespace forge {

// ---------------------------------------------------------------------------
// Agreement between two aligners' outputs

struct AgreementReport {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t hyp_size = 0;
  std::size_t gold_size = 0;
  std::size_t overlap = 0;
};

inline double f_score(double p, double r) { return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0; }

inline AgreementReport agreement(const PairSet& hyp, const PairSet& gold, Warnings* warnings = nullptr) {
  AgreementReport r;
  r.hyp_size = hyp.size();
  r.gold_size = gold.size();
  for (const auto& k : hyp.keys()) r.overlap += gold.contains(k);
  if (r.hyp_size == 0) {
    if (warnings) warnings->add("agreement: hypothesis set is empty; precision set to 0");
  } else {
    r.precision = static_cast<double>(r.overlap) / static_cast<double>(r.hyp_size);
  }
  if (r.gold_size == 0) {
    if (warnings) warnings->add("agreement: gold set is empty; recall set to 0");
  } else {
    r.recall = static_cast<double>(r.overlap) / static_cast<double>(r.gold_size);
  }
  r.f1 = f_score(r.precision, r.recall);
  return r;
}

inline nlohmann::ordered_json to_json(const AgreementReport& r) {
  return {{"precision", r.precision}, {"recall", r.recall},     {"f1", r.f1},
          {"hyp_size", r.hyp_size},   {"gold_size", r.gold_size}, {"overlap", r.overlap}};
}

inline AgreementReport agreement_from_json(const nlohmann::json& j) {
  AgreementReport r;
  r.precision = j.at("precision").get<double>();
  r.recall = j.at("recall").get<double>();
  r.f1 = j.contains("f1") ? j.at("f1").get<double>() : f_score(r.precision, r.recall);
  r.hyp_size = j.value("hyp_size", std::size_t{0});
  r.gold_size = j.value("gold_size", std::size_t{0});
  r.overlap = j.value("overlap", std::size_t{0});
  return r;
}

// ---------------------------------------------------------------------------
// Annotation categories and tallies

enum class AnnotationCategory {
  ValidTranslation,
  WrongLanguage,
  IncorrectAlignment,
  WrongTokenisation,
  MtTranslation,
  TranslationError,
  FreeTranslation,
};

inline constexpr std::size_t kCategoryCount = 7;

inline constexpr std::array<AnnotationCategory, kCategoryCount> kAllCategories = {
    AnnotationCategory::ValidTranslation,  AnnotationCategory::WrongLanguage, AnnotationCategory::IncorrectAlignment,
    AnnotationCategory::WrongTokenisation, AnnotationCategory::MtTranslation, AnnotationCategory::TranslationError,
    AnnotationCategory::FreeTranslation};

inline constexpr std::array<std::string_view, kCategoryCount> kCategoryNames = {
    "valid_translation", "wrong_language",    "incorrect_alignment", "wrong_tokenisation",
    "mt_translation",    "translation_error", "free_translation"};

inline std::string_view to_string(AnnotationCategory c) { return kCategoryNames[static_cast<std::size_t>(c)]; }

inline std::optional<AnnotationCategory> parse_category(std::string_view s) {
  for (std::size_t i = 0; i < kCategoryCount; ++i) {
    if (kCategoryNames[i] == s) return kAllCategories[i];
  }
  return std::nullopt;
}

enum class Stratum { OnlyA, OnlyB, Both };

inline constexpr std::array<Stratum, 3> kAllStrata = {Stratum::OnlyA, Stratum::OnlyB, Stratum::Both};

inline std::string_view to_string(Stratum s) {
  switch (s) {
    case Stratum::OnlyA: return "only_a";
    case Stratum::OnlyB: return "only_b";
    case Stratum::Both: return "both";
  }
  return "both";
}

inline std::optional<Stratum> parse_stratum(std::string_view s) {
  for (Stratum st : kAllStrata) {
    if (to_string(st) == s) return st;
  }
  return std::nullopt;
}

struct StratumTally {
  Stratum stratum = Stratum::Both;
  std::array<std::size_t, kCategoryCount> counts{};

  std::size_t& operator[](AnnotationCategory c) { return counts[static_cast<std::size_t>(c)]; }
  std::size_t operator[](AnnotationCategory c) const { return counts[static_cast<std::size_t>(c)]; }

  std::size_t total() const {
    std::size_t t = 0;
    for (auto c : counts) t += c;
    return t;
  }

  // Counts in category order: valid, wrong language, incorrect alignment,
  // wrong tokenisation, MT, translation error, free translation.
  static StratumTally of(Stratum s, const std::array<std::size_t, kCategoryCount>& counts) { return {s, counts}; }

  friend bool operator==(const StratumTally&, const StratumTally&) = default;
};

inline nlohmann::ordered_json to_json(const StratumTally& t) {
  nlohmann::ordered_json counts = nlohmann::ordered_json::object();
  for (auto c : kAllCategories) counts[std::string(to_string(c))] = t[c];
  return counts;
}

inline StratumTally tally_from_json(Stratum s, const nlohmann::json& counts) {
  StratumTally t{s, {}};
  for (auto c : kAllCategories) t[c] = counts.value(std::string(to_string(c)), std::size_t{0});
  return t;
}

enum class AccuracyMode { Conservative, Liberal };

inline std::optional<AccuracyMode> parse_mode(std::string_view s) {
  if (s == "conservative") return AccuracyMode::Conservative;
  if (s == "liberal") return AccuracyMode::Liberal;
  return std::nullopt;
}

// Conservative: valid translations only. Liberal: everything except
// incorrect alignment and wrong tokenisation.
inline double accuracy(const StratumTally& t, AccuracyMode mode) {
  const std::size_t total = t.total();
  if (total == 0) throw Error("accuracy of an empty tally");
  const double n = static_cast<double>(total);
  if (mode == AccuracyMode::Conservative) return static_cast<double>(t[AnnotationCategory::ValidTranslation]) / n;
  const std::size_t bad = t[AnnotationCategory::IncorrectAlignment] + t[AnnotationCategory::WrongTokenisation];
  return static_cast<double>(total - bad) / n;
}

// Precision of one aligner, mixing the accuracy of its shared pairs and of
// the pairs only it produced:  f * acc(both) + (1 - f) * acc(only).
inline double method_precision(double shared_fraction, const StratumTally& both, const StratumTally& only,
                               AccuracyMode mode) {
  if (shared_fraction < 0.0 || shared_fraction > 1.0) throw Error("shared fraction must lie in [0, 1]");
  return shared_fraction * accuracy(both, mode) + (1.0 - shared_fraction) * accuracy(only, mode);
}

// Which side of an AgreementReport the evaluated aligner was on.
enum class AgreementRole { Hypothesis, Gold };

// The shared fraction taken from an agreement report: the gold-side aligner
// uses the report's precision and the hypothesis-side aligner its recall.
// This is the pairing that reproduces the published per-method precision
// figures from the published agreement table.
inline double shared_fraction(const AgreementReport& overlap, AgreementRole role) {
  return role == AgreementRole::Gold ? overlap.precision : overlap.recall;
}

inline double method_precision(const AgreementReport& overlap, AgreementRole role, const StratumTally& both,
                               const StratumTally& only, AccuracyMode mode) {
  return method_precision(shared_fraction(overlap, role), both, only, mode);
}

// ---------------------------------------------------------------------------
// Stratified sampling for annotation

struct StratifiedSample {
  std::vector<SentencePair> only_a;
  std::vector<SentencePair> only_b;
  std::vector<SentencePair> both;

  const std::vector<SentencePair>& operator[](Stratum s) const {
    return s == Stratum::OnlyA ? only_a : s == Stratum::OnlyB ? only_b : both;
  }
};

inline std::vector<SentencePair> sample_without_replacement(const std::vector<SentencePair>& pool, std::size_t n,
                                                            Rng& rng) {
  std::vector<SentencePair> out;
  for (std::size_t i : rng.sample_indices(pool.size(), n)) out.push_back(pool[i]);
  return out;
}

inline StratifiedSample stratify_sample(const PairSet& a, const PairSet& b, std::size_t n_per_stratum,
                                        std::uint64_t seed, Warnings* warnings = nullptr) {
  std::vector<SentencePair> only_a, only_b, both;
  for (const auto& p : a.pairs()) (b.contains(p) ? both : only_a).push_back(p);
  for (const auto& p : b.pairs()) {
    if (!a.contains(p)) only_b.push_back(p);
  }
  StratifiedSample s;
  Rng rng(seed);
  const auto draw = [&](const std::vector<SentencePair>& pool, Stratum st) {
    if (pool.size() < n_per_stratum && warnings) {
      warnings->add("stratum " + std::string(to_string(st)) + " has " + std::to_string(pool.size()) +
                    " pairs; sampling fewer than " + std::to_string(n_per_stratum));
    }
    return sample_without_replacement(pool, n_per_stratum, rng);
  };
  s.only_a = draw(only_a, Stratum::OnlyA);
  s.only_b = draw(only_b, Stratum::OnlyB);
  s.both = draw(both, Stratum::Both);
  return s;
}

// ---------------------------------------------------------------------------
// Train/dev/test split

struct CorpusSplit {
  std::vector<SentencePair> train;
  std::vector<SentencePair> dev;
  std::vector<SentencePair> test;
};

// Dev and test are drawn at random; train keeps the remaining pairs in their
// original order.
inline CorpusSplit split_corpus(const std::vector<SentencePair>& pairs, std::size_t n_dev, std::size_t n_test,
                                std::uint64_t seed) {
  if (n_dev + n_test >= pairs.size()) {
    throw Error("cannot take " + std::to_string(n_dev) + " dev + " + std::to_string(n_test) + " test pairs from " +
                std::to_string(pairs.size()));
  }
  Rng rng(seed);
  const auto picked = rng.sample_indices(pairs.size(), n_dev + n_test);
  std::vector<int> role(pairs.size(), 0);
  CorpusSplit split;
  for (std::size_t k = 0; k < picked.size(); ++k) {
    role[picked[k]] = k < n_dev ? 1 : 2;
    (k < n_dev ? split.dev : split.test).push_back(pairs[picked[k]]);
  }
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (role[i] == 0) split.train.push_back(pairs[i]);
  }
  return split;
}

// ---------------------------------------------------------------------------
// BLEU on pre-tokenized text (corpus level, BLEU-4, single reference, no smoothing)

struct BleuStats {
  std::array<std::size_t, 4> matches{};
  std::array<std::size_t, 4> totals{};
  std::size_t hyp_len = 0;
  std::size_t ref_len = 0;
};

inline BleuStats bleu_stats(const std::vector<std::string>& hypotheses, const std::vector<std::string>& references) {
  if (hypotheses.size() != references.size()) {
    throw Error("hypothesis/reference count mismatch: " + std::to_string(hypotheses.size()) + " vs " +
                std::to_string(references.size()));
  }
  if (hypotheses.empty()) throw Error("BLEU of an empty corpus");
  BleuStats st;
  for (std::size_t s = 0; s < hypotheses.size(); ++s) {
    const auto hyp = split_whitespace(hypotheses[s]);
    const auto ref = split_whitespace(references[s]);
    st.hyp_len += hyp.size();
    st.ref_len += ref.size();
    for (std::size_t n = 1; n <= 4; ++n) {
      std::map<std::vector<std::string>, std::size_t> ref_counts;
      for (std::size_t i = 0; i + n <= ref.size(); ++i) ++ref_counts[{ref.begin() + i, ref.begin() + i + n}];
      std::map<std::vector<std::string>, std::size_t> hyp_counts;
      for (std::size_t i = 0; i + n <= hyp.size(); ++i) ++hyp_counts[{hyp.begin() + i, hyp.begin() + i + n}];
      for (const auto& [gram, count] : hyp_counts) {
        const auto it = ref_counts.find(gram);
        if (it != ref_counts.end()) st.matches[n - 1] += std::min(count, it->second);
        st.totals[n - 1] += count;
      }
    }
  }
  return st;
}

inline double bleu_from_stats(const BleuStats& st) {
  double log_sum = 0.0;
  for (std::size_t n = 0; n < 4; ++n) {
    if (st.matches[n] == 0 || st.totals[n] == 0) return 0.0;
    log_sum += std::log(static_cast<double>(st.matches[n]) / static_cast<double>(st.totals[n]));
  }
  const double bp =
      st.hyp_len < st.ref_len ? std::exp(1.0 - static_cast<double>(st.ref_len) / static_cast<double>(st.hyp_len)) : 1.0;
  return 100.0 * bp * std::exp(log_sum / 4.0);
}

inline double bleu(const std::vector<std::string>& hypotheses, const std::vector<std::string>& references) {
  return bleu_from_stats(bleu_stats(hypotheses, references));
}

}  // namespace forge
