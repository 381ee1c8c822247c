#pragma once

// Sentence alignment from character lengths and bilingual-dictionary overlap.
//
// Block cost:  delta^2 / (2 * s2 * nbar) - lambda * lex
//   delta = (tgt_chars - c * src_chars) / sqrt(src_chars * c)
//   nbar  = number of sentences in the block pair
//   lex   = fraction of source tokens whose dictionary translation occurs
//           among the target tokens
// Skips (1-0, 0-1) cost kappa per sentence.

#include "forge/corpus.hpp"
#include "forge/dp.hpp"

#include <cmath>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace forge {

struct LengthModel {
  double mean_ratio = 1.0;  // expected tgt_chars / src_chars
  double variance = 6.8;
  double skip_penalty = 3.0;
  double lex_weight = 2.0;

  void validate() const {
    if (!(mean_ratio > 0.0) || !(variance > 0.0)) throw Error("length model needs c > 0 and s2 > 0");
  }
};

class LexicalScorer {
 public:
  explicit LexicalScorer(BilingualDictionary dict) : dict_(std::move(dict)) {}

  const BilingualDictionary& dictionary() const { return dict_; }

  // Matched fraction of source tokens.
  double score(std::span<const std::string> src_block, std::span<const std::string> tgt_block) const {
    std::vector<std::string> src_tokens;
    for (const auto& s : src_block) {
      auto t = lexical_tokens(s);
      src_tokens.insert(src_tokens.end(), t.begin(), t.end());
    }
    std::set<std::string> tgt_tokens;
    for (const auto& s : tgt_block) {
      for (auto& t : lexical_tokens(s)) tgt_tokens.insert(std::move(t));
    }
    std::size_t matched = 0;
    for (const auto& t : src_tokens) {
      const std::string* tr = dict_.lookup(t);
      if (tr && tgt_tokens.count(case_fold(*tr))) ++matched;
    }
    return static_cast<double>(matched) / static_cast<double>(std::max<std::size_t>(1, src_tokens.size()));
  }

 private:
  BilingualDictionary dict_;
};

inline std::size_t block_chars(std::span<const std::string> block) {
  std::size_t n = 0;
  for (const auto& s : block) n += scalar_count(s);
  return n;
}

inline double length_cost(std::size_t src_chars, std::size_t tgt_chars, std::size_t sentences,
                          const LengthModel& model) {
  const double c = model.mean_ratio;
  const double sc = static_cast<double>(std::max<std::size_t>(1, src_chars));
  const double delta = (static_cast<double>(tgt_chars) - c * sc) / std::sqrt(sc * c);
  return delta * delta / (2.0 * model.variance * static_cast<double>(sentences));
}

inline double link_cost(std::span<const std::string> src_block, std::span<const std::string> tgt_block,
                        const LengthModel& model, const LexicalScorer* lex) {
  if (src_block.empty() && tgt_block.empty()) throw Error("link with both sides empty");
  if (src_block.empty() || tgt_block.empty()) {
    return model.skip_penalty * static_cast<double>(src_block.size() + tgt_block.size());
  }
  const double len =
      length_cost(block_chars(src_block), block_chars(tgt_block), src_block.size() + tgt_block.size(), model);
  const double lexical = lex ? lex->score(src_block, tgt_block) : 0.0;
  return len - model.lex_weight * lexical;
}

// Precomputes every block cost the DP can ask for. Sentences are tokenized
// once; the per-block arithmetic matches link_cost.
class LengthCostTable {
 public:
  LengthCostTable(std::span<const std::string> src, std::span<const std::string> tgt, const LengthModel& model,
                  const LexicalScorer* lex, std::size_t max_block = 2)
      : n_(src.size()), m_(tgt.size()), k_(max_block + 1), table_((n_ + 1) * k_ * (m_ + 1) * k_, 0.0) {
    std::vector<std::size_t> src_chars, tgt_chars;
    std::vector<std::vector<const std::string*>> translations(n_);
    std::vector<std::size_t> src_token_count(n_, 0);
    std::vector<std::set<std::string>> tgt_tokens(m_);
    for (const auto& s : src) src_chars.push_back(scalar_count(s));
    for (const auto& t : tgt) tgt_chars.push_back(scalar_count(t));
    if (lex) {
      for (std::size_t i = 0; i < n_; ++i) {
        const auto toks = lexical_tokens(src[i]);
        src_token_count[i] = toks.size();
        for (const auto& t : toks) translations[i].push_back(lex->dictionary().lookup(t));
      }
      for (std::size_t j = 0; j < m_; ++j) {
        for (auto& t : lexical_tokens(tgt[j])) tgt_tokens[j].insert(std::move(t));
      }
    }
    std::vector<std::vector<std::string>> folded(n_);
    for (std::size_t i = 0; i < n_; ++i) {
      for (const std::string* tr : translations[i]) folded[i].push_back(tr ? case_fold(*tr) : std::string());
    }

    for (std::size_t i = 0; i <= n_; ++i) {
      for (std::size_t a = 0; a < k_ && i + a <= n_; ++a) {
        for (std::size_t j = 0; j <= m_; ++j) {
          for (std::size_t b = 0; b < k_ && j + b <= m_; ++b) {
            if (a == 0 && b == 0) continue;
            if ((a == 0 && b > 1) || (b == 0 && a > 1)) continue;
            if (a == 0 || b == 0) {
              table_[slot(i, a, j, b)] = model.skip_penalty * static_cast<double>(a + b);
              continue;
            }
            std::size_t sc = 0, tc = 0, tokens = 0, matched = 0;
            for (std::size_t x = i; x < i + a; ++x) sc += src_chars[x];
            for (std::size_t y = j; y < j + b; ++y) tc += tgt_chars[y];
            double lexical = 0.0;
            if (lex) {
              for (std::size_t x = i; x < i + a; ++x) {
                tokens += src_token_count[x];
                for (std::size_t t = 0; t < folded[x].size(); ++t) {
                  if (!translations[x][t]) continue;
                  for (std::size_t y = j; y < j + b; ++y) {
                    if (tgt_tokens[y].count(folded[x][t])) {
                      ++matched;
                      break;
                    }
                  }
                }
              }
              lexical = static_cast<double>(matched) / static_cast<double>(std::max<std::size_t>(1, tokens));
            }
            table_[slot(i, a, j, b)] = length_cost(sc, tc, a + b, model) - model.lex_weight * lexical;
          }
        }
      }
    }
  }

  double operator()(std::size_t i, std::size_t a, std::size_t j, std::size_t b) const {
    return table_[slot(i, a, j, b)];
  }

 private:
  std::size_t slot(std::size_t i, std::size_t a, std::size_t j, std::size_t b) const {
    return ((i * k_ + a) * (m_ + 1) + j) * k_ + b;
  }

  std::size_t n_, m_, k_;
  std::vector<double> table_;
};

// Shapes searched by the length aligner: 1-0, 0-1, 1-1, 1-2, 2-1, 2-2.
inline const std::vector<Shape>& length_shapes() {
  static const std::vector<Shape> shapes = shapes_up_to(2);
  return shapes;
}

inline std::vector<AlignmentLink> align_length(std::span<const std::string> src, std::span<const std::string> tgt,
                                               const LengthModel& model, const LexicalScorer* lex) {
  if (src.empty() || tgt.empty()) throw Error("align_length needs non-empty sentence lists");
  model.validate();
  const LengthCostTable costs(src, tgt, model, lex);
  const auto path = monotone_align(src.size(), tgt.size(), length_shapes(), costs);
  std::vector<AlignmentLink> links;
  links.reserve(path.spans.size());
  for (const auto& s : path.spans) links.push_back(to_link(s, AlignMethod::LengthDict));
  return links;
}

}  // namespace forge
