#pragma once

// Independent reference implementations used by the unit and acceptance
// suites. Nothing here calls the library's search, counting or boundary code.

#include "forge/dp.hpp"

#include <unicode/brkiter.h>
#include <unicode/unistr.h>

#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace oracle {

// One step of a monotone alignment path.
struct Move {
  std::size_t src_begin, src_len, tgt_begin, tgt_len;
  std::size_t rank;  // position in the shape list
  double cost;
};

struct BestPath {
  double cost = 0.0;
  std::vector<Move> moves;
};

using CostFn = std::function<double(std::size_t, std::size_t, std::size_t, std::size_t)>;

// Enumerates every monotone path from (0,0) to (n,m) built from `shapes`.
// Among minimum-cost paths keeps the one whose move ranks, read from the last
// move backwards, are lexicographically smallest. Costs are summed from the
// start of the path.
inline BestPath exhaustive_align(std::size_t n, std::size_t m, const std::vector<forge::Shape>& shapes,
                                 const CostFn& cost) {
  std::optional<BestPath> best;
  std::vector<Move> path;
  const auto reversed_ranks = [](const std::vector<Move>& p) {
    std::vector<std::size_t> r;
    for (auto it = p.rbegin(); it != p.rend(); ++it) r.push_back(it->rank);
    return r;
  };
  std::function<void(std::size_t, std::size_t, double)> walk = [&](std::size_t i, std::size_t j, double acc) {
    if (i == n && j == m) {
      if (!best || acc < best->cost ||
          (acc == best->cost && reversed_ranks(path) < reversed_ranks(best->moves))) {
        best = BestPath{acc, path};
      }
      return;
    }
    for (std::size_t k = 0; k < shapes.size(); ++k) {
      const auto& s = shapes[k];
      if (i + s.src > n || j + s.tgt > m) continue;
      const double c = cost(i, s.src, j, s.tgt);
      path.push_back({i, s.src, j, s.tgt, k, c});
      walk(i + s.src, j + s.tgt, acc + c);
      path.pop_back();
    }
  };
  walk(0, 0, 0.0);
  return *best;
}

// ---------------------------------------------------------------------------
// BLEU by explicit n-gram maps.

inline std::vector<std::string> words(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

inline double bleu(const std::vector<std::string>& hyp, const std::vector<std::string>& ref) {
  double match[4] = {0, 0, 0, 0}, total[4] = {0, 0, 0, 0};
  double hyp_len = 0, ref_len = 0;
  for (std::size_t s = 0; s < hyp.size(); ++s) {
    const auto h = words(hyp[s]), r = words(ref[s]);
    hyp_len += static_cast<double>(h.size());
    ref_len += static_cast<double>(r.size());
    for (std::size_t n = 1; n <= 4; ++n) {
      std::map<std::vector<std::string>, int> hc, rc;
      for (std::size_t i = 0; i + n <= h.size(); ++i) ++hc[{h.begin() + i, h.begin() + i + n}];
      for (std::size_t i = 0; i + n <= r.size(); ++i) ++rc[{r.begin() + i, r.begin() + i + n}];
      for (const auto& [g, c] : hc) {
        total[n - 1] += c;
        const auto it = rc.find(g);
        if (it != rc.end()) match[n - 1] += std::min(c, it->second);
      }
    }
  }
  double log_sum = 0;
  for (int n = 0; n < 4; ++n) {
    if (match[n] == 0) return 0.0;
    log_sum += std::log(match[n] / total[n]);
  }
  const double bp = hyp_len < ref_len ? std::exp(1.0 - ref_len / hyp_len) : 1.0;
  return 100.0 * bp * std::exp(log_sum / 4.0);
}

// ---------------------------------------------------------------------------
// Extended grapheme cluster boundaries (UTF-8 byte offsets) from ICU.

inline std::set<std::size_t> grapheme_boundaries(const std::string& utf8) {
  UErrorCode status = U_ZERO_ERROR;
  std::unique_ptr<icu::BreakIterator> it(icu::BreakIterator::createCharacterInstance(icu::Locale::getRoot(), status));
  if (U_FAILURE(status)) throw std::runtime_error("ICU break iterator unavailable");
  const icu::UnicodeString text = icu::UnicodeString::fromUTF8(utf8);
  it->setText(text);
  // Map UTF-16 offsets back to UTF-8 offsets.
  std::vector<std::size_t> u16_to_u8(static_cast<std::size_t>(text.length()) + 1, 0);
  std::size_t u8 = 0;
  for (int32_t i = 0; i < text.length();) {
    const UChar32 c = text.char32At(i);
    const int32_t w = U16_LENGTH(c);
    for (int32_t k = 0; k < w; ++k) u16_to_u8[static_cast<std::size_t>(i + k)] = u8;
    u8 += c < 0x80 ? 1 : c < 0x800 ? 2 : c < 0x10000 ? 3 : 4;
    i += w;
  }
  u16_to_u8[static_cast<std::size_t>(text.length())] = u8;
  std::set<std::size_t> out;
  for (int32_t b = it->first(); b != icu::BreakIterator::DONE; b = it->next()) {
    out.insert(u16_to_u8[static_cast<std::size_t>(b)]);
  }
  return out;
}

}  // namespace oracle
