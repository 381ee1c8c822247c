#pragma once

// Minimum-cost monotone alignment over a (|src|+1) x (|tgt|+1) lattice.
//
// A path from (0,0) to (n,m) is a sequence of block shapes (a,b): a source
// sentences against b target sentences. Equal-cost predecessors are resolved
// by shape rank, so among optimal paths the one whose moves, read from the
// end backwards, rank best is returned.

#include "forge/corpus.hpp"

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

namespace forge {

struct Shape {
  std::size_t src = 0;
  std::size_t tgt = 0;

  std::size_t total() const { return src + tgt; }
  friend bool operator==(const Shape&, const Shape&) = default;
};

// Preference order: 1-1 first, then fewer sentences, then more source
// sentences (1-0 before 0-1, 2-1 before 1-2).
inline bool shape_preferred(const Shape& a, const Shape& b) {
  const bool a11 = a.src == 1 && a.tgt == 1;
  const bool b11 = b.src == 1 && b.tgt == 1;
  if (a11 != b11) return a11;
  if (a.total() != b.total()) return a.total() < b.total();
  return a.src > b.src;
}

// Skips (1-0, 0-1) plus every a-b block with 1 <= a,b <= max_block, in rank order.
inline std::vector<Shape> shapes_up_to(std::size_t max_block) {
  std::vector<Shape> shapes{{1, 0}, {0, 1}};
  for (std::size_t a = 1; a <= max_block; ++a) {
    for (std::size_t b = 1; b <= max_block; ++b) shapes.push_back({a, b});
  }
  std::stable_sort(shapes.begin(), shapes.end(), shape_preferred);
  return shapes;
}

inline std::size_t shape_rank(const std::vector<Shape>& ranked, const Shape& s) {
  for (std::size_t r = 0; r < ranked.size(); ++r) {
    if (ranked[r] == s) return r;
  }
  throw Error("shape not in shape set");
}

// One step of an alignment path.
struct Span {
  std::size_t src_begin = 0;
  std::size_t src_len = 0;
  std::size_t tgt_begin = 0;
  std::size_t tgt_len = 0;
  double cost = 0.0;

  friend bool operator==(const Span& a, const Span& b) {
    return a.src_begin == b.src_begin && a.src_len == b.src_len && a.tgt_begin == b.tgt_begin &&
           a.tgt_len == b.tgt_len;
  }
};

struct AlignmentPath {
  std::vector<Span> spans;
  double cost = 0.0;
};

// Allowed target column range [lo, hi] for each source row 0..n.
struct Band {
  std::vector<std::size_t> lo;
  std::vector<std::size_t> hi;

  static Band full(std::size_t n, std::size_t m) {
    return {std::vector<std::size_t>(n + 1, 0), std::vector<std::size_t>(n + 1, m)};
  }

  bool contains(std::size_t i, std::size_t j) const { return i < lo.size() && j >= lo[i] && j <= hi[i]; }

  std::size_t cells() const {
    std::size_t c = 0;
    for (std::size_t i = 0; i < lo.size(); ++i) c += hi[i] - lo[i] + 1;
    return c;
  }
};

// `cost(src_begin, src_len, tgt_begin, tgt_len)` gives the cost of one block.
template <typename CostFn>
AlignmentPath monotone_align(std::size_t n, std::size_t m, const std::vector<Shape>& shapes, CostFn&& cost,
                             const Band& band) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> row_offset(n + 2, 0);
  for (std::size_t i = 0; i <= n; ++i) {
    if (band.hi[i] < band.lo[i] || band.hi[i] > m) throw Error("malformed alignment band");
    row_offset[i + 1] = row_offset[i] + (band.hi[i] - band.lo[i] + 1);
  }
  const auto index = [&](std::size_t i, std::size_t j) { return row_offset[i] + (j - band.lo[i]); };

  std::vector<double> best(row_offset[n + 1], kInf);
  std::vector<std::uint8_t> back(row_offset[n + 1], 0xFF);
  if (!band.contains(0, 0) || !band.contains(n, m)) throw Error("alignment band excludes a lattice corner");
  best[index(0, 0)] = 0.0;

  for (std::size_t i = 0; i <= n; ++i) {
    for (std::size_t j = band.lo[i]; j <= band.hi[i]; ++j) {
      if (i == 0 && j == 0) continue;
      double cell = kInf;
      std::uint8_t choice = 0xFF;
      for (std::size_t r = 0; r < shapes.size(); ++r) {
        const Shape& s = shapes[r];
        if (s.src > i || s.tgt > j) continue;
        const std::size_t pi = i - s.src, pj = j - s.tgt;
        if (!band.contains(pi, pj)) continue;
        const double prev = best[index(pi, pj)];
        if (prev == kInf) continue;
        const double c = prev + cost(pi, s.src, pj, s.tgt);
        if (c < cell) {
          cell = c;
          choice = static_cast<std::uint8_t>(r);
        }
      }
      best[index(i, j)] = cell;
      back[index(i, j)] = choice;
    }
  }

  AlignmentPath path;
  path.cost = best[index(n, m)];
  if (path.cost == kInf) throw Error("no monotone alignment inside the search band");
  std::size_t i = n, j = m;
  while (i > 0 || j > 0) {
    const Shape& s = shapes[back[index(i, j)]];
    const std::size_t pi = i - s.src, pj = j - s.tgt;
    path.spans.push_back({pi, s.src, pj, s.tgt, cost(pi, s.src, pj, s.tgt)});
    i = pi;
    j = pj;
  }
  std::reverse(path.spans.begin(), path.spans.end());
  return path;
}

template <typename CostFn>
AlignmentPath monotone_align(std::size_t n, std::size_t m, const std::vector<Shape>& shapes, CostFn&& cost) {
  return monotone_align(n, m, shapes, std::forward<CostFn>(cost), Band::full(n, m));
}

inline std::vector<std::size_t> index_range(std::size_t begin, std::size_t len) {
  std::vector<std::size_t> out(len);
  for (std::size_t k = 0; k < len; ++k) out[k] = begin + k;
  return out;
}

inline AlignmentLink to_link(const Span& s, AlignMethod method) {
  return {index_range(s.src_begin, s.src_len), index_range(s.tgt_begin, s.tgt_len), -s.cost, method};
}

// Checks that links cover both index ranges exactly once, in order.
inline bool is_monotone_partition(const std::vector<AlignmentLink>& links, std::size_t n, std::size_t m) {
  std::size_t next_src = 0, next_tgt = 0;
  for (const auto& l : links) {
    if (l.src.empty() && l.tgt.empty()) return false;
    for (std::size_t s : l.src) {
      if (s != next_src++) return false;
    }
    for (std::size_t t : l.tgt) {
      if (t != next_tgt++) return false;
    }
  }
  return next_src == n && next_tgt == m;
}

}  // namespace forge
