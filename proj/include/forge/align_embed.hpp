#pragma once

// Sentence alignment over sentence-embedding cosine costs.
//
// Block cost: (1 - cos(mean_src, mean_tgt)) / Z * (|src| + |tgt|), where the
// block embedding is the renormalized component-wise mean of its rows and Z is
// the mean (1 - cos) over seeded random cross-document sentence pairs. Large
// instances are solved coarse-to-fine: the embeddings are halved by averaging
// neighbouring rows, the coarse path is projected back, and the fine DP runs
// inside a band around it.

#include "forge/corpus.hpp"
#include "forge/dp.hpp"
#include "forge/random.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <span>
#include <string>
#include <vector>

namespace forge {

class EmbeddingMatrix {
 public:
  EmbeddingMatrix() = default;
  EmbeddingMatrix(std::size_t rows, std::size_t dim) : rows_(rows), dim_(dim), data_(rows * dim, 0.0) {}

  std::size_t rows() const { return rows_; }
  std::size_t dim() const { return dim_; }

  std::span<double> row(std::size_t i) { return {data_.data() + i * dim_, dim_}; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * dim_, dim_}; }

  double norm(std::size_t i) const {
    double s = 0.0;
    for (double v : row(i)) s += v * v;
    return std::sqrt(s);
  }

  std::vector<std::size_t> zero_norm_rows() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < rows_; ++i) {
      if (norm(i) == 0.0) out.push_back(i);
    }
    return out;
  }

  void scale(double factor) {
    for (double& v : data_) v *= factor;
  }

  friend bool operator==(const EmbeddingMatrix&, const EmbeddingMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t dim_ = 0;
  std::vector<double> data_;
};

inline double cosine(std::span<const double> a, std::span<const double> b) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    dot += a[k] * b[k];
    na += a[k] * a[k];
    nb += b[k] * b[k];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

// Parses an embedding file: header "N D", then N rows of D reals.
inline EmbeddingMatrix parse_embeddings(std::string_view data, const std::string& origin) {
  const auto lines = split_on(data, '\n');
  std::size_t line_no = 0;
  const auto fail = [&](const std::string& what) -> Error {
    return Error(origin + ":" + std::to_string(line_no) + ": " + what);
  };
  const auto parse_row = [&](std::string_view line, std::vector<double>& out) {
    out.clear();
    for (const auto& tok : split_whitespace(line)) {
      double v = 0.0;
      const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
      if (res.ec != std::errc() || res.ptr != tok.data() + tok.size()) throw fail("non-numeric token '" + tok + "'");
      if (!std::isfinite(v)) throw fail("non-finite component");
      out.push_back(v);
    }
  };
  std::size_t idx = 0;
  while (idx < lines.size() && trim(lines[idx]).empty()) ++idx;
  line_no = idx + 1;
  if (idx >= lines.size()) throw fail("missing 'N D' header");
  const auto header = split_whitespace(lines[idx]);
  std::size_t n = 0, d = 0;
  if (header.size() != 2 || std::from_chars(header[0].data(), header[0].data() + header[0].size(), n).ec != std::errc() ||
      std::from_chars(header[1].data(), header[1].data() + header[1].size(), d).ec != std::errc() || d == 0) {
    throw fail("malformed 'N D' header");
  }
  EmbeddingMatrix m(n, d);
  std::vector<double> row;
  std::size_t r = 0;
  for (++idx; idx < lines.size(); ++idx) {
    line_no = idx + 1;
    if (trim(lines[idx]).empty()) continue;
    if (r >= n) throw fail("more rows than the header declares");
    parse_row(lines[idx], row);
    if (row.size() != d) throw fail("expected " + std::to_string(d) + " components, got " + std::to_string(row.size()));
    std::copy(row.begin(), row.end(), m.row(r).begin());
    ++r;
  }
  if (r != n) throw Error(origin + ": header declares " + std::to_string(n) + " rows, found " + std::to_string(r));
  return m;
}

inline std::size_t count_text_lines(const std::filesystem::path& text_path) {
  return read_lines(text_path).size();
}

// Loads the embeddings for a one-sentence-per-line text file.
inline EmbeddingMatrix load_embeddings(const std::filesystem::path& text_path, const std::filesystem::path& emb_path) {
  EmbeddingMatrix m = parse_embeddings(read_file(emb_path), emb_path.string());
  const std::size_t lines = count_text_lines(text_path);
  if (m.rows() != lines) {
    throw Error(emb_path.string() + ": " + std::to_string(m.rows()) + " embeddings but " + text_path.string() +
                " has " + std::to_string(lines) + " lines");
  }
  return m;
}

inline std::string format_embeddings(const EmbeddingMatrix& m) {
  std::string out = std::to_string(m.rows()) + " " + std::to_string(m.dim()) + "\n";
  char buf[32];
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const auto r = m.row(i);
    for (std::size_t k = 0; k < r.size(); ++k) {
      const int len = std::snprintf(buf, sizeof buf, "%.9g", r[k]);
      if (k) out.push_back(' ');
      out.append(buf, static_cast<std::size_t>(len));
    }
    out.push_back('\n');
  }
  return out;
}

inline void write_embeddings(const EmbeddingMatrix& m, const std::filesystem::path& path) {
  write_file(path, format_embeddings(m));
}

// Deterministic stand-in provider: signed feature hashing of character
// 1..3-grams, unit-normalized. Identical sentences share a vector; nothing
// about translation is modelled.
inline EmbeddingMatrix stub_embeddings(std::span<const std::string> sentences, std::size_t dim, std::uint64_t seed) {
  if (dim < 8) throw Error("stub embeddings need D >= 8");
  EmbeddingMatrix m(sentences.size(), dim);
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    std::u32string cps = U"\x02" + to_u32(sentences[i]) + U"\x03";
    auto r = m.row(i);
    for (std::size_t n = 1; n <= 3; ++n) {
      for (std::size_t p = 0; p + n <= cps.size(); ++p) {
        std::uint64_t h = 1469598103934665603ULL ^ (seed * 0x9E3779B97F4A7C15ULL);
        for (std::size_t k = 0; k < n; ++k) {
          h ^= static_cast<std::uint64_t>(cps[p + k]);
          h *= 1099511628211ULL;
        }
        h ^= h >> 29;
        h *= 0xBF58476D1CE4E5B9ULL;
        h ^= h >> 32;
        const double sign = (h >> 63) ? -1.0 : 1.0;
        r[h % dim] += sign;
      }
    }
    const double norm = m.norm(i);
    if (norm > 0.0) {
      for (double& v : r) v /= norm;
    }
  }
  return m;
}

struct EmbedAlignParams {
  std::size_t max_block = 2;
  double skip_cost = 0.9;
  std::size_t window = 40;
  std::size_t norm_samples = 128;
  std::uint64_t seed = 13;
  // Instances with at most this many sentence pairs are solved exactly.
  std::size_t exact_cell_limit = 10000;

  void validate() const {
    if (max_block < 1 || window < 1 || norm_samples < 1) {
      throw Error("embedding aligner needs max_block >= 1, window >= 1, norm_samples >= 1");
    }
  }
};

// Random-pair baseline of (1 - cos) between the two documents, floored at 1e-6.
inline double cost_normalizer(const EmbeddingMatrix& src, const EmbeddingMatrix& tgt, const EmbedAlignParams& p) {
  Rng rng(p.seed);
  double sum = 0.0;
  for (std::size_t s = 0; s < p.norm_samples; ++s) {
    const std::size_t i = rng.index(src.rows());
    const std::size_t j = rng.index(tgt.rows());
    sum += 1.0 - cosine(src.row(i), tgt.row(j));
  }
  return std::max(1e-6, sum / static_cast<double>(p.norm_samples));
}

// Block costs for one document pair. Block embeddings are cached.
class EmbedCostModel {
 public:
  EmbedCostModel(const EmbeddingMatrix& src, const EmbeddingMatrix& tgt, const EmbedAlignParams& params)
      : params_(params),
        normalizer_(cost_normalizer(src, tgt, params)),
        src_blocks_(block_vectors(src, params.max_block)),
        tgt_blocks_(block_vectors(tgt, params.max_block)),
        max_block_(params.max_block),
        dim_(src.dim()) {
    if (src.dim() != tgt.dim()) throw Error("embedding dimensions differ between source and target");
  }

  double normalizer() const { return normalizer_; }

  double operator()(std::size_t i, std::size_t a, std::size_t j, std::size_t b) const {
    if (a == 0 || b == 0) return params_.skip_cost * static_cast<double>(a + b);
    const auto& sv = src_blocks_[i * max_block_ + (a - 1)];
    const auto& tv = tgt_blocks_[j * max_block_ + (b - 1)];
    const double sentences = static_cast<double>(a + b);
    if (sv.empty() || tv.empty()) return 2.0 / normalizer_ * sentences;
    // 1 - u.v for unit vectors, as half the squared distance: exact zero for
    // identical blocks and never negative.
    double dist2 = 0.0;
    for (std::size_t k = 0; k < dim_; ++k) {
      const double d = sv[k] - tv[k];
      dist2 += d * d;
    }
    return 0.5 * dist2 / normalizer_ * sentences;
  }

 private:
  // Unit vector for every block (start, len); empty when the mean is zero.
  static std::vector<std::vector<double>> block_vectors(const EmbeddingMatrix& m, std::size_t max_block) {
    std::vector<std::vector<double>> out(m.rows() * max_block);
    for (std::size_t i = 0; i < m.rows(); ++i) {
      for (std::size_t len = 1; len <= max_block && i + len <= m.rows(); ++len) {
        std::vector<double> v(m.dim(), 0.0);
        for (std::size_t r = i; r < i + len; ++r) {
          const auto row = m.row(r);
          for (std::size_t k = 0; k < m.dim(); ++k) v[k] += row[k];
        }
        double norm = 0.0;
        for (double& x : v) {
          x /= static_cast<double>(len);
          norm += x * x;
        }
        norm = std::sqrt(norm);
        if (norm == 0.0) continue;
        for (double& x : v) x /= norm;
        out[i * max_block + (len - 1)] = std::move(v);
      }
    }
    return out;
  }

  EmbedAlignParams params_;
  double normalizer_;
  std::vector<std::vector<double>> src_blocks_;
  std::vector<std::vector<double>> tgt_blocks_;
  std::size_t max_block_;
  std::size_t dim_;
};

// Cost of one block under the document-level normalization.
inline double embed_cost(std::size_t src_begin, std::size_t src_len, std::size_t tgt_begin, std::size_t tgt_len,
                         const EmbeddingMatrix& src, const EmbeddingMatrix& tgt, const EmbedAlignParams& params) {
  if (src_len > params.max_block || tgt_len > params.max_block) throw Error("block larger than max_block");
  if (src_len == 0 && tgt_len == 0) throw Error("link with both sides empty");
  return EmbedCostModel(src, tgt, params)(src_begin, src_len, tgt_begin, tgt_len);
}

// Halves the row count by averaging neighbouring rows.
inline EmbeddingMatrix downsample(const EmbeddingMatrix& m) {
  EmbeddingMatrix out((m.rows() + 1) / 2, m.dim());
  for (std::size_t i = 0; i < out.rows(); ++i) {
    auto dst = out.row(i);
    const std::size_t first = 2 * i;
    const std::size_t count = std::min<std::size_t>(2, m.rows() - first);
    for (std::size_t r = first; r < first + count; ++r) {
      const auto row = m.row(r);
      for (std::size_t k = 0; k < m.dim(); ++k) dst[k] += row[k] / static_cast<double>(count);
    }
  }
  return out;
}

// Band of +-window columns around a coarse path projected onto the fine lattice.
inline Band project_band(const AlignmentPath& coarse, std::size_t n, std::size_t m, std::size_t window) {
  Band band{std::vector<std::size_t>(n + 1, m), std::vector<std::size_t>(n + 1, 0)};
  for (const auto& s : coarse.spans) {
    const std::size_t r0 = std::min(n, 2 * s.src_begin), r1 = std::min(n, 2 * (s.src_begin + s.src_len));
    const std::size_t c0 = std::min(m, 2 * s.tgt_begin), c1 = std::min(m, 2 * (s.tgt_begin + s.tgt_len));
    for (std::size_t i = r0; i <= r1; ++i) {
      band.lo[i] = std::min(band.lo[i], c0);
      band.hi[i] = std::max(band.hi[i], c1);
    }
  }
  for (std::size_t i = 0; i <= n; ++i) {
    band.lo[i] = band.lo[i] > window ? band.lo[i] - window : 0;
    band.hi[i] = std::min(m, band.hi[i] + window);
  }
  band.lo[0] = 0;
  band.hi[n] = m;
  return band;
}

namespace detail {

inline AlignmentPath solve_embed(const EmbeddingMatrix& src, const EmbeddingMatrix& tgt, const EmbedAlignParams& params,
                                 const std::vector<Shape>& shapes) {
  const EmbedCostModel costs(src, tgt, params);
  if (src.rows() * tgt.rows() <= params.exact_cell_limit || src.rows() < 4 || tgt.rows() < 4) {
    return monotone_align(src.rows(), tgt.rows(), shapes, costs);
  }
  const AlignmentPath coarse = solve_embed(downsample(src), downsample(tgt), params, shapes);
  return monotone_align(src.rows(), tgt.rows(), shapes, costs,
                        project_band(coarse, src.rows(), tgt.rows(), params.window));
}

}  // namespace detail

inline std::vector<AlignmentLink> align_embed(std::span<const std::string> src_sentences,
                                              std::span<const std::string> tgt_sentences, const EmbeddingMatrix& src,
                                              const EmbeddingMatrix& tgt, const EmbedAlignParams& params) {
  params.validate();
  if (src_sentences.empty() || tgt_sentences.empty()) throw Error("align_embed needs non-empty sentence lists");
  if (src.rows() != src_sentences.size() || tgt.rows() != tgt_sentences.size()) {
    throw Error("embedding row count does not match sentence count");
  }
  const auto shapes = shapes_up_to(params.max_block);
  const AlignmentPath path = detail::solve_embed(src, tgt, params, shapes);
  std::vector<AlignmentLink> links;
  links.reserve(path.spans.size());
  for (const auto& s : path.spans) links.push_back(to_link(s, AlignMethod::Embedding));
  return links;
}

}  // namespace forge
