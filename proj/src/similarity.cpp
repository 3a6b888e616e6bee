#include "adthresh/similarity.hpp"

#include <algorithm>
#include <cmath>

#include "adthresh/error.hpp"
#include "adthresh/gallery.hpp"

namespace adthresh {

namespace detail {

double dot(std::span<const double> x, std::span<const double> y) noexcept {
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) acc += x[i] * y[i];
  return acc;
}

double norm(std::span<const double> x) noexcept { return std::sqrt(dot(x, x)); }

double cosine_from_parts(double dot, double norm_x, double norm_y) noexcept {
  return std::clamp(dot / (norm_x * norm_y), -1.0, 1.0);
}

}  // namespace detail

namespace {

void require_same_size(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw Error(ErrorCode::dimension_mismatch,
                std::to_string(x.size()) + " vs " + std::to_string(y.size()));
  }
}

}  // namespace

double cosine_similarity(std::span<const double> x, std::span<const double> y) {
  require_same_size(x, y);
  const double nx2 = detail::dot(x, x);
  const double ny2 = detail::dot(y, y);
  if (nx2 == 0.0 || ny2 == 0.0) throw Error(ErrorCode::zero_norm, "cosine of a zero vector");
  // One sqrt of the product keeps cos(x, x) at exactly 1; fall back to
  // separate roots if the product leaves the normal range.
  const double prod = nx2 * ny2;
  if (std::isnormal(prod)) return std::clamp(detail::dot(x, y) / std::sqrt(prod), -1.0, 1.0);
  return detail::cosine_from_parts(detail::dot(x, y), std::sqrt(nx2), std::sqrt(ny2));
}

double cosine_distance(std::span<const double> x, std::span<const double> y) {
  return 1.0 - cosine_similarity(x, y);
}

double euclidean_distance(std::span<const double> x, std::span<const double> y) {
  require_same_size(x, y);
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - y[i];
    acc += d * d;
  }
  return std::sqrt(acc);
}

namespace {

struct IdentityBlock {
  const std::string* label;
  std::vector<std::span<const double>> vectors;
  std::vector<double> norms;
};

std::vector<IdentityBlock> collect_blocks(const Gallery& gallery) {
  std::vector<IdentityBlock> blocks;
  blocks.reserve(gallery.identity_count());
  for (const auto& [label, embeddings] : gallery.identities()) {
    IdentityBlock block{&label, {}, {}};
    for (const auto& e : embeddings) {
      block.vectors.emplace_back(e.vector);
      block.norms.push_back(detail::norm(e.vector));
    }
    blocks.push_back(std::move(block));
  }
  return blocks;
}

double auto_s_max(const IdentityBlock& b) {
  double best = -1.0;
  for (std::size_t i = 0; i < b.vectors.size(); ++i) {
    for (std::size_t j = i + 1; j < b.vectors.size(); ++j) {
      best = std::max(best, detail::cosine_from_parts(detail::dot(b.vectors[i], b.vectors[j]),
                                                      b.norms[i], b.norms[j]));
    }
  }
  return best;
}

double cross_s_max(const IdentityBlock& a, const IdentityBlock& b) {
  double best = -1.0;
  for (std::size_t i = 0; i < a.vectors.size(); ++i) {
    for (std::size_t j = 0; j < b.vectors.size(); ++j) {
      best = std::max(best, detail::cosine_from_parts(detail::dot(a.vectors[i], b.vectors[j]),
                                                      a.norms[i], b.norms[j]));
    }
  }
  return best;
}

}  // namespace

std::vector<IdentityPair> build_identity_pairs(const Gallery& gallery) {
  const auto blocks = collect_blocks(gallery);
  std::vector<IdentityPair> pairs;
  for (const auto& b : blocks) {
    if (b.vectors.size() >= 2) {
      pairs.push_back({PairKind::auto_pair, *b.label, *b.label, auto_s_max(b)});
    }
  }
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    for (std::size_t j = i + 1; j < blocks.size(); ++j) {
      pairs.push_back({PairKind::cross_pair, *blocks[i].label, *blocks[j].label,
                       cross_s_max(blocks[i], blocks[j])});
    }
  }
  return pairs;
}

SimilarityDistributions build_distributions(const Gallery& gallery) {
  if (gallery.identity_count() < 2) {
    throw Error(ErrorCode::insufficient_identities,
                "need at least 2 identities, gallery has " +
                    std::to_string(gallery.identity_count()));
  }
  SimilarityDistributions dist;
  dist.gallery_version = gallery.change_counter();
  for (const auto& pair : build_identity_pairs(gallery)) {
    (pair.kind == PairKind::auto_pair ? dist.auto_samples : dist.cross_samples)
        .push_back(pair.s_max);
  }
  return dist;
}

}  // namespace adthresh
