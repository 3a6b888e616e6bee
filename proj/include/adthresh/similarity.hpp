#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace adthresh {

class Gallery;

/// Σxᵢyᵢ / (‖x‖‖y‖), clamped to [-1, 1].
/// Throws dimension_mismatch or zero_norm.
double cosine_similarity(std::span<const double> x, std::span<const double> y);

/// 1 - cosine_similarity(x, y).
double cosine_distance(std::span<const double> x, std::span<const double> y);

/// √Σ(xᵢ-yᵢ)². Any dimension, including 1.
double euclidean_distance(std::span<const double> x, std::span<const double> y);

namespace detail {
double dot(std::span<const double> x, std::span<const double> y) noexcept;
double norm(std::span<const double> x) noexcept;
// Shared by cosine_similarity and the cached-norm paths so all of them agree
// to the last bit.
double cosine_from_parts(double dot, double norm_x, double norm_y) noexcept;
}  // namespace detail

enum class PairKind { auto_pair, cross_pair };

struct IdentityPair {
  PairKind kind;
  std::string first;
  std::string second;  // first == second for auto pairs, first < second for cross pairs
  double s_max;
};

struct SimilarityDistributions {
  std::vector<double> auto_samples;
  std::vector<double> cross_samples;
  std::uint64_t gallery_version = 0;

  /// Gaussian estimation downstream needs at least two samples on each side.
  bool supports_adaptation() const noexcept {
    return auto_samples.size() >= 2 && cross_samples.size() >= 2;
  }
  bool supports_evaluation() const noexcept {
    return !auto_samples.empty() && !cross_samples.empty();
  }
};

/// Every auto pair (identities with ≥ 2 embeddings; the self pairing of an
/// instance is excluded) followed by every unordered cross pair, in label
/// order. s_max is the maximum cosine similarity over the embedding pairs.
std::vector<IdentityPair> build_identity_pairs(const Gallery& gallery);

/// Throws insufficient_identities when the gallery holds fewer than two
/// identities. An empty auto sample list is returned as-is; callers check
/// supports_adaptation().
SimilarityDistributions build_distributions(const Gallery& gallery);

}  // namespace adthresh
