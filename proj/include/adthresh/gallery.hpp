#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace adthresh {

struct Embedding {
  std::string instance_id;
  std::string identity;
  std::vector<double> vector;

  bool operator==(const Embedding&) const = default;
};

struct MatchResult {
  bool matched = false;
  std::optional<std::string> identity;
  // Instance id of the best-scoring embedding, whether or not it matched.
  std::string nearest_instance_id;
  double best_similarity = -1.0;
};

/// Identity-labelled embedding store.
///
/// Vectors are kept exactly as ingested; cosine similarity normalizes on the
/// fly. Identities are ordered by label, which fixes the iteration order of
/// every consumer (pairing, matching tie-break, persistence).
///
/// Not internally synchronized: const members may be called concurrently,
/// mutations must be serialized by the owner.
class Gallery {
 public:
  using IdentityMap = std::map<std::string, std::vector<Embedding>, std::less<>>;

  explicit Gallery(std::size_t dimension);

  /// Stores `vector` under `identity`, creating the identity if needed, and
  /// returns the freshly minted instance id.
  std::string register_embedding(std::string_view identity, std::span<const double> vector);

  /// Stores a pre-identified embedding (file ingestion). Counts as a
  /// registration like register_embedding.
  void insert(Embedding embedding);

  /// Deletes the embedding with `instance_id`; drops the identity when its
  /// last embedding goes. Returns false (and changes nothing) when absent.
  bool remove(std::string_view instance_id);

  /// Exhaustive cosine scan over every stored embedding. Ties on the best
  /// similarity resolve to the lexicographically smallest identity label.
  MatchResult match_query(std::span<const double> query, double threshold) const;

  std::size_t dimension() const noexcept { return dimension_; }
  const IdentityMap& identities() const noexcept { return identities_; }
  std::size_t identity_count() const noexcept { return identities_.size(); }
  std::size_t embedding_count() const noexcept { return index_.size(); }
  bool empty() const noexcept { return index_.empty(); }
  bool contains(std::string_view instance_id) const;
  const Embedding* find(std::string_view instance_id) const;

  std::uint64_t change_counter() const noexcept { return change_counter_; }
  std::uint64_t registrations_since_adapt() const noexcept { return registrations_since_adapt_; }
  std::uint64_t removals_since_adapt() const noexcept { return removals_since_adapt_; }

  /// Clears the adaptation bookkeeping counters. Does not count as a mutation.
  void mark_adapted() noexcept;

  /// Restores persisted bookkeeping after a load.
  void restore_counters(std::uint64_t change_counter, std::uint64_t registrations_since_adapt,
                        std::uint64_t removals_since_adapt) noexcept;

  /// Same dimension, identities, embeddings and instance ids. Counters are
  /// not compared.
  bool same_contents(const Gallery& other) const;

 private:
  void validate(std::span<const double> vector) const;
  std::string mint_instance_id();

  std::size_t dimension_;
  IdentityMap identities_;
  std::unordered_map<std::string, std::string> index_;  // instance_id -> identity
  std::uint64_t change_counter_ = 0;
  std::uint64_t registrations_since_adapt_ = 0;
  std::uint64_t removals_since_adapt_ = 0;
  std::uint64_t next_id_ = 1;
};

}  // namespace adthresh
