#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "adthresh/gallery_io.hpp"

namespace adthresh {

struct SynthSpec {
  std::size_t num_identities = 10;
  std::size_t embeddings_per_identity = 5;
  std::size_t dimension = 64;
  double within_spread = 0.5;
  double between_spread = 1.0;
  std::uint64_t rng_seed = 42;

  void validate() const;
};

/// Standard normal draws from mt19937_64 via Box-Muller, so a seed yields the
/// same stream on every standard library (std::normal_distribution does not
/// promise that).
class NormalStream {
 public:
  explicit NormalStream(std::uint64_t seed) : engine_(seed) {}

  double next();
  double uniform01();  // [0, 1), 53 random bits
  std::uint64_t below(std::uint64_t bound);  // unbiased, bound > 0

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Per identity: a direction drawn uniformly on the unit sphere, scaled by
/// between_spread. Each embedding is normalize(center + within_spread·z) with
/// z standard normal. Labels are `id0000`, `id0001`, ...; instance ids append
/// `_k`.
EmbeddingFile generate_synthetic(const SynthSpec& spec);

}  // namespace adthresh
