#include "adthresh/synth.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>

#include "adthresh/error.hpp"

namespace adthresh {

void SynthSpec::validate() const {
  if (num_identities == 0 || embeddings_per_identity == 0) {
    throw Error(ErrorCode::invalid_argument, "identity and embedding counts must be positive");
  }
  if (dimension < 2) throw Error(ErrorCode::invalid_argument, "dimension must be at least 2");
  if (!(within_spread > 0.0) || !(between_spread > 0.0)) {
    throw Error(ErrorCode::invalid_argument, "spreads must be positive");
  }
}

double NormalStream::uniform01() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::uint64_t NormalStream::below(std::uint64_t bound) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % bound;
}

double NormalStream::next() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1;
  do {
    u1 = uniform01();
  } while (u1 == 0.0);
  const double u2 = uniform01();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(theta);
  has_spare_ = true;
  return r * std::cos(theta);
}

namespace {

void normalize(std::vector<double>& v) {
  double ss = 0.0;
  for (double x : v) ss += x * x;
  const double n = std::sqrt(ss);
  for (double& x : v) x /= n;
}

std::string identity_label(std::size_t i, std::size_t total) {
  int width = 4;
  for (std::size_t t = total; t >= 10000; t /= 10) ++width;
  char buf[32];
  std::snprintf(buf, sizeof buf, "id%0*zu", width, i);
  return buf;
}

}  // namespace

EmbeddingFile generate_synthetic(const SynthSpec& spec) {
  spec.validate();
  NormalStream rng(spec.rng_seed);
  EmbeddingFile file;
  file.dimension = spec.dimension;
  file.embeddings.reserve(spec.num_identities * spec.embeddings_per_identity);

  std::vector<double> center(spec.dimension);
  for (std::size_t i = 0; i < spec.num_identities; ++i) {
    for (double& c : center) c = rng.next();
    normalize(center);
    for (double& c : center) c *= spec.between_spread;

    const std::string label = identity_label(i, spec.num_identities);
    for (std::size_t k = 0; k < spec.embeddings_per_identity; ++k) {
      std::vector<double> v(spec.dimension);
      for (std::size_t d = 0; d < spec.dimension; ++d) {
        v[d] = center[d] + spec.within_spread * rng.next();
      }
      normalize(v);
      file.embeddings.push_back({label + "_" + std::to_string(k), label, std::move(v)});
    }
  }
  return file;
}

}  // namespace adthresh
