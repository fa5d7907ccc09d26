#pragma once

#include <cstdint>
#include <random>

namespace plant {

// Reproducible random stream for one replication. The engine is fully
// specified by the standard, and the conversions below avoid the
// implementation-defined std distributions, so draws are bit-identical
// across standard libraries.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream),
                      static_cast<std::uint32_t>(stream >> 32), 0x9e3779b9u};
    engine_.seed(seq);
  }

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream() const noexcept { return stream_; }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform() < p; }

  std::int64_t binomial(std::int64_t n, double p) {
    std::int64_t hits = 0;
    for (std::int64_t i = 0; i < n; ++i) hits += bernoulli(p) ? 1 : 0;
    return hits;
  }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::mt19937_64 engine_;
};

}  // namespace plant
