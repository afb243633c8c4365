#include "wfd/random.hpp"

#include <stdexcept>

namespace wfd {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t RandomStream::uniform_int(std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("uniform_int: bound must be non-zero");
  // Reject the low (2^64 mod bound) values so every residue is equally likely.
  const std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    const std::uint64_t x = next();
    if (x >= threshold) return x % bound;
  }
}

Duration RandomStream::uniform_duration(Duration lo, Duration hi) {
  if (lo > hi) throw std::invalid_argument("uniform_duration: lo > hi");
  if (lo == hi) return lo;
  const auto span = static_cast<std::uint64_t>((hi - lo).count());
  return lo + Duration{static_cast<Duration::rep>(uniform_int(span))};
}

double RandomStream::uniform_real() {
  return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

RandomStream RandomSource::stream_for(NodeId node) const {
  return RandomStream{mix64(seed_ ^ mix64(static_cast<std::uint64_t>(node.value) + 1))};
}

RandomStream RandomSource::global_stream() const { return RandomStream{mix64(seed_)}; }

}  // namespace wfd
