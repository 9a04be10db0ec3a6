#include "ldsnoma/random.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ldsnoma {
namespace {

// splitmix64 finalizer; decorrelates nearby inputs.
std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ull;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBull;
  z ^= z >> 31;
  return z;
}

std::uint64_t engine_seed(std::uint64_t seed, std::uint64_t stream_id) {
  return mix64(mix64(seed + 0x9E3779B97F4A7C15ull) ^
               (stream_id + 0xD1B54A32D192ED03ull));
}

}  // namespace

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id), engine_(engine_seed(seed, stream_id)) {}

RandomStream RandomStream::substream(std::uint64_t index) const {
  // Children re-key the stream id; the seed stays visible for labelling.
  return RandomStream(seed_, mix64(stream_id_ + 0x9E3779B97F4A7C15ull * (index + 1)));
}

std::uint64_t RandomStream::next_u64() { return engine_(); }

double RandomStream::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RandomStream::uniform(double lo, double hi) {
  return lo + (hi - lo) * uniform();
}

std::uint64_t RandomStream::uniform_index(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("uniform_index: n must be positive");
  // Scaling by a 53-bit uniform keeps the draw count at one engine step per
  // call; the bias for n << 2^53 is negligible for this library's uses.
  return static_cast<std::uint64_t>(uniform() * static_cast<double>(n)) % n;
}

double RandomStream::gaussian() {
  // Box-Muller, cosine branch. u1 is offset into (0, 1] so log(u1) is finite.
  const double u1 = static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
  const double u2 = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

std::complex<double> RandomStream::complex_gaussian() {
  const double u1 = static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
  const double u2 = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  const double radius = std::sqrt(-std::log(u1));  // sqrt(-2 log u1) / sqrt 2
  const double angle = 2.0 * std::numbers::pi * u2;
  return {radius * std::cos(angle), radius * std::sin(angle)};
}

}  // namespace ldsnoma
