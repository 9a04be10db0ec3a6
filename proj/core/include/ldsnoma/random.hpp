#pragma once

#include <complex>
#include <cstdint>
#include <random>

namespace ldsnoma {

/// Seeded pseudo-random stream with hash-derived substreams.
///
/// A stream is identified by (seed, stream_id). Equal pairs reproduce equal
/// draw sequences; distinct pairs give statistically independent sequences.
/// Substreams are derived by mixing, not by splitting the sequence, so work
/// that owns one substream per unit (e.g. one per Monte-Carlo trial) produces
/// the same numbers no matter how the units are ordered or distributed over
/// threads.
///
/// The draw recipe is part of the reproducibility contract:
///  - engine: std::mt19937_64 seeded with a splitmix64-style hash of
///    (seed, stream_id);
///  - uniform doubles use the top 53 bits of one engine output;
///  - each Gaussian draw consumes exactly one uniform pair (Box-Muller);
///    the sine branch is kept only where a complex draw needs both parts,
///    so no state is carried between calls.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed, std::uint64_t stream_id = 0);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  /// Derives the `index`-th child stream. Children of distinct (parent,
  /// index) pairs are distinct; derivation does not advance this stream.
  RandomStream substream(std::uint64_t index) const;

  /// Next raw engine output.
  std::uint64_t next_u64();

  /// Uniform double in [0, 1).
  double uniform();

  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi);

  /// Uniform integer in {0, ..., n-1} via rejection-free scaling (n > 0).
  std::uint64_t uniform_index(std::uint64_t n);

  /// Standard normal draw (mean 0, variance 1). Consumes one uniform pair.
  double gaussian();

  /// Standard complex normal draw: real and imaginary parts are independent
  /// with variance 1/2 each, so E|z|^2 = 1. Consumes one uniform pair.
  std::complex<double> complex_gaussian();

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
};

}  // namespace ldsnoma
