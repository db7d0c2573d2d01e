#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>

namespace taylor {

/// (seed, stream) fully determines a draw sequence.
struct RngSpec {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;

  /// A child stream; distinct ids give unrelated sequences.
  RngSpec substream(std::uint64_t id) const noexcept;

  friend bool operator==(const RngSpec&, const RngSpec&) = default;
};

std::uint64_t mix_stream(std::uint64_t stream, std::uint64_t id) noexcept;

class Rng {
 public:
  explicit Rng(RngSpec spec);

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  double normal(double mean = 0.0, double sd = 1.0);
  bool bernoulli(double p) { return uniform() < p; }

  const RngSpec& spec() const noexcept { return spec_; }
  std::mt19937_64& engine() noexcept { return engine_; }

 private:
  RngSpec spec_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_;
};

/// Fixed chunk size used by every sampling loop; results never depend on
/// the worker count because each chunk owns its substream and slot.
inline constexpr std::size_t kChunkSize = 4096;

/// Calls fn(chunk, begin, end) for each chunk of [0, count), on up to
/// `threads` workers. The first exception thrown by any chunk is rethrown.
void for_each_chunk(std::size_t count, std::size_t chunk_size, unsigned threads,
                    const std::function<void(std::size_t, std::size_t, std::size_t)>& fn);

}  // namespace taylor
