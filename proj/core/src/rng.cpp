#include "taylor/rng.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace taylor {

namespace {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::mt19937_64 seeded_engine(const RngSpec& spec) {
  std::seed_seq seq{static_cast<std::uint32_t>(spec.seed), static_cast<std::uint32_t>(spec.seed >> 32),
                    static_cast<std::uint32_t>(spec.stream), static_cast<std::uint32_t>(spec.stream >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace

std::uint64_t mix_stream(std::uint64_t stream, std::uint64_t id) noexcept {
  return splitmix64(splitmix64(stream) ^ (id + 0x632be59bd9b4e019ULL));
}

RngSpec RngSpec::substream(std::uint64_t id) const noexcept { return {seed, mix_stream(stream, id)}; }

Rng::Rng(RngSpec spec) : spec_(spec), engine_(seeded_engine(spec)) {}

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1p-53; }

double Rng::normal(double mean, double sd) {
  if (sd == 0.0) {
    return mean;
  }
  return normal_(engine_, std::normal_distribution<double>::param_type(mean, sd));
}

void for_each_chunk(std::size_t count, std::size_t chunk_size, unsigned threads,
                    const std::function<void(std::size_t, std::size_t, std::size_t)>& fn) {
  if (count == 0) {
    return;
  }
  const std::size_t chunks = (count + chunk_size - 1) / chunk_size;
  auto run = [&](std::size_t c) { fn(c, c * chunk_size, std::min(count, (c + 1) * chunk_size)); };
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(std::max(1U, threads), chunks));
  if (workers <= 1) {
    for (std::size_t c = 0; c < chunks; ++c) {
      run(c);
    }
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t c = next++; c < chunks; c = next++) {
        try {
          run(c);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) {
            error = std::current_exception();
          }
        }
      }
    });
  }
  for (auto& t : pool) {
    t.join();
  }
  if (error) {
    std::rethrow_exception(error);
  }
}

}  // namespace taylor
