#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <random>
#include <thread>
#include <vector>

namespace lbridge {

/// Engine used by every stochastic routine.
using Engine = std::mt19937_64;

/// SplitMix64 finalizer; a bijection on 64-bit words.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Seed of sub-stream `stream` under `seed`:
///   derive_seed(seed, stream) = splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x9E3779B97F4A7C15)).
/// Sharded samplers give shard i the engine Engine(derive_seed(seed, i)), so
/// results never depend on the number of worker threads.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept;

/// Engine for sub-stream `stream` of `seed`.
Engine make_engine(std::uint64_t seed, std::uint64_t stream = 0);

/// Draws per shard for the sharded samplers.
inline constexpr std::size_t kShardSize = 8192;

/// Worker count used when a caller passes threads == 0.
unsigned default_threads() noexcept;

/// Runs fn(i) for every i in [0, n) on up to `threads` workers
/// (0 = default_threads()). Work is handed out in contiguous blocks.
template <typename Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
  if (threads == 0) threads = default_threads();
  const std::size_t workers = std::min<std::size_t>(threads, n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      const std::size_t begin = n * w / workers;
      const std::size_t end = n * (w + 1) / workers;
      for (std::size_t i = begin; i < end; ++i) fn(i);
    });
  }
}

/// ln of a Gamma(shape, 1) variate (Marsaglia-Tsang; shape < 1 uses the
/// boost G(shape) = G(shape + 1) * U^(1/shape), kept in log space so tiny
/// shapes do not underflow).
double log_gamma_variate(double shape, Engine& engine);

}  // namespace lbridge
