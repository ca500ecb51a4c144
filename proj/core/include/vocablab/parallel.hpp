#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace vocablab {

// Splits [0, n) into at most `workers` contiguous shards and runs
// fn(shard, begin, end) for each. Shard boundaries depend only on n and the
// shard count, so callers that write into per-shard slots and join them in
// shard order get results independent of scheduling.
template <typename F>
void for_each_shard(std::size_t n, std::size_t workers, F&& fn) {
  const std::size_t shards = std::max<std::size_t>(1, std::min(workers, n));
  const std::size_t chunk = (n + shards - 1) / std::max<std::size_t>(shards, 1);
  if (shards == 1) {
    fn(std::size_t{0}, std::size_t{0}, n);
    return;
  }
  std::vector<std::exception_ptr> errors(shards);
  std::vector<std::thread> threads;
  threads.reserve(shards);
  for (std::size_t s = 0; s < shards; ++s) {
    const std::size_t begin = std::min(n, s * chunk);
    const std::size_t end = std::min(n, begin + chunk);
    threads.emplace_back([&, s, begin, end] {
      try {
        fn(s, begin, end);
      } catch (...) {
        errors[s] = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

inline std::size_t shard_count(std::size_t n, std::size_t workers) {
  return std::max<std::size_t>(1, std::min(workers, n));
}

}  // namespace vocablab
