#pragma once

#include <algorithm>
#include <cstdint>
#include <thread>
#include <vector>

namespace pacr {

/// Splits [0, count) into contiguous chunks, runs body(begin, end, out)
/// per chunk on its own thread and returns the per-chunk accumulators in
/// chunk order. Results depend only on `count` and `threads`, never on
/// scheduling, as long as body is a pure function of its range.
template <typename Acc, typename Body>
std::vector<Acc> parallel_chunks(std::int64_t count, Body body, unsigned threads = 0) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  const auto chunks = static_cast<std::int64_t>(std::min<std::int64_t>(threads, std::max<std::int64_t>(count, 1)));
  std::vector<Acc> acc(static_cast<std::size_t>(chunks));
  {
    std::vector<std::jthread> pool;
    for (std::int64_t c = 0; c < chunks; ++c) {
      const std::int64_t begin = count * c / chunks;
      const std::int64_t end = count * (c + 1) / chunks;
      pool.emplace_back([&, c, begin, end] { body(begin, end, acc[static_cast<std::size_t>(c)]); });
    }
  }
  return acc;
}

}  // namespace pacr
