#pragma once

#include <atomic>
#include <cstdlib>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace cityom {

// Worker-thread count, resolved from an explicit request, the
// CITYOMETRICS_THREADS environment variable, or hardware concurrency.
inline unsigned resolve_threads(unsigned requested = 0) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("CITYOMETRICS_THREADS")) {
    long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw ? hw : 1;
}

// Deterministic chunked fold: items are cut into fixed-size chunks
// independent of the worker count, each chunk maps to a partial result,
// and partials are reduced in chunk order. Output is therefore identical
// for any number of workers; with an order-independent reduce it is also
// identical under input permutation.
template <typename Partial, typename MapFn, typename ReduceFn>
Partial chunked_fold(size_t item_count, size_t chunk_size, unsigned threads, MapFn map_chunk,
                     ReduceFn reduce) {
  if (chunk_size == 0) chunk_size = 1;
  size_t n_chunks = (item_count + chunk_size - 1) / chunk_size;
  std::vector<std::optional<Partial>> partials(n_chunks);

  if (threads <= 1 || n_chunks <= 1) {
    for (size_t c = 0; c < n_chunks; ++c) {
      size_t begin = c * chunk_size;
      size_t end = std::min(item_count, begin + chunk_size);
      partials[c] = map_chunk(begin, end);
    }
  } else {
    std::atomic<size_t> next{0};
    auto worker = [&] {
      for (;;) {
        size_t c = next.fetch_add(1);
        if (c >= n_chunks) return;
        size_t begin = c * chunk_size;
        size_t end = std::min(item_count, begin + chunk_size);
        partials[c] = map_chunk(begin, end);
      }
    };
    std::vector<std::thread> pool;
    unsigned n = std::min<size_t>(threads, n_chunks);
    pool.reserve(n);
    for (unsigned t = 0; t < n; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  Partial acc{};
  for (size_t c = 0; c < n_chunks; ++c) reduce(acc, std::move(*partials[c]));
  return acc;
}

}  // namespace cityom
