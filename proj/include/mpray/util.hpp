#pragma once

#include <array>
#include <charconv>
#include <exception>
#include <functional>
#include <string>
#include <system_error>
#include <thread>
#include <vector>

namespace mpray {

// Shortest decimal string that round-trips to the same double.
inline std::string num_str(double v) {
  std::array<char, 40> buf{};
  auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

// Runs fn(i) for i in [0, n) on up to `threads` workers.  Work items write
// only to their own index, so results are identical for any thread count;
// callers must reduce in index order afterwards.  The first exception thrown
// by a worker is rethrown on the calling thread.
inline void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
  if (threads <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  const std::size_t nt = std::min<std::size_t>(static_cast<std::size_t>(threads), n);
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errs(nt);
  for (std::size_t w = 0; w < nt; ++w) {
    pool.emplace_back([&, w]() {
      try {
        for (std::size_t i = w; i < n; i += nt) fn(i);
      } catch (...) {
        errs[w] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (const auto& e : errs)
    if (e) std::rethrow_exception(e);
}

}  // namespace mpray
