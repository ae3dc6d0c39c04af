#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "fmpp/fmpp.h"

namespace fmpp {

/// Library error. `code` maps 1:1 onto the public fmpp_status codes.
class Error : public std::runtime_error {
 public:
  Error(fmpp_status code, std::string msg)
      : std::runtime_error(std::move(msg)), code_(code) {}
  fmpp_status code() const { return code_; }

 private:
  fmpp_status code_;
};

[[noreturn]] inline void raise(fmpp_status code, const std::string& msg) {
  throw Error(code, msg);
}

struct Vec2 {
  double x = 0;
  double y = 0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }

inline uint64_t splitmix64(uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

/// Counter-based substream: the k-th stream of a root seed is independent of
/// how many threads consume the streams, so replicate runs reproduce exactly.
inline std::mt19937_64 substream(uint64_t root_seed, uint64_t counter) {
  return std::mt19937_64(splitmix64(root_seed ^ splitmix64(counter)));
}

inline int resolve_threads(int requested) {
  if (requested > 0) return requested;
  unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

/// Runs fn(block_index) for blocks 0..n_blocks-1 on up to n_threads workers.
/// Blocks are fixed work units; callers combine per-block results in block
/// order, which keeps reductions bit-identical for any thread count.
template <typename Fn>
void parallel_blocks(std::size_t n_blocks, int n_threads, Fn&& fn) {
  n_threads = resolve_threads(n_threads);
  if (n_threads <= 1 || n_blocks <= 1) {
    for (std::size_t b = 0; b < n_blocks; ++b) fn(b);
    return;
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      std::size_t b = next.fetch_add(1);
      if (b >= n_blocks) return;
      fn(b);
    }
  };
  std::vector<std::thread> pool;
  int n = std::min<std::size_t>(n_threads, n_blocks);
  pool.reserve(n);
  for (int i = 0; i < n; ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
}

}  // namespace fmpp
