#pragma once
// Shared basic types: grids, complex images, dynamic image stacks, error
// classes, seeded RNG derivation, and a deterministic parallel map-reduce.

#include <algorithm>
#include <complex>
#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace dynrad {

using cplx = std::complex<double>;
inline constexpr double kPi = 3.14159265358979323846;

// Config / usage problems -> CLI exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
// Numeric breakdowns (non-finite values, failed convergence) -> exit code 3.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Square Cartesian grid. Pixel (ix,iy) has center coordinate
// ((ix - nx/2)*dx, (iy - ny/2)*dx) in mm, so the FOV center sits on the
// pixel at (nx/2, ny/2) — same asymmetric even-length convention as the
// centered FFT (DC at index M/2).
struct GridSpec {
  int nx = 0;
  int ny = 0;
  double fov = 0.0;  // mm

  double dx() const { return fov / nx; }
  double x(int ix) const { return (ix - nx / 2) * dx(); }
  double y(int iy) const { return (iy - ny / 2) * dx(); }

  void validate() const {
    if (nx != ny) throw ConfigError("grid must be square (nx == ny)");
    if (nx < 8) throw ConfigError("grid too small (nx >= 8 required)");
    if (!(fov > 0.0)) throw ConfigError("grid fov must be positive");
  }
};

struct ComplexImage {
  GridSpec grid;
  std::vector<cplx> v;  // row-major [nx * ny], index ix*ny + iy

  ComplexImage() = default;
  explicit ComplexImage(const GridSpec& g) : grid(g), v(size_t(g.nx) * g.ny) {}
  cplx& at(int ix, int iy) { return v[size_t(ix) * grid.ny + iy]; }
  const cplx& at(int ix, int iy) const { return v[size_t(ix) * grid.ny + iy]; }
};

// A time series of frames on a common grid.
struct DynamicImage {
  GridSpec grid;
  std::vector<double> times;     // seconds, one per frame
  std::vector<ComplexImage> frames;

  size_t n_frames() const { return frames.size(); }
};

// splitmix64 — used to derive independent stream seeds from (seed, tag).
inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline uint64_t fnv1a(const std::string& s) {
  uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

// Deterministic per-purpose RNG: same (seed, tag) -> same stream, and
// distinct tags give unrelated streams.
inline std::mt19937_64 make_rng(uint64_t seed, const std::string& tag) {
  return std::mt19937_64(splitmix64(seed ^ fnv1a(tag)));
}

// Runs fn(i, thread_scratch) for i in [0, n) across up to n_threads workers,
// then merges results strictly in index order via merge(i, scratch_of_i).
// Work item i is computed by worker (i mod T) into that worker's scratch
// slot; a single merger consumes slots in index order. The merged result is
// therefore bit-identical for any thread count. Scratch must be reusable
// after merge returns.
//
// Contract: compute(i, scratch) fills scratch; merge(i, scratch) folds it
// into the caller's accumulator. merge is called on the calling thread.
template <typename Scratch>
void ordered_parallel_reduce(size_t n, int n_threads,
                             std::vector<Scratch>& scratch_pool,
                             const std::function<void(size_t, Scratch&)>& compute,
                             const std::function<void(size_t, Scratch&)>& merge) {
  int T = n_threads < 1 ? 1 : n_threads;
  if (T == 1 || n <= 1) {
    for (size_t i = 0; i < n; ++i) {
      compute(i, scratch_pool[0]);
      merge(i, scratch_pool[0]);
    }
    return;
  }
  if ((int)scratch_pool.size() < T)
    throw std::logic_error("scratch pool smaller than thread count");

  // Wave scheme: items [w*T, w*T+T) are computed in parallel (item w*T+j in
  // scratch j), then merged in order. Simple, bounded memory, deterministic.
  size_t w0 = 0;
  std::vector<std::thread> pool;
  while (w0 < n) {
    size_t count = std::min<size_t>(T, n - w0);
    pool.clear();
    for (size_t j = 1; j < count; ++j)
      pool.emplace_back([&, j] { compute(w0 + j, scratch_pool[j]); });
    compute(w0, scratch_pool[0]);
    for (auto& t : pool) t.join();
    for (size_t j = 0; j < count; ++j) merge(w0 + j, scratch_pool[j]);
    w0 += count;
  }
}

// Plain parallel-for over disjoint outputs (no accumulation -> no ordering
// concerns). Static block partition.
inline void parallel_for(size_t n, int n_threads,
                         const std::function<void(size_t)>& fn) {
  int T = n_threads < 1 ? 1 : n_threads;
  if (T == 1 || n <= 1) {
    for (size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  size_t chunk = (n + T - 1) / T;
  for (int t = 0; t < T; ++t) {
    size_t b = t * chunk, e = std::min(n, b + chunk);
    if (b >= e) break;
    pool.emplace_back([&, b, e] {
      for (size_t i = b; i < e; ++i) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace dynrad
