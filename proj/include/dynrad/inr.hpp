#pragma once
// Trainable coordinate network: multiresolution hash-grid encoding feeding a
// small MLP (ReLU hidden, linear out), with hand-rolled reverse-mode
// differentiation and Adam. One instance maps 2D space to k complex basis
// values, another maps 1D time to k complex basis values; outputs are 2k
// reals = [Re_1..Re_k | Im_1..Im_k].
//
// Gradient determinism: backward writes per-batch-item sparse table partials
// (SparseTableGrad) which callers merge into dense NetGrads in item order;
// Adam then visits only a precomputed touched-slot list. Untouched entries
// have zero gradient and zero moments forever, so the sparse update is
// exactly the dense update.

#include <array>
#include <atomic>
#include <cmath>
#include <cstring>
#include <vector>

#include "dynrad/common.hpp"

namespace dynrad::inr {

struct HashGridConfig {
  int levels = 16;
  int features = 2;
  int base_resolution = 16;
  double per_level_scale = 1.26;
  int log2_table_size = 20;
  int dim = 2;  // 1 or 2

  int resolution(int level) const {
    return (int)std::floor(base_resolution * std::pow(per_level_scale, level));
  }
  uint32_t table_size() const { return 1u << log2_table_size; }
  uint32_t hash_mask() const { return table_size() - 1; }
  // For dim==1 the hash is the raw coordinate mod table_size and coordinates
  // never exceed resolution(levels-1), so only the first N_l+1 slots are
  // addressable; allocating just those is bit-identical to a full table.
  uint32_t phys_entries(int level) const {
    if (dim == 1) return std::min<uint32_t>(table_size(), (uint32_t)resolution(level) + 1);
    return table_size();
  }
  int encoded_dim() const { return levels * features; }

  void validate() const {
    if (levels < 1 || features < 1 || base_resolution < 1 ||
        !(per_level_scale > 1.0) || log2_table_size < 1 || log2_table_size > 24 ||
        (dim != 1 && dim != 2))
      throw ConfigError("hash grid config out of range");
  }
};

inline uint32_t hash_corner(uint32_t x, uint32_t y, int dim, uint32_t mask) {
  // XOR of corner coordinates times the per-dimension primes (1, 2654435761),
  // modulo the table size. dim==1 uses the first prime only.
  uint32_t h = x;  // prime 1
  if (dim == 2) h ^= y * 2654435761u;
  return h & mask;
}

template <typename Real>
struct MlpParams {
  // Layouts, all input-major so forward/backward inner loops are axpy-shaped:
  // W1[in][hid], W2[hid][hid], W3[hid][out].
  std::vector<Real> W1, b1, W2, b2, W3, b3;

  void resize(int in, int hid, int out) {
    W1.assign(size_t(in) * hid, Real(0));
    b1.assign(hid, Real(0));
    W2.assign(size_t(hid) * hid, Real(0));
    b2.assign(hid, Real(0));
    W3.assign(size_t(hid) * out, Real(0));
    b3.assign(out, Real(0));
  }
  void clear() {
    auto z = [](std::vector<Real>& v) { std::fill(v.begin(), v.end(), Real(0)); };
    z(W1); z(b1); z(W2); z(b2); z(W3); z(b3);
  }
  void add(const MlpParams& o) {
    auto ax = [](std::vector<Real>& a, const std::vector<Real>& b) {
      for (size_t i = 0; i < a.size(); ++i) a[i] += b[i];
    };
    ax(W1, o.W1); ax(b1, o.b1); ax(W2, o.W2); ax(b2, o.b2); ax(W3, o.W3); ax(b3, o.b3);
  }
};

template <typename Real>
struct CoordinateNetwork {
  HashGridConfig hcfg;
  int hidden = 64;
  int out_dim = 12;  // 2k

  std::vector<std::vector<Real>> table;  // [levels][phys_entries * features]
  MlpParams<Real> mlp;
  mutable std::atomic<uint64_t> clamp_events{0};

  CoordinateNetwork() = default;
  CoordinateNetwork(const HashGridConfig& h, int hid, int out) { init_shape(h, hid, out); }
  CoordinateNetwork(const CoordinateNetwork& o)
      : hcfg(o.hcfg), hidden(o.hidden), out_dim(o.out_dim), table(o.table), mlp(o.mlp),
        clamp_events(o.clamp_events.load()) {}
  CoordinateNetwork& operator=(const CoordinateNetwork& o) {
    hcfg = o.hcfg; hidden = o.hidden; out_dim = o.out_dim;
    table = o.table; mlp = o.mlp; clamp_events = o.clamp_events.load();
    return *this;
  }

  void init_shape(const HashGridConfig& h, int hid, int out) {
    h.validate();
    hcfg = h;
    hidden = hid;
    out_dim = out;
    table.resize(h.levels);
    for (int l = 0; l < h.levels; ++l)
      table[l].assign(size_t(h.phys_entries(l)) * h.features, Real(0));
    mlp.resize(h.encoded_dim(), hid, out);
  }

  size_t n_params() const {
    size_t n = mlp.W1.size() + mlp.b1.size() + mlp.W2.size() + mlp.b2.size() +
               mlp.W3.size() + mlp.b3.size();
    for (auto& t : table) n += t.size();
    return n;
  }

  bool mlp_finite() const {
    auto fin = [](const std::vector<Real>& v) {
      for (Real x : v)
        if (!std::isfinite(double(x))) return false;
      return true;
    };
    return fin(mlp.W1) && fin(mlp.b1) && fin(mlp.W2) && fin(mlp.b2) && fin(mlp.W3) && fin(mlp.b3);
  }
};

// Dense gradient mirror of a network's parameters.
template <typename Real>
struct NetGrads {
  std::vector<std::vector<Real>> table;
  MlpParams<Real> mlp;

  void init_shape(const CoordinateNetwork<Real>& net) {
    table.resize(net.table.size());
    for (size_t l = 0; l < net.table.size(); ++l) table[l].assign(net.table[l].size(), Real(0));
    mlp.resize(net.hcfg.encoded_dim(), net.hidden, net.out_dim);
  }
};

// Per-item sparse hash-table gradient: (level, slot) entries in first-touch
// order, with an epoch-stamped slot->compact-index map for O(1) accumulate.
template <typename Real>
struct SparseTableGrad {
  struct Level {
    std::vector<uint32_t> stamp, cidx;  // sized phys_entries
    std::vector<uint32_t> slots;        // touched, in first-touch order
    std::vector<Real> g;                // [slots.size() * features]
  };
  std::vector<Level> lv;
  uint32_t epoch = 0;
  int features = 0;

  void init_shape(const CoordinateNetwork<Real>& net) {
    features = net.hcfg.features;
    lv.resize(net.table.size());
    for (size_t l = 0; l < lv.size(); ++l) {
      uint32_t n = net.hcfg.phys_entries((int)l);
      lv[l].stamp.assign(n, 0);
      lv[l].cidx.assign(n, 0);
      lv[l].slots.clear();
      lv[l].g.clear();
    }
    epoch = 0;
  }
  void reset() {
    ++epoch;
    if (epoch == 0) {  // wrapped: clear stamps
      for (auto& L : lv) std::fill(L.stamp.begin(), L.stamp.end(), 0u);
      epoch = 1;
    }
    for (auto& L : lv) {
      L.slots.clear();
      L.g.clear();
    }
  }
  inline Real* entry(int level, uint32_t slot) {
    Level& L = lv[level];
    if (L.stamp[slot] != epoch) {
      L.stamp[slot] = epoch;
      L.cidx[slot] = (uint32_t)L.slots.size();
      L.slots.push_back(slot);
      L.g.resize(L.g.size() + features, Real(0));
    }
    return &L.g[size_t(L.cidx[slot]) * features];
  }
  // Fold into dense grads; iteration order = level, then first-touch order.
  void merge_into(NetGrads<Real>& dense) const {
    for (size_t l = 0; l < lv.size(); ++l) {
      const Level& L = lv[l];
      for (size_t i = 0; i < L.slots.size(); ++i) {
        Real* dst = &dense.table[l][size_t(L.slots[i]) * features];
        const Real* src = &L.g[i * features];
        for (int f = 0; f < features; ++f) dst[f] += src[f];
      }
    }
  }
};

// Slots ever touched by a training set's coordinates, per level, ascending.
struct TouchedSet {
  std::vector<std::vector<uint32_t>> slots;
  size_t total() const {
    size_t n = 0;
    for (auto& s : slots) n += s.size();
    return n;
  }
};

// ---------------------------------------------------------------------------
// Encoding

namespace detail {

template <typename Real>
struct CornerRef {
  uint32_t s00, s10, s01, s11;
  Real w00, w10, w01, w11;
};

// Corner slots and interpolation weights of one point at one level.
template <typename Real>
inline CornerRef<Real> corners2(double cx, double cy, int N, uint32_t mask) {
  double px = cx * N, py = cy * N;
  int x0 = (int)px, y0 = (int)py;
  if (x0 > N - 1) x0 = N - 1;
  if (y0 > N - 1) y0 = N - 1;
  Real fx = Real(px - x0), fy = Real(py - y0);
  CornerRef<Real> c;
  c.s00 = hash_corner(x0, y0, 2, mask);
  c.s10 = hash_corner(x0 + 1, y0, 2, mask);
  c.s01 = hash_corner(x0, y0 + 1, 2, mask);
  c.s11 = hash_corner(x0 + 1, y0 + 1, 2, mask);
  c.w00 = (Real(1) - fx) * (Real(1) - fy);
  c.w10 = fx * (Real(1) - fy);
  c.w01 = (Real(1) - fx) * fy;
  c.w11 = fx * fy;
  return c;
}

template <typename Real>
struct CornerRef1 {
  uint32_t s0, s1;
  Real w0, w1;
};

template <typename Real>
inline CornerRef1<Real> corners1(double cx, int N, uint32_t mask) {
  double px = cx * N;
  int x0 = (int)px;
  if (x0 > N - 1) x0 = N - 1;
  Real fx = Real(px - x0);
  CornerRef1<Real> c;
  c.s0 = hash_corner(x0, 0, 1, mask);
  c.s1 = hash_corner(x0 + 1, 0, 1, mask);
  c.w0 = Real(1) - fx;
  c.w1 = fx;
  return c;
}

inline double clamp01(double v, uint64_t& clamped) {
  if (v < 0.0) { clamped++; return 0.0; }
  if (v > 1.0) { clamped++; return 1.0; }
  return v;
}

}  // namespace detail

// Encode a batch. coords is [n*dim] (x[,y]) in [0,1]; out is [n*encoded_dim].
template <typename Real>
void encode_batch(const CoordinateNetwork<Real>& net, const double* coords, size_t n,
                  Real* out) {
  const auto& h = net.hcfg;
  const int F = h.features;
  const uint32_t mask = h.hash_mask();
  uint64_t clamped = 0;
  for (size_t p = 0; p < n; ++p) {
    Real* op = out + p * h.encoded_dim();
    if (h.dim == 2) {
      double cx = detail::clamp01(coords[2 * p], clamped);
      double cy = detail::clamp01(coords[2 * p + 1], clamped);
      for (int l = 0; l < h.levels; ++l) {
        auto c = detail::corners2<Real>(cx, cy, h.resolution(l), mask);
        const Real* T = net.table[l].data();
        for (int f = 0; f < F; ++f)
          op[l * F + f] = c.w00 * T[size_t(c.s00) * F + f] + c.w10 * T[size_t(c.s10) * F + f] +
                          c.w01 * T[size_t(c.s01) * F + f] + c.w11 * T[size_t(c.s11) * F + f];
      }
    } else {
      double cx = detail::clamp01(coords[p], clamped);
      for (int l = 0; l < h.levels; ++l) {
        auto c = detail::corners1<Real>(cx, h.resolution(l), mask);
        const Real* T = net.table[l].data();
        for (int f = 0; f < F; ++f)
          op[l * F + f] = c.w0 * T[size_t(c.s0) * F + f] + c.w1 * T[size_t(c.s1) * F + f];
      }
    }
  }
  if (clamped) net.clamp_events.fetch_add(clamped, std::memory_order_relaxed);
}

// Scatter encoded-feature gradients back into the sparse table grad.
template <typename Real>
void encode_backward(const CoordinateNetwork<Real>& net, const double* coords, size_t n,
                     const Real* g_enc, SparseTableGrad<Real>& sg) {
  const auto& h = net.hcfg;
  const int F = h.features;
  const uint32_t mask = h.hash_mask();
  uint64_t clamped = 0;
  for (size_t p = 0; p < n; ++p) {
    const Real* gp = g_enc + p * h.encoded_dim();
    if (h.dim == 2) {
      double cx = detail::clamp01(coords[2 * p], clamped);
      double cy = detail::clamp01(coords[2 * p + 1], clamped);
      for (int l = 0; l < h.levels; ++l) {
        auto c = detail::corners2<Real>(cx, cy, h.resolution(l), mask);
        // One corner at a time: entry() may grow the storage and would
        // invalidate pointers fetched for the other corners.
        Real* e = sg.entry(l, c.s00);
        for (int f = 0; f < F; ++f) e[f] += c.w00 * gp[l * F + f];
        e = sg.entry(l, c.s10);
        for (int f = 0; f < F; ++f) e[f] += c.w10 * gp[l * F + f];
        e = sg.entry(l, c.s01);
        for (int f = 0; f < F; ++f) e[f] += c.w01 * gp[l * F + f];
        e = sg.entry(l, c.s11);
        for (int f = 0; f < F; ++f) e[f] += c.w11 * gp[l * F + f];
      }
    } else {
      double cx = detail::clamp01(coords[p], clamped);
      for (int l = 0; l < h.levels; ++l) {
        auto c = detail::corners1<Real>(cx, h.resolution(l), mask);
        Real* e = sg.entry(l, c.s0);
        for (int f = 0; f < F; ++f) e[f] += c.w0 * gp[l * F + f];
        e = sg.entry(l, c.s1);
        for (int f = 0; f < F; ++f) e[f] += c.w1 * gp[l * F + f];
      }
    }
  }
  if (clamped) net.clamp_events.fetch_add(clamped, std::memory_order_relaxed);
}

// Union of slots touched by a coordinate set (for the Adam touched list).
template <typename Real>
void mark_touched(const CoordinateNetwork<Real>& net, const double* coords, size_t n,
                  std::vector<std::vector<uint8_t>>& bitmap) {
  const auto& h = net.hcfg;
  const uint32_t mask = h.hash_mask();
  if (bitmap.empty()) {
    bitmap.resize(h.levels);
    for (int l = 0; l < h.levels; ++l) bitmap[l].assign(h.phys_entries(l), 0);
  }
  uint64_t clamped = 0;
  for (size_t p = 0; p < n; ++p) {
    if (h.dim == 2) {
      double cx = detail::clamp01(coords[2 * p], clamped);
      double cy = detail::clamp01(coords[2 * p + 1], clamped);
      for (int l = 0; l < h.levels; ++l) {
        auto c = detail::corners2<Real>(cx, cy, h.resolution(l), mask);
        bitmap[l][c.s00] = bitmap[l][c.s10] = bitmap[l][c.s01] = bitmap[l][c.s11] = 1;
      }
    } else {
      double cx = detail::clamp01(coords[p], clamped);
      for (int l = 0; l < h.levels; ++l) {
        auto c = detail::corners1<Real>(cx, h.resolution(l), mask);
        bitmap[l][c.s0] = bitmap[l][c.s1] = 1;
      }
    }
  }
}

inline TouchedSet finalize_touched(std::vector<std::vector<uint8_t>>& bitmap) {
  TouchedSet t;
  t.slots.resize(bitmap.size());
  for (size_t l = 0; l < bitmap.size(); ++l)
    for (uint32_t s = 0; s < bitmap[l].size(); ++s)
      if (bitmap[l][s]) t.slots[l].push_back(s);
  return t;
}

// ---------------------------------------------------------------------------
// MLP

template <typename Real>
struct ForwardCache {
  size_t n = 0;
  std::vector<Real> enc, h1, h2, out;

  void resize(size_t n_, const CoordinateNetwork<Real>& net) {
    n = n_;
    enc.resize(n * net.hcfg.encoded_dim());
    h1.resize(n * net.hidden);
    h2.resize(n * net.hidden);
    out.resize(n * net.out_dim);
  }
};

namespace detail {

template <typename Real>
inline void axpy(size_t n, Real a, const Real* x, Real* y) {
  for (size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

// Fixed-reassociation dot product (4 lanes) — vectorizable without
// -ffast-math and bit-deterministic across runs.
template <typename Real>
inline Real dot4(size_t n, const Real* a, const Real* b) {
  Real s0 = 0, s1 = 0, s2 = 0, s3 = 0;
  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    s0 += a[i] * b[i];
    s1 += a[i + 1] * b[i + 1];
    s2 += a[i + 2] * b[i + 2];
    s3 += a[i + 3] * b[i + 3];
  }
  Real s = (s0 + s1) + (s2 + s3);
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

}  // namespace detail

// MLP forward over encoded features already staged in cache.enc.
template <typename Real>
void mlp_forward(const CoordinateNetwork<Real>& net, ForwardCache<Real>& c) {
  const int IN = net.hcfg.encoded_dim(), H = net.hidden, OUT = net.out_dim;
  const auto& m = net.mlp;
  for (size_t p = 0; p < c.n; ++p) {
    const Real* ep = &c.enc[p * IN];
    Real* h1p = &c.h1[p * H];
    Real* h2p = &c.h2[p * H];
    Real* op = &c.out[p * OUT];
    std::memcpy(h1p, m.b1.data(), sizeof(Real) * H);
    for (int i = 0; i < IN; ++i) detail::axpy<Real>(H, ep[i], &m.W1[size_t(i) * H], h1p);
    for (int j = 0; j < H; ++j) h1p[j] = h1p[j] > Real(0) ? h1p[j] : Real(0);
    std::memcpy(h2p, m.b2.data(), sizeof(Real) * H);
    for (int i = 0; i < H; ++i) detail::axpy<Real>(H, h1p[i], &m.W2[size_t(i) * H], h2p);
    for (int j = 0; j < H; ++j) h2p[j] = h2p[j] > Real(0) ? h2p[j] : Real(0);
    std::memcpy(op, m.b3.data(), sizeof(Real) * OUT);
    for (int i = 0; i < H; ++i) detail::axpy<Real>(OUT, h2p[i], &m.W3[size_t(i) * OUT], op);
  }
}

// Full forward: encode + MLP. coords [n*dim] in [0,1].
template <typename Real>
void forward(const CoordinateNetwork<Real>& net, const double* coords, size_t n,
             ForwardCache<Real>& cache) {
  if (n == 0) throw ConfigError("forward: empty batch");
  if (!net.mlp_finite()) throw NumericError("forward: non-finite network parameters");
  cache.resize(n, net);
  encode_batch(net, coords, n, cache.enc.data());
  mlp_forward(net, cache);
}

// Reverse pass. g_out is [n*out_dim]; coords must be the forward's coords.
// MLP gradients accumulate into mg; table gradients into sg (reset by caller).
// scratch_genc/gh must hold n*encoded_dim and hidden entries respectively.
template <typename Real>
void backward(const CoordinateNetwork<Real>& net, const ForwardCache<Real>& c,
              const double* coords, const Real* g_out, MlpParams<Real>& mg,
              SparseTableGrad<Real>& sg, std::vector<Real>& scratch_genc) {
  const int IN = net.hcfg.encoded_dim(), H = net.hidden, OUT = net.out_dim;
  const auto& m = net.mlp;
  scratch_genc.resize(c.n * IN);
  std::vector<Real> gh1(H), gh2(H);
  for (size_t p = 0; p < c.n; ++p) {
    const Real* ep = &c.enc[p * IN];
    const Real* h1p = &c.h1[p * H];
    const Real* h2p = &c.h2[p * H];
    const Real* gop = &g_out[p * OUT];
    // out layer
    detail::axpy<Real>(OUT, Real(1), gop, mg.b3.data());
    for (int i = 0; i < H; ++i)
      if (h2p[i] != Real(0)) detail::axpy<Real>(OUT, h2p[i], gop, &mg.W3[size_t(i) * OUT]);
    for (int j = 0; j < H; ++j) {
      Real g = detail::dot4<Real>(OUT, &m.W3[size_t(j) * OUT], gop);
      gh2[j] = h2p[j] > Real(0) ? g : Real(0);
    }
    // hidden layer 2
    detail::axpy<Real>(H, Real(1), gh2.data(), mg.b2.data());
    for (int i = 0; i < H; ++i)
      if (h1p[i] != Real(0)) detail::axpy<Real>(H, h1p[i], gh2.data(), &mg.W2[size_t(i) * H]);
    for (int j = 0; j < H; ++j) {
      Real g = detail::dot4<Real>(H, &m.W2[size_t(j) * H], gh2.data());
      gh1[j] = h1p[j] > Real(0) ? g : Real(0);
    }
    // hidden layer 1
    detail::axpy<Real>(H, Real(1), gh1.data(), mg.b1.data());
    Real* gep = &scratch_genc[p * IN];
    for (int i = 0; i < IN; ++i) {
      if (ep[i] != Real(0)) detail::axpy<Real>(H, ep[i], gh1.data(), &mg.W1[size_t(i) * H]);
      gep[i] = detail::dot4<Real>(H, &m.W1[size_t(i) * H], gh1.data());
    }
  }
  encode_backward(net, coords, c.n, scratch_genc.data(), sg);
}

// ---------------------------------------------------------------------------
// Adam

template <typename Real>
struct AdamState {
  uint64_t t = 0;
  double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
  double bp1 = 1.0, bp2 = 1.0;  // running beta^t
  std::vector<std::vector<Real>> m_table, v_table;
  MlpParams<Real> m_mlp, v_mlp;

  void init_shape(const CoordinateNetwork<Real>& net) {
    m_table.resize(net.table.size());
    v_table.resize(net.table.size());
    for (size_t l = 0; l < net.table.size(); ++l) {
      m_table[l].assign(net.table[l].size(), Real(0));
      v_table[l].assign(net.table[l].size(), Real(0));
    }
    m_mlp.resize(net.hcfg.encoded_dim(), net.hidden, net.out_dim);
    v_mlp.resize(net.hcfg.encoded_dim(), net.hidden, net.out_dim);
  }
};

namespace detail {

template <typename Real>
inline void adam_update_span(Real* p, Real* m, Real* v, const Real* g, size_t n,
                             double lr, double b1, double b2, double ibc1,
                             double ibc2, double eps, const char* group) {
  for (size_t i = 0; i < n; ++i) {
    double gi = double(g[i]);
    if (!std::isfinite(gi))
      throw NumericError(std::string("adam_step: non-finite gradient in ") + group);
    double mi = b1 * double(m[i]) + (1.0 - b1) * gi;
    double vi = b2 * double(v[i]) + (1.0 - b2) * gi * gi;
    m[i] = Real(mi);
    v[i] = Real(vi);
    p[i] -= Real(lr * (mi * ibc1) / (std::sqrt(vi * ibc2) + eps));
  }
}

}  // namespace detail

// One Adam step with bias correction. If `touched` is non-null only the
// listed table slots are visited — exactly equivalent to the dense sweep
// because unlisted slots are guaranteed zero-gradient (and so zero-moment).
template <typename Real>
void adam_step(CoordinateNetwork<Real>& net, const NetGrads<Real>& g, AdamState<Real>& st,
               double lr, const TouchedSet* touched = nullptr) {
  st.t += 1;
  st.bp1 *= st.beta1;
  st.bp2 *= st.beta2;
  const double ibc1 = 1.0 / (1.0 - st.bp1);
  const double ibc2 = 1.0 / (1.0 - st.bp2);
  const int F = net.hcfg.features;
  for (size_t l = 0; l < net.table.size(); ++l) {
    char group[32];
    std::snprintf(group, sizeof group, "table level %zu", l);
    if (touched) {
      for (uint32_t s : touched->slots[l]) {
        size_t o = size_t(s) * F;
        detail::adam_update_span<Real>(&net.table[l][o], &st.m_table[l][o], &st.v_table[l][o],
                                       &g.table[l][o], F, lr, st.beta1, st.beta2, ibc1, ibc2,
                                       st.eps, group);
      }
    } else {
      detail::adam_update_span<Real>(net.table[l].data(), st.m_table[l].data(),
                                     st.v_table[l].data(), g.table[l].data(),
                                     net.table[l].size(), lr, st.beta1, st.beta2, ibc1, ibc2,
                                     st.eps, group);
    }
  }
  auto upd = [&](std::vector<Real>& p, std::vector<Real>& m, std::vector<Real>& v,
                 const std::vector<Real>& gg, const char* group) {
    detail::adam_update_span<Real>(p.data(), m.data(), v.data(), gg.data(), p.size(), lr,
                                   st.beta1, st.beta2, ibc1, ibc2, st.eps, group);
  };
  upd(net.mlp.W1, st.m_mlp.W1, st.v_mlp.W1, g.mlp.W1, "W1");
  upd(net.mlp.b1, st.m_mlp.b1, st.v_mlp.b1, g.mlp.b1, "b1");
  upd(net.mlp.W2, st.m_mlp.W2, st.v_mlp.W2, g.mlp.W2, "W2");
  upd(net.mlp.b2, st.m_mlp.b2, st.v_mlp.b2, g.mlp.b2, "b2");
  upd(net.mlp.W3, st.m_mlp.W3, st.v_mlp.W3, g.mlp.W3, "W3");
  upd(net.mlp.b3, st.m_mlp.b3, st.v_mlp.b3, g.mlp.b3, "b3");
}

// Hash tables ~ U(-1e-4, 1e-4); MLP weights Xavier-uniform; biases zero.
template <typename Real>
void init_parameters(CoordinateNetwork<Real>& net, uint64_t seed, const std::string& tag) {
  auto rng = make_rng(seed, "inr.init." + tag);
  std::uniform_real_distribution<double> tiny(-1e-4, 1e-4);
  for (auto& t : net.table)
    for (auto& v : t) v = Real(tiny(rng));
  auto xavier = [&](std::vector<Real>& W, int fan_in, int fan_out) {
    double b = std::sqrt(6.0 / (fan_in + fan_out));
    std::uniform_real_distribution<double> u(-b, b);
    for (auto& w : W) w = Real(u(rng));
  };
  const int IN = net.hcfg.encoded_dim(), H = net.hidden, OUT = net.out_dim;
  xavier(net.mlp.W1, IN, H);
  xavier(net.mlp.W2, H, H);
  xavier(net.mlp.W3, H, OUT);
  std::fill(net.mlp.b1.begin(), net.mlp.b1.end(), Real(0));
  std::fill(net.mlp.b2.begin(), net.mlp.b2.end(), Real(0));
  std::fill(net.mlp.b3.begin(), net.mlp.b3.end(), Real(0));
}

// Spec-level single-point encode (used directly by tests).
template <typename Real>
std::vector<Real> hash_encode(const CoordinateNetwork<Real>& net, const double* coord) {
  std::vector<Real> out(net.hcfg.encoded_dim());
  encode_batch(net, coord, 1, out.data());
  return out;
}

}  // namespace dynrad::inr
