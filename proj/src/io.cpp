#include "dynrad/io.hpp"

#include <zlib.h>

#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>

namespace dynrad::io {

static_assert(std::endian::native == std::endian::little,
              "file formats are little-endian; big-endian hosts are unsupported");

size_t dtype_size(DType d) {
  switch (d) {
    case DType::f32: return 4;
    case DType::f64: return 8;
    case DType::c64: return 8;
    case DType::c128: return 16;
  }
  throw ConfigError("container: unknown dtype tag");
}

size_t Tensor::n_elems() const {
  size_t n = 1;
  for (uint64_t d : dims) n *= size_t(d);
  return n;
}

Tensor Tensor::from_f32(const std::string& name, std::vector<uint64_t> dims,
                        const float* v) {
  Tensor t;
  t.name = name;
  t.dtype = DType::f32;
  t.dims = std::move(dims);
  t.data.resize(t.n_elems() * 4);
  std::memcpy(t.data.data(), v, t.data.size());
  return t;
}

Tensor Tensor::from_f64(const std::string& name, std::vector<uint64_t> dims,
                        const double* v) {
  Tensor t;
  t.name = name;
  t.dtype = DType::f64;
  t.dims = std::move(dims);
  t.data.resize(t.n_elems() * 8);
  std::memcpy(t.data.data(), v, t.data.size());
  return t;
}

Tensor Tensor::from_c128(const std::string& name, std::vector<uint64_t> dims,
                         const cplx* v) {
  Tensor t;
  t.name = name;
  t.dtype = DType::c128;
  t.dims = std::move(dims);
  t.data.resize(t.n_elems() * 16);
  std::memcpy(t.data.data(), v, t.data.size());
  return t;
}

std::vector<float> Tensor::as_f32() const {
  if (dtype != DType::f32) throw ConfigError("tensor '" + name + "': expected f32");
  std::vector<float> out(n_elems());
  std::memcpy(out.data(), data.data(), data.size());
  return out;
}

std::vector<double> Tensor::as_f64() const {
  if (dtype != DType::f64) throw ConfigError("tensor '" + name + "': expected f64");
  std::vector<double> out(n_elems());
  std::memcpy(out.data(), data.data(), data.size());
  return out;
}

std::vector<cplx> Tensor::as_c128() const {
  if (dtype != DType::c128) throw ConfigError("tensor '" + name + "': expected c128");
  std::vector<cplx> out(n_elems());
  std::memcpy(out.data(), data.data(), data.size());
  return out;
}

bool Container::has(const std::string& name) const {
  for (const auto& t : tensors)
    if (t.name == name) return true;
  return false;
}

const Tensor& Container::get(const std::string& name) const {
  for (const auto& t : tensors)
    if (t.name == name) return t;
  throw ConfigError("container: missing tensor '" + name + "'");
}

namespace {

constexpr char kContainerMagic[4] = {'D', 'R', 'C', '1'};
constexpr char kTensorMagic[4] = {'D', 'R', 'T', '1'};
constexpr uint32_t kFormatVersion = 1;

void put_bytes(std::vector<uint8_t>& b, const void* p, size_t n) {
  const uint8_t* u = (const uint8_t*)p;
  b.insert(b.end(), u, u + n);
}
void put_u16(std::vector<uint8_t>& b, uint16_t v) { put_bytes(b, &v, 2); }
void put_u32(std::vector<uint8_t>& b, uint32_t v) { put_bytes(b, &v, 4); }
void put_u64(std::vector<uint8_t>& b, uint64_t v) { put_bytes(b, &v, 8); }

uint32_t crc_of(const uint8_t* p, size_t n) {
  uLong c = crc32(0L, Z_NULL, 0);
  while (n > 0) {
    uInt chunk = n > (1u << 30) ? (1u << 30) : (uInt)n;
    c = crc32(c, p, chunk);
    p += chunk;
    n -= chunk;
  }
  return (uint32_t)c;
}

struct ByteReader {
  const uint8_t* p;
  size_t n, off = 0;

  void need(size_t k) const {
    if (off + k > n) throw ConfigError("container: truncated file");
  }
  void raw(void* dst, size_t k) {
    need(k);
    std::memcpy(dst, p + off, k);
    off += k;
  }
  uint16_t u16() { uint16_t v; raw(&v, 2); return v; }
  uint32_t u32() { uint32_t v; raw(&v, 4); return v; }
  uint64_t u64() { uint64_t v; raw(&v, 8); return v; }
};

}  // namespace

std::vector<uint8_t> serialize_container(const Container& c) {
  std::vector<uint8_t> b;
  put_bytes(b, kContainerMagic, 4);
  put_u32(b, kFormatVersion);
  put_u32(b, (uint32_t)c.tensors.size());
  for (const auto& t : c.tensors) {
    if (t.name.size() > 0xFFFF) throw ConfigError("container: tensor name too long");
    if (t.dims.size() > 0xFF) throw ConfigError("container: tensor rank too large");
    if (t.data.size() != t.n_elems() * dtype_size(t.dtype))
      throw ConfigError("container: tensor '" + t.name + "' payload size mismatch");
    put_u16(b, (uint16_t)t.name.size());
    put_bytes(b, t.name.data(), t.name.size());
    put_bytes(b, kTensorMagic, 4);
    b.push_back((uint8_t)t.dtype);
    b.push_back((uint8_t)t.dims.size());
    put_u16(b, 0);
    for (uint64_t d : t.dims) put_u64(b, d);
    put_bytes(b, t.data.data(), t.data.size());
  }
  put_u32(b, crc_of(b.data(), b.size()));
  return b;
}

Container parse_container(const std::vector<uint8_t>& bytes) {
  if (bytes.size() < 16) throw ConfigError("container: file too short");
  const uint32_t stored_crc = [&] {
    uint32_t v;
    std::memcpy(&v, bytes.data() + bytes.size() - 4, 4);
    return v;
  }();
  if (crc_of(bytes.data(), bytes.size() - 4) != stored_crc)
    throw ConfigError("container: checksum mismatch (corrupt file)");
  ByteReader r{bytes.data(), bytes.size() - 4};
  char magic[4];
  r.raw(magic, 4);
  if (std::memcmp(magic, kContainerMagic, 4) != 0)
    throw ConfigError("container: bad magic bytes");
  if (r.u32() != kFormatVersion) throw ConfigError("container: unsupported format version");
  const uint32_t count = r.u32();
  Container c;
  c.tensors.reserve(count);
  for (uint32_t i = 0; i < count; ++i) {
    Tensor t;
    const uint16_t nl = r.u16();
    t.name.resize(nl);
    r.raw(t.name.data(), nl);
    r.raw(magic, 4);
    if (std::memcmp(magic, kTensorMagic, 4) != 0)
      throw ConfigError("container: bad tensor record magic");
    uint8_t dt, rank;
    r.raw(&dt, 1);
    r.raw(&rank, 1);
    if (dt > 3) throw ConfigError("container: unknown dtype tag");
    t.dtype = (DType)dt;
    r.u16();  // pad
    t.dims.resize(rank);
    for (int d = 0; d < rank; ++d) t.dims[d] = r.u64();
    const size_t payload = t.n_elems() * dtype_size(t.dtype);
    if (payload > (size_t(1) << 40)) throw ConfigError("container: tensor too large");
    t.data.resize(payload);
    r.raw(t.data.data(), payload);
    c.tensors.push_back(std::move(t));
  }
  if (r.off != r.n) throw ConfigError("container: trailing bytes");
  return c;
}

void write_container(const std::string& path, const Container& c) {
  auto bytes = serialize_container(c);
  write_file(path, bytes.data(), bytes.size());
}

Container read_container(const std::string& path) { return parse_container(read_file(path)); }

void write_file(const std::string& path, const void* data, size_t n) {
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw ConfigError("cannot open for writing: " + path);
  const size_t w = n ? std::fwrite(data, 1, n, f) : 0;
  const int rc = std::fclose(f);
  if (w != n || rc != 0) throw ConfigError("write failed: " + path);
}

std::vector<uint8_t> read_file(const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "rb");
  if (!f) throw ConfigError("cannot open for reading: " + path);
  std::fseek(f, 0, SEEK_END);
  const long sz = std::ftell(f);
  if (sz < 0) {
    std::fclose(f);
    throw ConfigError("cannot stat: " + path);
  }
  std::fseek(f, 0, SEEK_SET);
  std::vector<uint8_t> out(static_cast<size_t>(sz));
  const size_t rd = sz ? std::fread(out.data(), 1, out.size(), f) : 0;
  std::fclose(f);
  if (rd != out.size()) throw ConfigError("read failed: " + path);
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  write_file(path, text.data(), text.size());
}

std::string read_text(const std::string& path) {
  auto b = read_file(path);
  return std::string((const char*)b.data(), b.size());
}

std::string fmt_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

// --- spokes ---

void save_spokes(const std::string& path, const traj::SpokeSet& set,
                 const phantom::CoilMaps& coils) {
  const int N = set.n_spokes(), nc = set.n_coils(), M = set.M();
  if (N == 0 || nc == 0) throw ConfigError("save_spokes: empty spoke set");
  Container c;
  const double meta[5] = {double(M), set.fov, set.tr, double(N), double(nc)};
  c.add(Tensor::from_f64("meta", {5}, meta));
  std::vector<double> ang(N), t(N), idx(N), dk(N);
  for (int i = 0; i < N; ++i) {
    ang[i] = set.geo[i].angle_deg;
    t[i] = set.geo[i].t;
    idx[i] = set.geo[i].index;
    dk[i] = set.geo[i].dk;
  }
  c.add(Tensor::from_f64("angle_deg", {uint64_t(N)}, ang.data()));
  c.add(Tensor::from_f64("t", {uint64_t(N)}, t.data()));
  c.add(Tensor::from_f64("index", {uint64_t(N)}, idx.data()));
  c.add(Tensor::from_f64("dk", {uint64_t(N)}, dk.data()));
  std::vector<cplx> flat(size_t(N) * nc * M);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < nc; ++j)
      for (int m = 0; m < M; ++m)
        flat[(size_t(i) * nc + j) * M + m] = set.samples[i][j][m];
  c.add(Tensor::from_c128("samples", {uint64_t(N), uint64_t(nc), uint64_t(M)}, flat.data()));
  if (!coils.analytic() || coils.n_coils() != nc)
    throw ConfigError("save_spokes: coil map count mismatch");
  std::vector<double> unif(nc);
  for (int j = 0; j < nc; ++j) unif[j] = coils.uniform[j] ? 1.0 : 0.0;
  c.add(Tensor::from_c128("coils/gain", {uint64_t(nc)}, coils.gain.data()));
  c.add(Tensor::from_f64("coils/mu_x", {uint64_t(nc)}, coils.mu_x.data()));
  c.add(Tensor::from_f64("coils/mu_y", {uint64_t(nc)}, coils.mu_y.data()));
  c.add(Tensor::from_f64("coils/tau", {uint64_t(nc)}, coils.tau.data()));
  c.add(Tensor::from_f64("coils/uniform", {uint64_t(nc)}, unif.data()));
  write_container(path, c);
}

LoadedSpokes load_spokes(const std::string& path) {
  Container c = read_container(path);
  auto meta = c.get("meta").as_f64();
  if (meta.size() != 5) throw ConfigError("spokes file: bad meta tensor");
  const int M = (int)std::lround(meta[0]);
  const int N = (int)std::lround(meta[3]);
  const int nc = (int)std::lround(meta[4]);
  if (M < 2 || N < 1 || nc < 1) throw ConfigError("spokes file: bad dimensions");
  LoadedSpokes out;
  out.set.fov = meta[1];
  out.set.tr = meta[2];
  auto ang = c.get("angle_deg").as_f64();
  auto t = c.get("t").as_f64();
  auto idx = c.get("index").as_f64();
  auto dk = c.get("dk").as_f64();
  if ((int)ang.size() != N || (int)t.size() != N || (int)idx.size() != N ||
      (int)dk.size() != N)
    throw ConfigError("spokes file: geometry tensor length mismatch");
  out.set.geo.resize(N);
  for (int i = 0; i < N; ++i)
    out.set.geo[i] = {(int)std::lround(idx[i]), ang[i], t[i], M, dk[i]};
  const Tensor& st = c.get("samples");
  if (st.dims.size() != 3 || st.dims[0] != uint64_t(N) || st.dims[1] != uint64_t(nc) ||
      st.dims[2] != uint64_t(M))
    throw ConfigError("spokes file: samples tensor shape mismatch");
  auto flat = st.as_c128();
  out.set.samples.assign(N, std::vector<std::vector<cplx>>(nc, std::vector<cplx>(M)));
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < nc; ++j)
      for (int m = 0; m < M; ++m)
        out.set.samples[i][j][m] = flat[(size_t(i) * nc + j) * M + m];
  out.coils.gain = c.get("coils/gain").as_c128();
  out.coils.mu_x = c.get("coils/mu_x").as_f64();
  out.coils.mu_y = c.get("coils/mu_y").as_f64();
  out.coils.tau = c.get("coils/tau").as_f64();
  auto unif = c.get("coils/uniform").as_f64();
  if ((int)out.coils.gain.size() != nc || (int)unif.size() != nc)
    throw ConfigError("spokes file: coil tensor length mismatch");
  out.coils.uniform.resize(nc);
  for (int j = 0; j < nc; ++j) out.coils.uniform[j] = unif[j] != 0.0;
  return out;
}

// --- dynamic images ---

void save_dynamic(const std::string& path, const DynamicImage& dyn) {
  if (dyn.n_frames() == 0 || dyn.times.size() != dyn.n_frames())
    throw ConfigError("save_dynamic: empty or inconsistent image");
  Container c;
  const double grid[3] = {double(dyn.grid.nx), double(dyn.grid.ny), dyn.grid.fov};
  c.add(Tensor::from_f64("grid", {3}, grid));
  c.add(Tensor::from_f64("times", {dyn.times.size()}, dyn.times.data()));
  const size_t npix = size_t(dyn.grid.nx) * dyn.grid.ny;
  std::vector<cplx> flat(dyn.n_frames() * npix);
  for (size_t f = 0; f < dyn.n_frames(); ++f) {
    if (dyn.frames[f].v.size() != npix) throw ConfigError("save_dynamic: frame size mismatch");
    std::copy(dyn.frames[f].v.begin(), dyn.frames[f].v.end(), flat.begin() + f * npix);
  }
  c.add(Tensor::from_c128(
      "frames", {dyn.n_frames(), uint64_t(dyn.grid.nx), uint64_t(dyn.grid.ny)}, flat.data()));
  write_container(path, c);
}

DynamicImage load_dynamic(const std::string& path) {
  Container c = read_container(path);
  auto grid = c.get("grid").as_f64();
  if (grid.size() != 3) throw ConfigError("dynamic image file: bad grid tensor");
  DynamicImage dyn;
  dyn.grid = {(int)std::lround(grid[0]), (int)std::lround(grid[1]), grid[2]};
  dyn.grid.validate();
  dyn.times = c.get("times").as_f64();
  const Tensor& ft = c.get("frames");
  const size_t npix = size_t(dyn.grid.nx) * dyn.grid.ny;
  if (ft.dims.size() != 3 || ft.dims[0] != dyn.times.size() ||
      ft.dims[1] != uint64_t(dyn.grid.nx) || ft.dims[2] != uint64_t(dyn.grid.ny))
    throw ConfigError("dynamic image file: frames tensor shape mismatch");
  auto flat = ft.as_c128();
  dyn.frames.assign(dyn.times.size(), ComplexImage(dyn.grid));
  for (size_t f = 0; f < dyn.times.size(); ++f)
    std::copy(flat.begin() + f * npix, flat.begin() + (f + 1) * npix, dyn.frames[f].v.begin());
  return dyn;
}

// --- checkpoints ---

namespace {

template <typename Real>
Tensor real_tensor(const std::string& name, std::vector<uint64_t> dims,
                   const std::vector<Real>& v) {
  if constexpr (std::is_same_v<Real, double>)
    return Tensor::from_f64(name, std::move(dims), v.data());
  else
    return Tensor::from_f32(name, std::move(dims), v.data());
}

template <typename Real>
std::vector<Real> real_values(const Tensor& t) {
  if constexpr (std::is_same_v<Real, double>)
    return t.as_f64();
  else
    return t.as_f32();
}

template <typename Real>
void add_network(Container& c, const std::string& prefix,
                 const inr::CoordinateNetwork<Real>& net) {
  const auto& h = net.hcfg;
  const double hv[6] = {double(h.levels),          double(h.features),
                        double(h.base_resolution), h.per_level_scale,
                        double(h.log2_table_size), double(h.dim)};
  c.add(Tensor::from_f64(prefix + "/hcfg", {6}, hv));
  for (int l = 0; l < h.levels; ++l)
    c.add(real_tensor(prefix + "/table." + std::to_string(l),
                      {uint64_t(h.phys_entries(l)), uint64_t(h.features)}, net.table[l]));
  const uint64_t IN = h.encoded_dim(), H = net.hidden, OUT = net.out_dim;
  c.add(real_tensor(prefix + "/W1", {IN, H}, net.mlp.W1));
  c.add(real_tensor(prefix + "/b1", {H}, net.mlp.b1));
  c.add(real_tensor(prefix + "/W2", {H, H}, net.mlp.W2));
  c.add(real_tensor(prefix + "/b2", {H}, net.mlp.b2));
  c.add(real_tensor(prefix + "/W3", {H, OUT}, net.mlp.W3));
  c.add(real_tensor(prefix + "/b3", {OUT}, net.mlp.b3));
}

template <typename Real>
void read_network(const Container& c, const std::string& prefix, int hidden, int out_dim,
                  inr::CoordinateNetwork<Real>& net) {
  auto hv = c.get(prefix + "/hcfg").as_f64();
  if (hv.size() != 6) throw ConfigError("checkpoint: bad hash config tensor");
  inr::HashGridConfig h;
  h.levels = (int)std::lround(hv[0]);
  h.features = (int)std::lround(hv[1]);
  h.base_resolution = (int)std::lround(hv[2]);
  h.per_level_scale = hv[3];
  h.log2_table_size = (int)std::lround(hv[4]);
  h.dim = (int)std::lround(hv[5]);
  net.init_shape(h, hidden, out_dim);
  for (int l = 0; l < h.levels; ++l) {
    auto v = real_values<Real>(c.get(prefix + "/table." + std::to_string(l)));
    if (v.size() != net.table[l].size())
      throw ConfigError("checkpoint: table shape mismatch at level " + std::to_string(l));
    net.table[l] = std::move(v);
  }
  auto grab = [&](const char* n, std::vector<Real>& dst) {
    auto v = real_values<Real>(c.get(prefix + "/" + n));
    if (v.size() != dst.size()) throw ConfigError(std::string("checkpoint: ") + n + " shape mismatch");
    dst = std::move(v);
  };
  grab("W1", net.mlp.W1);
  grab("b1", net.mlp.b1);
  grab("W2", net.mlp.W2);
  grab("b2", net.mlp.b2);
  grab("W3", net.mlp.W3);
  grab("b3", net.mlp.b3);
}

}  // namespace

template <typename Real>
void save_checkpoint(const std::string& path, const recon::Model<Real>& model) {
  Container c;
  const double prec = std::is_same_v<Real, double> ? 0.0 : 1.0;
  const double meta[7] = {1.0,        double(model.rank), double(model.spatial.hidden),
                          double(model.grid.nx), model.grid.fov, model.t_max, prec};
  c.add(Tensor::from_f64("meta", {7}, meta));
  add_network(c, "spatial", model.spatial);
  add_network(c, "temporal", model.temporal);
  write_container(path, c);
}

template void save_checkpoint<double>(const std::string&, const recon::Model<double>&);
template void save_checkpoint<float>(const std::string&, const recon::Model<float>&);

LoadedModel load_checkpoint(const std::string& path) {
  Container c = read_container(path);
  auto meta = c.get("meta").as_f64();
  if (meta.size() != 7 || meta[0] != 1.0) throw ConfigError("checkpoint: bad meta tensor");
  LoadedModel out;
  const int rank = (int)std::lround(meta[1]);
  const int hidden = (int)std::lround(meta[2]);
  const int nx = (int)std::lround(meta[3]);
  const GridSpec grid{nx, nx, meta[4]};
  const double t_max = meta[5];
  out.precision = meta[6] == 0.0 ? recon::Precision::f64 : recon::Precision::f32;
  if (out.precision == recon::Precision::f64) {
    out.m64.rank = rank;
    out.m64.grid = grid;
    out.m64.t_max = t_max;
    read_network(c, "spatial", hidden, 2 * rank, out.m64.spatial);
    read_network(c, "temporal", hidden, 2 * rank, out.m64.temporal);
  } else {
    out.m32.rank = rank;
    out.m32.grid = grid;
    out.m32.t_max = t_max;
    read_network(c, "spatial", hidden, 2 * rank, out.m32.spatial);
    read_network(c, "temporal", hidden, 2 * rank, out.m32.temporal);
  }
  return out;
}

// --- images ---

namespace {

std::vector<uint8_t> quantize(const std::vector<double>& mag, int nx, int ny, double lo,
                              double hi) {
  if (nx < 1 || ny < 1 || mag.size() != size_t(nx) * ny)
    throw ConfigError("image export: size mismatch");
  if (!(hi > lo)) throw ConfigError("image export: window must satisfy hi > lo");
  std::vector<uint8_t> px(size_t(nx) * ny);
  for (int iy = 0; iy < ny; ++iy)
    for (int ix = 0; ix < nx; ++ix) {
      double v = (mag[size_t(ix) * ny + iy] - lo) / (hi - lo);
      v = std::min(1.0, std::max(0.0, v));
      px[size_t(iy) * nx + ix] = (uint8_t)std::lround(255.0 * v);
    }
  return px;
}

}  // namespace

void write_pgm(const std::string& path, const std::vector<double>& mag, int nx, int ny,
               double lo, double hi) {
  auto px = quantize(mag, nx, ny, lo, hi);
  std::string header = "P5\n" + std::to_string(nx) + " " + std::to_string(ny) + "\n255\n";
  std::vector<uint8_t> out(header.begin(), header.end());
  out.insert(out.end(), px.begin(), px.end());
  write_file(path, out.data(), out.size());
}

PgmImage read_pgm(const std::string& path) {
  auto b = read_file(path);
  size_t off = 0;
  auto token = [&]() -> std::string {
    while (off < b.size() && std::isspace(b[off])) ++off;
    size_t s = off;
    while (off < b.size() && !std::isspace(b[off])) ++off;
    return std::string((const char*)b.data() + s, off - s);
  };
  if (token() != "P5") throw ConfigError("pgm: not a P5 file");
  PgmImage img;
  try {
    img.nx = std::stoi(token());
    img.ny = std::stoi(token());
    if (std::stoi(token()) != 255) throw ConfigError("pgm: expected maxval 255");
  } catch (const std::logic_error&) {
    throw ConfigError("pgm: malformed header");
  }
  ++off;  // single whitespace after maxval
  if (img.nx < 1 || img.ny < 1 || b.size() - off != size_t(img.nx) * img.ny)
    throw ConfigError("pgm: payload size mismatch");
  img.bytes.assign(b.begin() + off, b.end());
  return img;
}

namespace {

void png_chunk(std::vector<uint8_t>& out, const char type[4], const uint8_t* data,
               size_t n) {
  auto be32 = [&](uint32_t v) {
    out.push_back((v >> 24) & 0xFF);
    out.push_back((v >> 16) & 0xFF);
    out.push_back((v >> 8) & 0xFF);
    out.push_back(v & 0xFF);
  };
  be32((uint32_t)n);
  size_t type_at = out.size();
  out.insert(out.end(), type, type + 4);
  if (n) out.insert(out.end(), data, data + n);
  be32(crc_of(out.data() + type_at, 4 + n));
}

}  // namespace

void write_png(const std::string& path, const std::vector<double>& mag, int nx, int ny,
               double lo, double hi) {
  auto px = quantize(mag, nx, ny, lo, hi);
  // scanlines with filter byte 0
  std::vector<uint8_t> raw(size_t(ny) * (nx + 1));
  for (int iy = 0; iy < ny; ++iy) {
    raw[size_t(iy) * (nx + 1)] = 0;
    std::memcpy(&raw[size_t(iy) * (nx + 1) + 1], &px[size_t(iy) * nx], nx);
  }
  uLongf zcap = compressBound((uLong)raw.size());
  std::vector<uint8_t> z(zcap);
  if (compress2(z.data(), &zcap, raw.data(), (uLong)raw.size(), 9) != Z_OK)
    throw NumericError("png: deflate failed");
  z.resize(zcap);

  std::vector<uint8_t> out;
  const uint8_t sig[8] = {137, 80, 78, 71, 13, 10, 26, 10};
  out.insert(out.end(), sig, sig + 8);
  uint8_t ihdr[13];
  auto be32at = [&](uint8_t* p, uint32_t v) {
    p[0] = (v >> 24) & 0xFF;
    p[1] = (v >> 16) & 0xFF;
    p[2] = (v >> 8) & 0xFF;
    p[3] = v & 0xFF;
  };
  be32at(ihdr, (uint32_t)nx);
  be32at(ihdr + 4, (uint32_t)ny);
  ihdr[8] = 8;   // bit depth
  ihdr[9] = 0;   // grayscale
  ihdr[10] = 0;  // deflate
  ihdr[11] = 0;  // adaptive filtering
  ihdr[12] = 0;  // no interlace
  png_chunk(out, "IHDR", ihdr, 13);
  png_chunk(out, "IDAT", z.data(), z.size());
  png_chunk(out, "IEND", nullptr, 0);
  write_file(path, out.data(), out.size());
}

PgmImage read_png(const std::string& path) {
  auto b = read_file(path);
  const uint8_t sig[8] = {137, 80, 78, 71, 13, 10, 26, 10};
  if (b.size() < 8 || std::memcmp(b.data(), sig, 8) != 0)
    throw ConfigError("png: bad signature");
  size_t off = 8;
  PgmImage img;
  std::vector<uint8_t> idat;
  auto be32 = [&](size_t o) {
    return (uint32_t(b[o]) << 24) | (uint32_t(b[o + 1]) << 16) | (uint32_t(b[o + 2]) << 8) |
           uint32_t(b[o + 3]);
  };
  bool seen_ihdr = false;
  while (off + 8 <= b.size()) {
    const uint32_t len = be32(off);
    if (off + 12 + len > b.size()) throw ConfigError("png: truncated chunk");
    std::string type((const char*)b.data() + off + 4, 4);
    const uint8_t* data = b.data() + off + 8;
    if (type == "IHDR") {
      if (len != 13) throw ConfigError("png: bad IHDR");
      img.nx = (int)be32(off + 8);
      img.ny = (int)be32(off + 12);
      if (data[8] != 8 || data[9] != 0) throw ConfigError("png: only 8-bit grayscale supported");
      seen_ihdr = true;
    } else if (type == "IDAT") {
      idat.insert(idat.end(), data, data + len);
    } else if (type == "IEND") {
      break;
    }
    off += 12 + len;
  }
  if (!seen_ihdr || img.nx < 1 || img.ny < 1) throw ConfigError("png: missing IHDR");
  std::vector<uint8_t> raw(size_t(img.ny) * (img.nx + 1));
  uLongf rawn = (uLongf)raw.size();
  if (uncompress(raw.data(), &rawn, idat.data(), (uLong)idat.size()) != Z_OK ||
      rawn != raw.size())
    throw ConfigError("png: inflate failed");
  img.bytes.resize(size_t(img.nx) * img.ny);
  for (int iy = 0; iy < img.ny; ++iy) {
    if (raw[size_t(iy) * (img.nx + 1)] != 0)
      throw ConfigError("png: unsupported scanline filter");
    std::memcpy(&img.bytes[size_t(iy) * img.nx], &raw[size_t(iy) * (img.nx + 1) + 1], img.nx);
  }
  return img;
}

// --- CSV ---

std::string csv_matrix(const std::vector<double>& vals, size_t rows, size_t cols) {
  if (vals.size() != rows * cols) throw ConfigError("csv_matrix: size mismatch");
  std::string out;
  out.reserve(vals.size() * 12);
  for (size_t r = 0; r < rows; ++r) {
    for (size_t c = 0; c < cols; ++c) {
      if (c) out += ',';
      out += fmt_double(vals[r * cols + c]);
    }
    out += '\n';
  }
  return out;
}

std::vector<std::vector<double>> parse_csv_matrix(const std::string& text) {
  std::vector<std::vector<double>> rows;
  size_t pos = 0;
  while (pos < text.size()) {
    size_t eol = text.find('\n', pos);
    if (eol == std::string::npos) eol = text.size();
    std::string_view line(text.data() + pos, eol - pos);
    if (!line.empty()) {
      std::vector<double> row;
      size_t p = 0;
      while (p <= line.size()) {
        size_t comma = line.find(',', p);
        if (comma == std::string_view::npos) comma = line.size();
        std::string_view cell = line.substr(p, comma - p);
        double v = 0;
        auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
        if (ec != std::errc() || ptr != cell.data() + cell.size())
          throw ConfigError("csv: malformed number '" + std::string(cell) + "'");
        row.push_back(v);
        if (comma == line.size()) break;
        p = comma + 1;
      }
      rows.push_back(std::move(row));
    }
    pos = eol + 1;
  }
  return rows;
}

std::string train_log_csv(const recon::TrainLog& log) {
  std::string out = "phase,iter,loss,elapsed_s,temporal_frozen,temporal_crc\n";
  for (const auto& r : log.rows)
    out += r.phase + "," + std::to_string(r.iter) + "," + fmt_double(r.loss) + "," +
           fmt_double(r.elapsed_s) + "," + std::to_string(r.temporal_frozen) + "," +
           std::to_string(r.temporal_crc) + "\n";
  return out;
}

}  // namespace dynrad::io
