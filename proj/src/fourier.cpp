#include "dynrad/fourier.hpp"

#include <cmath>

namespace dynrad::fourier {

CentredDft::CentredDft(int M_) : M(M_) {
  if (M < 1) throw ConfigError("CentredDft: M must be >= 1");
  tw.resize(M);
  for (int j = 0; j < M; ++j) {
    double a = -2.0 * kPi * j / M;
    tw[j] = cplx(std::cos(a), std::sin(a));
  }
  idx.resize(size_t(M) * M);
  for (int k = 0; k < M; ++k)
    for (int n = 0; n < M; ++n) {
      long p = long(n - M / 2) * long(k - M / 2);
      idx[size_t(k) * M + n] = int(((p % M) + M) % M);
    }
}

void CentredDft::apply(const cplx* v, cplx* out) const {
  for (int k = 0; k < M; ++k) {
    const int* row = idx.data() + size_t(k) * M;
    cplx acc = 0.0;
    for (int n = 0; n < M; ++n) acc += v[n] * tw[row[n]];
    out[k] = acc;
  }
}

void CentredDft::apply_conj(const cplx* g, cplx* out) const {
  for (int n = 0; n < M; ++n) {
    cplx acc = 0.0;
    // F is symmetric (idx[k*M+n] == idx[n*M+k]), so column n equals row n.
    const int* row = idx.data() + size_t(n) * M;
    for (int k = 0; k < M; ++k) acc += g[k] * std::conj(tw[row[k]]);
    out[n] = acc;
  }
}

std::vector<cplx> fft1_centered(const std::vector<cplx>& v) {
  CentredDft d((int)v.size());
  std::vector<cplx> out(v.size());
  d.apply(v.data(), out.data());
  return out;
}

std::vector<cplx> ifft1_centered(const std::vector<cplx>& X) {
  CentredDft d((int)X.size());
  std::vector<cplx> out(X.size());
  d.apply_conj(X.data(), out.data());
  for (auto& z : out) z /= double(d.M);
  return out;
}

cplx BilinearImage::query(double x, double y) const {
  const GridSpec& g = img.grid;
  if (std::abs(x) > g.fov / 2 || std::abs(y) > g.fov / 2) return 0.0;
  double dx = g.dx();
  double fx = x / dx + g.nx / 2;  // fractional pixel index
  double fy = y / dx + g.ny / 2;
  int ix = (int)std::floor(fx), iy = (int)std::floor(fy);
  double ux = fx - ix, uy = fy - iy;
  auto clampi = [](int i, int n) { return i < 0 ? 0 : (i >= n ? n - 1 : i); };
  int x0 = clampi(ix, g.nx), x1 = clampi(ix + 1, g.nx);
  int y0 = clampi(iy, g.ny), y1 = clampi(iy + 1, g.ny);
  return (1 - ux) * ((1 - uy) * img.at(x0, y0) + uy * img.at(x0, y1)) +
         ux * ((1 - uy) * img.at(x1, y0) + uy * img.at(x1, y1));
}

RotatedLattice::RotatedLattice(const traj::SpokeGeometry& s, const GridSpec& grid,
                               int oversample) {
  if (oversample < 1) throw ConfigError("oversample must be >= 1");
  M = s.M;
  Mp = s.M * oversample;
  dp = grid.fov / Mp;
  double th = s.angle_deg * kPi / 180.0;
  double c = std::cos(th), sn = std::sin(th);
  double half = grid.fov / 2;
  a.reserve(size_t(Mp) * Mp);
  x.reserve(size_t(Mp) * Mp);
  y.reserve(size_t(Mp) * Mp);
  for (int ai = 0; ai < Mp; ++ai) {
    double u = (ai - Mp / 2) * dp;  // along the spoke direction
    for (int bi = 0; bi < Mp; ++bi) {
      double v = (bi - Mp / 2) * dp;  // perpendicular
      double px = u * c - v * sn;
      double py = u * sn + v * c;
      if (std::abs(px) > half || std::abs(py) > half) continue;
      a.push_back(ai);
      x.push_back(px);
      y.push_back(py);
    }
  }
}

void project_and_fft(const RotatedLattice& lat, const CentredDft& dft,
                     const cplx* vals, cplx* spoke_out) {
  std::vector<cplx> proj(lat.Mp, cplx(0.0));
  const size_t n = lat.n_points();
  for (size_t i = 0; i < n; ++i) proj[lat.a[i]] += vals[i];
  for (auto& p : proj) p *= lat.dp;
  if (lat.Mp == lat.M) {
    std::vector<cplx> out(lat.M);
    dft.apply(proj.data(), out.data());
    for (int m = 0; m < lat.M; ++m) spoke_out[m] = out[m] * lat.dp;
  } else {
    // Oversampled lattice: longer transform, same dk = 1/fov; return the
    // central M samples (DC stays at the center index).
    CentredDft big(lat.Mp);
    std::vector<cplx> out(lat.Mp);
    big.apply(proj.data(), out.data());
    int off = lat.Mp / 2 - lat.M / 2;
    for (int m = 0; m < lat.M; ++m) spoke_out[m] = out[off + m] * lat.dp;
  }
}

std::vector<cplx> fourier_slice_forward(const SamplableImage& img,
                                        const traj::SpokeGeometry& spoke,
                                        const GridSpec& grid, int oversample) {
  RotatedLattice lat(spoke, grid, oversample);
  std::vector<cplx> vals(lat.n_points());
  for (size_t i = 0; i < lat.n_points(); ++i) vals[i] = img.query(lat.x[i], lat.y[i]);
  CentredDft dft(spoke.M);
  std::vector<cplx> out(spoke.M);
  project_and_fft(lat, dft, vals.data(), out.data());
  return out;
}

std::vector<cplx> dtft_oracle(const ComplexImage& img,
                              const std::vector<std::pair<double, double>>& k_points) {
  const GridSpec& g = img.grid;
  double w = g.dx() * g.dx();
  std::vector<cplx> out(k_points.size(), cplx(0.0));
  for (size_t m = 0; m < k_points.size(); ++m) {
    double kx = k_points[m].first, ky = k_points[m].second;
    cplx acc = 0.0;
    for (int ix = 0; ix < g.nx; ++ix) {
      double x = g.x(ix);
      for (int iy = 0; iy < g.ny; ++iy) {
        double ph = -2.0 * kPi * (kx * x + ky * g.y(iy));
        acc += img.at(ix, iy) * cplx(std::cos(ph), std::sin(ph));
      }
    }
    out[m] = acc * w;
  }
  return out;
}

namespace {

inline cplx unit_phase(double ang) { return cplx(std::cos(ang), std::sin(ang)); }

// Per (spoke, pixel) the forward phase chain is exp(-2*pi*i k_m.r) =
// base(r)^(m - M/2) with base(r) = exp(-2*pi*i dk (khat.r)). Along a grid
// column (fixed ix, iy ascending) both base and the chain start
// start(r) = base(r)^(-M/2) advance by constant unit factors, so each is a
// geometric recurrence: two complex multiplies per pixel, no transcendentals.
struct SpokePhase {
  cplx base0, base_step;    // base at iy=0, and base(iy+1)/base(iy)
  cplx start0, start_step;  // start at iy=0, and its per-iy factor

  SpokePhase(const traj::SpokeGeometry& sp, const GridSpec& g, double px) {
    double th = sp.angle_deg * kPi / 180.0;
    double khx = std::cos(th), khy = std::sin(th);
    double w = -2.0 * kPi * sp.dk;
    double dx = g.dx();
    base0 = unit_phase(w * (khx * px + khy * g.y(0)));
    base_step = unit_phase(w * khy * dx);
    // start = base^(-M/2): exponent -M/2 folds into the angle.
    double h = -double(sp.M / 2);
    start0 = unit_phase(h * w * (khx * px + khy * g.y(0)));
    start_step = unit_phase(h * w * khy * dx);
  }
};

}  // namespace

std::vector<std::vector<std::vector<cplx>>> radial_forward(
    const ComplexImage& x, const std::vector<ComplexImage>& coil_rasters,
    const std::vector<traj::SpokeGeometry>& spokes) {
  const GridSpec& g = x.grid;
  const int nc = (int)coil_rasters.size();
  const int M = spokes.empty() ? 0 : spokes[0].M;
  const double w = g.dx() * g.dx();
  const size_t npix = x.v.size();

  std::vector<std::vector<std::vector<cplx>>> out(
      spokes.size(), std::vector<std::vector<cplx>>(nc, std::vector<cplx>(M, cplx(0.0))));

  // Coil-weighted images u_c = S_c * x, interleaved per pixel for locality.
  std::vector<cplx> u(npix * nc);
  for (size_t i = 0; i < npix; ++i)
    for (int c = 0; c < nc; ++c) u[i * nc + c] = coil_rasters[c].v[i] * x.v[i];

  for (size_t s = 0; s < spokes.size(); ++s) {
    const auto& sp = spokes[s];
    auto& ys = out[s];
    for (int ix = 0; ix < g.nx; ++ix) {
      SpokePhase rec(sp, g, g.x(ix));
      cplx base = rec.base0, start = rec.start0;
      for (int iy = 0; iy < g.ny; ++iy) {
        const cplx* up = &u[(size_t(ix) * g.ny + iy) * nc];
        cplx ph = start;
        for (int m = 0; m < M; ++m) {
          for (int c = 0; c < nc; ++c) ys[c][m] += up[c] * ph;
          ph *= base;
        }
        base *= rec.base_step;
        start *= rec.start_step;
      }
    }
    for (int c = 0; c < nc; ++c)
      for (int m = 0; m < M; ++m) ys[c][m] *= w;
  }
  return out;
}

SpokeSetView SpokeSetView::all(const traj::SpokeSet& s) {
  SpokeSetView v;
  v.set = &s;
  v.indices.resize(s.n_spokes());
  for (int i = 0; i < s.n_spokes(); ++i) v.indices[i] = i;
  return v;
}

SpokeSetView SpokeSetView::of(const traj::SpokeSet& s, std::vector<int> idx) {
  SpokeSetView v;
  v.set = &s;
  v.indices = std::move(idx);
  return v;
}

ComplexImage adjoint_radial(const SpokeSetView& view, const std::vector<double>& dcf,
                            const phantom::CoilMaps& coils, const GridSpec& grid) {
  if (!view.set || view.indices.empty()) throw ConfigError("adjoint_radial: empty spoke set");
  const traj::SpokeSet& s = *view.set;
  const int M = s.M();
  const int nc = s.n_coils();
  if ((int)dcf.size() != M) throw ConfigError("adjoint_radial: dcf length mismatch");
  auto rasters = coils.rasterize(grid);

  ComplexImage out(grid);
  const double w = grid.dx() * grid.dx();
  std::vector<cplx> z(size_t(M) * nc);   // z[m*nc+c] = dcf[m]*y[c][m]
  std::vector<cplx> acc(nc);

  for (int si : view.indices) {
    const auto& sp = s.geo[si];
    for (int m = 0; m < M; ++m)
      for (int c = 0; c < nc; ++c) z[size_t(m) * nc + c] = dcf[m] * s.samples[si][c][m];
    for (int ix = 0; ix < grid.nx; ++ix) {
      SpokePhase rec(sp, grid, grid.x(ix));
      cplx base = rec.base0, start = rec.start0;
      for (int iy = 0; iy < grid.ny; ++iy) {
        // Adjoint kernel exp(+2*pi*i k_m.r) is the exact conjugate of the
        // forward chain, so run the same recurrence and conjugate.
        cplx ph = start;
        std::fill(acc.begin(), acc.end(), cplx(0.0));
        for (int m = 0; m < M; ++m) {
          cplx q = std::conj(ph);
          for (int c = 0; c < nc; ++c) acc[c] += z[size_t(m) * nc + c] * q;
          ph *= base;
        }
        cplx pix = 0.0;
        for (int c = 0; c < nc; ++c)
          pix += std::conj(rasters[c].v[size_t(ix) * grid.ny + iy]) * acc[c];
        out.at(ix, iy) += pix;
        base *= rec.base_step;
        start *= rec.start_step;
      }
    }
  }
  for (auto& v : out.v) v *= w;
  return out;
}

}  // namespace dynrad::fourier
