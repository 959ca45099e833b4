#include "dynrad/subspace.hpp"

#include <Eigen/Dense>
#include <cmath>

namespace dynrad::subspace {

traj::SpokeSet crop_center(const traj::SpokeSet& s, double fraction) {
  if (!(fraction > 0.0) || fraction > 1.0) throw ConfigError("crop fraction must be in (0,1]");
  int M = s.M();
  int Ml = (int)std::lround(M * fraction);
  if (Ml % 2 != 0) Ml += 1;  // keep the DC-at-center convention
  if (Ml > M) Ml = M;
  if (Ml < 4) throw ConfigError("crop produces fewer than 4 samples");
  if (Ml == M) return s;

  traj::SpokeSet out;
  out.tr = s.tr;
  out.fov = s.fov;
  out.geo = s.geo;
  int lo = M / 2 - Ml / 2;
  for (auto& g : out.geo) g.M = Ml;
  out.samples.resize(s.n_spokes());
  for (int i = 0; i < s.n_spokes(); ++i) {
    out.samples[i].resize(s.n_coils());
    for (int c = 0; c < s.n_coils(); ++c)
      out.samples[i][c] = std::vector<cplx>(s.samples[i][c].begin() + lo,
                                            s.samples[i][c].begin() + lo + Ml);
  }
  return out;
}

std::vector<double> area_dcf(int M, double dk, double dx, int spokes_per_bin) {
  std::vector<double> w(M);
  for (int m = 0; m < M; ++m)
    w[m] = kPi * std::max(std::abs(double(m - M / 2)), 0.5) * dk * dk /
           (spokes_per_bin * dx * dx);
  return w;
}

namespace {

// One bin's forward operator applied to a frame.
std::vector<std::vector<std::vector<cplx>>> bin_forward(
    const ComplexImage& x, const std::vector<ComplexImage>& rasters,
    const traj::SpokeSet& s, const std::vector<int>& members) {
  std::vector<traj::SpokeGeometry> geos;
  geos.reserve(members.size());
  for (int i : members) geos.push_back(s.geo[i]);
  return fourier::radial_forward(x, rasters, geos);
}

double residual_sq_norm(const std::vector<std::vector<std::vector<cplx>>>& yhat,
                        const traj::SpokeSet& s, const std::vector<int>& members,
                        std::vector<std::vector<std::vector<cplx>>>& resid) {
  double nrm = 0.0;
  resid = yhat;
  for (size_t j = 0; j < members.size(); ++j)
    for (int c = 0; c < s.n_coils(); ++c)
      for (int m = 0; m < s.M(); ++m) {
        cplx r = yhat[j][c][m] - s.samples[members[j]][c][m];
        resid[j][c][m] = r;
        nrm += std::norm(r);
      }
  return nrm;
}

// Adjoint of one bin's forward (unit density weights) applied to residuals.
ComplexImage bin_adjoint(const std::vector<std::vector<std::vector<cplx>>>& resid,
                         const std::vector<ComplexImage>& rasters,
                         const traj::SpokeSet& s, const std::vector<int>& members,
                         const GridSpec& grid) {
  // Raster-based unit-weight adjoint (adjoint_radial re-rasterizes coils per
  // call, which would dominate the descent loop).
  const int M = s.M();
  const int nc = (int)rasters.size();
  ComplexImage out(grid);
  const double w = grid.dx() * grid.dx();
  std::vector<cplx> z(size_t(M) * nc);
  std::vector<cplx> acc(nc);
  for (size_t si = 0; si < members.size(); ++si) {
    const auto& sp = s.geo[members[si]];
    for (int m = 0; m < M; ++m)
      for (int c = 0; c < nc; ++c) z[size_t(m) * nc + c] = resid[si][c][m];
    double th = sp.angle_deg * kPi / 180.0;
    double khx = std::cos(th), khy = std::sin(th);
    double wph = -2.0 * kPi * sp.dk;
    for (int ix = 0; ix < grid.nx; ++ix) {
      double px = grid.x(ix);
      double b0 = wph * (khx * px + khy * grid.y(0));
      double bs = wph * khy * grid.dx();
      double h = -double(M / 2);
      cplx base(std::cos(b0), std::sin(b0));
      cplx base_step(std::cos(bs), std::sin(bs));
      cplx start(std::cos(h * b0), std::sin(h * b0));
      cplx start_step(std::cos(h * bs), std::sin(h * bs));
      for (int iy = 0; iy < grid.ny; ++iy) {
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
        base *= base_step;
        start *= start_step;
      }
    }
  }
  for (auto& v : out.v) v *= w;
  return out;
}

}  // namespace

DynamicImage grasp_core(const traj::SpokeSet& s, const traj::BinnedSpokeSet& bins,
                        const phantom::CoilMaps& coils, const GraspConfig& cfg,
                        const GridSpec& grid, int n_threads,
                        std::vector<double>* objective_trace) {
  cfg.validate();
  const int T = (int)bins.bins.size();
  const size_t npix = size_t(grid.nx) * grid.ny;
  const double eps = cfg.charbonnier_eps;
  auto rasters = coils.rasterize(grid);

  DynamicImage dyn;
  dyn.grid = grid;
  for (const auto& b : bins.bins) dyn.times.push_back(b.t_center);

  // Density-compensated adjoint init, correct absolute scale.
  auto dcf = area_dcf(s.M(), s.geo[0].dk, grid.dx(), bins.spokes_per_bin);
  std::vector<ComplexImage> x(T, ComplexImage(grid));
  parallel_for(T, n_threads, [&](size_t b) {
    x[b] = fourier::adjoint_radial(fourier::SpokeSetView::of(s, bins.bins[b].members),
                                   dcf, coils, grid);
  });

  // BART-style normalization: scale data so max |init| = 1, rescale at exit.
  double scale = 0.0;
  for (const auto& f : x)
    for (const auto& v : f.v) scale = std::max(scale, std::abs(v));
  if (scale == 0.0) {  // zero data -> zero frames
    dyn.frames = std::move(x);
    if (objective_trace) objective_trace->assign(cfg.iterations, 0.0);
    return dyn;
  }
  traj::SpokeSet ss = s;  // scaled copy of the data
  for (auto& sp : ss.samples)
    for (auto& cs : sp)
      for (auto& v : cs) v /= scale;
  for (auto& f : x)
    for (auto& v : f.v) v /= scale;

  // Data-term Lipschitz constant: the objective sum ||A x - y||^2 has
  // gradient 2 A^H(Ax - y), so L = 2*lambda_max(A^H A); 20 power iterations
  // on bin 0's normal operator, fixed internal seed, 5% headroom.
  double lam_max;
  {
    auto rng = make_rng(0x9D5Cu, "grasp.power");
    std::normal_distribution<double> gauss(0.0, 1.0);
    ComplexImage v(grid);
    for (auto& z : v.v) z = cplx(gauss(rng), gauss(rng));
    double nv = 0.0;
    for (auto& z : v.v) nv += std::norm(z);
    for (auto& z : v.v) z /= std::sqrt(nv);
    lam_max = 0.0;
    const auto& members = bins.bins[0].members;
    for (int it = 0; it < cfg.power_iters; ++it) {
      auto yv = bin_forward(v, rasters, ss, members);
      // A^H A v with unit weights
      ComplexImage bv = bin_adjoint(yv, rasters, ss, members, grid);
      double nb = 0.0;
      for (auto& z : bv.v) nb += std::norm(z);
      nb = std::sqrt(nb);
      if (!std::isfinite(nb) || nb == 0.0)
        throw NumericError("grasp: power iteration failed (non-finite operator norm)");
      lam_max = nb;
      for (size_t i = 0; i < npix; ++i) v.v[i] = bv.v[i] / nb;
    }
  }
  if (!std::isfinite(lam_max) || lam_max <= 0.0)
    throw NumericError("grasp: Lipschitz estimate not finite");
  double step = 1.0 / (2.0 * lam_max * 1.05);

  // Objective/gradient at a point. grad holds 2 A^H r + lambda * dTV.
  std::vector<std::vector<std::vector<std::vector<cplx>>>> resid(T);
  auto eval = [&](const std::vector<ComplexImage>& xs, std::vector<double>& data_sq) {
    data_sq.assign(T, 0.0);
    parallel_for(T, n_threads, [&](size_t b) {
      auto yhat = bin_forward(xs[b], rasters, ss, bins.bins[b].members);
      data_sq[b] = residual_sq_norm(yhat, ss, bins.bins[b].members, resid[b]);
    });
    double obj = 0.0;
    for (int b = 0; b < T; ++b) obj += data_sq[b];
    if (cfg.tv_weight > 0.0 && T > 1) {
      for (int b = 0; b + 1 < T; ++b)
        for (size_t i = 0; i < npix; ++i)
          obj += cfg.tv_weight * std::sqrt(std::norm(xs[b + 1].v[i] - xs[b].v[i]) + eps * eps);
    }
    return obj;
  };

  auto gradient = [&](const std::vector<ComplexImage>& xs, std::vector<ComplexImage>& g) {
    parallel_for(T, n_threads, [&](size_t b) {
      g[b] = bin_adjoint(resid[b], rasters, ss, bins.bins[b].members, grid);
      for (auto& z : g[b].v) z *= 2.0;
    });
    if (cfg.tv_weight > 0.0 && T > 1) {
      for (int b = 0; b + 1 < T; ++b)
        for (size_t i = 0; i < npix; ++i) {
          cplx d = xs[b + 1].v[i] - xs[b].v[i];
          cplx gd = cfg.tv_weight * d / std::sqrt(std::norm(d) + eps * eps);
          g[b].v[i] -= gd;
          g[b + 1].v[i] += gd;
        }
    }
  };

  std::vector<double> data_sq;
  double obj = eval(x, data_sq);
  std::vector<ComplexImage> grad(T, ComplexImage(grid)), xt(T, ComplexImage(grid));
  if (objective_trace) objective_trace->clear();

  for (int it = 0; it < cfg.iterations; ++it) {
    gradient(x, grad);
    // Backtracking guard: only triggers when Charbonnier curvature near TV
    // kinks (or an underestimated L) would break monotone descent.
    double obj_try = 0.0;
    for (int bt = 0;; ++bt) {
      for (int b = 0; b < T; ++b)
        for (size_t i = 0; i < npix; ++i) xt[b].v[i] = x[b].v[i] - step * grad[b].v[i];
      obj_try = eval(xt, data_sq);
      if (obj_try <= obj || bt >= 60) break;
      step *= 0.5;
    }
    std::swap(x, xt);
    obj = obj_try;
    if (!std::isfinite(obj)) throw NumericError("grasp: objective diverged");
    if (objective_trace) objective_trace->push_back(obj * scale * scale);
  }

  for (auto& f : x)
    for (auto& v : f.v) v *= scale;
  dyn.frames = std::move(x);
  return dyn;
}

DynamicImage grasp_reconstruct(const traj::SpokeSet& lowres, const phantom::CoilMaps& coils,
                               const GraspConfig& cfg, int n_threads,
                               std::vector<double>* objective_trace) {
  GridSpec grid{lowres.M(), lowres.M(), lowres.fov};
  auto bins = traj::bin_spokes(lowres, cfg.spokes_per_bin);
  return grasp_core(lowres, bins, coils, cfg, grid, n_threads, objective_trace);
}

SubspaceModel svd_subspace(const DynamicImage& dyn, int k) {
  const int T = (int)dyn.n_frames();
  const size_t npix = size_t(dyn.grid.nx) * dyn.grid.ny;
  if (k < 1 || size_t(k) > std::min(npix, size_t(T)))
    throw ConfigError("svd rank k out of range");

  Eigen::MatrixXcd C(npix, T);
  for (int t = 0; t < T; ++t)
    for (size_t i = 0; i < npix; ++i) C(i, t) = dyn.frames[t].v[i];

  Eigen::BDCSVD<Eigen::MatrixXcd> svd(C, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& U = svd.matrixU();
  const auto& V = svd.matrixV();
  const auto& S = svd.singularValues();

  SubspaceModel m;
  m.k = k;
  m.grid = dyn.grid;
  m.frame_times = dyn.times;
  m.spatial.assign(k, ComplexImage(dyn.grid));
  m.temporal.assign(T, std::vector<cplx>(k));
  for (int j = 0; j < k; ++j) {
    for (size_t i = 0; i < npix; ++i) m.spatial[j].v[i] = U(i, j) * S(j);
    for (int t = 0; t < T; ++t) m.temporal[t][j] = std::conj(V(t, j));
  }
  return m;
}

cplx interp_clamped(const std::vector<double>& ts, const std::vector<cplx>& vs, double t) {
  if (ts.empty()) throw ConfigError("interp: empty sample set");
  if (t <= ts.front()) return vs.front();
  if (t >= ts.back()) return vs.back();
  // ts is small (tens of entries); linear scan keeps it simple.
  size_t i = 1;
  while (ts[i] < t) ++i;
  double u = (t - ts[i - 1]) / (ts[i] - ts[i - 1]);
  return (1.0 - u) * vs[i - 1] + u * vs[i];
}

SubspaceModel interpolate_bases(const SubspaceModel& m, double spatial_factor,
                                int temporal_factor) {
  if (!(spatial_factor >= 1.0) || temporal_factor < 1)
    throw ConfigError("interpolation factors must be >= 1");
  if (spatial_factor == 1.0 && temporal_factor == 1) return m;

  SubspaceModel out;
  out.k = m.k;

  // Spatial: bilinear, edge-clamped, pixel-center aligned over the same FOV.
  int nxt = (int)std::lround(m.grid.nx * spatial_factor);
  out.grid = GridSpec{nxt, nxt, m.grid.fov};
  out.spatial.assign(m.k, ComplexImage(out.grid));
  for (int j = 0; j < m.k; ++j) {
    fourier::BilinearImage bi(m.spatial[j]);
    for (int ix = 0; ix < nxt; ++ix)
      for (int iy = 0; iy < nxt; ++iy)
        out.spatial[j].at(ix, iy) = bi.query(out.grid.x(ix), out.grid.y(iy));
  }

  // Temporal: instants spaced dt/factor centered on the original grid; for
  // factor == spokes_per_bin these are exactly the spoke times.
  const int T = m.T();
  if (temporal_factor > 1 && T < 2)
    throw ConfigError("temporal interpolation needs at least 2 frames");
  int Tt = T * temporal_factor;
  double dt = T > 1 ? (m.frame_times[1] - m.frame_times[0]) : 0.0;
  double dtp = dt / temporal_factor;
  double t0 = m.frame_times.front() - dtp * (temporal_factor - 1) / 2.0;
  out.frame_times.resize(Tt);
  out.temporal.assign(Tt, std::vector<cplx>(m.k));
  std::vector<cplx> col(T);
  for (int j = 0; j < m.k; ++j) {
    for (int t = 0; t < T; ++t) col[t] = m.temporal[t][j];
    for (int f = 0; f < Tt; ++f) {
      double tf = t0 + f * dtp;
      out.frame_times[f] = tf;
      out.temporal[f][j] = interp_clamped(m.frame_times, col, tf);
    }
  }
  return out;
}

}  // namespace dynrad::subspace
