#include "dynrad/recon.hpp"

#include <zlib.h>

#include <chrono>
#include <cstring>

namespace dynrad::recon {

namespace {

template <typename Real>
uint32_t crc_span(uint32_t crc, const std::vector<Real>& v) {
  if (v.empty()) return crc;
  return uint32_t(crc32(crc, reinterpret_cast<const Bytef*>(v.data()),
                        uInt(v.size() * sizeof(Real))));
}

}  // namespace

template <typename Real>
uint32_t network_crc(const inr::CoordinateNetwork<Real>& net) {
  uint32_t c = uint32_t(crc32(0L, Z_NULL, 0));
  for (const auto& t : net.table) c = crc_span(c, t);
  c = crc_span(c, net.mlp.W1);
  c = crc_span(c, net.mlp.b1);
  c = crc_span(c, net.mlp.W2);
  c = crc_span(c, net.mlp.b2);
  c = crc_span(c, net.mlp.W3);
  c = crc_span(c, net.mlp.b3);
  return c;
}

template uint32_t network_crc<double>(const inr::CoordinateNetwork<double>&);
template uint32_t network_crc<float>(const inr::CoordinateNetwork<float>&);

void ReconConfig::validate() const {
  if (rank < 1 || rank > 64) throw ConfigError("recon: rank out of range [1,64]");
  if (hidden < 1 || hidden > 4096) throw ConfigError("recon: hidden width out of range");
  if (init_steps < 0 || finetune_iters < 0 || freeze_temporal_iters < 0)
    throw ConfigError("recon: iteration counts must be non-negative");
  if (!(init_lr > 0) || !(finetune_lr > 0))
    throw ConfigError("recon: learning rates must be positive");
  if (spokes_per_batch < 0) throw ConfigError("recon: spokes_per_batch must be >= 0");
  if (n_threads < 1) throw ConfigError("recon: n_threads must be >= 1");
  spatial_grid.validate();
  temporal_grid.validate();
  if (spatial_grid.dim != 2) throw ConfigError("recon: spatial encoding must be 2D");
  if (temporal_grid.dim != 1) throw ConfigError("recon: temporal encoding must be 1D");
}

template <typename Real>
Model<Real> make_model(const ReconConfig& cfg, const GridSpec& grid, double t_max) {
  cfg.validate();
  grid.validate();
  if (!(t_max > 0)) throw ConfigError("recon: t_max must be positive");
  Model<Real> m;
  m.rank = cfg.rank;
  m.grid = grid;
  m.t_max = t_max;
  m.spatial.init_shape(cfg.spatial_grid, cfg.hidden, 2 * cfg.rank);
  m.temporal.init_shape(cfg.temporal_grid, cfg.hidden, 2 * cfg.rank);
  inr::init_parameters(m.spatial, cfg.seed, "spatial");
  inr::init_parameters(m.temporal, cfg.seed, "temporal");
  return m;
}

BasisTargets targets_from_model(const subspace::SubspaceModel& m) {
  BasisTargets t;
  t.k = m.k;
  t.grid = m.grid;
  t.spatial = m.spatial;
  t.times = m.frame_times;
  t.temporal = m.temporal;
  return t;
}

template <typename Real>
TrainContext<Real> build_train_context(const traj::SpokeSet& set,
                                       const phantom::CoilMaps& coils, const GridSpec& grid,
                                       int n_threads) {
  grid.validate();
  if (set.n_spokes() < 1) throw ConfigError("train context: empty spoke set");
  if (!coils.analytic() || coils.n_coils() != set.n_coils())
    throw ConfigError("train context: coil map / sample coil count mismatch");
  if (std::abs(grid.fov - set.fov) > 1e-9 * set.fov)
    throw ConfigError("train context: grid and spoke set FOV differ");
  const int M = set.M(), nc = set.n_coils();
  TrainContext<Real> ctx;
  ctx.grid = grid;
  ctx.nc = nc;
  ctx.M = M;
  ctx.dft = std::make_unique<fourier::CentredDft>(M);
  auto rw = traj::ramp_weights(M);
  ctx.w2.resize(M);
  for (int m = 0; m < M; ++m) ctx.w2[m] = rw.w[m] * rw.w[m];
  ctx.t_max = double(set.n_spokes()) * set.tr;
  ctx.dp = set.fov / M;
  ctx.spokes.resize(set.n_spokes());
  const double half = set.fov / 2, fov = set.fov;
  parallel_for(set.n_spokes(), n_threads, [&](size_t i) {
    const auto& g = set.geo[i];
    if (g.M != M) throw ConfigError("train context: mixed readout lengths");
    fourier::RotatedLattice lat(g, grid, 1);
    SpokeWork<Real>& sw = ctx.spokes[i];
    sw.index = g.index;
    sw.t_norm = g.t / ctx.t_max;
    const size_t n = lat.n_points();
    sw.n_pts = (uint32_t)n;
    sw.a.resize(n);
    sw.coords.resize(2 * n);
    sw.coil.resize(n * size_t(nc) * 2);
    for (size_t p = 0; p < n; ++p) {
      sw.a[p] = lat.a[p];
      sw.coords[2 * p] = (lat.x[p] + half) / fov;
      sw.coords[2 * p + 1] = (lat.y[p] + half) / fov;
      for (int c = 0; c < nc; ++c) {
        cplx S = coils.eval(c, lat.x[p], lat.y[p]);
        sw.coil[(p * nc + c) * 2] = Real(S.real());
        sw.coil[(p * nc + c) * 2 + 1] = Real(S.imag());
      }
    }
    sw.y.resize(size_t(nc) * M);
    for (int c = 0; c < nc; ++c)
      for (int m = 0; m < M; ++m) sw.y[size_t(c) * M + m] = set.samples[i][c][m];
  });
  return ctx;
}

namespace {

template <typename Real>
struct SpokeScratch {
  inr::ForwardCache<Real> sc, tc;
  inr::SparseTableGrad<Real> sg_s, sg_t;
  inr::MlpParams<Real> mg_s, mg_t;
  std::vector<Real> genc, gout_s, gout_t;
  std::vector<cplx> proj, yhat, gyhat, gproj, tau, gtau;
  double loss = 0.0;

  void init(const Model<Real>& m, bool for_grads) {
    if (for_grads) {
      sg_s.init_shape(m.spatial);
      sg_t.init_shape(m.temporal);
      mg_s.resize(m.spatial.hcfg.encoded_dim(), m.spatial.hidden, m.spatial.out_dim);
      mg_t.resize(m.temporal.hcfg.encoded_dim(), m.temporal.hidden, m.temporal.out_dim);
    }
  }
};

// Forward + loss for one spoke; optionally reverse pass into the scratch's
// sparse table grads and MLP grads (ungated by 1/N — callers average).
template <typename Real>
double spoke_pass(const Model<Real>& model, const TrainContext<Real>& ctx, size_t i,
                  SpokeScratch<Real>& s, bool grad_spatial, bool grad_temporal) {
  const SpokeWork<Real>& sw = ctx.spokes[i];
  const int k = model.rank, nc = ctx.nc, M = ctx.M, od = 2 * k;
  const size_t n = sw.n_pts;
  const double dp2 = ctx.dp * ctx.dp;
  const double loss_norm = 1.0 / (double(nc) * M);

  inr::forward(model.temporal, &sw.t_norm, 1, s.tc);
  s.tau.assign(k, cplx(0));
  for (int j = 0; j < k; ++j)
    s.tau[j] = cplx(double(s.tc.out[j]), double(s.tc.out[k + j]));

  inr::forward(model.spatial, sw.coords.data(), n, s.sc);

  // project coil-weighted frame values onto the readout buckets
  s.proj.assign(size_t(nc) * M, cplx(0));
  const Real* co = sw.coil.data();
  for (size_t p = 0; p < n; ++p) {
    const Real* op = &s.sc.out[p * od];
    cplx f(0);
    for (int j = 0; j < k; ++j) f += cplx(double(op[j]), double(op[k + j])) * s.tau[j];
    const int ap = sw.a[p];
    for (int c = 0; c < nc; ++c) {
      cplx S(double(co[(p * nc + c) * 2]), double(co[(p * nc + c) * 2 + 1]));
      s.proj[size_t(c) * M + ap] += S * f;
    }
  }
  s.yhat.resize(size_t(nc) * M);
  s.gyhat.resize(size_t(nc) * M);
  for (int c = 0; c < nc; ++c) ctx.dft->apply(&s.proj[size_t(c) * M], &s.yhat[size_t(c) * M]);
  double loss = 0;
  for (int c = 0; c < nc; ++c)
    for (int m = 0; m < M; ++m) {
      const size_t o = size_t(c) * M + m;
      cplx e = dp2 * s.yhat[o] - sw.y[o];
      loss += ctx.w2[m] * std::norm(e);
      s.gyhat[o] = (2.0 * ctx.w2[m] * loss_norm) * e;
    }
  loss *= loss_norm;
  if (!std::isfinite(loss))
    throw NumericError("spoke_loss: non-finite loss at spoke " + std::to_string(sw.index));
  s.loss = loss;
  if (!grad_spatial && !grad_temporal) return loss;

  // reverse: yhat = dp^2 * F proj  =>  G_proj = dp^2 * conj(F) G_yhat
  s.gproj.resize(size_t(nc) * M);
  for (int c = 0; c < nc; ++c)
    ctx.dft->apply_conj(&s.gyhat[size_t(c) * M], &s.gproj[size_t(c) * M]);
  s.gout_s.resize(n * od);
  s.gtau.assign(k, cplx(0));
  for (size_t p = 0; p < n; ++p) {
    const int ap = sw.a[p];
    cplx gf(0);
    for (int c = 0; c < nc; ++c) {
      cplx S(double(co[(p * nc + c) * 2]), double(co[(p * nc + c) * 2 + 1]));
      gf += std::conj(S) * s.gproj[size_t(c) * M + ap];
    }
    gf *= dp2;
    const Real* op = &s.sc.out[p * od];
    Real* gp = &s.gout_s[p * od];
    for (int j = 0; j < k; ++j) {
      cplx gs = std::conj(s.tau[j]) * gf;
      gp[j] = Real(gs.real());
      gp[k + j] = Real(gs.imag());
      s.gtau[j] += std::conj(cplx(double(op[j]), double(op[k + j]))) * gf;
    }
  }
  if (grad_spatial) {
    s.sg_s.reset();
    s.mg_s.clear();
    inr::backward(model.spatial, s.sc, sw.coords.data(), s.gout_s.data(), s.mg_s, s.sg_s,
                  s.genc);
  }
  if (grad_temporal) {
    s.gout_t.resize(od);
    for (int j = 0; j < k; ++j) {
      s.gout_t[j] = Real(s.gtau[j].real());
      s.gout_t[k + j] = Real(s.gtau[j].imag());
    }
    s.sg_t.reset();
    s.mg_t.clear();
    inr::backward(model.temporal, s.tc, &sw.t_norm, s.gout_t.data(), s.mg_t, s.sg_t, s.genc);
  }
  return loss;
}

template <typename Real>
void scale_mlp(inr::MlpParams<Real>& m, Real a) {
  auto sc = [a](std::vector<Real>& v) {
    for (auto& x : v) x *= a;
  };
  sc(m.W1); sc(m.b1); sc(m.W2); sc(m.b2); sc(m.W3); sc(m.b3);
}

inline double seconds_since(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

template <typename Real>
double spoke_loss(const Model<Real>& model, const TrainContext<Real>& ctx, size_t spoke,
                  inr::NetGrads<Real>* gs, inr::NetGrads<Real>* gt) {
  if (spoke >= ctx.spokes.size()) throw ConfigError("spoke_loss: spoke index out of range");
  SpokeScratch<Real> s;
  s.init(model, gs != nullptr || gt != nullptr);
  double L = spoke_pass(model, ctx, spoke, s, gs != nullptr, gt != nullptr);
  if (gs) {
    if (gs->table.empty()) gs->init_shape(model.spatial);
    s.sg_s.merge_into(*gs);
    gs->mlp.add(s.mg_s);
  }
  if (gt) {
    if (gt->table.empty()) gt->init_shape(model.temporal);
    s.sg_t.merge_into(*gt);
    gt->mlp.add(s.mg_t);
  }
  return L;
}

template <typename Real>
double mean_spoke_loss(const Model<Real>& model, const TrainContext<Real>& ctx,
                       int n_threads) {
  if (ctx.spokes.empty()) throw ConfigError("mean_spoke_loss: empty context");
  std::vector<SpokeScratch<Real>> pool(std::max(1, n_threads));
  for (auto& s : pool) s.init(model, false);
  double sum = 0;
  ordered_parallel_reduce<SpokeScratch<Real>>(
      ctx.spokes.size(), n_threads, pool,
      [&](size_t i, SpokeScratch<Real>& s) { spoke_pass(model, ctx, i, s, false, false); },
      [&](size_t, SpokeScratch<Real>& s) { sum += s.loss; });
  return sum / double(ctx.spokes.size());
}

template <typename Real>
void fine_tune(Model<Real>& model, const TrainContext<Real>& ctx, const ReconConfig& cfg,
               TrainLog& log) {
  cfg.validate();
  if (ctx.spokes.empty()) throw ConfigError("fine_tune: empty context");
  if (model.rank != cfg.rank) throw ConfigError("fine_tune: model/config rank mismatch");
  const size_t N = ctx.spokes.size();
  const int T = cfg.n_threads;
  const size_t B =
      (cfg.spokes_per_batch <= 0 || size_t(cfg.spokes_per_batch) >= N) ? N
                                                                       : size_t(cfg.spokes_per_batch);

  // Slots of the spatial hash tables reachable from this training set; the
  // optimizer only ever needs to visit these (others keep zero grad/moments).
  std::vector<std::vector<uint8_t>> bm;
  for (const auto& sw : ctx.spokes)
    inr::mark_touched(model.spatial, sw.coords.data(), sw.n_pts, bm);
  inr::TouchedSet touched = inr::finalize_touched(bm);
  bm.clear();
  bm.shrink_to_fit();

  inr::NetGrads<Real> gs, gt;
  gs.init_shape(model.spatial);
  gt.init_shape(model.temporal);
  inr::AdamState<Real> as, at;
  as.init_shape(model.spatial);
  at.init_shape(model.temporal);

  std::vector<SpokeScratch<Real>> pool(std::max(1, T));
  for (auto& s : pool) s.init(model, true);

  const int F = model.spatial.hcfg.features;
  auto spatial_tables = [&](auto&& fn) {
    for (size_t l = 0; l < touched.slots.size(); ++l)
      for (uint32_t sl : touched.slots[l])
        for (int f = 0; f < F; ++f) fn(gs.table[l][size_t(sl) * F + f]);
  };

  const auto t0 = std::chrono::steady_clock::now();
  log.add("finetune_start", 0, 0.0, 0.0, cfg.freeze_temporal_iters > 0 ? 1 : 0,
          network_crc(model.temporal));
  for (int iter = 1; iter <= cfg.finetune_iters; ++iter) {
    const bool frozen = iter <= cfg.freeze_temporal_iters;
    double iter_loss = 0;
    for (size_t b0 = 0; b0 < N; b0 += B) {
      const size_t nb = std::min(N, b0 + B) - b0;
      spatial_tables([](Real& g) { g = Real(0); });
      gs.mlp.clear();
      if (!frozen) {
        for (auto& t : gt.table) std::fill(t.begin(), t.end(), Real(0));
        gt.mlp.clear();
      }
      double batch_loss = 0;
      ordered_parallel_reduce<SpokeScratch<Real>>(
          nb, T, pool,
          [&](size_t j, SpokeScratch<Real>& s) {
            spoke_pass(model, ctx, b0 + j, s, true, !frozen);
          },
          [&](size_t, SpokeScratch<Real>& s) {
            batch_loss += s.loss;
            s.sg_s.merge_into(gs);
            gs.mlp.add(s.mg_s);
            if (!frozen) {
              s.sg_t.merge_into(gt);
              gt.mlp.add(s.mg_t);
            }
          });
      const Real inv = Real(1.0 / double(nb));
      spatial_tables([inv](Real& g) { g *= inv; });
      scale_mlp(gs.mlp, inv);
      inr::adam_step(model.spatial, gs, as, cfg.finetune_lr, &touched);
      if (!frozen) {
        for (auto& t : gt.table)
          for (auto& g : t) g *= inv;
        scale_mlp(gt.mlp, inv);
        inr::adam_step(model.temporal, gt, at, cfg.finetune_lr, nullptr);
      }
      iter_loss += batch_loss;
    }
    log.add("finetune", iter, iter_loss / double(N), seconds_since(t0), frozen ? 1 : 0,
            network_crc(model.temporal));
  }
  log.add("final", cfg.finetune_iters, mean_spoke_loss(model, ctx, T), seconds_since(t0), 0,
          network_crc(model.temporal));
}

namespace {

template <typename Real>
struct FitScratch {
  inr::ForwardCache<Real> c;
  inr::SparseTableGrad<Real> sg;
  inr::MlpParams<Real> mg;
  std::vector<Real> genc, gout;
  double loss = 0.0;
};

// MSE fit of one network to per-coordinate target vectors.
template <typename Real>
void fit_one(inr::CoordinateNetwork<Real>& net, const std::vector<double>& coords, int dim,
             const std::vector<Real>& targets, int steps, double lr, int n_threads,
             const std::string& phase, TrainLog& log) {
  const int od = net.out_dim;
  const size_t n = coords.size() / dim;
  if (n == 0 || coords.size() != n * dim || targets.size() != n * od)
    throw ConfigError("fit_to_bases: coordinate/target shape mismatch");

  std::vector<std::vector<uint8_t>> bm;
  inr::mark_touched(net, coords.data(), n, bm);
  inr::TouchedSet touched = inr::finalize_touched(bm);
  bm.clear();
  bm.shrink_to_fit();

  inr::NetGrads<Real> g;
  g.init_shape(net);
  inr::AdamState<Real> st;
  st.init_shape(net);

  const size_t BLOCK = 64;
  const size_t nblocks = (n + BLOCK - 1) / BLOCK;
  std::vector<FitScratch<Real>> pool(std::max(1, n_threads));
  for (auto& s : pool) {
    s.sg.init_shape(net);
    s.mg.resize(net.hcfg.encoded_dim(), net.hidden, net.out_dim);
  }
  const int F = net.hcfg.features;
  const auto t0 = std::chrono::steady_clock::now();
  for (int step = 1; step <= steps; ++step) {
    for (size_t l = 0; l < touched.slots.size(); ++l)
      for (uint32_t sl : touched.slots[l])
        for (int f = 0; f < F; ++f) g.table[l][size_t(sl) * F + f] = Real(0);
    g.mlp.clear();
    double total = 0;
    ordered_parallel_reduce<FitScratch<Real>>(
        nblocks, n_threads, pool,
        [&](size_t b, FitScratch<Real>& s) {
          const size_t p0 = b * BLOCK, p1 = std::min(n, p0 + BLOCK), nb = p1 - p0;
          inr::forward(net, coords.data() + p0 * dim, nb, s.c);
          s.gout.resize(nb * od);
          double L = 0;
          for (size_t q = 0; q < nb * size_t(od); ++q) {
            const double d = double(s.c.out[q]) - double(targets[p0 * od + q]);
            L += d * d;
            s.gout[q] = Real(2.0 * d / double(n));
          }
          s.loss = L;
          s.sg.reset();
          s.mg.clear();
          inr::backward(net, s.c, coords.data() + p0 * dim, s.gout.data(), s.mg, s.sg, s.genc);
        },
        [&](size_t, FitScratch<Real>& s) {
          total += s.loss;
          s.sg.merge_into(g);
          g.mlp.add(s.mg);
        });
    inr::adam_step(net, g, st, lr, &touched);
    log.add(phase, step, total / double(n), seconds_since(t0), 0);
  }
}

}  // namespace

template <typename Real>
void fit_to_bases(Model<Real>& model, const BasisTargets& tg, const ReconConfig& cfg,
                  TrainLog& log) {
  cfg.validate();
  if (tg.k != model.rank) throw ConfigError("fit_to_bases: target rank mismatch");
  if (tg.grid.nx != model.grid.nx || tg.grid.ny != model.grid.ny ||
      std::abs(tg.grid.fov - model.grid.fov) > 1e-9 * model.grid.fov)
    throw ConfigError("fit_to_bases: target grid mismatch");
  if ((int)tg.spatial.size() != tg.k || tg.temporal.empty() ||
      tg.times.size() != tg.temporal.size())
    throw ConfigError("fit_to_bases: malformed targets");
  const int k = tg.k, od = 2 * k;
  const auto& gr = model.grid;

  const size_t npix = size_t(gr.nx) * gr.ny;
  std::vector<double> sc(npix * 2);
  std::vector<Real> stg(npix * od);
  for (int ix = 0; ix < gr.nx; ++ix)
    for (int iy = 0; iy < gr.ny; ++iy) {
      const size_t p = size_t(ix) * gr.ny + iy;
      sc[2 * p] = (gr.x(ix) + gr.fov / 2) / gr.fov;
      sc[2 * p + 1] = (gr.y(iy) + gr.fov / 2) / gr.fov;
      for (int j = 0; j < k; ++j) {
        stg[p * od + j] = Real(tg.spatial[j].v[p].real());
        stg[p * od + k + j] = Real(tg.spatial[j].v[p].imag());
      }
    }
  fit_one(model.spatial, sc, 2, stg, cfg.init_steps, cfg.init_lr, cfg.n_threads,
          "init_spatial", log);

  const size_t nt = tg.times.size();
  std::vector<double> tc(nt);
  std::vector<Real> ttg(nt * od);
  for (size_t i = 0; i < nt; ++i) {
    tc[i] = tg.times[i] / model.t_max;
    for (int j = 0; j < k; ++j) {
      ttg[i * od + j] = Real(tg.temporal[i][j].real());
      ttg[i * od + k + j] = Real(tg.temporal[i][j].imag());
    }
  }
  fit_one(model.temporal, tc, 1, ttg, cfg.init_steps, cfg.init_lr, cfg.n_threads,
          "init_temporal", log);
}

template <typename Real>
DynamicImage infer(const Model<Real>& model, const std::vector<double>& times) {
  if (times.empty()) throw ConfigError("infer: no frame times given");
  for (double t : times)
    if (!(t >= -1e-9) || !(t <= model.t_max * (1.0 + 1e-9)))
      throw ConfigError("infer: frame time outside the scanned interval [0, t_max]");
  const auto& gr = model.grid;
  const int k = model.rank, od = 2 * k;
  const size_t npix = size_t(gr.nx) * gr.ny;

  std::vector<double> sc(npix * 2);
  for (int ix = 0; ix < gr.nx; ++ix)
    for (int iy = 0; iy < gr.ny; ++iy) {
      const size_t p = size_t(ix) * gr.ny + iy;
      sc[2 * p] = (gr.x(ix) + gr.fov / 2) / gr.fov;
      sc[2 * p + 1] = (gr.y(iy) + gr.fov / 2) / gr.fov;
    }
  inr::ForwardCache<Real> scache, tcache;
  inr::forward(model.spatial, sc.data(), npix, scache);

  std::vector<double> tcoords(times.size());
  for (size_t i = 0; i < times.size(); ++i) tcoords[i] = times[i] / model.t_max;
  inr::forward(model.temporal, tcoords.data(), times.size(), tcache);

  DynamicImage out;
  out.grid = gr;
  out.times = times;
  out.frames.assign(times.size(), ComplexImage(gr));
  std::vector<cplx> tau(k);
  for (size_t ti = 0; ti < times.size(); ++ti) {
    for (int j = 0; j < k; ++j)
      tau[j] = cplx(double(tcache.out[ti * od + j]), double(tcache.out[ti * od + k + j]));
    auto& fr = out.frames[ti];
    for (size_t p = 0; p < npix; ++p) {
      const Real* op = &scache.out[p * od];
      cplx f(0);
      for (int j = 0; j < k; ++j) f += cplx(double(op[j]), double(op[k + j])) * tau[j];
      fr.v[p] = f;
    }
  }
  return out;
}

std::vector<double> default_frame_times(const traj::SpokeSet& set, int spokes_per_bin) {
  auto bins = traj::bin_spokes(set, spokes_per_bin);
  std::vector<double> t;
  t.reserve(bins.bins.size());
  for (const auto& b : bins.bins) t.push_back(b.t_center);
  return t;
}

// explicit instantiations for the two training precisions
template Model<double> make_model<double>(const ReconConfig&, const GridSpec&, double);
template Model<float> make_model<float>(const ReconConfig&, const GridSpec&, double);
template TrainContext<double> build_train_context<double>(const traj::SpokeSet&,
                                                          const phantom::CoilMaps&,
                                                          const GridSpec&, int);
template TrainContext<float> build_train_context<float>(const traj::SpokeSet&,
                                                        const phantom::CoilMaps&,
                                                        const GridSpec&, int);
template double spoke_loss<double>(const Model<double>&, const TrainContext<double>&, size_t,
                                   inr::NetGrads<double>*, inr::NetGrads<double>*);
template double spoke_loss<float>(const Model<float>&, const TrainContext<float>&, size_t,
                                  inr::NetGrads<float>*, inr::NetGrads<float>*);
template double mean_spoke_loss<double>(const Model<double>&, const TrainContext<double>&,
                                        int);
template double mean_spoke_loss<float>(const Model<float>&, const TrainContext<float>&, int);
template void fine_tune<double>(Model<double>&, const TrainContext<double>&,
                                const ReconConfig&, TrainLog&);
template void fine_tune<float>(Model<float>&, const TrainContext<float>&, const ReconConfig&,
                               TrainLog&);
template void fit_to_bases<double>(Model<double>&, const BasisTargets&, const ReconConfig&,
                                   TrainLog&);
template void fit_to_bases<float>(Model<float>&, const BasisTargets&, const ReconConfig&,
                                  TrainLog&);
template DynamicImage infer<double>(const Model<double>&, const std::vector<double>&);
template DynamicImage infer<float>(const Model<float>&, const std::vector<double>&);

}  // namespace dynrad::recon
