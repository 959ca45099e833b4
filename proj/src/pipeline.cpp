#include "dynrad/pipeline.hpp"

#include <cmath>
#include <filesystem>

namespace dynrad::pipeline {

namespace {

std::string join(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

void ensure_dir(const std::string& dir) {
  if (dir.empty()) throw ConfigError("output directory must not be empty");
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + dir + ": " + ec.message());
}

// Runs one named pipeline stage; failures keep their class (bad input vs
// numeric breakdown) but gain the stage name.
template <typename F>
auto run_stage(const char* name, F&& f) {
  try {
    return f();
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("stage ") + name + ": " + e.what());
  } catch (const NumericError& e) {
    throw NumericError(std::string("stage ") + name + ": " + e.what());
  } catch (const std::exception& e) {
    throw NumericError(std::string("stage ") + name + ": " + e.what());
  }
}

}  // namespace

traj::SpokeSet simulate_spokes(const config::ExperimentConfig& cfg, const phantom::CoilMaps& coils,
                               double* noise_sigma) {
  const GridSpec grid = cfg.grid();
  traj::SpokeSet set;
  set.geo =
      traj::golden_angle_geometry(cfg.n_spokes, cfg.samples_per_spoke, cfg.fov, cfg.tr, cfg.psi_deg);
  set.tr = cfg.tr;
  set.fov = cfg.fov;
  set.samples.resize(set.geo.size());
  parallel_for(set.geo.size(), cfg.threads, [&](size_t i) {
    const auto& g = set.geo[i];
    std::vector<std::pair<double, double>> kpts(size_t(g.M));
    for (int m = 0; m < g.M; ++m) kpts[size_t(m)] = g.k_at(m);
    set.samples[i] = phantom::analytic_kspace(cfg.scene, coils, g.t, kpts);
  });

  double sigma = 0.0;
  if (cfg.noise_enabled) {
    double power = 0.0;
    size_t n = 0;
    for (const auto& sp : set.samples)
      for (const auto& ch : sp)
        for (cplx y : ch) {
          power += std::norm(y);
          ++n;
        }
    const double rms = std::sqrt(power / double(n));
    sigma = rms * std::pow(10.0, -cfg.target_snr_db / 20.0);
    // Fixed draw order (spoke, coil, sample) and a hand-rolled Box-Muller so
    // the realization depends only on the seed, not the standard library.
    auto rng = make_rng(cfg.seed, "noise");
    auto unif = [&rng]() { return double(rng() >> 11) * 0x1.0p-53; };  // [0, 1)
    const double s2 = sigma / std::sqrt(2.0);
    for (auto& sp : set.samples)
      for (auto& ch : sp)
        for (cplx& y : ch) {
          const double u1 = unif(), u2 = unif();
          const double r = std::sqrt(-2.0 * std::log1p(-u1));
          y += s2 * cplx(r * std::cos(2.0 * kPi * u2), r * std::sin(2.0 * kPi * u2));
        }
  }
  if (noise_sigma) *noise_sigma = sigma;
  (void)grid;
  return set;
}

DynamicImage render_truth(const config::ExperimentConfig& cfg, const std::vector<double>& times) {
  DynamicImage dyn;
  dyn.grid = cfg.grid();
  dyn.times = times;
  dyn.frames.resize(times.size());
  parallel_for(times.size(), cfg.threads,
               [&](size_t i) { dyn.frames[i] = phantom::render_frame(cfg.scene, times[i], dyn.grid); });
  return dyn;
}

SimulateResult cmd_simulate(const config::ExperimentConfig& cfg, const std::string& out_dir) {
  cfg.validate();
  ensure_dir(out_dir);
  const GridSpec grid = cfg.grid();
  const phantom::CoilMaps coils = phantom::make_coil_maps(cfg.n_coils, grid, cfg.seed);
  SimulateResult res;
  traj::SpokeSet set =
      run_stage("acquire", [&] { return simulate_spokes(cfg, coils, &res.noise_sigma); });
  res.spokes_path = join(out_dir, "spokes.bin");
  io::save_spokes(res.spokes_path, set, coils);

  const std::vector<double> times = recon::default_frame_times(set, cfg.frames_spokes_per_bin);
  const DynamicImage truth = run_stage("truth", [&] { return render_truth(cfg, times); });
  res.truth_path = join(out_dir, "truth.bin");
  io::save_dynamic(res.truth_path, truth);
  return res;
}

namespace {

io::Container bases_container(const subspace::SubspaceModel& m) {
  io::Container c;
  const uint64_t k = uint64_t(m.k), T = uint64_t(m.T());
  const uint64_t nx = uint64_t(m.grid.nx), ny = uint64_t(m.grid.ny);
  std::vector<cplx> sp(k * nx * ny);
  for (uint64_t j = 0; j < k; ++j)
    std::copy(m.spatial[j].v.begin(), m.spatial[j].v.end(), sp.begin() + j * nx * ny);
  c.add(io::Tensor::from_c128("spatial", {k, nx, ny}, sp.data()));
  std::vector<cplx> tm(T * k);
  for (uint64_t t = 0; t < T; ++t)
    std::copy(m.temporal[t].begin(), m.temporal[t].end(), tm.begin() + t * k);
  c.add(io::Tensor::from_c128("temporal", {T, k}, tm.data()));
  c.add(io::Tensor::from_f64("times", {T}, m.frame_times.data()));
  const double gmeta[3] = {double(m.grid.nx), double(m.grid.ny), m.grid.fov};
  c.add(io::Tensor::from_f64("grid", {3}, gmeta));
  return c;
}

template <typename Real>
ReconstructResult run_reconstruct(const config::ExperimentConfig& cfg, const io::LoadedSpokes& ls,
                                  const std::string& out_dir, const ReconstructOptions& opt) {
  const GridSpec grid = cfg.grid();
  recon::ReconConfig rc = cfg.recon;
  rc.seed = cfg.seed;
  rc.n_threads = cfg.threads;
  const double t_max = double(ls.set.n_spokes()) * ls.set.tr;

  recon::TrainLog log;
  recon::Model<Real> model =
      run_stage("make_model", [&] { return recon::make_model<Real>(rc, grid, t_max); });

  if (!opt.skip_init) {
    const traj::SpokeSet cropped =
        run_stage("crop", [&] { return subspace::crop_center(ls.set, cfg.grasp.lowres_fraction); });
    const DynamicImage lowres = run_stage(
        "grasp", [&] { return subspace::grasp_reconstruct(cropped, ls.coils, cfg.grasp, rc.n_threads); });
    if (opt.dump_stages) io::save_dynamic(join(out_dir, "stage_grasp.bin"), lowres);
    const subspace::SubspaceModel bases =
        run_stage("svd", [&] { return subspace::svd_subspace(lowres, rc.rank); });
    const double sf = double(grid.nx) / double(lowres.grid.nx);
    const subspace::SubspaceModel full = run_stage(
        "interpolate", [&] { return subspace::interpolate_bases(bases, sf, cfg.grasp.spokes_per_bin); });
    if (opt.dump_stages) io::write_container(join(out_dir, "stage_bases.bin"), bases_container(full));
    run_stage("fit", [&] {
      const recon::BasisTargets targets = recon::targets_from_model(full);
      recon::fit_to_bases(model, targets, rc, log);
    });
    if (opt.dump_stages) {
      const std::vector<double> times = recon::default_frame_times(ls.set, cfg.frames_spokes_per_bin);
      io::save_dynamic(join(out_dir, "stage_init.bin"), recon::infer(model, times));
    }
  }

  const recon::TrainContext<Real> ctx = run_stage(
      "train_context", [&] { return recon::build_train_context<Real>(ls.set, ls.coils, grid, rc.n_threads); });
  run_stage("fine_tune", [&] { recon::fine_tune(model, ctx, rc, log); });
  const std::vector<double> times = recon::default_frame_times(ls.set, cfg.frames_spokes_per_bin);
  const DynamicImage movie = run_stage("infer", [&] { return recon::infer(model, times); });

  ReconstructResult r;
  r.checkpoint_path = join(out_dir, "checkpoint.bin");
  r.recon_path = join(out_dir, "recon.bin");
  r.trainlog_path = join(out_dir, "trainlog.csv");
  io::save_checkpoint(r.checkpoint_path, model);
  io::save_dynamic(r.recon_path, movie);
  io::write_text(r.trainlog_path, io::train_log_csv(log));
  for (const auto& row : log.rows)
    if (row.phase == "final") r.final_loss = row.loss;
  return r;
}

}  // namespace

ReconstructResult cmd_reconstruct(const config::ExperimentConfig& cfg,
                                  const std::string& spokes_path, const std::string& out_dir,
                                  const ReconstructOptions& opt) {
  cfg.validate();
  ensure_dir(out_dir);
  const io::LoadedSpokes ls = run_stage("load", [&] { return io::load_spokes(spokes_path); });
  if (std::abs(ls.set.fov - cfg.fov) > 1e-9 * std::max(1.0, cfg.fov))
    throw ConfigError("reconstruct: spoke file fov differs from config");
  if (cfg.recon.precision == recon::Precision::f64)
    return run_reconstruct<double>(cfg, ls, out_dir, opt);
  return run_reconstruct<float>(cfg, ls, out_dir, opt);
}

std::string cmd_baseline(const config::ExperimentConfig& cfg, const std::string& spokes_path,
                         const std::string& method, int spokes_per_bin,
                         const std::string& out_dir) {
  cfg.validate();
  ensure_dir(out_dir);
  const io::LoadedSpokes ls = run_stage("load", [&] { return io::load_spokes(spokes_path); });
  const GridSpec grid = cfg.grid();
  const int spb = spokes_per_bin > 0 ? spokes_per_bin : cfg.frames_spokes_per_bin;
  DynamicImage movie;
  if (method == "nufft") {
    movie = run_stage("nufft",
                      [&] { return baselines::nufft_baseline(ls.set, ls.coils, spb, grid, cfg.threads); });
  } else if (method == "grasp") {
    subspace::GraspConfig g = cfg.grasp;
    g.spokes_per_bin = spb;
    movie = run_stage("grasp",
                      [&] { return baselines::grasp_baseline(ls.set, ls.coils, g, grid, cfg.threads); });
  } else {
    throw ConfigError("baseline: unknown method '" + method + "' (expected nufft or grasp)");
  }
  const std::string path = join(out_dir, "baseline_" + method + "_" + std::to_string(spb) + ".bin");
  io::save_dynamic(path, movie);
  return path;
}

metrics::MetricsReport evaluate_movie(const config::ExperimentConfig& cfg, const DynamicImage& rec,
                                      const DynamicImage* truth) {
  const int T = int(rec.n_frames());
  if (cfg.systole_frame >= T || cfg.diastole_frame >= T)
    throw ConfigError("evaluate: phase frame index out of range (movie has " + std::to_string(T) +
                      " frames)");
  const ComplexImage& sys = rec.frames[size_t(cfg.systole_frame)];
  const ComplexImage& dia = rec.frames[size_t(cfg.diastole_frame)];

  metrics::MetricsReport r;
  r.snr_systole_db = metrics::snr_db(sys, cfg.signal_roi, cfg.noise_roi);
  r.snr_diastole_db = metrics::snr_db(dia, cfg.signal_roi, cfg.noise_roi);

  const double dx = rec.grid.dx();
  auto profile = [&](const ComplexImage& f, int row) {
    std::vector<double> v;
    v.reserve(size_t(cfg.profile_x1 - cfg.profile_x0 + 1));
    for (int ix = cfg.profile_x0; ix <= cfg.profile_x1; ++ix) v.push_back(std::abs(f.at(ix, row)));
    return v;
  };
  for (int row : cfg.profile_rows) {
    if (row < 0 || row >= rec.grid.ny) throw ConfigError("evaluate: profile row out of range");
    r.es_systole.push_back(metrics::edge_sharpness(profile(sys, row), dx));
    r.es_diastole.push_back(metrics::edge_sharpness(profile(dia, row), dx));
  }
  auto mean = [](const std::vector<double>& v) {
    double s = 0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / double(v.size());
  };
  r.es_systole_mean = mean(r.es_systole);
  r.es_diastole_mean = mean(r.es_diastole);

  if (truth) {
    const metrics::FidelityResult f = metrics::nrmse_psnr(rec, *truth);
    r.has_truth = true;
    r.nrmse = f.nrmse;
    r.psnr_db = f.psnr_db;
  }
  return r;
}

metrics::MetricsReport cmd_evaluate(const config::ExperimentConfig& cfg,
                                    const std::string& recon_path, const std::string& truth_path,
                                    const std::string& out_dir) {
  cfg.validate();
  ensure_dir(out_dir);
  const DynamicImage rec = run_stage("load", [&] { return io::load_dynamic(recon_path); });
  DynamicImage truth;
  const bool has_truth = !truth_path.empty();
  if (has_truth) truth = run_stage("load_truth", [&] { return io::load_dynamic(truth_path); });
  const metrics::MetricsReport r =
      run_stage("metrics", [&] { return evaluate_movie(cfg, rec, has_truth ? &truth : nullptr); });
  io::write_text(join(out_dir, "metrics.csv"), metrics::metrics_csv(r));
  return r;
}

std::string cmd_export(const std::string& image_path, const ExportOptions& opt,
                       const std::string& out_dir) {
  ensure_dir(out_dir);
  const DynamicImage dyn = run_stage("load", [&] { return io::load_dynamic(image_path); });
  if (opt.frame < 0 || size_t(opt.frame) >= dyn.n_frames())
    throw ConfigError("export: frame index out of range (movie has " +
                      std::to_string(dyn.n_frames()) + " frames)");
  const int nx = dyn.grid.nx, ny = dyn.grid.ny;

  if (opt.format == "csv") {
    if (opt.row >= 0) {
      if (opt.row >= ny) throw ConfigError("export: row out of range");
      const metrics::XtProfile p = metrics::xt_profile(dyn, opt.row);
      const std::string path = join(out_dir, "xt_row" + std::to_string(opt.row) + ".csv");
      io::write_text(path, io::csv_matrix(p.m, size_t(p.nx), size_t(p.T)));
      return path;
    }
    const ComplexImage& f = dyn.frames[size_t(opt.frame)];
    std::vector<double> mag(f.v.size());
    for (size_t i = 0; i < f.v.size(); ++i) mag[i] = std::abs(f.v[i]);
    const std::string path = join(out_dir, "frame" + std::to_string(opt.frame) + ".csv");
    io::write_text(path, io::csv_matrix(mag, size_t(nx), size_t(ny)));
    return path;
  }

  if (opt.format == "pgm" || opt.format == "png") {
    const ComplexImage& f = dyn.frames[size_t(opt.frame)];
    std::vector<double> mag(f.v.size());
    double mx = 0;
    for (size_t i = 0; i < f.v.size(); ++i) {
      mag[i] = std::abs(f.v[i]);
      mx = std::max(mx, mag[i]);
    }
    double lo = opt.window_lo, hi = opt.window_hi;
    if (!(hi > lo)) {
      lo = 0.0;
      hi = mx > 0 ? mx : 1.0;
    }
    const std::string path =
        join(out_dir, "frame" + std::to_string(opt.frame) + "." + opt.format);
    if (opt.format == "pgm")
      io::write_pgm(path, mag, nx, ny, lo, hi);
    else
      io::write_png(path, mag, nx, ny, lo, hi);
    return path;
  }

  throw ConfigError("export: unknown format '" + opt.format + "' (expected pgm, png or csv)");
}

}  // namespace dynrad::pipeline
