#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dynrad/pipeline.hpp"

using namespace dynrad;

namespace {

// Explicit flag wins over the DYNRAD_CONFIG environment variable; with
// neither, the built-in defaults describe the standard experiment.
config::ExperimentConfig resolve_config(const std::string& config_path) {
  if (!config_path.empty()) return config::load_config(config_path);
  if (const char* env = std::getenv("DYNRAD_CONFIG"); env && *env)
    return config::load_config(env);
  return config::ExperimentConfig{};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dynrad: scan-specific reconstruction for dynamic radial MRI"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "out";
  uint64_t seed = 0;
  int threads = 0;
  app.add_option("--config", config_path, "configuration file (else $DYNRAD_CONFIG, else defaults)");
  app.add_option("--seed", seed, "override the run seed");
  app.add_option("--threads", threads, "override the worker thread count");
  app.add_option("--out", out_dir, "output directory (default: out)");

  auto* sim = app.add_subcommand("simulate", "generate k-space spokes and the ground-truth movie");
  sim->fallthrough();

  auto* rec = app.add_subcommand("reconstruct", "run the scan-specific reconstruction");
  rec->fallthrough();
  std::string spokes_path;
  bool skip_init = false, dump_stages = false;
  rec->add_option("--spokes", spokes_path, "spoke file written by simulate")->required();
  rec->add_flag("--skip-init", skip_init, "skip initialization; fine-tune from random weights");
  rec->add_flag("--dump-stages", dump_stages, "write intermediate stage products");

  auto* base = app.add_subcommand("baseline", "run a reference reconstruction");
  base->fallthrough();
  std::string b_spokes, method = "nufft";
  int spb = 0;
  base->add_option("--spokes", b_spokes, "spoke file written by simulate")->required();
  base->add_option("--method", method, "nufft | grasp (default: nufft)");
  base->add_option("--spokes-per-bin", spb, "bin size (default: config frames_spokes_per_bin)");

  auto* ev = app.add_subcommand("evaluate", "compute image-quality metrics for a movie");
  ev->fallthrough();
  std::string recon_path, truth_path;
  ev->add_option("--recon", recon_path, "reconstructed movie file")->required();
  ev->add_option("--truth", truth_path, "ground-truth movie (enables NRMSE/PSNR)");

  auto* ex = app.add_subcommand("export", "render a stored movie frame or profile");
  ex->fallthrough();
  std::string image_path, format = "pgm";
  int frame = 0, row = -1;
  std::vector<double> window;
  ex->add_option("--image", image_path, "movie file to render")->required();
  ex->add_option("--format", format, "pgm | png | csv (default: pgm)");
  ex->add_option("--frame", frame, "frame index (default: 0)");
  ex->add_option("--window", window, "LO HI magnitude display window")->expected(2);
  ex->add_option("--row", row, "csv: export the x-t profile of this image row");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // --help exits 0; bad usage is a config error
  }

  try {
    config::ExperimentConfig cfg = resolve_config(config_path);
    if (app.count("--seed")) cfg.seed = seed;
    if (app.count("--threads")) cfg.threads = threads;

    if (sim->parsed()) {
      const auto r = pipeline::cmd_simulate(cfg, out_dir);
      std::printf("wrote %s\n", r.spokes_path.c_str());
      std::printf("wrote %s\n", r.truth_path.c_str());
      if (r.noise_sigma > 0) std::printf("noise sigma per component: %.6g\n", r.noise_sigma);
    } else if (rec->parsed()) {
      const pipeline::ReconstructOptions o{skip_init, dump_stages};
      const auto r = pipeline::cmd_reconstruct(cfg, spokes_path, out_dir, o);
      std::printf("wrote %s\n", r.checkpoint_path.c_str());
      std::printf("wrote %s\n", r.recon_path.c_str());
      std::printf("wrote %s\n", r.trainlog_path.c_str());
      std::printf("final data-consistency loss: %.9e\n", r.final_loss);
    } else if (base->parsed()) {
      const std::string p = pipeline::cmd_baseline(cfg, b_spokes, method, spb, out_dir);
      std::printf("wrote %s\n", p.c_str());
    } else if (ev->parsed()) {
      const auto r = pipeline::cmd_evaluate(cfg, recon_path, truth_path, out_dir);
      std::printf("snr systole %.4f dB, diastole %.4f dB\n", r.snr_systole_db, r.snr_diastole_db);
      std::printf("edge sharpness mean systole %.6f 1/mm, diastole %.6f 1/mm\n",
                  r.es_systole_mean, r.es_diastole_mean);
      if (r.has_truth) std::printf("nrmse %.6f, psnr %.4f dB\n", r.nrmse, r.psnr_db);
      std::printf("wrote %s/metrics.csv\n", out_dir.c_str());
    } else if (ex->parsed()) {
      pipeline::ExportOptions o;
      o.format = format;
      o.frame = frame;
      o.row = row;
      if (window.size() == 2) {
        o.window_lo = window[0];
        o.window_hi = window[1];
      }
      const std::string p = pipeline::cmd_export(image_path, o, out_dir);
      std::printf("wrote %s\n", p.c_str());
    }
    return 0;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const NumericError& e) {
    std::fprintf(stderr, "numeric error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
}
