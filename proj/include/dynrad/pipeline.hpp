#pragma once

#include <string>

#include "dynrad/baselines.hpp"
#include "dynrad/config.hpp"
#include "dynrad/io.hpp"
#include "dynrad/metrics.hpp"
#include "dynrad/recon.hpp"

// End-to-end commands shared by the command-line tool and the acceptance
// harness. Each command reads/writes files under an output directory and
// returns the paths it produced, so callers can chain them.

namespace dynrad::pipeline {

struct SimulateResult {
  std::string spokes_path;
  std::string truth_path;
  double noise_sigma = 0.0;  // per-component std dev actually applied (0 when disabled)
};

// Generate the analytic acquisition: golden-angle spokes with closed-form
// multi-coil k-space samples, optional calibrated complex noise, plus the
// coil-free ground-truth movie rendered at the frame times used downstream.
SimulateResult cmd_simulate(const config::ExperimentConfig& cfg, const std::string& out_dir);

struct ReconstructOptions {
  bool skip_init = false;   // start fine-tuning from random network weights
  bool dump_stages = false; // write intermediate products of each stage
};

struct ReconstructResult {
  std::string checkpoint_path;
  std::string recon_path;
  std::string trainlog_path;
  double final_loss = 0.0;  // mean per-spoke data-consistency loss after training
};

// Full scan-specific reconstruction: initialization chain (low-res compressed
// sensing -> rank factorization -> upsampling -> network fitting), then
// per-spoke fine-tuning, then rendering at the frame times.
ReconstructResult cmd_reconstruct(const config::ExperimentConfig& cfg,
                                  const std::string& spokes_path, const std::string& out_dir,
                                  const ReconstructOptions& opt = {});

// method is "nufft" or "grasp"; spokes_per_bin <= 0 means the config default.
// Returns the path of the written movie.
std::string cmd_baseline(const config::ExperimentConfig& cfg, const std::string& spokes_path,
                         const std::string& method, int spokes_per_bin,
                         const std::string& out_dir);

// Reference-free metrics (SNR, edge sharpness) always; fidelity vs the truth
// movie when truth_path is non-empty. Writes metrics.csv into out_dir.
metrics::MetricsReport cmd_evaluate(const config::ExperimentConfig& cfg,
                                    const std::string& recon_path, const std::string& truth_path,
                                    const std::string& out_dir);

struct ExportOptions {
  std::string format = "pgm";  // pgm | png | csv
  int frame = 0;
  double window_lo = 0.0;      // magnitude display window; hi <= lo selects
  double window_hi = 0.0;      // [0, max|frame|] automatically
  int row = -1;                // csv only: >= 0 exports the x-t profile of this row
};

// Render one frame (or an x-t profile) of a stored movie to an image/CSV file.
// Returns the path of the written file.
std::string cmd_export(const std::string& image_path, const ExportOptions& opt,
                       const std::string& out_dir);

// Helpers shared with tests. noise_sigma (optional) receives the
// per-component noise standard deviation that was applied.
traj::SpokeSet simulate_spokes(const config::ExperimentConfig& cfg, const phantom::CoilMaps& coils,
                               double* noise_sigma = nullptr);
DynamicImage render_truth(const config::ExperimentConfig& cfg, const std::vector<double>& times);
metrics::MetricsReport evaluate_movie(const config::ExperimentConfig& cfg, const DynamicImage& rec,
                                      const DynamicImage* truth);

}  // namespace dynrad::pipeline
