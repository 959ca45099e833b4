#pragma once
// Experiment configuration: one flat key=value text file with [section]
// headers covering the whole pipeline (scene, acquisition, initialization,
// training, evaluation). Unknown keys are errors; missing keys take the
// documented defaults; serialization round-trips unchanged.

#include <string>
#include <vector>

#include "dynrad/common.hpp"
#include "dynrad/metrics.hpp"
#include "dynrad/phantom.hpp"
#include "dynrad/recon.hpp"
#include "dynrad/subspace.hpp"

namespace dynrad::config {

struct ExperimentConfig {
  // [run]
  uint64_t seed = 1;
  int threads = 1;
  // [grid]
  int nx = 64;
  double fov = 256.0;
  // [trajectory]
  int n_spokes = 800;
  int samples_per_spoke = 64;
  double tr = 0.0023;
  double psi_deg = 23.62814;
  // [coils]
  int n_coils = 6;
  // [noise]
  int noise_enabled = 1;
  double target_snr_db = 25.0;
  // [phantom]
  phantom::PhantomSpec scene;
  // [grasp]
  subspace::GraspConfig grasp;
  // [recon] + [hash_spatial] + [hash_temporal]
  recon::ReconConfig recon;  // .seed/.n_threads overwritten from [run] at use
  // [metrics]
  metrics::Roi signal_roi{25, 31, 5, 5};
  metrics::Roi noise_roi{4, 4, 5, 5};
  int systole_frame = 17;
  int diastole_frame = 8;
  std::vector<int> profile_rows{31, 32, 33, 34, 35, 36};
  int profile_x0 = 8;
  int profile_x1 = 27;
  int xt_row = 33;
  // [output]
  int frames_spokes_per_bin = 20;

  ExperimentConfig();

  GridSpec grid() const { return GridSpec{nx, nx, fov}; }
  void validate() const;
};

ExperimentConfig parse_config(const std::string& text);
std::string serialize_config(const ExperimentConfig& c);
ExperimentConfig load_config(const std::string& path);

}  // namespace dynrad::config
