#pragma once
// Scan-specific reconstruction: a rank-k spatiotemporal factorization whose
// spatial and temporal factors are coordinate networks, trained directly
// against individual measured spokes through the projection + 1D DFT forward
// model. Initialization fits the networks to interpolated subspace bases;
// fine-tuning minimizes the ramp-weighted k-space data term spoke by spoke.

#include <memory>
#include <string>
#include <vector>

#include "dynrad/common.hpp"
#include "dynrad/fourier.hpp"
#include "dynrad/inr.hpp"
#include "dynrad/phantom.hpp"
#include "dynrad/subspace.hpp"
#include "dynrad/trajectory.hpp"

namespace dynrad::recon {

enum class Precision { f64, f32 };

struct ReconConfig {
  int rank = 6;
  int hidden = 64;
  int init_steps = 1000;
  double init_lr = 0.01;
  int finetune_iters = 150;
  double finetune_lr = 3e-5;
  int freeze_temporal_iters = 10;
  int spokes_per_batch = 0;  // 0 = all spokes per step (full batch)
  inr::HashGridConfig spatial_grid;   // dim 2
  inr::HashGridConfig temporal_grid;  // dim 1
  Precision precision = Precision::f64;
  uint64_t seed = 0;
  int n_threads = 1;

  ReconConfig() {
    spatial_grid.dim = 2;
    temporal_grid.dim = 1;
  }
  void validate() const;
};

struct TrainLogRow {
  std::string phase;
  int iter = 0;
  double loss = 0.0;
  double elapsed_s = 0.0;
  int temporal_frozen = 0;
  // CRC32 of the temporal network's parameter bytes after this step; lets a
  // log reader verify the freeze contract without model snapshots.
  uint32_t temporal_crc = 0;
};

struct TrainLog {
  std::vector<TrainLogRow> rows;
  void add(const std::string& phase, int iter, double loss, double elapsed_s, int frozen,
           uint32_t temporal_crc = 0) {
    rows.push_back({phase, iter, loss, elapsed_s, frozen, temporal_crc});
  }
};

// CRC32 over all parameter bytes of a network (tables then MLP layers).
template <typename Real>
uint32_t network_crc(const inr::CoordinateNetwork<Real>& net);

// The trained object: one spatial net (2D -> 2k reals = k complex basis
// maps) and one temporal net (1D -> k complex weights). Frame value at
// (r, t) is sum_j s_j(r) * tau_j(t).
template <typename Real>
struct Model {
  inr::CoordinateNetwork<Real> spatial, temporal;
  int rank = 0;
  GridSpec grid;       // target image grid
  double t_max = 0.0;  // temporal normalization constant (n_spokes * TR)
};

template <typename Real>
Model<Real> make_model(const ReconConfig& cfg, const GridSpec& grid, double t_max);

// Targets for the initialization fit (interpolated subspace bases).
struct BasisTargets {
  int k = 0;
  GridSpec grid;
  std::vector<ComplexImage> spatial;        // k maps on `grid`
  std::vector<double> times;                // N instants (the spoke times)
  std::vector<std::vector<cplx>> temporal;  // [N][k]
};

BasisTargets targets_from_model(const subspace::SubspaceModel& m);

// Independent MSE fits of the two networks to the targets (spatial over all
// grid pixel centers, temporal over all target instants), cfg.init_steps
// Adam steps at cfg.init_lr each.
template <typename Real>
void fit_to_bases(Model<Real>& model, const BasisTargets& targets, const ReconConfig& cfg,
                  TrainLog& log);

// Precomputed per-spoke training data: in-FOV rotated-lattice points with
// normalized coordinates, per-point coil values, measured samples, ramp
// weights. Immutable during training.
template <typename Real>
struct SpokeWork {
  int index = 0;
  double t_norm = 0.0;            // spoke time / t_max
  uint32_t n_pts = 0;
  std::vector<int32_t> a;         // readout bucket per point
  std::vector<double> coords;     // [n_pts*2] normalized (x,y) in [0,1]
  std::vector<Real> coil;         // [n_pts*nc*2] re,im, point-major
  std::vector<cplx> y;            // [nc*M] measured samples
};

template <typename Real>
struct TrainContext {
  std::vector<SpokeWork<Real>> spokes;
  std::unique_ptr<fourier::CentredDft> dft;  // readout-length DFT
  std::vector<double> w2;                    // squared ramp weights [M]
  int nc = 0, M = 0;
  double dp = 0.0;    // lattice spacing
  double t_max = 0.0;
  GridSpec grid;
};

template <typename Real>
TrainContext<Real> build_train_context(const traj::SpokeSet& set,
                                       const phantom::CoilMaps& coils, const GridSpec& grid,
                                       int n_threads);

// Data-consistency loss of one spoke:
//   sum_c sum_m w_m^2 |yhat_c[m] - y_c[m]|^2 / (n_coils * M),
// yhat = dp^2 * DFT(projection of coil * sum_j s_j tau_j over the lattice).
// If gs/gt are non-null, accumulates dense parameter gradients (not divided
// by the spoke count).
template <typename Real>
double spoke_loss(const Model<Real>& model, const TrainContext<Real>& ctx, size_t spoke,
                  inr::NetGrads<Real>* gs = nullptr, inr::NetGrads<Real>* gt = nullptr);

// Mean spoke loss over all spokes, no gradients (evaluation only).
template <typename Real>
double mean_spoke_loss(const Model<Real>& model, const TrainContext<Real>& ctx,
                       int n_threads);

// Full-batch fine-tuning: each iteration runs every spoke, averages the
// gradients over spokes, and takes one Adam step per network at
// cfg.finetune_lr. The temporal network is frozen (no Adam step, state not
// advanced) for the first cfg.freeze_temporal_iters iterations. Logs one row
// per iteration (pre-update loss) plus a "final" row after the last update.
template <typename Real>
void fine_tune(Model<Real>& model, const TrainContext<Real>& ctx, const ReconConfig& cfg,
               TrainLog& log);

// Evaluate the factorization on its grid at the given times (each must lie
// within [0, t_max]). Deterministic: same model + times -> identical output.
template <typename Real>
DynamicImage infer(const Model<Real>& model, const std::vector<double>& times);

// Bin-center times of contiguous spokes_per_bin groups (the default output
// frame times: 800 spokes at 20/bin -> 40 frames).
std::vector<double> default_frame_times(const traj::SpokeSet& set, int spokes_per_bin);

}  // namespace dynrad::recon
