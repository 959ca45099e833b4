#pragma once
// Initialization chain: center-crop spokes to low resolution, reconstruct
// binned frames with a monotone gradient-descent GRASP (temporal total
// variation, Charbonnier-smoothed), factorize the Casorati matrix by SVD
// into rank-k spatial/temporal bases, and interpolate those bases to full
// spatial and temporal resolution.

#include <vector>

#include "dynrad/common.hpp"
#include "dynrad/fourier.hpp"
#include "dynrad/phantom.hpp"
#include "dynrad/trajectory.hpp"

namespace dynrad::subspace {

struct SubspaceModel {
  int k = 0;
  GridSpec grid;
  std::vector<ComplexImage> spatial;         // k basis maps (U_j * sigma_j)
  std::vector<std::vector<cplx>> temporal;   // [T][k], rows conj(V)
  std::vector<double> frame_times;           // length T

  int T() const { return (int)temporal.size(); }
};

struct GraspConfig {
  int iterations = 100;
  double tv_weight = 0.025;
  int spokes_per_bin = 20;
  double lowres_fraction = 1.0 / 2.56;
  double charbonnier_eps = 1e-7;
  int power_iters = 20;

  void validate() const {
    if (iterations < 1 || spokes_per_bin < 1 || !(tv_weight >= 0) ||
        !(lowres_fraction > 0) || lowres_fraction > 1.0)
      throw ConfigError("grasp config values out of range");
  }
};

// Retain the central lround(M*fraction) samples (bumped up to even). The DC
// sample stays at the new center index M_low/2.
traj::SpokeSet crop_center(const traj::SpokeSet& s, double fraction);

// Ring-area density weights for the calibrated adjoint, folded with the dx^2
// already inside adjoint_radial: w_m = pi*max(|m-M/2|,1/2)*dk^2/(S*dx^2).
// With these, adjoint_radial approximates the inverse Fourier integral of a
// bin of S spokes at correct absolute scale.
std::vector<double> area_dcf(int M, double dk, double dx, int spokes_per_bin);

// Gradient descent on sum_b ||A_b x_b - y_b||^2 + lambda*sum Charbonnier
// (see decisions in the implementation). Frames at bin-center times.
DynamicImage grasp_core(const traj::SpokeSet& s, const traj::BinnedSpokeSet& bins,
                        const phantom::CoilMaps& coils, const GraspConfig& cfg,
                        const GridSpec& grid, int n_threads,
                        std::vector<double>* objective_trace = nullptr);

// Spec-level entry: bins with cfg.spokes_per_bin, reconstructs on the
// low-res grid implied by the (already cropped) spoke set.
DynamicImage grasp_reconstruct(const traj::SpokeSet& lowres, const phantom::CoilMaps& coils,
                               const GraspConfig& cfg, int n_threads = 1,
                               std::vector<double>* objective_trace = nullptr);

// Casorati SVD, retaining k components; singular values absorbed into the
// spatial maps, temporal rows conjugated so frame_t = sum_j spatial_j *
// temporal[t][j].
SubspaceModel svd_subspace(const DynamicImage& dyn, int k);

// Bilinear spatial upsample (edge-clamped) to lround(nx*spatial_factor);
// linear temporal interpolation onto T*temporal_factor instants spaced
// dt/temporal_factor and centered on the original instants (for
// temporal_factor == spokes_per_bin these are exactly the spoke times).
SubspaceModel interpolate_bases(const SubspaceModel& m, double spatial_factor,
                                int temporal_factor);

// Linear interpolation with end clamping (shared helper, exposed for tests).
cplx interp_clamped(const std::vector<double>& ts, const std::vector<cplx>& vs, double t);

}  // namespace dynrad::subspace
