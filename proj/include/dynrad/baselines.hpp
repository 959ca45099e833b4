#pragma once
// Reference reconstructions: density-compensated adjoint gridding per bin
// ("nufft") and the temporally regularized gradient-descent reconstruction
// ("grasp") run at full resolution. Both produce one frame per bin at the
// bin-center time.

#include <vector>

#include "dynrad/common.hpp"
#include "dynrad/phantom.hpp"
#include "dynrad/subspace.hpp"
#include "dynrad/trajectory.hpp"

namespace dynrad::baselines {

// Per bin: ring-area density-compensated direct adjoint of the bin's spokes,
// coil-combined as sum_c conj(S_c) x_c / sum_c |S_c|^2.
DynamicImage nufft_baseline(const traj::SpokeSet& set, const phantom::CoilMaps& coils,
                            int spokes_per_bin, const GridSpec& grid, int n_threads = 1);

// Full-resolution temporally regularized reconstruction (same core as the
// low-resolution initialization stage, on the full grid).
DynamicImage grasp_baseline(const traj::SpokeSet& set, const phantom::CoilMaps& coils,
                            const subspace::GraspConfig& cfg, const GridSpec& grid,
                            int n_threads = 1, std::vector<double>* objective_trace = nullptr);

}  // namespace dynrad::baselines
