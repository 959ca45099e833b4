#pragma once
// Tiny-golden-angle radial trajectory: spoke geometry and timing, ramp
// weights for the training loss, density compensation for adjoint gridding,
// and the contiguous temporal binning used by the baselines.

#include <vector>

#include "dynrad/common.hpp"

namespace dynrad::traj {

struct SpokeGeometry {
  int index = 0;
  double angle_deg = 0.0;  // in [0, 180)
  double t = 0.0;          // seconds, = index * TR
  int M = 0;               // samples per spoke (even)
  double dk = 0.0;         // 1/fov, 1/mm

  // Sample m sits at (m - M/2)*dk*(cos theta, sin theta); DC at m = M/2.
  std::pair<double, double> k_at(int m) const;
};

struct SpokeSet {
  std::vector<SpokeGeometry> geo;
  // samples[i][c][m], complex measurement of spoke i, coil c, sample m.
  std::vector<std::vector<std::vector<cplx>>> samples;
  double tr = 0.0;  // seconds
  double fov = 0.0; // mm

  int n_spokes() const { return (int)geo.size(); }
  int n_coils() const { return samples.empty() ? 0 : (int)samples[0].size(); }
  int M() const { return geo.empty() ? 0 : geo[0].M; }
};

struct RampWeights {
  std::vector<double> w;  // w_m = |m - M/2| / (M/2); w[M/2] = 0, max = 1
};

struct BinnedSpokeSet {
  struct Bin {
    std::vector<int> members;  // spoke indices, contiguous in time
    double t_center = 0.0;     // mean of member times
  };
  std::vector<Bin> bins;
  int spokes_per_bin = 0;
  int dropped = 0;  // trailing spokes that did not fill a bin
};

// theta_i = (i*psi) mod 180 degrees; t_i = i*TR.
std::vector<SpokeGeometry> golden_angle_geometry(int n_spokes, int M, double fov,
                                                 double tr, double psi_deg);

RampWeights ramp_weights(int M);

// Contiguous grouping; remainder dropped (reported in .dropped).
BinnedSpokeSet bin_spokes(const SpokeSet& s, int spokes_per_bin);

// d_m proportional to max(|m - M/2|, 1/2), normalized so sum = M.
std::vector<double> density_compensation(int M);

}  // namespace dynrad::traj
