#include "dynrad/trajectory.hpp"

#include <cmath>

namespace dynrad::traj {

std::pair<double, double> SpokeGeometry::k_at(int m) const {
  double th = angle_deg * kPi / 180.0;
  double r = (m - M / 2) * dk;
  return {r * std::cos(th), r * std::sin(th)};
}

std::vector<SpokeGeometry> golden_angle_geometry(int n_spokes, int M, double fov,
                                                 double tr, double psi_deg) {
  if (n_spokes < 1) throw ConfigError("n_spokes must be >= 1");
  if (psi_deg <= 0.0) throw ConfigError("golden angle must be positive");
  if (M < 2 || M % 2 != 0) throw ConfigError("readout length M must be even and >= 2");
  if (!(fov > 0.0) || !(tr > 0.0)) throw ConfigError("fov and TR must be positive");
  std::vector<SpokeGeometry> g(n_spokes);
  for (int i = 0; i < n_spokes; ++i) {
    g[i].index = i;
    g[i].angle_deg = std::fmod(double(i) * psi_deg, 180.0);
    g[i].t = i * tr;
    g[i].M = M;
    g[i].dk = 1.0 / fov;
  }
  return g;
}

RampWeights ramp_weights(int M) {
  if (M < 2 || M % 2 != 0) throw ConfigError("ramp_weights: M must be even and >= 2");
  RampWeights r;
  r.w.resize(M);
  for (int m = 0; m < M; ++m) r.w[m] = std::abs(m - M / 2) / double(M / 2);
  return r;
}

BinnedSpokeSet bin_spokes(const SpokeSet& s, int spokes_per_bin) {
  if (spokes_per_bin < 1) throw ConfigError("spokes_per_bin must be >= 1");
  int N = s.n_spokes();
  if (spokes_per_bin > N) throw ConfigError("spokes_per_bin exceeds spoke count");
  BinnedSpokeSet out;
  out.spokes_per_bin = spokes_per_bin;
  int n_bins = N / spokes_per_bin;
  out.dropped = N - n_bins * spokes_per_bin;
  out.bins.resize(n_bins);
  for (int b = 0; b < n_bins; ++b) {
    auto& bin = out.bins[b];
    double tsum = 0.0;
    for (int j = 0; j < spokes_per_bin; ++j) {
      int i = b * spokes_per_bin + j;
      bin.members.push_back(i);
      tsum += s.geo[i].t;
    }
    bin.t_center = tsum / spokes_per_bin;
  }
  return out;
}

std::vector<double> density_compensation(int M) {
  if (M < 2 || M % 2 != 0) throw ConfigError("density_compensation: M must be even");
  std::vector<double> d(M);
  double sum = 0.0;
  for (int m = 0; m < M; ++m) {
    d[m] = std::max(std::abs(double(m - M / 2)), 0.5);
    sum += d[m];
  }
  for (double& v : d) v *= M / sum;
  return d;
}

}  // namespace dynrad::traj
