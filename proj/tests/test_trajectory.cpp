#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "dynrad/trajectory.hpp"

using namespace dynrad;
using namespace dynrad::traj;

TEST_CASE("golden-angle geometry: angles, times, sample positions") {
  const double psi = 23.62814;
  auto geo = golden_angle_geometry(800, 64, 256.0, 0.0023, psi);
  REQUIRE(geo.size() == 800);
  for (int i : {0, 1, 7, 123, 799}) {
    CHECK(geo[i].index == i);
    CHECK(geo[i].t == doctest::Approx(i * 0.0023).epsilon(1e-15));
    CHECK(geo[i].M == 64);
    CHECK(geo[i].dk == doctest::Approx(1.0 / 256.0).epsilon(1e-15));
    double want = std::fmod(i * psi, 180.0);
    CHECK(geo[i].angle_deg == doctest::Approx(want).epsilon(1e-12));
    CHECK(geo[i].angle_deg >= 0.0);
    CHECK(geo[i].angle_deg < 180.0);
  }
  // DC sample of every spoke is exactly the k-space origin
  auto [kx, ky] = geo[13].k_at(32);
  CHECK(kx == 0.0);
  CHECK(ky == 0.0);
  // neighbour spacing along the spoke is dk
  auto [x1, y1] = geo[13].k_at(33);
  CHECK(std::hypot(x1 - kx, y1 - ky) == doctest::Approx(1.0 / 256.0).epsilon(1e-12));
  // sample m sits at (m - M/2) dk along (cos, sin)
  auto [xa, ya] = geo[5].k_at(0);
  double th = geo[5].angle_deg * kPi / 180.0;
  CHECK(xa == doctest::Approx(-32.0 / 256.0 * std::cos(th)).epsilon(1e-12));
  CHECK(ya == doctest::Approx(-32.0 / 256.0 * std::sin(th)).epsilon(1e-12));
}

TEST_CASE("tiny golden angle gives distinct angles over the whole scan") {
  auto geo = golden_angle_geometry(800, 64, 256.0, 0.0023, 23.62814);
  std::vector<double> a;
  for (auto& g : geo) a.push_back(g.angle_deg);
  std::sort(a.begin(), a.end());
  double min_gap = 180.0;
  for (size_t i = 1; i < a.size(); ++i) min_gap = std::min(min_gap, a[i] - a[i - 1]);
  CHECK(min_gap > 1e-6);  // no duplicate directions within 800 spokes
}

TEST_CASE("ramp weights: zero at DC, one at the edge, symmetric") {
  RampWeights r = ramp_weights(64);
  REQUIRE(r.w.size() == 64);
  CHECK(r.w[32] == 0.0);
  CHECK(r.w[0] == 1.0);
  double mx = 0;
  for (double w : r.w) mx = std::max(mx, w);
  CHECK(mx == 1.0);
  for (int j = 1; j < 32; ++j) CHECK(r.w[32 - j] == doctest::Approx(r.w[32 + j]).epsilon(1e-15));
  CHECK(r.w[48] == doctest::Approx(16.0 / 32.0).epsilon(1e-15));
}

TEST_CASE("binning is contiguous with mean-time centers; remainder dropped") {
  auto geo = golden_angle_geometry(103, 16, 256.0, 0.002, 23.62814);
  SpokeSet s;
  s.geo = geo;
  s.tr = 0.002;
  s.fov = 256.0;
  BinnedSpokeSet b = bin_spokes(s, 20);
  REQUIRE(b.bins.size() == 5);
  CHECK(b.dropped == 3);
  CHECK(b.spokes_per_bin == 20);
  for (size_t k = 0; k < b.bins.size(); ++k) {
    REQUIRE(b.bins[k].members.size() == 20);
    double tsum = 0;
    for (size_t j = 0; j < 20; ++j) {
      CHECK(b.bins[k].members[j] == int(k * 20 + j));
      tsum += geo[k * 20 + j].t;
    }
    CHECK(b.bins[k].t_center == doctest::Approx(tsum / 20.0).epsilon(1e-15));
  }
  CHECK_THROWS_AS(bin_spokes(s, 0), ConfigError);
  CHECK_THROWS_AS(bin_spokes(s, 200), ConfigError);
}

TEST_CASE("density compensation is ramp-shaped and normalized to M") {
  auto d = density_compensation(64);
  REQUIRE(d.size() == 64);
  double sum = 0;
  for (double v : d) sum += v;
  CHECK(sum == doctest::Approx(64.0).epsilon(1e-12));
  // proportional to max(|m - M/2|, 1/2)
  CHECK(d[32 + 8] / d[32 + 4] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(d[32] / d[32 + 1] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(d[0] == doctest::Approx(d[32 + 16] * 2.0).epsilon(1e-12));
}
