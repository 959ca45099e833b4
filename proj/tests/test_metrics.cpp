#include <cmath>
#include <cstdio>
#include <limits>

#include "doctest.h"
#include "dynrad/metrics.hpp"

using namespace dynrad;
using namespace dynrad::metrics;

namespace {

DynamicImage const_movie(int nx, int T, cplx value) {
  DynamicImage d;
  d.grid = GridSpec{nx, nx, 256.0};
  for (int t = 0; t < T; ++t) {
    d.times.push_back(0.1 * t);
    ComplexImage f(d.grid);
    std::fill(f.v.begin(), f.v.end(), value);
    d.frames.push_back(f);
  }
  return d;
}

}  // namespace

TEST_CASE("snr is 20 dB for a 100x magnitude ratio") {
  GridSpec g{16, 16, 256.0};
  ComplexImage f(g);
  Roi sig{2, 3, 4, 5}, noi{10, 10, 3, 3};
  for (int ix = sig.x0; ix < sig.x0 + sig.w; ++ix)
    for (int iy = sig.y0; iy < sig.y0 + sig.h; ++iy) f.at(ix, iy) = cplx(6.0, 8.0);  // |.| = 10
  for (int ix = noi.x0; ix < noi.x0 + noi.w; ++ix)
    for (int iy = noi.y0; iy < noi.y0 + noi.h; ++iy) f.at(ix, iy) = cplx(0.06, 0.08);
  CHECK(snr_db(f, sig, noi) == doctest::Approx(20.0).epsilon(1e-14));
  // mixed magnitudes averaging to the same mean give the same answer
  f.at(2, 3) = cplx(15.0, 0.0);
  f.at(2, 4) = cplx(3.0, 4.0);  // 15 and 5 average like two 10s
  CHECK(snr_db(f, sig, noi) == doctest::Approx(20.0).epsilon(1e-14));
}

TEST_CASE("snr rejects bad patches") {
  GridSpec g{16, 16, 256.0};
  ComplexImage f(g);
  std::fill(f.v.begin(), f.v.end(), cplx(1, 0));
  CHECK_THROWS_AS(snr_db(f, Roi{0, 0, 4, 4}, Roi{2, 2, 4, 4}), ConfigError);   // overlap
  CHECK_THROWS_AS(snr_db(f, Roi{0, 0, 0, 4}, Roi{8, 8, 4, 4}), ConfigError);   // empty
  CHECK_THROWS_AS(snr_db(f, Roi{14, 0, 4, 4}, Roi{8, 8, 4, 4}), ConfigError);  // out of frame
  CHECK_THROWS_AS(snr_db(f, Roi{-1, 0, 4, 4}, Roi{8, 8, 4, 4}), ConfigError);
  ComplexImage z(g);  // zero noise patch
  for (int ix = 0; ix < 4; ++ix)
    for (int iy = 0; iy < 4; ++iy) z.at(ix, iy) = cplx(1, 0);
  CHECK_THROWS_AS(snr_db(z, Roi{0, 0, 4, 4}, Roi{8, 8, 4, 4}), NumericError);
}

TEST_CASE("edge sharpness of a linear ramp") {
  // ramp 0 -> 1 over three 1 mm intervals: 20% at 0.6, 80% at 2.4 samples,
  // span 1.8 mm
  std::vector<double> ramp = {0.0, 1.0 / 3, 2.0 / 3, 1.0};
  CHECK(edge_sharpness(ramp, 1.0) == doctest::Approx(1.0 / 1.8).epsilon(1e-12));
  // spacing scales the answer inversely
  CHECK(edge_sharpness(ramp, 2.0) == doctest::Approx(1.0 / 3.6).epsilon(1e-12));
}

TEST_CASE("edge sharpness of a one-sample step at 2 mm spacing") {
  // crossings interpolate inside the single step interval: 1.2 and 1.8
  // samples, span 0.6 * 2 mm = 1.2 mm
  std::vector<double> step = {0.0, 0.0, 1.0, 1.0};
  CHECK(edge_sharpness(step, 2.0) == doctest::Approx(1.0 / 1.2).epsilon(1e-12));
  // a falling edge measures the same
  std::vector<double> fall = {1.0, 1.0, 0.0, 0.0};
  CHECK(edge_sharpness(fall, 2.0) == doctest::Approx(1.0 / 1.2).epsilon(1e-12));
}

TEST_CASE("edge sharpness is scale invariant and honors exact threshold hits") {
  std::vector<double> ramp = {0.0, 1.0 / 3, 2.0 / 3, 1.0};
  std::vector<double> scaled = ramp;
  for (auto& v : scaled) v *= 7.3;
  CHECK(edge_sharpness(scaled, 1.0) == doctest::Approx(edge_sharpness(ramp, 1.0)).epsilon(1e-12));

  // v[0] and v[2] hit 20% and 80% of the max exactly
  std::vector<double> exact = {0.2, 0.5, 0.8, 1.0};
  CHECK(edge_sharpness(exact, 1.0) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("edge sharpness error paths") {
  CHECK_THROWS_AS(edge_sharpness({1.0}, 1.0), ConfigError);
  CHECK_THROWS_AS(edge_sharpness({0.0, 1.0}, 0.0), ConfigError);
  CHECK_THROWS_AS(edge_sharpness({0.0, -0.5, 1.0}, 1.0), NumericError);
  CHECK_THROWS_AS(edge_sharpness({0.0, std::nan(""), 1.0}, 1.0), NumericError);
  CHECK_THROWS_AS(edge_sharpness({0.0, 0.0, 0.0}, 1.0), NumericError);   // flat
  CHECK_THROWS_AS(edge_sharpness({0.5, 0.6, 1.0}, 1.0), NumericError);   // never below 20%
}

TEST_CASE("nrmse and psnr against ground truth") {
  DynamicImage truth = const_movie(8, 3, cplx(2.0, 0.0));
  DynamicImage same = truth;
  FidelityResult id = nrmse_psnr(same, truth);
  CHECK(id.nrmse == 0.0);
  CHECK(std::isinf(id.psnr_db));

  // constant magnitude offset: nrmse = 0.5/2, psnr = 20*log10(2/0.5)
  DynamicImage off = const_movie(8, 3, cplx(2.5, 0.0));
  FidelityResult r = nrmse_psnr(off, truth);
  CHECK(r.nrmse == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(r.psnr_db == doctest::Approx(20.0 * std::log10(4.0)).epsilon(1e-14));

  // phase differences do not matter, only magnitudes
  DynamicImage rot = const_movie(8, 3, cplx(0.0, 2.0));
  CHECK(nrmse_psnr(rot, truth).nrmse == doctest::Approx(0.0));
}

TEST_CASE("nrmse input validation") {
  DynamicImage truth = const_movie(8, 3, cplx(2.0, 0.0));
  DynamicImage fewer = const_movie(8, 2, cplx(2.0, 0.0));
  CHECK_THROWS_AS(nrmse_psnr(fewer, truth), ConfigError);
  DynamicImage small = const_movie(9, 3, cplx(2.0, 0.0));
  CHECK_THROWS_AS(nrmse_psnr(small, truth), ConfigError);
  DynamicImage late = truth;
  late.times[1] += 1e-3;
  CHECK_THROWS_AS(nrmse_psnr(late, truth), ConfigError);
  DynamicImage close = truth;
  close.times[1] += 1e-12;  // below the tolerance
  CHECK_NOTHROW(nrmse_psnr(close, truth));
  DynamicImage ragged = truth;
  ragged.frames[1].v.resize(10);  // same grid field, inconsistent payload
  CHECK_THROWS_AS(nrmse_psnr(ragged, truth), ConfigError);
  DynamicImage zero = const_movie(8, 3, cplx(0.0, 0.0));
  CHECK_THROWS_AS(nrmse_psnr(truth, zero), NumericError);
  DynamicImage empty;
  CHECK_THROWS_AS(nrmse_psnr(empty, empty), ConfigError);
}

TEST_CASE("x-t profile extracts one row across frames in x-major layout") {
  DynamicImage d;
  d.grid = GridSpec{8, 8, 256.0};
  for (int t = 0; t < 2; ++t) {
    d.times.push_back(0.1 * t);
    ComplexImage f(d.grid);
    for (int ix = 0; ix < 8; ++ix)
      for (int iy = 0; iy < 8; ++iy) f.at(ix, iy) = cplx(ix + 10.0 * t, 0) * double(iy == 3);
    d.frames.push_back(f);
  }
  XtProfile p = xt_profile(d, 3);
  CHECK(p.nx == 8);
  CHECK(p.T == 2);
  REQUIRE(p.m.size() == 16u);
  for (int ix = 0; ix < 8; ++ix)
    for (int t = 0; t < 2; ++t) CHECK(p.at(ix, t) == doctest::Approx(ix + 10.0 * t));
  CHECK_THROWS_AS(xt_profile(d, 8), ConfigError);
  CHECK_THROWS_AS(xt_profile(d, -1), ConfigError);
  CHECK_THROWS_AS(xt_profile(DynamicImage{}, 0), ConfigError);

  XtProfile q = p;
  CHECK(xt_rmse(p, q) == 0.0);
  for (auto& v : q.m) v += 0.5;
  CHECK(xt_rmse(p, q) == doctest::Approx(0.5).epsilon(1e-14));
  XtProfile other;
  other.nx = 4;
  other.T = 2;
  other.m.assign(8, 0.0);
  CHECK_THROWS_AS(xt_rmse(p, other), ConfigError);
}

TEST_CASE("metrics csv: exact header and row, empty truth cells when absent") {
  MetricsReport r;
  r.snr_systole_db = 20.0;
  r.snr_diastole_db = -3.5;
  r.es_systole = {0.5};
  r.es_diastole = {0.25};
  r.es_systole_mean = 0.5;
  r.es_diastole_mean = 0.25;
  r.has_truth = false;
  CHECK(metrics_csv(r) ==
        "snr_systole_db,snr_diastole_db,es_systole_mean,es_diastole_mean,"
        "es_systole_1,es_diastole_1,nrmse,psnr_db\n"
        "20,-3.5,0.5,0.25,0.5,0.25,,\n");

  r.has_truth = true;
  r.nrmse = 0.125;
  r.psnr_db = std::numeric_limits<double>::infinity();
  CHECK(metrics_csv(r) ==
        "snr_systole_db,snr_diastole_db,es_systole_mean,es_diastole_mean,"
        "es_systole_1,es_diastole_1,nrmse,psnr_db\n"
        "20,-3.5,0.5,0.25,0.5,0.25,0.125,inf\n");

  // values that need full precision survive a round trip through the text
  MetricsReport p;
  p.snr_systole_db = 17.123456789012345;
  p.snr_diastole_db = 1.0 / 3.0;
  p.es_systole_mean = 5.0 / 9.0;
  p.es_diastole_mean = 0.8333333333333333;
  std::string csv = metrics_csv(p);
  size_t nl = csv.find('\n');
  std::string row = csv.substr(nl + 1);
  double a, b, c, d;
  REQUIRE(std::sscanf(row.c_str(), "%lf,%lf,%lf,%lf", &a, &b, &c, &d) == 4);
  CHECK(a == p.snr_systole_db);
  CHECK(b == p.snr_diastole_db);
  CHECK(c == p.es_systole_mean);
  CHECK(d == p.es_diastole_mean);
}
