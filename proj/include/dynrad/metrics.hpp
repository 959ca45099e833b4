#pragma once
// Evaluation metrics: reference-free SNR over ROI patches and edge sharpness
// along line profiles, plus ground-truth NRMSE/PSNR (magnitude images) and
// x-t profile extraction.

#include <string>
#include <vector>

#include "dynrad/common.hpp"

namespace dynrad::metrics {

// Axis-aligned pixel rectangle [x0, x0+w) x [y0, y0+h).
struct Roi {
  int x0 = 0, y0 = 0, w = 0, h = 0;
  bool valid_in(int nx, int ny) const {
    return w > 0 && h > 0 && x0 >= 0 && y0 >= 0 && x0 + w <= nx && y0 + h <= ny;
  }
  bool overlaps(const Roi& o) const {
    return x0 < o.x0 + o.w && o.x0 < x0 + w && y0 < o.y0 + o.h && o.y0 < y0 + h;
  }
};

// 10*log10(Ps/Pn) where Ps/Pn are the mean magnitudes over the two patches.
double snr_db(const ComplexImage& frame, const Roi& signal, const Roi& noise);

// Inverse distance (1/mm) between the first crossings of 20% and 80% of the
// profile's maximum, with linear sub-sample interpolation.
double edge_sharpness(const std::vector<double>& values, double spacing_mm);

// NRMSE over magnitudes (Frobenius) and PSNR from the max truth magnitude.
// Identical inputs give NRMSE 0 and PSNR +inf (reported as a sentinel).
struct FidelityResult {
  double nrmse = 0.0;
  double psnr_db = 0.0;
};
FidelityResult nrmse_psnr(const DynamicImage& recon, const DynamicImage& truth);

// Magnitude of row y_index across all frames; out[ix*T + t].
struct XtProfile {
  int nx = 0, T = 0;
  std::vector<double> m;
  double at(int ix, int t) const { return m[size_t(ix) * T + t]; }
};
XtProfile xt_profile(const DynamicImage& dyn, int y_index);

// Root-mean-square difference between two x-t profiles of equal shape.
double xt_rmse(const XtProfile& a, const XtProfile& b);

struct MetricsReport {
  double snr_systole_db = 0.0, snr_diastole_db = 0.0;
  std::vector<double> es_systole, es_diastole;  // per profile, 1/mm
  double es_systole_mean = 0.0, es_diastole_mean = 0.0;
  bool has_truth = false;
  double nrmse = 0.0, psnr_db = 0.0;
};

// Single header + single data row; ground-truth columns empty when absent.
std::string metrics_csv(const MetricsReport& r);

}  // namespace dynrad::metrics
