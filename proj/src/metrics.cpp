#include "dynrad/metrics.hpp"

#include <charconv>
#include <cmath>
#include <limits>

namespace dynrad::metrics {

namespace {

double mean_magnitude(const ComplexImage& frame, const Roi& r) {
  double s = 0;
  for (int ix = r.x0; ix < r.x0 + r.w; ++ix)
    for (int iy = r.y0; iy < r.y0 + r.h; ++iy) s += std::abs(frame.at(ix, iy));
  return s / (double(r.w) * r.h);
}

// Shortest decimal form that parses back to the same double.
std::string fmt(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

double snr_db(const ComplexImage& frame, const Roi& signal, const Roi& noise) {
  const int nx = frame.grid.nx, ny = frame.grid.ny;
  if (!signal.valid_in(nx, ny) || !noise.valid_in(nx, ny))
    throw ConfigError("snr: ROI empty or out of the frame");
  if (signal.overlaps(noise)) throw ConfigError("snr: signal and noise ROIs overlap");
  const double ps = mean_magnitude(frame, signal);
  const double pn = mean_magnitude(frame, noise);
  if (!(pn > 0)) throw NumericError("snr: degenerate noise patch (zero mean magnitude)");
  return 10.0 * std::log10(ps / pn);
}

namespace {

// Position (in samples) of the first crossing of `thr`, linearly
// interpolated; -1 if the profile never crosses it.
double first_crossing(const std::vector<double>& v, double thr) {
  for (size_t i = 0; i + 1 < v.size(); ++i) {
    if (v[i] == thr) return double(i);
    if ((v[i] - thr) * (v[i + 1] - thr) < 0)
      return double(i) + (thr - v[i]) / (v[i + 1] - v[i]);
  }
  if (!v.empty() && v.back() == thr) return double(v.size() - 1);
  return -1.0;
}

}  // namespace

double edge_sharpness(const std::vector<double>& values, double spacing_mm) {
  if (values.size() < 2) throw ConfigError("edge_sharpness: profile too short");
  if (!(spacing_mm > 0)) throw ConfigError("edge_sharpness: spacing must be positive");
  double mx = values[0];
  for (double v : values) {
    if (!(v >= 0) || !std::isfinite(v))
      throw NumericError("edge_sharpness: profile values must be finite magnitudes");
    mx = std::max(mx, v);
  }
  if (!(mx > 0)) throw NumericError("edge_sharpness: flat profile");
  const double p20 = first_crossing(values, 0.2 * mx);
  const double p80 = first_crossing(values, 0.8 * mx);
  if (p20 < 0 || p80 < 0)
    throw NumericError("edge_sharpness: profile does not span the 20%/80% thresholds");
  const double span = std::abs(p80 - p20) * spacing_mm;
  if (!(span > 0)) throw NumericError("edge_sharpness: degenerate threshold span");
  return 1.0 / span;
}

FidelityResult nrmse_psnr(const DynamicImage& recon, const DynamicImage& truth) {
  if (recon.n_frames() != truth.n_frames() || recon.n_frames() == 0)
    throw ConfigError("nrmse: frame count mismatch");
  if (recon.grid.nx != truth.grid.nx || recon.grid.ny != truth.grid.ny)
    throw ConfigError("nrmse: grid mismatch");
  for (size_t t = 0; t < recon.times.size(); ++t)
    if (std::abs(recon.times[t] - truth.times[t]) > 1e-9 * (1.0 + std::abs(truth.times[t])))
      throw ConfigError("nrmse: frame time mismatch");
  double num = 0, den = 0, mx = 0;
  size_t n = 0;
  for (size_t t = 0; t < recon.n_frames(); ++t) {
    const auto& r = recon.frames[t].v;
    const auto& g = truth.frames[t].v;
    if (r.size() != g.size()) throw ConfigError("nrmse: frame size mismatch");
    for (size_t p = 0; p < r.size(); ++p) {
      const double a = std::abs(r[p]), b = std::abs(g[p]);
      num += (a - b) * (a - b);
      den += b * b;
      mx = std::max(mx, b);
      ++n;
    }
  }
  if (!(den > 0)) throw NumericError("nrmse: zero-magnitude truth");
  FidelityResult out;
  out.nrmse = std::sqrt(num / den);
  if (num == 0) {
    out.psnr_db = std::numeric_limits<double>::infinity();
  } else {
    const double rmse = std::sqrt(num / double(n));
    out.psnr_db = 20.0 * std::log10(mx / rmse);
  }
  return out;
}

XtProfile xt_profile(const DynamicImage& dyn, int y_index) {
  if (dyn.n_frames() == 0) throw ConfigError("xt_profile: no frames");
  const int nx = dyn.grid.nx, ny = dyn.grid.ny;
  if (y_index < 0 || y_index >= ny) throw ConfigError("xt_profile: row index out of range");
  XtProfile out;
  out.nx = nx;
  out.T = (int)dyn.n_frames();
  out.m.resize(size_t(nx) * out.T);
  for (int t = 0; t < out.T; ++t)
    for (int ix = 0; ix < nx; ++ix)
      out.m[size_t(ix) * out.T + t] = std::abs(dyn.frames[t].at(ix, y_index));
  return out;
}

double xt_rmse(const XtProfile& a, const XtProfile& b) {
  if (a.nx != b.nx || a.T != b.T || a.m.size() != b.m.size())
    throw ConfigError("xt_rmse: profile shape mismatch");
  double s = 0;
  for (size_t i = 0; i < a.m.size(); ++i) {
    const double d = a.m[i] - b.m[i];
    s += d * d;
  }
  return std::sqrt(s / double(a.m.size()));
}

std::string metrics_csv(const MetricsReport& r) {
  std::string head = "snr_systole_db,snr_diastole_db,es_systole_mean,es_diastole_mean";
  std::string row = fmt(r.snr_systole_db) + "," + fmt(r.snr_diastole_db) + "," +
                    fmt(r.es_systole_mean) + "," + fmt(r.es_diastole_mean);
  for (size_t i = 0; i < r.es_systole.size(); ++i) {
    head += ",es_systole_" + std::to_string(i + 1);
    row += "," + fmt(r.es_systole[i]);
  }
  for (size_t i = 0; i < r.es_diastole.size(); ++i) {
    head += ",es_diastole_" + std::to_string(i + 1);
    row += "," + fmt(r.es_diastole[i]);
  }
  head += ",nrmse,psnr_db";
  if (r.has_truth)
    row += "," + fmt(r.nrmse) + "," + fmt(r.psnr_db);
  else
    row += ",,";
  return head + "\n" + row + "\n";
}

}  // namespace dynrad::metrics
