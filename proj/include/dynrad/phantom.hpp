#pragma once
// Analytic dynamic phantom: a sum of Gaussian blobs whose centers and widths
// follow truncated Fourier series in time (period T_card), plus analytic
// complex Gaussian coil sensitivities. Because blob x coil is again a
// Gaussian, the coil-weighted k-space has a closed form — the acquisition
// oracle never touches the reconstruction grid or its FFT.

#include <vector>

#include "dynrad/common.hpp"

namespace dynrad::phantom {

// value(t) = c0 + sum_h ( a_h*cos(2*pi*h*t/T) + b_h*sin(2*pi*h*t/T) )
struct FourierSeries {
  double c0 = 0.0;
  std::vector<double> a;  // cos coefficients, harmonic h = 1..H
  std::vector<double> b;  // sin coefficients

  double eval(double t, double T) const;
  static FourierSeries constant(double c) { return FourierSeries{c, {}, {}}; }
};

struct Blob {
  cplx amplitude{1.0, 0.0};
  FourierSeries cx, cy;   // center (mm)
  FourierSeries sigma;    // width (mm)
};

struct PhantomSpec {
  std::vector<Blob> blobs;
  double t_card = 0.8;  // seconds

  void validate(double min_sigma_mm, double fov) const;
};

struct CoilMaps {
  // Analytic form: S_j(r) = gain_j * exp(-|r - mu_j|^2 / (2*tau_j^2)).
  // uniform[j] marks the tau->infinity limit (constant sensitivity gain_j).
  std::vector<cplx> gain;
  std::vector<double> mu_x, mu_y, tau;
  std::vector<char> uniform;

  int n_coils() const { return (int)gain.size(); }
  bool analytic() const { return !gain.empty(); }
  cplx eval(int j, double x, double y) const;
  // Evaluate all coils on a grid (row-major per coil).
  std::vector<ComplexImage> rasterize(const GridSpec& g) const;
};

// Image value of the (coil-free) phantom at an arbitrary point and time.
cplx eval_phantom(const PhantomSpec& spec, double t, double x, double y);

// Pixel (ix,iy) = sum of blobs at the pixel-center coordinate.
ComplexImage render_frame(const PhantomSpec& spec, double t, const GridSpec& grid);

// Exact k-space of the coil-weighted phantom: per coil j, per k-point,
//   sum_blobs amp * gain_j * K * 2*pi*sig'^2 * exp(-2*pi^2*sig'^2|k|^2)
//                  * exp(-2*pi*i k.c')
// with sig'^2 = sig^2 tau^2/(sig^2+tau^2), c' the product-Gaussian center and
// K the product-Gaussian amplitude factor. Convention:
//   F(k) = integral f(r) exp(-2*pi*i k.r) dr.
// Returns [n_coils][n_k].
std::vector<std::vector<cplx>> analytic_kspace(const PhantomSpec& spec,
                                               const CoilMaps& coils, double t,
                                               const std::vector<std::pair<double, double>>& k_points);

// Coil centers on a circle around the FOV, widths ~0.6*fov, distinct complex
// gain phases; deterministic per seed. n_coils == 1 returns the uniform coil.
CoilMaps make_coil_maps(int n_coils, const GridSpec& grid, uint64_t seed);

// The default beating-heart-like scene used by the experiments (see config).
PhantomSpec make_default_phantom();

}  // namespace dynrad::phantom
