#include "dynrad/phantom.hpp"

#include <cmath>

namespace dynrad::phantom {

double FourierSeries::eval(double t, double T) const {
  double w = 2.0 * kPi * t / T;
  double v = c0;
  for (size_t h = 0; h < a.size() || h < b.size(); ++h) {
    double ang = w * double(h + 1);
    if (h < a.size()) v += a[h] * std::cos(ang);
    if (h < b.size()) v += b[h] * std::sin(ang);
  }
  return v;
}

void PhantomSpec::validate(double min_sigma_mm, double fov) const {
  if (!(t_card > 0.0)) throw ConfigError("phantom t_card must be positive");
  // Sample one period densely; analytic extrema of a Fourier series are not
  // worth the trouble at validation tolerance.
  for (size_t bi = 0; bi < blobs.size(); ++bi) {
    const Blob& b = blobs[bi];
    for (int s = 0; s < 512; ++s) {
      double t = t_card * s / 512.0;
      double sig = b.sigma.eval(t, t_card);
      if (sig < min_sigma_mm)
        throw ConfigError("phantom blob " + std::to_string(bi) +
                          " narrower than one pixel (sigma " + std::to_string(sig) + " mm)");
      double cx = b.cx.eval(t, t_card), cy = b.cy.eval(t, t_card);
      if (std::abs(cx) > fov / 2 || std::abs(cy) > fov / 2)
        throw ConfigError("phantom blob " + std::to_string(bi) + " leaves the FOV");
    }
  }
}

cplx CoilMaps::eval(int j, double x, double y) const {
  if (uniform[j]) return gain[j];
  double dx = x - mu_x[j], dy = y - mu_y[j];
  return gain[j] * std::exp(-(dx * dx + dy * dy) / (2.0 * tau[j] * tau[j]));
}

std::vector<ComplexImage> CoilMaps::rasterize(const GridSpec& g) const {
  std::vector<ComplexImage> out;
  out.reserve(n_coils());
  for (int j = 0; j < n_coils(); ++j) {
    ComplexImage img(g);
    for (int ix = 0; ix < g.nx; ++ix)
      for (int iy = 0; iy < g.ny; ++iy) img.at(ix, iy) = eval(j, g.x(ix), g.y(iy));
    out.push_back(std::move(img));
  }
  return out;
}

cplx eval_phantom(const PhantomSpec& spec, double t, double x, double y) {
  cplx v = 0.0;
  for (const Blob& b : spec.blobs) {
    double cx = b.cx.eval(t, spec.t_card);
    double cy = b.cy.eval(t, spec.t_card);
    double sig = b.sigma.eval(t, spec.t_card);
    double dx = x - cx, dy = y - cy;
    v += b.amplitude * std::exp(-(dx * dx + dy * dy) / (2.0 * sig * sig));
  }
  return v;
}

ComplexImage render_frame(const PhantomSpec& spec, double t, const GridSpec& grid) {
  if (!std::isfinite(t)) throw NumericError("render_frame: non-finite time");
  grid.validate();
  ComplexImage img(grid);
  for (int ix = 0; ix < grid.nx; ++ix) {
    double x = grid.x(ix);
    for (int iy = 0; iy < grid.ny; ++iy) img.at(ix, iy) = eval_phantom(spec, t, x, grid.y(iy));
  }
  return img;
}

std::vector<std::vector<cplx>> analytic_kspace(const PhantomSpec& spec,
                                               const CoilMaps& coils, double t,
                                               const std::vector<std::pair<double, double>>& k_points) {
  if (!coils.analytic())
    throw ConfigError("analytic_kspace requires coil maps in analytic form");
  const size_t nk = k_points.size();
  std::vector<std::vector<cplx>> out(coils.n_coils(), std::vector<cplx>(nk, cplx(0.0)));

  for (const Blob& b : spec.blobs) {
    double cx = b.cx.eval(t, spec.t_card);
    double cy = b.cy.eval(t, spec.t_card);
    double sig = b.sigma.eval(t, spec.t_card);
    double s2 = sig * sig;

    for (int j = 0; j < coils.n_coils(); ++j) {
      // Product of blob Gaussian and coil Gaussian is a Gaussian with
      // variance sp2, center (cpx,cpy), amplitude factor K.
      double sp2, cpx, cpy, K;
      if (coils.uniform[j]) {
        sp2 = s2;
        cpx = cx;
        cpy = cy;
        K = 1.0;
      } else {
        double t2 = coils.tau[j] * coils.tau[j];
        sp2 = s2 * t2 / (s2 + t2);
        cpx = sp2 * (cx / s2 + coils.mu_x[j] / t2);
        cpy = sp2 * (cy / s2 + coils.mu_y[j] / t2);
        double q = (cx * cx + cy * cy) / (2 * s2) +
                   (coils.mu_x[j] * coils.mu_x[j] + coils.mu_y[j] * coils.mu_y[j]) / (2 * t2) -
                   (cpx * cpx + cpy * cpy) / (2 * sp2);
        K = std::exp(-q);
      }
      cplx amp = b.amplitude * coils.gain[j] * K * (2.0 * kPi * sp2);
      for (size_t m = 0; m < nk; ++m) {
        double kx = k_points[m].first, ky = k_points[m].second;
        double k2 = kx * kx + ky * ky;
        double ph = -2.0 * kPi * (kx * cpx + ky * cpy);
        out[j][m] += amp * std::exp(-2.0 * kPi * kPi * sp2 * k2) * cplx(std::cos(ph), std::sin(ph));
      }
    }
  }
  return out;
}

CoilMaps make_coil_maps(int n_coils, const GridSpec& grid, uint64_t seed) {
  if (n_coils < 1) throw ConfigError("n_coils must be >= 1");
  CoilMaps cm;
  if (n_coils == 1) {
    cm.gain = {cplx(1.0, 0.0)};
    cm.mu_x = {0.0};
    cm.mu_y = {0.0};
    cm.tau = {0.0};
    cm.uniform = {1};
    return cm;
  }
  auto rng = make_rng(seed, "coils");
  std::uniform_real_distribution<double> jit(-1.0, 1.0);
  double R = 0.55 * grid.fov;
  for (int j = 0; j < n_coils; ++j) {
    double ang = 2.0 * kPi * j / n_coils + 0.15 * jit(rng);
    double mag = 1.0 + 0.1 * jit(rng);
    double phase = 2.0 * kPi * j / n_coils + 0.3 * jit(rng);
    cm.gain.push_back(mag * cplx(std::cos(phase), std::sin(phase)));
    cm.mu_x.push_back(R * std::cos(ang));
    cm.mu_y.push_back(R * std::sin(ang));
    cm.tau.push_back(0.6 * grid.fov * (1.0 + 0.05 * jit(rng)));
    cm.uniform.push_back(0);
  }
  return cm;
}

PhantomSpec make_default_phantom() {
  PhantomSpec p;
  p.t_card = 0.8;

  // Contracting "ventricle": sigma 12 -/+ 3 mm with a mild 2nd harmonic,
  // small centroid wobble. Systole (min sigma) at t = 0 mod t_card.
  Blob ventricle;
  ventricle.amplitude = cplx(1.0, 0.0);
  ventricle.cx = FourierSeries{-20.0, {0.0}, {2.0}};
  ventricle.cy = FourierSeries{5.0, {1.5, 0.0}, {0.0, 0.5}};
  ventricle.sigma = FourierSeries{12.0, {-3.0, 0.0}, {0.0, 0.8}};
  p.blobs.push_back(ventricle);

  // Static "septum" with a constant phase tilt.
  Blob septum;
  septum.amplitude = 0.55 * cplx(std::cos(0.3), std::sin(0.3));
  septum.cx = FourierSeries::constant(25.0);
  septum.cy = FourierSeries::constant(-10.0);
  septum.sigma = FourierSeries::constant(25.0);
  p.blobs.push_back(septum);

  // Small orbiting feature (valve-like bright spot).
  Blob orbiter;
  orbiter.amplitude = 0.7 * cplx(std::cos(-0.5), std::sin(-0.5));
  orbiter.cx = FourierSeries{10.0, {6.0}, {0.0}};
  orbiter.cy = FourierSeries{35.0, {0.0}, {6.0}};
  orbiter.sigma = FourierSeries::constant(5.0);
  p.blobs.push_back(orbiter);

  // Broad static background so the scene fills the FOV.
  Blob body;
  body.amplitude = cplx(0.25, 0.0);
  body.cx = FourierSeries::constant(0.0);
  body.cy = FourierSeries::constant(0.0);
  body.sigma = FourierSeries::constant(60.0);
  p.blobs.push_back(body);
  return p;
}

}  // namespace dynrad::phantom
