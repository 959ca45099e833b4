#pragma once
// Centered 1D FFTs, the Fourier-slice forward operator (continuous image ->
// one k-space spoke via projection + 1D FFT), the brute-force DTFT oracle,
// and the exact direct radial forward/adjoint pair used for initialization
// and baselines.
//
// Conventions (verified by the adjoint-identity and oracle tests):
//   fft1_centered:  X_k = sum_n v_n exp(-2*pi*i (n-M/2)(k-M/2)/M), M even,
//                   forward unnormalized, inverse divides by M; DC at M/2.
//   dtft forward:   y(k) = dx^2 * sum_pixels img(r) exp(-2*pi*i k.r).
//   adjoint:        x(r) = dx^2 * sum_coils conj(S_c(r)) sum_m d_m y exp(+2*pi*i k.r)
//                   (exact Hermitian adjoint of the forward when d == 1).

#include <memory>
#include <vector>

#include "dynrad/common.hpp"
#include "dynrad/phantom.hpp"
#include "dynrad/trajectory.hpp"

namespace dynrad::fourier {

// Centered DFT as a precomputed dense matrix; exact (integer-mod twiddles),
// symmetric, so the adjoint is the elementwise conjugate.
struct CentredDft {
  int M = 0;
  std::vector<cplx> tw;   // tw[j] = exp(-2*pi*i j/M)
  std::vector<int> idx;   // idx[k*M+n] = ((n-M/2)(k-M/2)) mod M

  explicit CentredDft(int M);
  void apply(const cplx* v, cplx* out) const;          // out = F v
  void apply_conj(const cplx* g, cplx* out) const;     // out = conj(F) g = F^H g
};

std::vector<cplx> fft1_centered(const std::vector<cplx>& v);
std::vector<cplx> ifft1_centered(const std::vector<cplx>& X);

// Evaluation contract for continuously samplable images. query must be
// thread-safe for concurrent reads, deterministic, and zero outside the FOV.
struct SamplableImage {
  virtual ~SamplableImage() = default;
  virtual cplx query(double x, double y) const = 0;
};

// Bilinear interpolation of a ComplexImage (pixel-center convention), zero
// outside the FOV square.
struct BilinearImage final : SamplableImage {
  const ComplexImage& img;
  explicit BilinearImage(const ComplexImage& i) : img(i) {}
  cplx query(double x, double y) const override;
};

struct FunctionImage final : SamplableImage {
  std::function<cplx(double, double)> f;
  double half_fov;
  FunctionImage(std::function<cplx(double, double)> fn, double fov)
      : f(std::move(fn)), half_fov(fov / 2) {}
  cplx query(double x, double y) const override {
    if (std::abs(x) > half_fov || std::abs(y) > half_fov) return 0.0;
    return f(x, y);
  }
};

// The M'xM' pixel lattice rotated by a spoke's angle about the FOV center
// (M' = M * oversample, spacing fov/M'), with out-of-FOV points dropped.
// Point list is sorted by readout index a then transverse index b.
struct RotatedLattice {
  int M = 0;           // readout length of the target spoke
  int Mp = 0;          // lattice edge (M * oversample)
  double dp = 0.0;     // lattice spacing fov/Mp
  std::vector<int> a;  // readout index per kept point, in [0, Mp)
  std::vector<double> x, y;  // mm coordinates per kept point

  RotatedLattice(const traj::SpokeGeometry& s, const GridSpec& grid, int oversample = 1);
  size_t n_points() const { return a.size(); }
};

// Projection of img onto the spoke direction (sum across the lattice, times
// dp), then centered DFT times dp. With oversample > 1 the central M samples
// of the longer transform are returned (same dk; replicas pushed out).
std::vector<cplx> fourier_slice_forward(const SamplableImage& img,
                                        const traj::SpokeGeometry& spoke,
                                        const GridSpec& grid, int oversample = 1);

// Shared inner stage: accumulate projection from per-point values, then DFT.
// vals[i] corresponds to lattice point i. Used by both fourier_slice_forward
// and the training loss so the two agree by construction.
void project_and_fft(const RotatedLattice& lat, const CentredDft& dft,
                     const cplx* vals, cplx* spoke_out /* length lat.M */);

// Brute-force DTFT of a gridded image at arbitrary k-points.
std::vector<cplx> dtft_oracle(const ComplexImage& img,
                              const std::vector<std::pair<double, double>>& k_points);

// Exact forward A: per spoke in `spokes`, per coil, y[m] = dx^2 * sum_r
// S_c(r) x(r) exp(-2*pi*i k_m.r). Geometric-recurrence implementation.
// coils are rasterized on x's grid. Returns [n_spokes][n_coils][M].
std::vector<std::vector<std::vector<cplx>>> radial_forward(
    const ComplexImage& x, const std::vector<ComplexImage>& coil_rasters,
    const std::vector<traj::SpokeGeometry>& spokes);

// Lightweight view of a subset of a SpokeSet's spokes.
struct SpokeSetView {
  const traj::SpokeSet* set = nullptr;
  std::vector<int> indices;  // spoke indices into *set

  static SpokeSetView all(const traj::SpokeSet& s);
  static SpokeSetView of(const traj::SpokeSet& s, std::vector<int> idx);
};

// Exact adjoint with diagonal density weights d (length M, applied per
// sample): coil-combined image on `grid`, x(r) = dx^2 sum_c conj(S_c(r))
// sum_{spokes in view} sum_m d_m y exp(+2*pi*i k_m.r).
ComplexImage adjoint_radial(const SpokeSetView& view, const std::vector<double>& dcf,
                            const phantom::CoilMaps& coils, const GridSpec& grid);

}  // namespace dynrad::fourier
